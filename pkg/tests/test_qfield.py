from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genforms.qfield import QuadField, format_element, is_squarefree, norm, trace

FIELDS = [QuadField(d) for d in (2, 3, 5, 6, 7, 10, 13, -1, -3, -7)]
rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def elements(draw, field=None):
    K = field or draw(st.sampled_from(FIELDS))
    return K(draw(rats), draw(rats))


@st.composite
def element_pairs(draw):
    K = draw(st.sampled_from(FIELDS))
    return draw(elements(K)), draw(elements(K)), draw(elements(K))


def test_products():
    assert QuadField(2)(0, 1) * QuadField(2)(0, 1) == QuadField(2)(2, 0)
    assert QuadField(5)(0, 1) * QuadField(5)(0, 1) == QuadField(5)(1, 1)
    assert QuadField(3)(1, 1) * QuadField(3)(1, -1) == QuadField(3)(-2, 0)


def test_conjugation():
    assert QuadField(2)(3, 2).conj() == QuadField(2)(3, -2)
    assert QuadField(5)(0, 1).conj() == QuadField(5)(1, -1)
    for K in FIELDS:
        assert K(Fraction(7, 3)).conj() == K(Fraction(7, 3))


def test_trace_and_norm():
    assert trace(QuadField(5)(3, 2)) == 8
    assert trace(QuadField(2)(0, 1)) == 0
    assert trace(QuadField(7)(1, 3)) == 2
    assert norm(QuadField(2)(1, 1)) == -1
    assert norm(QuadField(5)(0, 1)) == -1
    assert norm(QuadField(3)(2, 1)) == 1


def test_parse():
    assert QuadField(5).parse("3-1w") == QuadField(5)(3, -1)
    assert QuadField(3).parse("1/2+1/2w") == QuadField(3)(Fraction(1, 2), Fraction(1, 2))
    assert QuadField(2).parse("w") == QuadField(2)(0, 1)
    assert QuadField(2).parse("-w") == QuadField(2)(0, -1)
    with pytest.raises(ValueError):
        QuadField(2).parse("1+")


def test_field_validation():
    for bad in (0, 1, 4, 12, -4):
        with pytest.raises(ValueError):
            QuadField(bad)
    assert is_squarefree(30) and not is_squarefree(18)


def test_integrality():
    assert QuadField(5)(0, 1).is_integral
    assert not QuadField(5)(Fraction(1, 2), 0).is_integral
    # (1 + sqrt 3)/2 is not an algebraic integer
    assert not (QuadField(3)(1, 1) * Fraction(1, 2)).is_integral
    assert QuadField(5).sqrt_d() * QuadField(5).sqrt_d() == QuadField(5)(5, 0)


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        QuadField(2)(1, 1) + QuadField(3)(1, 1)


@given(element_pairs())
def test_ring_axioms(triple):
    a, b, c = triple
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(element_pairs())
def test_conj_is_automorphism(triple):
    a, b, _ = triple
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    assert norm(a * b) == norm(a) * norm(b)
    assert trace(a) == (a + a.conj()).rational()
    assert norm(a) == (a * a.conj()).rational()


@given(elements())
def test_inverse_and_format(a):
    if a:
        assert a * a.inverse() == a.field.one()
    assert a.field.parse(format_element(a)) == a
