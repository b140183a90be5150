from __future__ import annotations

from fractions import Fraction

import pytest

from genforms.classify import four_var_form
from genforms.genform import (BinarySextuple, GenQuadForm, Integrality, classify_integrality, eval_form, form_from_json,
                              form_to_json, from_sextuple, gram_matrix_G, is_z_valued, to_sextuple)
from genforms.qfield import QuadField

K2 = QuadField(2)


def sext(D: int, items: str) -> GenQuadForm:
    return from_sextuple(BinarySextuple.parse(items.split(","), QuadField(D)))


G2 = sext(2, "1,-1w,1,-1,0,-1")
INTRO = GenQuadForm.create(K2, 2, alpha={(0, 0): 1, (1, 1): 1}, beta={(0, 0): -1, (1, 1): 1})


def test_gram_matrix_of_norm_form():
    K = QuadField(3)
    G = GenQuadForm.create(K, 1, beta={(0, 0): 1})
    half = K(Fraction(1, 2))
    assert gram_matrix_G(G) == [[K(0), half], [half, K(0)]]


def test_gram_matrix_of_witness_d2():
    M = gram_matrix_G(G2)
    assert M[0][0] == K2(1) and M[0][1] == K2(0, Fraction(-1, 2))
    assert M[0][2] == K2(Fraction(-1, 2)) and M[0][3] == K2(0)
    # Hermitian-style symmetry: the tau block is the conjugate of the z block
    assert M[2][3] == M[0][1].conj()


def test_eval_form():
    assert eval_form(INTRO, [K2(1), K2(1)]) == 4
    assert eval_form(INTRO, [K2(1), K2(0)]) == 1
    assert eval_form(G2, [K2(1), K2(1)]) == 2
    Q = four_var_form(2)
    assert eval_form(Q, [K2(1)] * 4) == 4
    with pytest.raises(ValueError):
        eval_form(INTRO, [K2(1)])


def test_classify_integrality():
    assert classify_integrality(sext(5, "3-1w,0,1,-4,0,0")) is Integrality.CLASSICAL
    assert classify_integrality(sext(7, "3,1+2w,4,-5,-1+2w,3")) is Integrality.INTEGRAL
    assert classify_integrality(sext(2, "1/2,0,1,0,0,0")) is Integrality.NONINTEGRAL


def test_sextuples():
    K = QuadField(3)
    G3 = sext(3, "2,-2w,2,-3,-1w,0")
    assert G3.a(0, 1) == K(0, -2) and G3.b(0, 0) == K(-3) and G3.b(0, 1) == K(0, -1)
    assert G3.b(1, 0) == K(0, 1)
    for D in (2, 5):
        G = sext(D, "0,0,0,1,0,1")
        assert G.alpha == {} and G.beta == {(0, 0): QuadField(D)(1), (1, 1): QuadField(D)(1)}
    assert from_sextuple(to_sextuple(G3)) == G3


def test_z_valued():
    assert is_z_valued(G2)
    assert is_z_valued(GenQuadForm.create(QuadField(7), 1, beta={(0, 0): 1}))
    assert not is_z_valued(GenQuadForm.create(K2, 1, beta={(0, 0): Fraction(1, 2)}))
    # half trace of w^2 is 3/2 in Q(sqrt 5)
    assert not is_z_valued(GenQuadForm.create(QuadField(5), 1, alpha={(0, 0): Fraction(1, 2)}))


def test_create_validation():
    with pytest.raises(ValueError):
        GenQuadForm.create(K2, 1, beta={(0, 0): K2(0, 1)})
    with pytest.raises(ValueError):
        GenQuadForm.create(K2, 2, beta={(0, 1): K2(1, 1), (1, 0): K2(1, 1)})
    with pytest.raises(ValueError):
        GenQuadForm.create(K2, 1, alpha={(0, 1): 1})
    with pytest.raises(ValueError):
        GenQuadForm.create(K2, 1, alpha={(0, 0): K2(1, 1)}, gamma={(0, 0): K2(1, 1)})


def test_json_round_trip():
    G = sext(10, "3,1w,5+1w,-5,1w,7")
    assert form_from_json(form_to_json(G)) == G
    assert form_from_json({"D": 2, "sextuple": ["1", "-1w", "1", "-1", "0", "-1"]}) == G2
    data = form_to_json(G)
    assert "1,2" in data["alpha"]  # keys are one-based
