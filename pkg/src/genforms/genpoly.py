"""Generalized polynomials in z_1..z_n and their conjugates tau(z_1)..tau(z_n).

A GenPoly is a sparse map (i, j) -> coefficient of z^i * tau(z)^j, with i and j
multi-indices. Q-valued polynomials can be rewritten as ordinary rational
polynomials in u_r = z_r + tau(z_r) and v_r = sqrt(D)(z_r - tau(z_r)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

from .qfield import FieldElement, QuadField

MultiIndex = tuple[int, ...]
Key = tuple[MultiIndex, MultiIndex]


class NotQValuedError(ValueError):
    pass


def total_degree(i: MultiIndex) -> int:
    return sum(i)


def _add_exp(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True, eq=False)
class GenPoly:
    n: int
    field: QuadField
    coeffs: Mapping[Key, FieldElement] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: dict[Key, FieldElement] = {}
        for (i, j), c in self.coeffs.items():
            i, j = tuple(i), tuple(j)
            if len(i) != self.n or len(j) != self.n or min(i + j, default=0) < 0:
                raise ValueError(f"bad multi-index pair {(i, j)} for n={self.n}")
            if not isinstance(c, FieldElement):
                c = self.field(c)
            elif c.field != self.field:
                raise ValueError("coefficient from a different field")
            if c:
                clean[(i, j)] = clean.get((i, j), self.field.zero()) + c
        object.__setattr__(self, "coeffs", {k: v for k, v in sorted(clean.items()) if v})

    @classmethod
    def monomial(cls, field: QuadField, i: Sequence[int], j: Sequence[int],
                 coeff: FieldElement | int | Fraction = 1) -> GenPoly:
        return cls(len(i), field, {(tuple(i), tuple(j)): coeff})

    @classmethod
    def variable(cls, field: QuadField, n: int, r: int, conjugate: bool = False) -> GenPoly:
        e = tuple(1 if s == r else 0 for s in range(n))
        zero = (0,) * n
        return cls.monomial(field, zero if conjugate else e, e if conjugate else zero)

    @classmethod
    def constant(cls, field: QuadField, n: int, c: FieldElement | int | Fraction) -> GenPoly:
        zero = (0,) * n
        return cls(n, field, {(zero, zero): c})

    @property
    def degree(self) -> int:
        return max((total_degree(i) + total_degree(j) for i, j in self.coeffs), default=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GenPoly):
            return NotImplemented
        return self.n == other.n and self.field == other.field and self.coeffs == other.coeffs

    def _check(self, other: GenPoly) -> None:
        if self.n != other.n or self.field != other.field:
            raise ValueError("arity or field mismatch")

    def __add__(self, other: GenPoly) -> GenPoly:
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, self.field.zero()) + c
        return GenPoly(self.n, self.field, out)

    def __neg__(self) -> GenPoly:
        return GenPoly(self.n, self.field, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: GenPoly) -> GenPoly:
        return self + (-other)

    def scale(self, c: FieldElement | int | Fraction) -> GenPoly:
        return GenPoly(self.n, self.field, {k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, other: GenPoly | FieldElement | int | Fraction) -> GenPoly:
        if not isinstance(other, GenPoly):
            return self.scale(other)
        self._check(other)
        out: dict[Key, FieldElement] = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                k = (_add_exp(i1, i2), _add_exp(j1, j2))
                out[k] = out.get(k, self.field.zero()) + c1 * c2
        return GenPoly(self.n, self.field, out)

    __rmul__ = __mul__

    def conj(self) -> GenPoly:
        """The polynomial tau(g): swap the roles of z and tau(z) and conjugate coefficients."""
        return GenPoly(self.n, self.field, {(j, i): c.conj() for (i, j), c in self.coeffs.items()})

    def __repr__(self) -> str:
        terms = ", ".join(f"{i}|{j}: {c}" for (i, j), c in self.coeffs.items())
        return f"GenPoly(n={self.n}, D={self.field.D}, {{{terms}}})"


def eval(g: GenPoly, point: Sequence[FieldElement]) -> FieldElement:
    """Exact value of sum alpha_ij a^i tau(a)^j."""
    if len(point) != g.n:
        raise ValueError(f"expected {g.n} coordinates, got {len(point)}")
    for a in point:
        if a.field != g.field:
            raise ValueError("point lies in a different field")
    conjs = [a.conj() for a in point]
    total = g.field.zero()
    for (i, j), c in g.coeffs.items():
        term = c
        for r in range(g.n):
            if i[r]:
                term = term * point[r] ** i[r]
            if j[r]:
                term = term * conjs[r] ** j[r]
        total = total + term
    return total


def is_q_valued(g: GenPoly) -> bool:
    """alpha_ji == tau(alpha_ij) for every stored key (missing keys are zero)."""
    zero = g.field.zero()
    for (i, j), c in g.coeffs.items():
        if g.coeffs.get((j, i), zero) != c.conj():
            return False
    return True


def basis_decompose(g: GenPoly) -> dict[Key, tuple[Fraction, Fraction]]:
    """Coordinates of g in the basis g_ij.

    For i < j the pair (a, b) means a*g_ij + b*g_ji where
    g_ij = z^i tau(z)^j + tau(z)^i z^j and g_ji = sqrt(D)(z^i tau(z)^j - tau(z)^i z^j).
    For i == j the pair is (a, 0) with g_ii = z^i tau(z)^i.
    """
    if not is_q_valued(g):
        raise NotQValuedError("polynomial is not Q-valued")
    out: dict[Key, tuple[Fraction, Fraction]] = {}
    for (i, j), c in g.coeffs.items():
        if i < j:
            r, s = c.sqrt_coords()
            out[(i, j)] = (r, s)
        elif i == j:
            out[(i, j)] = (c.rational(), Fraction(0))
    return dict(sorted(out.items()))


def from_basis(field: QuadField, n: int, coords: Mapping[Key, tuple[Fraction, Fraction]]) -> GenPoly:
    """Rebuild a GenPoly from basis_decompose output."""
    sq = field.sqrt_d()
    out: dict[Key, FieldElement] = {}
    for (i, j), (a, b) in coords.items():
        if i == j:
            if b:
                raise ValueError("diagonal basis element carries no sqrt(D) part")
            out[(i, j)] = out.get((i, j), field.zero()) + a
            continue
        if not i < j:
            raise ValueError(f"basis key {(i, j)} must satisfy i <= j")
        c = a + b * sq
        out[(i, j)] = out.get((i, j), field.zero()) + c
        out[(j, i)] = out.get((j, i), field.zero()) + c.conj()
    return GenPoly(n, field, out)


# -- generator polynomials -------------------------------------------------

Exponent = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class GeneratorPoly:
    """Rational polynomial in (u_1, v_1, ..., u_n, v_n)."""

    n: int
    coeffs: Mapping[Exponent, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: dict[Exponent, Fraction] = {}
        for e, c in self.coeffs.items():
            if len(e) != 2 * self.n:
                raise ValueError(f"exponent {e} has wrong length for n={self.n}")
            c = Fraction(c)
            if c:
                clean[tuple(e)] = clean.get(tuple(e), Fraction(0)) + c
        object.__setattr__(self, "coeffs", {k: v for k, v in sorted(clean.items()) if v})

    @classmethod
    def const(cls, n: int, c: int | Fraction) -> GeneratorPoly:
        return cls(n, {(0,) * (2 * n): Fraction(c)})

    @classmethod
    def gen(cls, n: int, r: int, which: str) -> GeneratorPoly:
        """u_r (which='u') or v_r (which='v'), r zero-based."""
        e = [0] * (2 * n)
        e[2 * r + (0 if which == "u" else 1)] = 1
        return cls(n, {tuple(e): Fraction(1)})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GeneratorPoly):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __add__(self, other: GeneratorPoly) -> GeneratorPoly:
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return GeneratorPoly(self.n, out)

    def __neg__(self) -> GeneratorPoly:
        return GeneratorPoly(self.n, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: GeneratorPoly) -> GeneratorPoly:
        return self + (-other)

    def __mul__(self, other: GeneratorPoly | int | Fraction) -> GeneratorPoly:
        if not isinstance(other, GeneratorPoly):
            c = Fraction(other)
            return GeneratorPoly(self.n, {e: v * c for e, v in self.coeffs.items()})
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = _add_exp(e1, e2)
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return GeneratorPoly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> GeneratorPoly:
        result = GeneratorPoly.const(self.n, 1)
        for _ in range(k):
            result = result * self
        return result

    def embed(self, n: int, r: int) -> GeneratorPoly:
        """Move a one-variable polynomial (n=1) to slot r of an n-variable ring."""
        if self.n != 1:
            raise ValueError("embed expects a one-variable polynomial")
        out = {}
        for (a, b), c in self.coeffs.items():
            e = [0] * (2 * n)
            e[2 * r], e[2 * r + 1] = a, b
            out[tuple(e)] = c
        return GeneratorPoly(n, out)

    def evaluate(self, values: Sequence[Fraction]) -> Fraction:
        """Evaluate at explicit (u_1, v_1, ..., u_n, v_n)."""
        total = Fraction(0)
        for e, c in self.coeffs.items():
            term = c
            for val, k in zip(values, e):
                if k:
                    term *= val ** k
            total += term
        return total

    def eval_at(self, point: Sequence[FieldElement]) -> Fraction:
        """Evaluate with u_r = z_r + tau(z_r) and v_r = sqrt(D)(z_r - tau(z_r))."""
        if len(point) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(point)}")
        vals: list[Fraction] = []
        for a in point:
            sq = a.field.sqrt_d()
            vals.append(a.trace())
            vals.append((sq * (a - a.conj())).rational())
        return self.evaluate(vals)

    def to_genpoly(self, field: QuadField) -> GenPoly:
        """Substitute the generators back, yielding a GenPoly over the given field."""
        n = self.n
        sq = field.sqrt_d()
        us = [GenPoly.variable(field, n, r) + GenPoly.variable(field, n, r, True) for r in range(n)]
        vs = [(GenPoly.variable(field, n, r) - GenPoly.variable(field, n, r, True)).scale(sq)
              for r in range(n)]
        total = GenPoly(n, field, {})
        for e, c in self.coeffs.items():
            term = GenPoly.constant(field, n, c)
            for r in range(n):
                for _ in range(e[2 * r]):
                    term = term * us[r]
                for _ in range(e[2 * r + 1]):
                    term = term * vs[r]
            total = total + term
        return total

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}*{_mono_str(e)}" for e, c in self.coeffs.items()) or "0"
        return f"GeneratorPoly({terms})"

    def __str__(self) -> str:
        return " + ".join(f"({c})*{_mono_str(e)}" for e, c in self.coeffs.items()) or "0"


def _mono_str(e: Exponent) -> str:
    parts = []
    for k, p in enumerate(e):
        if p:
            name = f"{'uv'[k % 2]}{k // 2 + 1}"
            parts.append(name if p == 1 else f"{name}^{p}")
    return "*".join(parts) or "1"


# One-variable building blocks. Everything below works in the ring Q[u, v]
# of a single variable; D enters only through 1/D.

def _one_var_norm(D: int) -> GeneratorPoly:
    # z tau(z) = (u^2 - v^2/D)/4
    u = GeneratorPoly.gen(1, 0, "u")
    v = GeneratorPoly.gen(1, 0, "v")
    return (u * u - v * v * Fraction(1, D)) * Fraction(1, 4)


@lru_cache(maxsize=None)
def _sym_power(D: int, d: int) -> GeneratorPoly:
    """z^d + tau(z)^d = u^d - z tau(z) * r1, r1 = sum_{i=1}^{d-1} C(d,i) z^(i-1) tau(z)^(d-i-1)."""
    if d == 0:
        return GeneratorPoly.const(1, 2)
    u = GeneratorPoly.gen(1, 0, "u")
    if d == 1:
        return u
    return u ** d - _one_var_norm(D) * _sym_sum(D, d - 2, lambda i: comb(d, i + 1))


@lru_cache(maxsize=None)
def _alt_power(D: int, d: int) -> GeneratorPoly:
    """sqrt(D)(z^d - tau(z)^d) = v * r2, r2 = sum_{i=0}^{d-1} z^(d-1-i) tau(z)^i."""
    if d == 0:
        return GeneratorPoly.const(1, 0)
    v = GeneratorPoly.gen(1, 0, "v")
    return v * _sym_sum(D, d - 1, lambda i: 1)


def _sym_sum(D: int, m: int, weight) -> GeneratorPoly:
    """Rewrite sum_{i=0}^{m} weight(i) z^i tau(z)^(m-i) when weight(i) == weight(m-i).

    Conjugate terms pair up as (z tau z)^i (z^(m-2i) + tau(z)^(m-2i)); a middle term is a pure norm power.
    """
    nrm = _one_var_norm(D)
    total = GeneratorPoly.const(1, 0)
    for i in range(m // 2 + 1):
        w = weight(i)
        if 2 * i == m:
            total = total + nrm ** i * w
        else:
            total = total + nrm ** i * _sym_power(D, m - 2 * i) * w
    return total


def _one_var_pair(D: int, i: int, j: int) -> tuple[GeneratorPoly, GeneratorPoly]:
    """(m + tau m, sqrt(D)(m - tau m)) for m = z^i tau(z)^j."""
    k = min(i, j)
    d = abs(i - j)
    nk = _one_var_norm(D) ** k
    s = _sym_power(D, d)
    a = _alt_power(D, d)
    if i < j:
        a = -a
    return nk * s, nk * a


def _pair(D: int, n: int, i: MultiIndex, j: MultiIndex) -> tuple[GeneratorPoly, GeneratorPoly]:
    """(m + tau m, sqrt(D)(m - tau m)) for the monomial m = z^i tau(z)^j.

    Peels off the last variable that occurs: with m = m_r * h,
      m + tau m = (S(m_r) S(h) + A(m_r) A(h) / D) / 2,
      sqrt(D)(m - tau m) = (A(m_r) S(h) + S(m_r) A(h)) / 2.
    """
    support = [r for r in range(n) if i[r] or j[r]]
    if not support:
        return GeneratorPoly.const(n, 2), GeneratorPoly.const(n, 0)
    r = support[-1]
    s_r, a_r = _one_var_pair(D, i[r], j[r])
    s_r, a_r = s_r.embed(n, r), a_r.embed(n, r)
    if len(support) == 1:
        return s_r, a_r
    hi = i[:r] + (0,) + i[r + 1:]
    hj = j[:r] + (0,) + j[r + 1:]
    s_h, a_h = _pair(D, n, hi, hj)
    half = Fraction(1, 2)
    s = (s_r * s_h + a_r * a_h * Fraction(1, D)) * half
    a = (a_r * s_h + s_r * a_h) * half
    return s, a


def rewrite_in_generators(g: GenPoly) -> GeneratorPoly:
    """Express a Q-valued g as a rational polynomial in u_r and v_r."""
    coords = basis_decompose(g)
    D, n = g.field.D, g.n
    total = GeneratorPoly.const(n, 0)
    for (i, j), (a, b) in coords.items():
        s, alt = _pair(D, n, i, j)
        if i == j:
            # g_ii = z^i tau(z)^i is half of m + tau(m)
            total = total + s * (a / 2)
        else:
            total = total + s * a + alt * b
    return total


def from_terms(field: QuadField, n: int, terms: Iterable[tuple[Sequence[int], Sequence[int], FieldElement]]) -> GenPoly:
    return GenPoly(n, field, {(tuple(i), tuple(j)): c for i, j, c in terms})


def parse_genpoly(data: Mapping, field: QuadField | None = None) -> GenPoly:
    """Load {"D": int, "n": int, "terms": [{"i": [...], "j": [...], "c": elem-text}, ...]}."""
    f = field or QuadField(int(data["D"]))
    n = int(data["n"])
    coeffs: dict[Key, FieldElement] = {}
    for t in data["terms"]:
        k = (tuple(int(x) for x in t["i"]), tuple(int(x) for x in t["j"]))
        c = f.parse(str(t["c"]))
        coeffs[k] = coeffs.get(k, f.zero()) + c
    return GenPoly(n, f, coeffs)
