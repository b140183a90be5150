"""Generalized quadratic forms

    G = sum_{i<=j} alpha_ij z_i z_j + sum_{i,j} beta_ij z_i tau(z_j) + sum_{i<=j} gamma_ij tau(z_i) tau(z_j)

with the Q-valued closure gamma_ij = tau(alpha_ij), beta_ji = tau(beta_ij) built in.
Indices are zero-based in the API and one-based in the JSON text format.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .genpoly import GenPoly
from .qfield import FieldElement, QuadField

Pair = tuple[int, int]


class Integrality(enum.Enum):
    NONINTEGRAL = "NONINTEGRAL"
    INTEGRAL = "INTEGRAL"
    CLASSICAL = "CLASSICAL"


@dataclass(frozen=True, eq=False)
class GenQuadForm:
    field: QuadField
    n: int
    alpha: Mapping[Pair, FieldElement]
    beta: Mapping[Pair, FieldElement]

    @classmethod
    def create(cls, field: QuadField, n: int,
               alpha: Mapping[Pair, FieldElement | int | Fraction] | None = None,
               beta: Mapping[Pair, FieldElement | int | Fraction] | None = None,
               gamma: Mapping[Pair, FieldElement | int | Fraction] | None = None) -> GenQuadForm:
        """Build a form, completing beta by conjugation and rejecting inconsistent input."""

        def elem(c) -> FieldElement:
            if isinstance(c, FieldElement):
                if c.field != field:
                    raise ValueError("coefficient from a different field")
                return c
            return field(c)

        a: dict[Pair, FieldElement] = {}
        for (i, j), c in (alpha or {}).items():
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"alpha index {(i, j)} out of range")
            key = (min(i, j), max(i, j))
            a[key] = a.get(key, field.zero()) + elem(c)
        b: dict[Pair, FieldElement] = {}
        for (i, j), c in (beta or {}).items():
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"beta index {(i, j)} out of range")
            b[(i, j)] = elem(c)
        for i in range(n):
            if not b.get((i, i), field.zero()).is_rational:
                raise ValueError(f"beta_{i + 1}{i + 1} must be rational")
            for j in range(i + 1, n):
                bij, bji = b.get((i, j)), b.get((j, i))
                if bij is not None and bji is not None and bji != bij.conj():
                    raise ValueError(f"beta_{j + 1}{i + 1} is not the conjugate of beta_{i + 1}{j + 1}")
                if bij is None and bji is not None:
                    b[(i, j)] = bji.conj()
                elif bij is not None and bji is None:
                    b[(j, i)] = bij.conj()
        for (i, j), c in (gamma or {}).items():
            key = (min(i, j), max(i, j))
            if elem(c) != a.get(key, field.zero()).conj():
                raise ValueError(f"gamma_{key[0] + 1}{key[1] + 1} is not the conjugate of alpha")
        a = {k: v for k, v in sorted(a.items()) if v}
        b = {k: v for k, v in sorted(b.items()) if v}
        return cls(field, n, a, b)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GenQuadForm):
            return NotImplemented
        return (self.field, self.n, dict(self.alpha), dict(self.beta)) == (other.field, other.n, dict(other.alpha), dict(other.beta))

    __hash__ = None  # type: ignore[assignment]

    def a(self, i: int, j: int) -> FieldElement:
        return self.alpha.get((min(i, j), max(i, j)), self.field.zero())

    def b(self, i: int, j: int) -> FieldElement:
        return self.beta.get((i, j), self.field.zero())

    def c(self, i: int, j: int) -> FieldElement:
        return self.a(i, j).conj()

    def coefficients(self):
        """All stored coefficients alpha, beta (gamma is derived)."""
        return list(self.alpha.values()) + list(self.beta.values())

    def __repr__(self) -> str:
        al = ", ".join(f"a{i + 1}{j + 1}={c}" for (i, j), c in self.alpha.items())
        be = ", ".join(f"b{i + 1}{j + 1}={c}" for (i, j), c in self.beta.items())
        return f"GenQuadForm(D={self.field.D}, n={self.n}; {al}; {be})"


def gram_matrix_G(G: GenQuadForm) -> list[list[FieldElement]]:
    """2n x 2n matrix [[A, B], [B^T, C]] in the variables (z_1..z_n, tau z_1..tau z_n)."""
    n, K = G.n, G.field
    half = Fraction(1, 2)
    M = [[K.zero() for _ in range(2 * n)] for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            s = 1 if i == j else half
            M[i][j] = G.a(i, j) * s
            M[n + i][n + j] = G.c(i, j) * s
            M[i][n + j] = G.b(i, j) * half
            M[n + j][i] = G.b(i, j) * half
    return M


def to_genpoly(G: GenQuadForm) -> GenPoly:
    n, K = G.n, G.field
    coeffs: dict = {}

    def e(*idx: int) -> tuple[int, ...]:
        v = [0] * n
        for k in idx:
            v[k] += 1
        return tuple(v)

    zero = (0,) * n
    for (i, j), c in G.alpha.items():
        coeffs[(e(i, j), zero)] = coeffs.get((e(i, j), zero), K.zero()) + c
        coeffs[(zero, e(i, j))] = coeffs.get((zero, e(i, j)), K.zero()) + c.conj()
    for (i, j), c in G.beta.items():
        k = (e(i), e(j))
        coeffs[k] = coeffs.get(k, K.zero()) + c
    return GenPoly(n, K, coeffs)


def eval_form(G: GenQuadForm, point: Sequence[FieldElement]) -> Fraction:
    if len(point) != G.n:
        raise ValueError(f"expected {G.n} coordinates, got {len(point)}")
    for p in point:
        if p.field != G.field:
            raise ValueError("point lies in a different field")
    conj = [p.conj() for p in point]
    total = G.field.zero()
    for (i, j), c in G.alpha.items():
        total = total + c * point[i] * point[j] + c.conj() * conj[i] * conj[j]
    for (i, j), c in G.beta.items():
        total = total + c * point[i] * conj[j]
    return total.rational()


def classify_integrality(G: GenQuadForm) -> Integrality:
    if not all(c.is_integral for c in G.coefficients()):
        return Integrality.NONINTEGRAL
    off_alpha = [c for (i, j), c in G.alpha.items() if i < j]
    if all(c.is_divisible_by_two() for c in off_alpha + list(G.beta.values())):
        return Integrality.CLASSICAL
    return Integrality.INTEGRAL


def is_z_valued(G: GenQuadForm) -> bool:
    """True iff the associated form has integer coefficients."""
    from .assoc import associated_matrix_via_T

    M = associated_matrix_via_T(G).M_Q
    m = len(M)
    for i in range(m):
        if M[i][i].denominator != 1:
            return False
        for j in range(i + 1, m):
            if (2 * M[i][j]).denominator != 1:
                return False
    return True


@dataclass(frozen=True)
class BinarySextuple:
    """The binary form [a, b, c, d, e, f]: a z^2 + b zw + c w^2 + d z tau(z) + e z tau(w) + f w tau(w) + conjugates."""

    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: Fraction
    e: FieldElement
    f: Fraction

    def __post_init__(self) -> None:
        for name in ("d", "f"):
            v = getattr(self, name)
            if isinstance(v, FieldElement):
                object.__setattr__(self, name, v.rational())
            else:
                object.__setattr__(self, name, Fraction(v))

    @property
    def field(self) -> QuadField:
        return self.a.field

    @classmethod
    def parse(cls, items: Sequence[str], field: QuadField) -> BinarySextuple:
        if len(items) != 6:
            raise ValueError(f"a sextuple needs 6 entries, got {len(items)}")
        a, b, c, d, e, f = (field.parse(str(s)) for s in items)
        return cls(a, b, c, d.rational(), e, f.rational())

    def texts(self) -> list[str]:
        K = self.field
        return [str(self.a), str(self.b), str(self.c), str(K(self.d)), str(self.e), str(K(self.f))]

    def __str__(self) -> str:
        return "[" + ",".join(self.texts()) + "]"


def from_sextuple(s: BinarySextuple) -> GenQuadForm:
    K = s.field
    return GenQuadForm.create(
        K, 2,
        alpha={(0, 0): s.a, (0, 1): s.b, (1, 1): s.c},
        beta={(0, 0): K(s.d), (0, 1): s.e, (1, 1): K(s.f)},
    )


def to_sextuple(G: GenQuadForm) -> BinarySextuple:
    if G.n != 2:
        raise ValueError("only binary forms have a sextuple")
    return BinarySextuple(G.a(0, 0), G.a(0, 1), G.a(1, 1), G.b(0, 0).rational(), G.b(0, 1), G.b(1, 1).rational())


def form_from_json(data: Mapping) -> GenQuadForm:
    """Load either {"D", "n", "alpha", "beta"} with "i,j" keys (one-based) or {"D", "sextuple"}."""
    K = QuadField(int(data["D"]))
    if "sextuple" in data:
        return from_sextuple(BinarySextuple.parse(data["sextuple"], K))
    n = int(data["n"])

    def load(section: str) -> dict[Pair, FieldElement]:
        out = {}
        for key, text in (data.get(section) or {}).items():
            i, j = (int(t) - 1 for t in str(key).split(","))
            out[(i, j)] = K.parse(str(text))
        return out

    return GenQuadForm.create(K, n, load("alpha"), load("beta"), load("gamma") if "gamma" in data else None)


def form_to_json(G: GenQuadForm) -> dict:
    return {
        "D": G.field.D,
        "n": G.n,
        "alpha": {f"{i + 1},{j + 1}": str(c) for (i, j), c in G.alpha.items()},
        "beta": {f"{i + 1},{j + 1}": str(c) for (i, j), c in G.beta.items()},
    }
