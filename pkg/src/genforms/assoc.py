"""The associated rational form Q(x_1, y_1, ..., x_n, y_n) = G(x_1 + y_1 w, ..., x_n + y_n w).

Three independent constructions of its matrix M_Q are provided: symbolic
substitution, the congruence T^T M_G T, and closed formulas for binary forms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import matrix as mx
from .genform import (BinarySextuple, GenQuadForm, Integrality, classify_integrality,
                      from_sextuple, gram_matrix_G, to_sextuple)
from .qfield import FieldElement, QuadField

RatMatrix = list[list[Fraction]]


@dataclass(frozen=True)
class AssocResult:
    M_Q: RatMatrix
    provenance: str

    @property
    def dim(self) -> int:
        return len(self.M_Q)

    def coefficients(self) -> dict[tuple[int, int], Fraction]:
        """Coefficients of Q keyed by variable pairs (k, l), k <= l, in the order x1, y1, x2, y2, ..."""
        out = {}
        for k in range(self.dim):
            for l in range(k, self.dim):
                c = self.M_Q[k][l] if k == l else 2 * self.M_Q[k][l]
                if c:
                    out[(k, l)] = c
        return out

    def is_integer_valued(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients().values())

    def is_classical(self) -> bool:
        return all(x.denominator == 1 for row in self.M_Q for x in row)

    def gram2(self) -> list[list[int]]:
        return mx.as_int_matrix([[2 * x for x in row] for row in self.M_Q])

    def polynomial_text(self) -> str:
        names = []
        for r in range(self.dim // 2):
            names += [f"x{r + 1}", f"y{r + 1}"]
        parts = []
        for (k, l), c in self.coefficients().items():
            mono = f"{names[k]}^2" if k == l else f"{names[k]}*{names[l]}"
            parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def _rational_matrix(M: Sequence[Sequence[FieldElement]]) -> RatMatrix:
    return [[x.rational() for x in row] for row in M]


def change_of_basis(field: QuadField, n: int) -> list[list[FieldElement]]:
    """T with (z, tau z)^T = T (x_1, y_1, ..., x_n, y_n)^T."""
    w = field.omega()
    tw = w.conj()
    T = [[field.zero() for _ in range(2 * n)] for _ in range(2 * n)]
    for r in range(n):
        T[r][2 * r] = field.one()
        T[r][2 * r + 1] = w
        T[n + r][2 * r] = field.one()
        T[n + r][2 * r + 1] = tw
    return T


def associated_matrix_via_T(G: GenQuadForm) -> AssocResult:
    T = change_of_basis(G.field, G.n)
    return AssocResult(_rational_matrix(mx.congruence(T, gram_matrix_G(G))), "T^T M_G T")


def associated_form_direct(G: GenQuadForm) -> AssocResult:
    """Expand G after substituting z_r = x_r + y_r w; a polynomial in 2n rational variables."""
    K, n = G.field, G.n
    m = 2 * n
    w, tw = K.omega(), K.omega().conj()

    # linear forms as coefficient vectors over K
    z = [[K.zero()] * m for _ in range(n)]
    tz = [[K.zero()] * m for _ in range(n)]
    for r in range(n):
        z[r][2 * r], z[r][2 * r + 1] = K.one(), w
        tz[r][2 * r], tz[r][2 * r + 1] = K.one(), tw

    poly: dict[tuple[int, int], FieldElement] = {}

    def add_product(c: FieldElement, u: list[FieldElement], v: list[FieldElement]) -> None:
        for k in range(m):
            if not u[k]:
                continue
            for l in range(m):
                if not v[l]:
                    continue
                key = (min(k, l), max(k, l))
                poly[key] = poly.get(key, K.zero()) + c * u[k] * v[l]

    for (i, j), c in G.alpha.items():
        add_product(c, z[i], z[j])
        add_product(c.conj(), tz[i], tz[j])
    for (i, j), c in G.beta.items():
        add_product(c, z[i], tz[j])

    M = [[Fraction(0)] * m for _ in range(m)]
    for (k, l), c in poly.items():
        q = c.rational()
        if k == l:
            M[k][k] = q
        else:
            M[k][l] = M[l][k] = q / 2
    return AssocResult(M, "substitution")


def binary_associated_matrix(s: BinarySextuple) -> AssocResult:
    """Closed formulas for the 4 x 4 matrix of a binary form."""
    D = s.field.D
    a1, a2 = s.a.x, s.a.y
    b1, b2 = s.b.x, s.b.y
    c1, c2 = s.c.x, s.c.y
    e1, e2 = s.e.x, s.e.y
    d, f = s.d, s.f
    if not s.field.half:
        M = [
            [2 * a1 + d, 2 * D * a2, b1 + e1, D * (b2 - e2)],
            [2 * D * a2, D * (2 * a1 - d), D * (b2 + e2), D * (b1 - e1)],
            [b1 + e1, D * (b2 + e2), 2 * c1 + f, 2 * D * c2],
            [D * (b2 - e2), D * (b1 - e1), 2 * D * c2, D * (2 * c1 - f)],
        ]
        return AssocResult([[Fraction(x) for x in row] for row in M], "closed form")

    h = Fraction(1, 2)
    p2 = Fraction(1 + D, 2)
    p4 = Fraction(1 + D, 4)
    m4 = Fraction(1 - D, 4)
    q4 = Fraction(1 + 3 * D, 4)
    q8 = Fraction(1 + 3 * D, 8)
    m8 = Fraction(1 - D, 8)

    def diag_block(x1: Fraction, x2: Fraction, t: Fraction) -> list[list[Fraction]]:
        off = x1 + p2 * x2 + t * h
        return [[2 * x1 + x2 + t, off], [off, p2 * x1 + q4 * x2 + m4 * t]]

    M1 = diag_block(a1, a2, d)
    M3 = diag_block(c1, c2, f)
    M2 = [
        [b1 + b2 * h + e1 + e2 * h, b1 * h + p4 * b2 + e1 * h + m4 * e2],
        [b1 * h + p4 * b2 + e1 * h + p4 * e2, p4 * b1 + q8 * b2 + m4 * e1 + m8 * e2],
    ]
    M = [
        M1[0] + M2[0],
        M1[1] + M2[1],
        [M2[0][0], M2[1][0]] + M3[0],
        [M2[0][1], M2[1][1]] + M3[1],
    ]
    return AssocResult([[Fraction(x) for x in row] for row in M], "closed form")


@dataclass(frozen=True)
class DetRelation:
    det_MQ: Fraction
    det_MG_scaled: Fraction
    holds: bool


def det_relation_check(G: GenQuadForm, M_Q: RatMatrix | None = None) -> DetRelation:
    """det(M_Q) against D^n det(2 M_G) (D = 2, 3 mod 4) or D^n det(M_G) (D = 1 mod 4).

    M_Q may be passed in when already computed by some other path.
    """
    if M_Q is None:
        M_Q = associated_matrix_via_T(G).M_Q
    MG = gram_matrix_G(G)
    if not G.field.half:
        MG = [[2 * x for x in row] for row in MG]
    dg = mx.det(MG)
    if isinstance(dg, FieldElement):
        dg = dg.rational()
    scaled = Fraction(G.field.D) ** G.n * dg
    dq = Fraction(mx.det(M_Q))
    return DetRelation(dq, scaled, dq == scaled)


def rank_mod_p(M: Sequence[Sequence], p: int) -> int:
    return mx.rank_mod_p(M, p)


def det_mod4_invariant(s: BinarySextuple) -> int:
    """det(M_Q)/D^2 mod 4 for an integral binary form with D = 2, 3 (mod 4)."""
    K = s.field
    if K.half:
        raise ValueError("det_mod4_invariant needs D = 2, 3 (mod 4)")
    G = from_sextuple(s)
    if classify_integrality(G) is Integrality.NONINTEGRAL:
        raise ValueError("form is not integral")
    res = binary_associated_matrix(s)
    if not res.is_integer_valued():
        raise ValueError("form is not Z-valued")
    q = Fraction(mx.det(res.M_Q)) / (K.D * K.D)
    if q.denominator != 1:
        raise ValueError("D^2 does not divide det(M_Q)")
    return int(q) % 4


def random_element(field: QuadField, rng: random.Random, box: int = 9) -> FieldElement:
    return field(rng.randint(-box, box), rng.randint(-box, box))


def random_form(field: QuadField, n: int, rng: random.Random, kind: Integrality = Integrality.INTEGRAL,
                box: int = 9) -> GenQuadForm:
    """Random Q-valued form with coordinates in [-box, box], scaled into the requested class."""
    alpha, beta = {}, {}
    for i in range(n):
        for j in range(i, n):
            alpha[(i, j)] = random_element(field, rng, box)
        beta[(i, i)] = field(rng.randint(-box, box))
        for j in range(i + 1, n):
            beta[(i, j)] = random_element(field, rng, box)
    if kind is Integrality.CLASSICAL:
        alpha = {k: (c * 2 if k[0] < k[1] else c) for k, c in alpha.items()}
        beta = {k: c * 2 for k, c in beta.items()}
    elif kind is Integrality.NONINTEGRAL:
        alpha[(0, 0)] = alpha[(0, 0)] + Fraction(1, 2)
    return GenQuadForm.create(field, n, alpha, beta)


def random_sextuple(field: QuadField, rng: random.Random, kind: Integrality = Integrality.INTEGRAL,
                    box: int = 9) -> BinarySextuple:
    return to_sextuple(random_form(field, 2, rng, kind, box))
