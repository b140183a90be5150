"""2-adic classification of integral quadratic forms.

The complete invariant is the canonical 2-adic symbol: a Jordan splitting
followed by oddity fusion over compartments and sign walking along trains.
Symbols describe the matrix M_Q; a non-classical form has a constituent of
scale 1/2.

Text rendering: `[1^+2_II, 2^-1_3]` lists constituents as
scale^(sign)(dim)_(II for even type, oddity for odd type).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .intform import IntQuadForm

RatMatrix = list[list[Fraction]]


class BlockType(enum.Enum):
    EVEN = "EVEN"
    ODD = "ODD"


def v2(x: Fraction | int) -> int:
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    n, d = x.numerator, x.denominator
    return ((n & -n).bit_length() - 1) - ((d & -d).bit_length() - 1)


def _unit_mod(x: Fraction, k: int, mod: int) -> int:
    """(x / 2^k) mod `mod` for x of valuation k."""
    u = Fraction(x) / Fraction(2) ** k
    return u.numerator * pow(u.denominator, -1, mod) % mod


def _as_rational(f: IntQuadForm | Sequence[Sequence]) -> RatMatrix:
    if isinstance(f, IntQuadForm):
        return [list(r) for r in f.matrix]
    M = [[Fraction(x) for x in row] for row in f]
    n = len(M)
    if any(len(r) != n for r in M) or any(M[i][j] != M[j][i] for i in range(n) for j in range(n)):
        raise ValueError("matrix must be square and symmetric")
    return M


@dataclass(frozen=True)
class JordanBlock:
    """A block 2^exponent * unit where unit is unimodular of size 1 or 2."""

    exponent: int
    unit: tuple[tuple[int, ...], ...]  # residues modulo 2^precision, symmetric representatives
    precision: int
    unit_det_mod8: int
    diagonal_unit: int | None  # the unit of a 1 x 1 block, mod 8

    @property
    def scale(self) -> Fraction:
        return Fraction(2) ** self.exponent

    @property
    def dim(self) -> int:
        return len(self.unit)

    @property
    def type(self) -> BlockType:
        return BlockType.ODD if self.dim == 1 else BlockType.EVEN


def jordan_2adic(f: IntQuadForm | Sequence[Sequence]) -> list[JordanBlock]:
    """Split M (M_Q for an IntQuadForm, else the given matrix) over Z_2 into blocks of size <= 2.

    Elimination is exact over Z_(2) (rationals with odd denominators), so the
    splitting is a genuine Z_2 congruence; blocks are reported modulo 2^(v_2(det) + 4).
    """
    from . import matrix as mx

    M = _as_rational(f)
    d = mx.det(M) if M else Fraction(1)
    if d == 0:
        raise ValueError("singular form has no Jordan splitting")
    prec = max(v2(d), 0) + 4
    mod = 1 << prec
    blocks: list[JordanBlock] = []
    while M:
        n = len(M)
        k = min(v2(x) for row in M for x in row if x)
        diag = [i for i in range(n) if M[i][i] and v2(M[i][i]) == k]
        if diag:
            idx = [diag[0]]
        else:
            i, j = next((i, j) for i in range(n) for j in range(i + 1, n) if M[i][j] and v2(M[i][j]) == k)
            idx = [i, j]
        rest = [t for t in range(n) if t not in idx]
        P = [[M[a][b] for b in idx] for a in idx]
        R = [[M[a][b] for b in rest] for a in idx]
        if len(idx) == 1:
            Pinv = [[1 / P[0][0]]]
        else:
            dp = P[0][0] * P[1][1] - P[0][1] * P[1][0]
            Pinv = [[P[1][1] / dp, -P[0][1] / dp], [-P[1][0] / dp, P[0][0] / dp]]
        PR = mx.matmul(Pinv, R)
        RtPR = mx.matmul(mx.transpose(R), PR) if rest else []
        M = [[M[a][b] - RtPR[x][y] for y, b in enumerate(rest)] for x, a in enumerate(rest)]

        def rep(x: Fraction) -> int:
            if x == 0:
                return 0
            r = x / Fraction(2) ** k
            r = r.numerator * pow(r.denominator, -1, mod) % mod
            return r - mod if r > mod // 2 else r

        unit = tuple(tuple(rep(x) for x in row) for row in P)
        pdet = mx.det(P)
        blocks.append(JordanBlock(k, unit, prec, _unit_mod(pdet, k * len(idx), 8),
                                  _unit_mod(P[0][0], k, 8) if len(idx) == 1 else None))
    blocks.sort(key=lambda b: b.exponent)
    return blocks


@dataclass(frozen=True)
class Constituent:
    exponent: int
    dim: int
    det_class: int  # unit determinant mod 8 before canonicalization, +1/-1 after
    type: BlockType
    oddity: int

    @property
    def scale(self) -> Fraction:
        return Fraction(2) ** self.exponent

    def text(self) -> str:
        s = self.scale
        scale = str(s.numerator) if s.denominator == 1 else f"1/{s.denominator}"
        sign = "+" if self.det_class in (1, 7) else "-"
        tail = "II" if self.type is BlockType.EVEN else str(self.oddity)
        return f"{scale}^{sign}{self.dim}_{tail}"


@dataclass(frozen=True)
class TwoAdicSymbol:
    constituents: tuple[Constituent, ...]

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.constituents)

    @property
    def oddity(self) -> int:
        return sum(c.oddity for c in self.constituents) % 8

    def __str__(self) -> str:
        return "[" + ", ".join(c.text() for c in self.constituents) + "]"


def raw_symbol(f: IntQuadForm | Sequence[Sequence]) -> TwoAdicSymbol:
    """Constituents read off a Jordan splitting, before canonicalization."""
    out = []
    blocks = jordan_2adic(f)
    for k in sorted({b.exponent for b in blocks}):
        group = [b for b in blocks if b.exponent == k]
        dim = sum(b.dim for b in group)
        det = 1
        for b in group:
            det = det * b.unit_det_mod8 % 8
        odd = any(b.type is BlockType.ODD for b in group)
        oddity = sum(b.diagonal_unit for b in group if b.diagonal_unit is not None) % 8 if odd else 0
        out.append(Constituent(k, dim, det, BlockType.ODD if odd else BlockType.EVEN, oddity))
    return TwoAdicSymbol(tuple(out))


def compartments(sym: Sequence[Constituent]) -> list[list[int]]:
    """Maximal runs of odd constituents with consecutive scales."""
    out: list[list[int]] = []
    i, r = 0, len(sym)
    while i < r:
        if sym[i].type is BlockType.ODD:
            v = sym[i].exponent
            c = []
            while i < r and sym[i].type is BlockType.ODD and sym[i].exponent == v:
                c.append(i)
                i += 1
                v += 1
            out.append(c)
        else:
            i += 1
    return out


def trains(sym: Sequence[Constituent]) -> list[list[int]]:
    """Maximal intervals along which signs may walk."""
    if not sym:
        return []
    out: list[list[int]] = []
    cur = [0]
    for i in range(1, len(sym)):
        prev, c = sym[i - 1], sym[i]
        gap = c.exponent - prev.exponent
        both_odd = prev.type is BlockType.ODD and c.type is BlockType.ODD
        both_even = prev.type is BlockType.EVEN and c.type is BlockType.EVEN
        if gap > 2 or (gap == 2 and not both_odd) or both_even:
            out.append(cur)
            cur = [i]
        else:
            cur.append(i)
    out.append(cur)
    return out


def canonicalize(sym: TwoAdicSymbol) -> TwoAdicSymbol:
    rows = [[c.exponent, c.dim, 1 if c.det_class % 8 in (1, 7) else -1, c.type, c.oddity]
            for c in sym.constituents]
    consts = sym.constituents
    comps = compartments(consts)
    for comp in comps:
        total = sum(rows[i][4] for i in comp) % 8
        for i in comp:
            rows[i][4] = 0
        rows[comp[0]][4] = total
    for train in trains(consts):
        for t1 in reversed(train[1:]):
            if rows[t1][2] == -1:
                rows[t1][2] = 1
                rows[t1 - 1][2] *= -1
                for comp in comps:
                    if t1 - 1 in comp or t1 in comp:
                        rows[comp[0]][4] = (rows[comp[0]][4] + 4) % 8
    return TwoAdicSymbol(tuple(Constituent(e, n, s, t, o) for e, n, s, t, o in rows))


def canonical_symbol(f: IntQuadForm | Sequence[Sequence]) -> TwoAdicSymbol:
    return canonicalize(raw_symbol(f))


def z2_equivalent(f1: IntQuadForm | Sequence[Sequence], f2: IntQuadForm | Sequence[Sequence]) -> bool:
    m1 = len(f1.gram2) if isinstance(f1, IntQuadForm) else len(f1)
    m2 = len(f2.gram2) if isinstance(f2, IntQuadForm) else len(f2)
    if m1 != m2:
        raise ValueError(f"dimension mismatch: {m1} vs {m2}")
    return canonical_symbol(f1) == canonical_symbol(f2)


# --- the D = 2 filter -------------------------------------------------------------


@dataclass(frozen=True)
class NFCandidate:
    A1: int
    A2: int
    a2: int
    B1: int
    B2: int
    C1: int
    C2: int
    c2: int
    E1: int
    E2: int

    @property
    def matrix(self) -> list[list[int]]:
        return [
            [self.A1, 4 * self.a2, self.B1, 2 * self.E1],
            [4 * self.a2, 2 * self.A2, 2 * self.E2, 2 * self.B2],
            [self.B1, 2 * self.E2, self.C1, 4 * self.c2],
            [2 * self.E1, 2 * self.B2, 4 * self.c2, 2 * self.C2],
        ]


def nf_candidates_d2() -> Iterator[NFCandidate]:
    """Every parameter choice allowed for reductions mod 8 of binary forms over Q(sqrt 2)."""
    for A1, a2, B1, C1, c2, E1 in product(range(8), range(2), range(8), range(8), range(2), range(4)):
        A2 = -A1 % 4
        C2 = -C1 % 4
        for B2 in range(B1 % 2, 4, 2):
            for E2 in range(E1 % 2, 4, 2):
                yield NFCandidate(A1, A2, a2, B1, B2, C1, C2, c2, E1, E2)


def in_candidate_class_mod8(M: Sequence[Sequence[int]]) -> bool:
    """Whether the symmetric integer matrix M is congruent mod 8 to some candidate matrix."""
    m = [[x % 8 for x in row] for row in M]
    return (m[0][1] % 4 == 0 and m[0][3] % 2 == 0 and (m[1][1] + 2 * m[0][0]) % 8 == 0
            and m[1][2] % 2 == 0 and (m[1][3] + 2 * m[0][2]) % 4 == 0 and m[2][3] % 4 == 0
            and (m[3][3] + 2 * m[2][2]) % 8 == 0 and (m[0][3] + m[1][2]) % 4 == 0)


_VECS4 = np.array(list(product(range(4), repeat=4)), dtype=np.int64)  # all of (Z/4)^4
_BITS = (_VECS4 % 2) @ np.array([8, 4, 2, 1])  # each vector mod 2 as a 4-bit integer


def _span_masks(b0: np.ndarray, b1: np.ndarray) -> np.ndarray:
    """Bitmask over F_2^4 of span{b0, b1} (bit 0 is the zero vector)."""
    return (1 << 0) | (1 << b0) | (1 << b1) | (1 << (b0 ^ b1))


def d2_filter(f: IntQuadForm, return_transform: bool = False):
    """True iff U^T M U mod 8 is a candidate matrix for some U in GL_4(Z_2), M = M_Q of f.

    Every condition on U^T M U mod 8 depends only on U mod 4, so the search runs over
    bases of (Z/4)^4: column pairs (v0, v1) and (v2, v3) are drawn from the same set
    of pairs, then matched on the cross conditions and invertibility mod 2.
    """
    if f.m != 4:
        raise ValueError("d2_filter needs a 4-dimensional form")
    if not f.is_classical:
        return (False, None) if return_transform else False
    F = np.array(f.int_matrix(), dtype=np.int64)
    BV = _VECS4 @ F @ _VECS4.T
    Q8 = np.diagonal(BV) % 8
    B4 = BV % 4

    # pairs (v, w): B(v, w) = 0 mod 4, Q(w) = -2 Q(v) mod 8, independent mod 2
    ok = (B4 == 0) & (((Q8[None, :] + 2 * Q8[:, None]) % 8) == 0)
    bits = _BITS
    dep = (bits[:, None] == 0) | (bits[None, :] == 0) | (bits[:, None] == bits[None, :])
    ok &= ~dep
    P0, P1 = np.nonzero(ok)
    if len(P0) == 0:
        return (False, None) if return_transform else False
    masks = _span_masks(bits[P0], bits[P1])

    for v0, v1, mk in zip(P0, P1, masks):
        # v2 = P0[s], v3 = P1[s]
        c = ((B4[v1, P0] % 2) == 0) & ((B4[v0, P1] % 2) == 0)
        c &= ((B4[v1, P1] + 2 * B4[v0, P0]) % 4) == 0
        c &= ((B4[v0, P1] + B4[v1, P0]) % 4) == 0
        c &= (masks & mk) == 1
        hit = np.flatnonzero(c)
        if hit.size:
            s = hit[0]
            U = np.stack([_VECS4[v0], _VECS4[v1], _VECS4[P0[s]], _VECS4[P1[s]]], axis=1)
            U = [[int(x) for x in row] for row in U]
            return (True, U) if return_transform else True
    return (False, None) if return_transform else False
