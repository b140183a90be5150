"""Integer quadratic forms over Z.

A form in m variables is stored through gram2 = 2 M_Q, an integer symmetric
matrix with even diagonal. Q(x) = x^T gram2 x / 2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import floor
from typing import Iterator, Sequence

from . import matrix as mx

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntQuadForm:
    gram2: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        g = tuple(tuple(int(x) for x in row) for row in self.gram2)
        m = len(g)
        if any(len(row) != m for row in g):
            raise ValueError("gram2 must be square")
        for i in range(m):
            if g[i][i] % 2:
                raise ValueError("gram2 must have an even diagonal")
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram2 must be symmetric")
        object.__setattr__(self, "gram2", g)

    @classmethod
    def from_matrix(cls, M: Sequence[Sequence]) -> IntQuadForm:
        """From the matrix M_Q (entries in Z or (1/2)Z off the diagonal)."""
        return cls(tuple(tuple(int(_as_int(2 * Fraction(x))) for x in row) for row in M))

    @classmethod
    def diagonal(cls, *entries: int) -> IntQuadForm:
        m = len(entries)
        return cls(tuple(tuple(2 * entries[i] if i == j else 0 for j in range(m)) for i in range(m)))

    @classmethod
    def from_bhargava(cls, text: str) -> IntQuadForm:
        return parse_bhargava(text)[1]

    @property
    def m(self) -> int:
        return len(self.gram2)

    @property
    def matrix(self) -> list[list[Fraction]]:
        return [[Fraction(x, 2) for x in row] for row in self.gram2]

    @property
    def is_classical(self) -> bool:
        return all(x % 2 == 0 for row in self.gram2 for x in row)

    def int_matrix(self) -> list[list[int]]:
        if not self.is_classical:
            raise ValueError("matrix of a non-classical form is not integral")
        return [[x // 2 for x in row] for row in self.gram2]

    def det(self) -> Fraction:
        """det(M_Q)."""
        return Fraction(mx.det_int([list(r) for r in self.gram2]), 2 ** self.m)

    def value(self, x: Sequence[int]) -> int:
        g = self.gram2
        total = 0
        for i in range(self.m):
            if x[i]:
                total += x[i] * sum(g[i][j] * x[j] for j in range(self.m))
        return total // 2

    def bilinear2(self, x: Sequence[int], y: Sequence[int]) -> int:
        """x^T gram2 y = 2 B(x, y)."""
        return sum(x[i] * self.gram2[i][j] * y[j] for i in range(self.m) for j in range(self.m))

    def transform(self, U: Sequence[Sequence[int]]) -> IntQuadForm:
        return IntQuadForm(tuple(tuple(r) for r in mx.congruence(U, [list(r) for r in self.gram2])))

    def direct_sum(self, other: IntQuadForm) -> IntQuadForm:
        m, k = self.m, other.m
        rows = [list(r) + [0] * k for r in self.gram2] + [[0] * m + list(r) for r in other.gram2]
        return IntQuadForm(tuple(tuple(r) for r in rows))

    def __str__(self) -> str:
        return mx.format_matrix(self.matrix)


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise ValueError(f"{x} is not an integer")
    return x.numerator


_BHARGAVA_RE = re.compile(r"^\s*(\d+)\s*:\s*(-?\d+)\s+(-?\d+)\s+(-?\d+)\s+(-?\d+)\s+(-?\d+)\s+(-?\d+)\s*$")


def parse_bhargava(text: str) -> tuple[int, IntQuadForm]:
    """`det: a b c d e f` -> (det, ternary form with matrix [[a, f/2, e/2], [f/2, b, d/2], [e/2, d/2, c]])."""
    m = _BHARGAVA_RE.match(text)
    if not m:
        raise ValueError(f"malformed ternary form {text!r}")
    det, a, b, c, d, e, f = (int(t) for t in m.groups())
    form = IntQuadForm(((2 * a, f, e), (f, 2 * b, d), (e, d, 2 * c)))
    if form.det() != det:
        raise ValueError(f"{text!r}: determinant of the matrix is {form.det()}, not {det}")
    return det, form


def format_bhargava(det: int, coeffs: Sequence[int]) -> str:
    return f"{det}: " + " ".join(str(c) for c in coeffs)


def one_plus(L: IntQuadForm) -> IntQuadForm:
    """1 + L: prepend a unit square."""
    return IntQuadForm.diagonal(1).direct_sum(L)


def is_positive_definite(f: IntQuadForm) -> bool:
    return all(d > 0 for d in mx.leading_minors([list(r) for r in f.gram2]))


# -- enumeration ------------------------------------------------------------

def _ldl(f: IntQuadForm) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2."""
    m = f.m
    A = f.matrix
    d = [Fraction(0)] * m
    mu = [[Fraction(0)] * m for _ in range(m)]
    # work from the top: standard completion of squares
    R = [row[:] for row in A]
    for i in range(m):
        d[i] = R[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, m):
            mu[i][j] = R[i][j] / d[i]
        for j in range(i + 1, m):
            for k in range(i + 1, m):
                R[j][k] -= mu[i][j] * R[i][k]
    return d, mu


def enumerate_vectors(f: IntQuadForm, bound: int, exact: int | None = None) -> Iterator[Vector]:
    """All x != 0 with Q(x) <= bound (or Q(x) == exact), both signs included."""
    if not is_positive_definite(f):
        raise ValueError("enumeration needs a positive definite form")
    d, mu = _ldl(f)
    m = f.m
    x = [0] * m
    top = Fraction(exact if exact is not None else bound)

    def rec(i: int, remaining: Fraction) -> Iterator[Vector]:
        if i < 0:
            if exact is None or remaining == 0:
                if any(x):
                    yield tuple(x)
            return
        c = -sum((mu[i][j] * x[j] for j in range(i + 1, m)), Fraction(0))
        start = floor(c)
        t = start
        while True:
            used = d[i] * (t - c) ** 2
            if used > remaining:
                break
            x[i] = t
            yield from rec(i - 1, remaining - used)
            t -= 1
        t = start + 1
        while True:
            used = d[i] * (t - c) ** 2
            if used > remaining:
                break
            x[i] = t
            yield from rec(i - 1, remaining - used)
            t += 1
        x[i] = 0

    yield from rec(m - 1, top)


def _canonical_sign(v: Vector) -> bool:
    for c in v:
        if c:
            return c > 0
    return False


def representations(f: IntQuadForm, a: int) -> list[Vector]:
    """All x with Q(x) = a, one of each pair +-x (first nonzero coordinate positive)."""
    if a < 0:
        return []
    if not is_positive_definite(f):
        raise ValueError("enumeration needs a positive definite form")
    if a == 0:
        return [tuple([0] * f.m)]
    return sorted(v for v in enumerate_vectors(f, a, exact=a) if _canonical_sign(v))


def represents(f: IntQuadForm, a: int) -> Vector | None:
    """Some x with Q(x) = a (first nonzero coordinate positive), or None."""
    for v in enumerate_vectors(f, a, exact=a):
        return v if _canonical_sign(v) else tuple(-c for c in v)
    return None


# -- critical sets -----------------------------------------------------------

@dataclass(frozen=True)
class CriticalSet:
    label: str
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        vals = tuple(sorted(set(int(v) for v in self.values)))
        if not vals or vals[0] <= 0:
            raise ValueError("a critical set is a nonempty set of positive integers")
        object.__setattr__(self, "values", vals)


FIFTEEN = CriticalSet("fifteen", (1, 2, 3, 5, 6, 7, 10, 14, 15))


def load_critical_290() -> CriticalSet:
    text = resources.files("genforms.data").joinpath("critical290.txt").read_text()
    nums = [int(t) for line in text.splitlines() if not line.startswith("#") for t in line.split()]
    return CriticalSet("two-ninety", tuple(nums))


@dataclass(frozen=True)
class CriticalReport:
    all_represented: bool
    missing: list[int]
    witnesses: dict[int, Vector] = field(default_factory=dict)


def check_critical_set(f: IntQuadForm, s: CriticalSet = FIFTEEN) -> CriticalReport:
    if s.label == FIFTEEN.label and not f.is_classical:
        raise ValueError("the nine-number criterion only applies to classical forms")
    if not is_positive_definite(f):
        raise ValueError("form is not positive definite")
    missing, wit = [], {}
    for a in s.values:
        v = represents(f, a)
        if v is None:
            missing.append(a)
        else:
            wit[a] = v
    return CriticalReport(not missing, missing, wit)


# -- reduction and isometry ---------------------------------------------------

def lll_gram(f: IntQuadForm, delta: Fraction = Fraction(3, 4)) -> tuple[IntQuadForm, list[list[int]]]:
    """LLL-reduce a positive definite form; returns (reduced form, U) with U^T f U = reduced."""
    m = f.m
    G = [[Fraction(x) for x in row] for row in f.gram2]
    B = [[1 if i == j else 0 for j in range(m)] for i in range(m)]  # columns of U as rows

    def ip(u: list[int], v: list[int]) -> Fraction:
        return sum((u[i] * G[i][j] * v[j] for i in range(m) for j in range(m) if u[i] and v[j]), Fraction(0))

    def gso():
        mu = [[Fraction(0)] * m for _ in range(m)]
        bstar = [Fraction(0)] * m
        for i in range(m):
            for j in range(i):
                mu[i][j] = (ip(B[i], B[j]) - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))) / bstar[j]
            bstar[i] = ip(B[i], B[i]) - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
        return mu, bstar

    k = 1
    mu, bstar = gso()
    while k < m:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                B[k] = [a - q * b for a, b in zip(B[k], B[j])]
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            mu, bstar = gso()
            k = max(k - 1, 1)
    U = mx.transpose(B)
    return f.transform(U), U


def _inverse_unimodular(U: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(U)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(U)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c])
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [[_as_int(x) for x in row[n:]] for row in A]


def isometry_test(f1: IntQuadForm, f2: IntQuadForm) -> list[list[int]] | None:
    """U with U^T M_f1 U = M_f2 and det U = +-1, or None when no isometry exists."""
    if f1.m != f2.m:
        raise ValueError("dimension mismatch")
    if f1.det() != f2.det():
        return None
    if not (is_positive_definite(f1) and is_positive_definite(f2)):
        raise ValueError("isometry search needs positive definite forms")
    m = f1.m
    r1, V1 = lll_gram(f1)
    r2, V2 = lll_gram(f2)
    # map target basis vectors in ascending norm order
    order = sorted(range(m), key=lambda k: r2.gram2[k][k])
    target = [[r2.gram2[a][b] for b in order] for a in order]
    norms = sorted({target[k][k] // 2 for k in range(m)})
    cands: dict[int, list[Vector]] = {n: [] for n in norms}
    for v in enumerate_vectors(r1, norms[-1]):
        q = r1.value(v)
        if q in cands:
            cands[q].append(v)
    g1 = r1.gram2
    images: dict[Vector, tuple[int, ...]] = {}
    for vs in cands.values():
        for v in vs:
            images[v] = tuple(sum(g1[i][j] * v[j] for j in range(m)) for i in range(m))

    chosen: list[Vector] = []

    def search(k: int) -> bool:
        if k == m:
            return True
        for v in cands[target[k][k] // 2]:
            gv = images[v]
            if all(sum(gv[i] * chosen[j][i] for i in range(m)) == target[k][j] for j in range(k)):
                chosen.append(v)
                if search(k + 1):
                    return True
                chosen.pop()
        return False

    if not search(0):
        return None
    W = mx.transpose([list(v) for v in chosen])  # columns are images of the ordered target basis
    # undo the ordering: column order[k] of the reduced target corresponds to chosen[k]
    Wp = [[0] * m for _ in range(m)]
    for k, idx in enumerate(order):
        for i in range(m):
            Wp[i][idx] = W[i][k]
    U = mx.matmul(mx.matmul(V1, Wp), _inverse_unimodular(V2))
    if not verify_transform(U, f1, f2):
        raise AssertionError("internal error: isometry failed verification")
    return U


def _as_matrix(f: IntQuadForm | Sequence[Sequence]) -> list[list[Fraction]]:
    if isinstance(f, IntQuadForm):
        return f.matrix
    return [[Fraction(x) for x in row] for row in f]


def verify_transform(U: Sequence[Sequence[int]], f1: IntQuadForm | Sequence[Sequence],
                     f2: IntQuadForm | Sequence[Sequence]) -> bool:
    """det U = +-1 and U^T M1 U = M2; forms may be given as IntQuadForm or as the matrix M_Q."""
    if any(len(row) != len(U) for row in U):
        raise ValueError("U must be square")
    Ui = mx.as_int_matrix(U)
    if abs(mx.det_int(Ui)) != 1:
        return False
    return mx.congruence(Ui, _as_matrix(f1)) == _as_matrix(f2)
