"""Exact dense matrix helpers over Z, Q, Q(sqrt D) and F_p."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

from sympy import isprime

Matrix = list[list[Any]]


def transpose(A: Sequence[Sequence[Any]]) -> Matrix:
    return [list(r) for r in zip(*A)]


def matmul(A: Sequence[Sequence[Any]], B: Sequence[Sequence[Any]]) -> Matrix:
    Bt = transpose(B)
    out = []
    for row in A:
        new = []
        for col in Bt:
            acc = None
            for x, y in zip(row, col):
                if x and y:  # most entries of change-of-basis matrices are zero
                    acc = x * y if acc is None else acc + x * y
            new.append(row[0] * col[0] if acc is None else acc)
        out.append(new)
    return out


def congruence(U: Sequence[Sequence[Any]], M: Sequence[Sequence[Any]]) -> Matrix:
    """U^T M U."""
    return matmul(matmul(transpose(U), M), U)


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def det(A: Sequence[Sequence[Any]]) -> Any:
    """Determinant by Gaussian elimination; entries must support exact division."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    if all(isinstance(x, int) for r in M for x in r):
        return det_int(M)
    sign = 1
    result = None
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            return M[0][0] * 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            sign = -sign
        piv = M[c][c]
        result = piv if result is None else result * piv
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / piv
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return result * sign


def det_int(A: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            p = next((r for r in range(k + 1, n) if M[r][k]), None)
            if p is None:
                return 0
            M[k], M[p] = M[p], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def leading_minors(A: Sequence[Sequence[Any]]) -> list[Any]:
    return [det([row[:k] for row in A[:k]]) for k in range(1, len(A) + 1)]


def as_int_matrix(A: Sequence[Sequence[Any]]) -> list[list[int]]:
    out = []
    for row in A:
        new = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError(f"entry {x} is not an integer")
            new.append(int(f))
        out.append(new)
    return out


def rank_mod_p(M: Sequence[Sequence[Any]], p: int) -> int:
    """Rank over F_p of an integer matrix."""
    if not isinstance(p, int) or not isprime(p):
        raise ValueError(f"{p} is not a prime")
    A = [[x % p for x in row] for row in as_int_matrix(M)]
    rows, cols = len(A), len(A[0]) if A else 0
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [(x * inv) % p for x in A[rank]]
        for r in range(rows):
            if r != rank and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def format_matrix(M: Sequence[Sequence[Any]]) -> str:
    cells = [[str(x) for x in row] for row in M]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)
