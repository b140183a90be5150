"""Representations by the indefinite form x^2 + y^2 - D z^2 - D w^2.

This is the form associated to z tau(z) + w tau(w) over Q(sqrt D) when D = 2, 3 (mod 4).
Local solvability is witnessed by explicit residues that lift by Hensel's lemma;
global solutions are found by a bounded search.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import isqrt

from sympy import factorint, isprime
from sympy.solvers.diophantine.diophantine import sum_of_squares

from .intform import IntQuadForm
from .qfield import is_squarefree

DEFAULT_BUDGET = 2000


class SearchBudgetExhausted(RuntimeError):
    """No representation within the search radius; this is not a proof of absence."""


def indefinite_form(D: int) -> IntQuadForm:
    return IntQuadForm.diagonal(1, 1, -D, -D)


@dataclass(frozen=True)
class LocalWitness:
    """A primitive residue solution certifying that a is represented over Z_p.

    `tuple` solves x^2 + y^2 - D z^2 - D w^2 = target (mod modulus) where
    a = p^(2k) * target; scaling a lift by p^k represents a itself.
    Hensel's lemma is applied to `lift_form` at `lift_tuple` with value `lift_target`.
    """

    p: int
    modulus: int
    tuple: tuple[int, int, int, int]
    branch: str
    k: int
    target: int
    lift_form: IntQuadForm
    lift_tuple: tuple[int, ...]
    lift_target: int

    def scaled(self) -> tuple[int, int, int, int]:
        s = self.p ** self.k
        return tuple(s * t for t in self.tuple)  # type: ignore[return-value]


def _strip(a: int, q: int) -> tuple[int, int]:
    k = 0
    while a % q == 0:
        a //= q
        k += 1
    return a, k


def _two_squares_mod(t: int, p: int) -> tuple[int, int]:
    """A pair (x, y) != (0, 0) with x^2 + y^2 = t (mod p)."""
    for x, y in product(range(p), repeat=2):
        if (x or y) and (x * x + y * y - t) % p == 0:
            return x, y
    raise ArithmeticError(f"no solution of x^2 + y^2 = {t} mod {p}")


def local_witness_odd_p(D: int, a: int, p: int) -> LocalWitness:
    if not (isinstance(p, int) and p > 2 and isprime(p)):
        raise ValueError(f"{p} is not an odd prime")
    if a == 0:
        raise ValueError("a must be nonzero")
    a1, v = _strip(a, p)
    k, odd = divmod(v, 2)
    t = a1 * p if odd else a1
    if not odd:
        x, y = _two_squares_mod(a1, p)
        return LocalWitness(p, p, (x, y, 0, 0), "unit: x^2+y^2 = a1", k, t,
                            IntQuadForm.diagonal(1, 1), (x, y), a1)
    if D % p:
        # (x1, y1, 1, 0) with x1^2 + y1^2 = p a1 + D
        x, y = _two_squares_mod(p * a1 + D, p)
        return LocalWitness(p, p, (x, y, 1, 0), "p does not divide D: x^2+y^2 = p a1 + D", k, t,
                            IntQuadForm.diagonal(1, 1), (x, y), p * a1 + D)
    Dp = D // p
    # -Dp (z^2 + w^2) = a1: solve z^2 + w^2 = -a1 / Dp mod p
    rhs = (-a1 * pow(Dp, -1, p)) % p
    z, w = _two_squares_mod(rhs, p)
    return LocalWitness(p, p, (0, 0, z, w), "p divides D: -D_p(z^2+w^2) = a1", k, t,
                        IntQuadForm.diagonal(-Dp, -Dp), (z, w), a1)


_XY_FOR = {1: (1, 0), 2: (1, 1), 5: (1, 2)}


def local_witness_2(D: int, a: int) -> LocalWitness:
    if a == 0:
        raise ValueError("a must be nonzero")
    if D % 4 == 0:
        raise ValueError("D must be squarefree")
    a1, k = _strip(a, 4)
    r, d = a1 % 8, D % 8
    if r in _XY_FOR:
        z, w = 0, 0
        branch = f"a = {r} mod 8"
    elif r == 3:
        z, w = (1, 1) if d in (1, 3, 5) else (1, 0)
        branch = "a = 3 mod 8"
    elif r == 6:
        z, w = (2, 0) if d % 2 else (1, 1)
        branch = "a = 6 mod 8"
    elif r == 7:
        z, w = (1, 1) if d % 2 else (1, 0)
        branch = "a = 7 mod 8"
    else:  # pragma: no cover - a1 is not divisible by 4
        raise AssertionError(r)
    b = (a1 + D * (z * z + w * w)) % 8
    x, y = _XY_FOR[b]
    tup = (x, y, z, w)
    return LocalWitness(2, 8, tup, branch, k, a1, indefinite_form(D), tup, a1)


def hensel_liftable(f: IntQuadForm, x: tuple[int, ...], a: int, p: int) -> bool:
    if len(x) != f.m:
        raise ValueError("tuple length does not match the form")
    if all(c % p == 0 for c in x):
        return False
    q = f.value(x)
    if p == 2:
        if (q - a) % 8:
            return False
        grad = [sum(f.gram2[i][j] * x[j] for j in range(f.m)) for i in range(f.m)]
        return any(g % 4 for g in grad)
    if (q - a) % p:
        return False
    from . import matrix as mx

    return mx.det_int([list(r) for r in f.gram2]) % p != 0


def local_witnesses(D: int, a: int) -> list[LocalWitness]:
    """One witness for every prime dividing 2D."""
    primes = sorted(set(factorint(abs(2 * D))))
    return [local_witness_2(D, a) if p == 2 else local_witness_odd_p(D, a, p) for p in primes]


def _first_two_squares(n: int) -> tuple[int, int] | None:
    if n < 0:
        return None
    for pair in sum_of_squares(n, 2, zeros=True):
        return pair
    return None


def sum_of_two_squares(n: int) -> tuple[int, int] | None:
    """(a, b) with a^2 + b^2 = n, or None when n has a prime 3 (mod 4) to an odd power."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return (0, 0)
    if any(p % 4 == 3 and e % 2 for p, e in factorint(n).items()):
        return None
    pair = _first_two_squares(n)
    if pair is None:  # pragma: no cover - excluded by the criterion above
        raise AssertionError(n)
    return pair


def represent_indefinite(D: int, a: int, budget: int = DEFAULT_BUDGET) -> tuple[int, int, int, int]:
    """(x, y, z, w) with x^2 + y^2 - D z^2 - D w^2 = a, searching z^2 + w^2 <= budget.

    Returns x >= y >= 0 and z >= w >= 0. For a = 0 the zero (a, b, 1, 0) with
    a^2 + b^2 = D, a <= b, is returned when it exists, and the trivial zero otherwise.
    """
    if not isinstance(D, int) or D < 2 or not is_squarefree(D):
        raise ValueError(f"D must be a squarefree integer >= 2, got {D!r}")
    if budget <= 0:
        raise ValueError("budget must be positive")
    if a == 0:
        zero = represents_zero_nontrivially(D)
        return zero.witness or (0, 0, 0, 0)
    pairs = sorted(((z * z + w * w, z, w) for z in range(isqrt(budget) + 1)
                    for w in range(z + 1) if z * z + w * w <= budget))
    for s, z, w in pairs:
        n = a + D * s
        if n < 0:
            continue
        xy = sum_of_two_squares(n)
        if xy is not None:
            y, x = xy
            assert x * x + y * y - D * z * z - D * w * w == a
            return (x, y, z, w)
    raise SearchBudgetExhausted(f"no representation of {a} with z^2 + w^2 <= {budget} for D = {D}")


@dataclass(frozen=True)
class ZeroReport:
    predicted: bool
    witness: tuple[int, int, int, int] | None


def represents_zero_nontrivially(D: int) -> ZeroReport:
    if D < 1:
        raise ValueError("D must be positive")
    pair = sum_of_two_squares(D)
    if pair is None:
        return ZeroReport(False, None)
    return ZeroReport(True, (pair[0], pair[1], 1, 0))
