"""Exact arithmetic in a quadratic field K = Q(sqrt(D)) in the integral basis (1, w).

Here w = sqrt(D) when D = 2, 3 (mod 4) and w = (1 + sqrt(D))/2 when D = 1 (mod 4).
Elements are stored as a pair of rationals (x, y) meaning x + y*w.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import factorint

Rational = Union[int, Fraction]


class FieldMismatchError(ValueError):
    pass


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorint(abs(n)).values())


@dataclass(frozen=True)
class QuadField:
    D: int

    def __post_init__(self) -> None:
        if not isinstance(self.D, int) or self.D in (0, 1) or not is_squarefree(self.D):
            raise ValueError(f"D must be a squarefree integer other than 0 and 1, got {self.D!r}")

    @property
    def half(self) -> bool:
        """True when w = (1 + sqrt(D))/2, i.e. D = 1 (mod 4)."""
        return self.D % 4 == 1

    @property
    def omega_kind(self) -> str:
        return "HALF" if self.half else "SQRT"

    def __call__(self, x: Rational = 0, y: Rational = 0) -> FieldElement:
        return FieldElement(self, Fraction(x), Fraction(y))

    def zero(self) -> FieldElement:
        return self(0, 0)

    def one(self) -> FieldElement:
        return self(1, 0)

    def omega(self) -> FieldElement:
        return self(0, 1)

    def sqrt_d(self) -> FieldElement:
        # sqrt(D) = 2w - 1 in the half case
        return self(-1, 2) if self.half else self(0, 1)

    def parse(self, text: str) -> FieldElement:
        return parse_element(text, self)

    def __repr__(self) -> str:
        return f"QuadField({self.D})"


def _coerce(field: QuadField, other: object) -> FieldElement | None:
    if isinstance(other, FieldElement):
        if other.field != field:
            raise FieldMismatchError(f"{other.field} vs {field}")
        return other
    if isinstance(other, (int, Fraction)):
        return FieldElement(field, Fraction(other), Fraction(0))
    return None


@dataclass(frozen=True)
class FieldElement:
    field: QuadField
    x: Fraction
    y: Fraction

    def __post_init__(self) -> None:
        # accept ints; Fraction already keeps lowest terms
        if not isinstance(self.x, Fraction):
            object.__setattr__(self, "x", Fraction(self.x))
        if not isinstance(self.y, Fraction):
            object.__setattr__(self, "y", Fraction(self.y))

    def __add__(self, other: object) -> FieldElement:
        o = _coerce(self.field, other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self) -> FieldElement:
        return FieldElement(self.field, -self.x, -self.y)

    def __sub__(self, other: object) -> FieldElement:
        o = _coerce(self.field, other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, self.x - o.x, self.y - o.y)

    def __rsub__(self, other: object) -> FieldElement:
        o = _coerce(self.field, other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> FieldElement:
        o = _coerce(self.field, other)
        if o is None:
            return NotImplemented
        return mul(self, o)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        n = norm(self)
        if n == 0:
            raise ZeroDivisionError("inverse of zero in a quadratic field")
        c = conj(self)
        return FieldElement(self.field, c.x / n, c.y / n)

    def __truediv__(self, other: object) -> FieldElement:
        o = _coerce(self.field, other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> FieldElement:
        o = _coerce(self.field, other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int) -> FieldElement:
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.x == other.x and self.y == other.y
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.y == 0:
            return hash(self.x)
        return hash((self.field.D, self.x, self.y))

    def __bool__(self) -> bool:
        return self.x != 0 or self.y != 0

    def conj(self) -> FieldElement:
        return conj(self)

    def trace(self) -> Fraction:
        return trace(self)

    def norm(self) -> Fraction:
        return norm(self)

    @property
    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    @property
    def is_rational(self) -> bool:
        return self.y == 0

    def is_divisible_by_two(self) -> bool:
        """Membership in 2*O_K."""
        return self.is_integral and self.x.numerator % 2 == 0 and self.y.numerator % 2 == 0

    def rational(self) -> Fraction:
        if self.y != 0:
            raise ValueError(f"{self} is not rational")
        return self.x

    def sqrt_coords(self) -> tuple[Fraction, Fraction]:
        """Coordinates (r, s) with self = r + s*sqrt(D)."""
        if self.field.half:
            return self.x + self.y / 2, self.y / 2
        return self.x, self.y

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"FieldElement(D={self.field.D}, {format_element(self)})"


def mul(e1: FieldElement, e2: FieldElement) -> FieldElement:
    if e1.field != e2.field:
        raise FieldMismatchError(f"{e1.field} vs {e2.field}")
    f = e1.field
    x1, y1, x2, y2 = e1.x, e1.y, e2.x, e2.y
    if not y1 and not y2:
        return FieldElement(f, x1 * x2, y1)
    if x1.denominator == y1.denominator == x2.denominator == y2.denominator == 1:
        # integral fast path: plain int arithmetic
        a, b, c, d = x1.numerator, y1.numerator, x2.numerator, y2.numerator
        if f.half:
            return FieldElement(f, Fraction(a * c + b * d * ((f.D - 1) // 4)), Fraction(a * d + c * b + b * d))
        return FieldElement(f, Fraction(a * c + b * d * f.D), Fraction(a * d + c * b))
    yy = y1 * y2
    if f.half:
        # w^2 = w + (D - 1)/4
        return FieldElement(f, x1 * x2 + yy * Fraction(f.D - 1, 4), x1 * y2 + x2 * y1 + yy)
    return FieldElement(f, x1 * x2 + yy * f.D, x1 * y2 + x2 * y1)


def conj(e: FieldElement) -> FieldElement:
    if e.field.half:
        return FieldElement(e.field, e.x + e.y, -e.y)
    return FieldElement(e.field, e.x, -e.y)


def trace(e: FieldElement) -> Fraction:
    if e.field.half:
        return 2 * e.x + e.y
    return 2 * e.x


def norm(e: FieldElement) -> Fraction:
    if e.field.half:
        return e.x * e.x + e.x * e.y + e.y * e.y * Fraction(1 - e.field.D, 4)
    return e.x * e.x - e.field.D * e.y * e.y


_RAT = r"[+-]?\d+(?:/\d+)?"
_ELEMENT_RE = re.compile(
    rf"^(?:(?P<x>{_RAT})(?:(?P<sign>[+-])(?P<y2>(?:\d+(?:/\d+)?)?)w)?|(?P<y1>[+-]?(?:\d+(?:/\d+)?)?)w)$"
)


def _rat(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def parse_element(text: str, field: QuadField) -> FieldElement:
    """Parse `<rat>`, `<rat>w` or `<rat>(+|-)<rat>w`; a bare `w` means coefficient 1."""
    s = text.replace(" ", "")
    m = _ELEMENT_RE.match(s)
    if not m:
        raise ValueError(f"malformed field element {text!r}")
    if m.group("y1") is not None:
        coeff = m.group("y1")
        if coeff in ("", "+", "-"):
            coeff += "1"
        return FieldElement(field, Fraction(0), _rat(coeff))
    x = _rat(m.group("x"))
    if m.group("sign") is None:
        return FieldElement(field, x, Fraction(0))
    y = _rat(m.group("y2") or "1")
    if m.group("sign") == "-":
        y = -y
    return FieldElement(field, x, y)


def format_element(e: FieldElement) -> str:
    """Inverse of parse_element."""
    if e.y == 0:
        return str(e.x)
    if e.x == 0:
        return f"{e.y}w"
    sign = "+" if e.y > 0 else "-"
    return f"{e.x}{sign}{abs(e.y)}w"
