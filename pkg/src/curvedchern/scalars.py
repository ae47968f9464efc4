"""Exact scalars: the field Q(i) of Gaussian rationals.

Every number in the engine is a Scalar.  There are no floats anywhere.
Internally a Scalar is the integer triple (an, bn, d) representing
(an + bn·i)/d with d > 0 and gcd(an, bn, d) = 1, so equality is literal
equality and printing is canonical; the `re`/`im` properties expose the
components as `fractions.Fraction` in lowest terms.  The integer core
keeps the ring arithmetic hot paths off Fraction's per-operation
normalization overhead.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import InvalidInput

_FracLike = int | Fraction


class Scalar:
    """An element a + b*i of Q(i), exact.

    Immutable and hashable.  Arithmetic is the usual complex arithmetic;
    division by zero raises ZeroDivisionError.
    """

    __slots__ = ("an", "bn", "d")

    def __init__(self, re: _FracLike = 0, im: _FracLike = 0):
        if type(re) is int and type(im) is int:
            an, bn, d = re, im, 1
        else:
            fre, fim = Fraction(re), Fraction(im)
            q = fre.denominator * fim.denominator // gcd(
                fre.denominator, fim.denominator
            )
            an = fre.numerator * (q // fre.denominator)
            bn = fim.numerator * (q // fim.denominator)
            d = q
            g = gcd(an, bn, d)
            if g > 1:
                an //= g
                bn //= g
                d //= g
        object.__setattr__(self, "an", an)
        object.__setattr__(self, "bn", bn)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Scalar is immutable")

    @staticmethod
    def _raw(an: int, bn: int, d: int) -> "Scalar":
        """Build from an unnormalized integer triple."""
        if d < 0:
            an, bn, d = -an, -bn, -d
        g = gcd(an, bn, d)
        if g > 1:
            an //= g
            bn //= g
            d //= g
        out = object.__new__(Scalar)
        object.__setattr__(out, "an", an)
        object.__setattr__(out, "bn", bn)
        object.__setattr__(out, "d", d)
        return out

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_string(text: str) -> "Scalar":
        """Parse 'p/q' or an integer literal; the literal 'i' parses to i.

        Only single-term literals are handled here; full expressions go
        through the polynomial parser.
        """
        s = text.strip()
        if s == "i":
            return Scalar(0, 1)
        if s == "-i":
            return Scalar(0, -1)
        try:
            return Scalar(Fraction(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse scalar literal {text!r}") from exc

    # -- components ----------------------------------------------------

    @property
    def re(self) -> Fraction:
        return Fraction(self.an, self.d)

    @property
    def im(self) -> Fraction:
        return Fraction(self.bn, self.d)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Scalar") -> "Scalar":
        if self.d == other.d:
            return Scalar._raw(self.an + other.an, self.bn + other.bn, self.d)
        return Scalar._raw(
            self.an * other.d + other.an * self.d,
            self.bn * other.d + other.bn * self.d,
            self.d * other.d,
        )

    def __sub__(self, other: "Scalar") -> "Scalar":
        if self.d == other.d:
            return Scalar._raw(self.an - other.an, self.bn - other.bn, self.d)
        return Scalar._raw(
            self.an * other.d - other.an * self.d,
            self.bn * other.d - other.bn * self.d,
            self.d * other.d,
        )

    def __neg__(self) -> "Scalar":
        out = object.__new__(Scalar)
        object.__setattr__(out, "an", -self.an)
        object.__setattr__(out, "bn", -self.bn)
        object.__setattr__(out, "d", self.d)
        return out

    def __mul__(self, other: "Scalar") -> "Scalar":
        a, b, c, e = self.an, self.bn, other.an, other.bn
        return Scalar._raw(a * c - b * e, a * e + b * c, self.d * other.d)

    def inv(self) -> "Scalar":
        n = self.an * self.an + self.bn * self.bn
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in Q(i)")
        return Scalar._raw(self.d * self.an, -self.d * self.bn, n)

    def __truediv__(self, other: "Scalar") -> "Scalar":
        return self * other.inv()

    # -- structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return self.an == 0 and self.bn == 0

    def is_rational(self) -> bool:
        return self.bn == 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Scalar)
            and self.an == other.an
            and self.bn == other.bn
            and self.d == other.d
        )

    def __hash__(self) -> int:
        return hash((self.an, self.bn, self.d))

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- printing ------------------------------------------------------

    def __str__(self) -> str:
        if self.bn == 0:
            return str(self.re)
        if self.an == 0:
            return _imag_str(self.im)
        sign = "+" if self.bn > 0 else "-"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"

    def __repr__(self) -> str:
        return f"Scalar({self.re!r}, {self.im!r})"


def _imag_str(b: Fraction) -> str:
    if b == 1:
        return "i"
    if b == -1:
        return "-i"
    return f"{b}*i"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def scalar_arith(a: Scalar, b: Scalar | None, op: str) -> Scalar:
    """Dispatch arithmetic by name: add, mul, inv, neg.

    inv and neg ignore b.  Kept as a thin named entry point so the
    operation table of the engine is greppable; library code just uses
    operators.
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    raise InvalidInput(f"unknown scalar op {op!r}")
