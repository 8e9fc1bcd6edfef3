"""Exact arithmetic in the Gaussian rationals Q(i)."""
from __future__ import annotations

from fractions import Fraction


class QI:
    """A number ``re + im*I`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def _maybe(x):
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Fraction)):
            return QI(x, 0)
        return None

    @staticmethod
    def coerce(x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Fraction)):
            return QI(x, 0)
        raise TypeError(f"cannot coerce {x!r} to QI")

    def __add__(self, other):
        other = QI._maybe(other)
        if other is None:
            return NotImplemented
        return QI(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        other = QI._maybe(other)
        if other is None:
            return NotImplemented
        return QI(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = QI._maybe(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = QI._maybe(other)
        if other is None:
            return NotImplemented
        return QI(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def inverse(self) -> "QI":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("QI division by zero")
        return QI(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = QI._maybe(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QI.coerce(other) * self.inverse()

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QI(other)
        if not isinstance(other, QI):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        def frac(q: Fraction) -> str:
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        if not self.im:
            return frac(self.re)
        if not self.re:
            if self.im == 1:
                return "I"
            if self.im == -1:
                return "-I"
            return f"{frac(self.im)}*I"
        im = self.im
        sign = "+" if im > 0 else "-"
        mag = abs(im)
        imag = "I" if mag == 1 else f"{frac(mag)}*I"
        return f"({frac(self.re)} {sign} {imag})"


ZERO = QI(0)
ONE = QI(1)
I = QI(0, 1)
