"""Exact complex rationals for the zero-tolerance scalar mode.

Floats are converted with ``Fraction(float)``, which is exact on the binary
value, so literals such as ``0.5`` or ``1j`` enter without rounding.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from math import isqrt


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, numbers.Real):
        return Fraction(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


_ZERO = Fraction(0)


class GaussianRational:
    """Complex number with :class:`~fractions.Fraction` real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, numbers.Real):
            return cls(x, 0)
        if isinstance(x, numbers.Complex):
            z = complex(x)
            return cls(z.real, z.imag)
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    def __add__(self, other):
        if type(other) is GaussianRational:
            o = other
        else:
            try:
                o = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        # skip Fraction arithmetic on zero parts; object arrays of symbols are mostly sparse
        if not (o.re or o.im):
            return self
        if not (self.re or self.im):
            return o
        return GaussianRational._raw(
            self.re + o.re if o.re else self.re, self.im + o.im if o.im else self.im
        )

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        if type(other) is GaussianRational:
            o = other
        else:
            try:
                o = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, o.re, o.im
        if not (a or b):
            return self
        if not (c or d):
            return o
        if not b and not d:
            return GaussianRational._raw(a * c, _ZERO)
        if not a and not c:
            return GaussianRational._raw(-(b * d), _ZERO)
        if not b:
            return GaussianRational._raw(a * c if c else _ZERO, a * d if d else _ZERO)
        if not d:
            return GaussianRational._raw(a * c if a else _ZERO, b * c)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den
        )

    def __rtruediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def exact_sqrt(self) -> "GaussianRational":
        """Square root of a non-negative rational that is a perfect square."""
        if self.im != 0 or self.re < 0:
            raise ValueError(f"no exact real square root of {self!r}")
        num, den = self.re.numerator, self.re.denominator
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn != num or rd * rd != den:
            raise ValueError(f"{self.re} is not a rational square")
        return GaussianRational(Fraction(rn, rd), 0)

    def __repr__(self):
        if self.im == 0:
            return f"Q({self.re})"
        return f"Q({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"
