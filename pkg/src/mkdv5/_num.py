"""Shared numeric helpers: an exact complex-rational type and a few
polymorphic operations that work on Python scalars (int/Fraction/RC) and
numpy arrays alike.  Multiplier formulas are written once against these
helpers and run in both the exact-certification backend and the vectorized
float backend.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce

import numpy as np


class RC:
    """Complex number with exact rational real/imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def _coerce(x):
        if isinstance(x, RC):
            return x
        if isinstance(x, (int, Fraction)):
            return RC(x, 0)
        if isinstance(x, bool):
            return RC(int(x), 0)
        return NotImplemented

    def __add__(self, o):
        o = RC._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return RC(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return RC(-self.re, -self.im)

    def __sub__(self, o):
        o = RC._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return RC(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        o = RC._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return RC(o.re - self.re, o.im - self.im)

    def __mul__(self, o):
        o = RC._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return RC(self.re * o.re - self.im * o.im,
                  self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = RC._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        return RC((self.re * o.re + self.im * o.im) / d,
                  (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, o):
        o = RC._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return o.__truediv__(self)

    def __eq__(self, o):
        o = RC._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __abs__(self):
        # exact only when the value lies on an axis; callers that need a
        # genuine modulus should square instead
        if self.re == 0:
            return abs(self.im)
        if self.im == 0:
            return abs(self.re)
        return (float(self.re) ** 2 + float(self.im) ** 2) ** 0.5

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"RC({self.re!r}, {self.im!r})"

    def conjugate(self):
        return RC(self.re, -self.im)


I_EXACT = RC(0, 1)


def is_array(*xs) -> bool:
    return any(isinstance(x, np.ndarray) for x in xs)


def nmax(*vals):
    """Elementwise maximum, polymorphic over scalars and arrays."""
    if is_array(*vals):
        return reduce(np.maximum, vals)
    return max(vals)


def nmin(*vals):
    if is_array(*vals):
        return reduce(np.minimum, vals)
    return min(vals)


def safe_div(num, den):
    """num/den with the convention value := 0 when den == 0."""
    if is_array(num, den):
        den = np.asarray(den)
        bad = den == 0
        out = np.asarray(num) / np.where(bad, 1, den)
        return np.where(bad, 0, out)
    if den == 0:
        return 0 * num
    if isinstance(num, (int, Fraction)) and isinstance(den, (int, Fraction)):
        return Fraction(num, den)
    return num / den


def second_largest_abs(ks):
    """Second largest of |k_j|; polymorphic (list of scalars or arrays)."""
    if is_array(*ks):
        a = np.sort(np.stack([np.abs(np.asarray(k)) for k in ks]), axis=0)
        return a[-2]
    return sorted(abs(k) for k in ks)[-2]


def as_complex(x):
    if isinstance(x, RC):
        return complex(x)
    return complex(x)
