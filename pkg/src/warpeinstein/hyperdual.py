"""Hyper-dual numbers a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.

Evaluating a function at ``x + e1 u + e2 v`` yields the value, the two
directional derivatives and the mixed second derivative exactly, with no
step-size error. Used by the automatic-differentiation curvature scheme.
"""

from __future__ import annotations

import math


class HyperDual:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b=0.0, c=0.0, d=0.0):
        self.a = float(a)
        self.b = float(b)
        self.c = float(c)
        self.d = float(d)

    def __repr__(self):
        return f"HyperDual({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def apply(self, f0, f1, f2):
        """Lift a scalar function given its value ``f0`` and derivatives ``f1``, ``f2`` at ``self.a``."""
        return HyperDual(f0, f1 * self.b, f1 * self.c, f1 * self.d + f2 * self.b * self.c)

    def __add__(self, other):
        if isinstance(other, HyperDual):
            return HyperDual(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)
        return HyperDual(self.a + other, self.b, self.c, self.d)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.a, -self.b, -self.c, -self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HyperDual):
            return HyperDual(
                self.a * other.a,
                self.a * other.b + self.b * other.a,
                self.a * other.c + self.c * other.a,
                self.a * other.d + self.b * other.c + self.c * other.b + self.d * other.a,
            )
        return HyperDual(self.a * other, self.b * other, self.c * other, self.d * other)

    __rmul__ = __mul__

    def reciprocal(self):
        if self.a == 0.0:
            raise ZeroDivisionError("hyper-dual division by a number with zero real part")
        inv = 1.0 / self.a
        return self.apply(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, HyperDual):
            return self * other.reciprocal()
        return HyperDual(self.a / other, self.b / other, self.c / other, self.d / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if isinstance(n, HyperDual):
            return exp(n * log(self))
        n = float(n)
        if n == int(n):
            k = int(n)
            if k == 0:
                return HyperDual(1.0)
            if k < 0:
                return (self ** (-k)).reciprocal()
            a = self.a
            return self.apply(a**k, k * a ** (k - 1), k * (k - 1) * a ** (k - 2) if k > 1 else 0.0)
        a = self.a
        return self.apply(a**n, n * a ** (n - 1), n * (n - 1) * a ** (n - 2))

    def __abs__(self):
        return -self if self.a < 0 else self

    # comparisons act on the real part so guards written for floats keep working
    def __lt__(self, other):
        return self.a < _real(other)

    def __le__(self, other):
        return self.a <= _real(other)

    def __gt__(self, other):
        return self.a > _real(other)

    def __ge__(self, other):
        return self.a >= _real(other)

    def __float__(self):
        return self.a


def _real(x):
    return x.a if isinstance(x, HyperDual) else x


def real_part(x):
    return x.a if isinstance(x, HyperDual) else float(x)


def exp(x):
    if isinstance(x, HyperDual):
        e = math.exp(x.a)
        return x.apply(e, e, e)
    return math.exp(x)


def log(x):
    if isinstance(x, HyperDual):
        return x.apply(math.log(x.a), 1.0 / x.a, -1.0 / (x.a * x.a))
    return math.log(x)


def sqrt(x):
    if isinstance(x, HyperDual):
        s = math.sqrt(x.a)
        return x.apply(s, 0.5 / s, -0.25 / (s * x.a))
    return math.sqrt(x)


def sin(x):
    if isinstance(x, HyperDual):
        return x.apply(math.sin(x.a), math.cos(x.a), -math.sin(x.a))
    return math.sin(x)


def cos(x):
    if isinstance(x, HyperDual):
        return x.apply(math.cos(x.a), -math.sin(x.a), -math.cos(x.a))
    return math.cos(x)
