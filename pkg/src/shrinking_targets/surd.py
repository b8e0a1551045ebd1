"""Exact nonnegative reals of the form ``q ** (1/m)`` with ``q`` rational.

Radii such as ``1/(2*sqrt(q))`` show up when a product of ``n`` ball measures
has to equal a rational profile; keeping them symbolic lets every membership
test and every measure sum stay exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Union


def iroot(x: int, m: int) -> int:
    """floor(x ** (1/m)) for a nonnegative integer ``x``."""
    if x < 0:
        raise ValueError("iroot of a negative number")
    if x < 2 or m == 1:
        return x
    # Newton iteration from an overestimate
    y = 1 << -(-x.bit_length() // m)
    while True:
        z = ((m - 1) * y + x // y ** (m - 1)) // m
        if z >= y:
            break
        y = z
    while y ** m > x:
        y -= 1
    while (y + 1) ** m <= x:
        y += 1
    return y


def _exact_root(q: Fraction, m: int) -> Fraction | None:
    n, d = iroot(q.numerator, m), iroot(q.denominator, m)
    if n ** m == q.numerator and d ** m == q.denominator:
        return Fraction(n, d)
    return None


class Root:
    """The nonnegative real ``radicand ** (1/index)``.

    Construct through :func:`root`, which collapses perfect powers to a
    plain ``Fraction``.
    """

    __slots__ = ("radicand", "index")

    def __init__(self, radicand: Fraction, index: int):
        if radicand < 0 or index < 2:
            raise ValueError("Root needs radicand >= 0 and index >= 2")
        self.radicand = Fraction(radicand)
        self.index = index

    def __repr__(self) -> str:
        return f"Root({self.radicand}, {self.index})"

    def __float__(self) -> float:
        return float(self.radicand) ** (1.0 / self.index)

    def __hash__(self) -> int:
        return hash((self.radicand, self.index))

    def power(self, k: int) -> "Real":
        """``self ** k`` exactly; rational when ``index`` divides ``k``."""
        return root(self.radicand ** k, self.index)

    __pow__ = power

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, m = _common(self, other)
        return root(a * b, m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, m = _common(self, other)
        return root(a / b, m)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, m = _common(other, self)
        return root(a / b, m)

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            raise TypeError(f"cannot compare Root with {type(other).__name__}")
        a, b, _ = _common(self, other)
        return (a > b) - (a < b)

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0


Real = Union[Fraction, Root]


def _coerce(x):
    if isinstance(x, Root):
        return x
    if isinstance(x, (int, Fraction)):
        if x < 0:
            raise ValueError("only nonnegative values are supported")
        return Fraction(x)
    return NotImplemented


def _common(a, b) -> tuple[Fraction, Fraction, int]:
    """Raise both operands to a common index so they compare as rationals."""
    ma = a.index if isinstance(a, Root) else 1
    mb = b.index if isinstance(b, Root) else 1
    m = ma * mb // gcd(ma, mb)
    ra = a.radicand if isinstance(a, Root) else a
    rb = b.radicand if isinstance(b, Root) else b
    return ra ** (m // ma), rb ** (m // mb), m


def root(q, m: int) -> Real:
    """``q ** (1/m)`` as a Fraction when exact, else as a Root."""
    q = Fraction(q)
    if m == 1:
        return q
    exact = _exact_root(q, m)
    if exact is not None:
        return exact
    return Root(q, m)


def power(x: Real, k: int) -> Real:
    if isinstance(x, Root):
        return x.power(k)
    return Fraction(x) ** k


def is_rational(x) -> bool:
    return not isinstance(x, Root)


def to_float(x) -> float:
    return float(x)
