"""Exact arithmetic on the circle R/Z and the torus.

Points are kept as exact rationals in [0, 1). Two backends share the same
type: *rational* points carry arbitrary Fractions, *fixed* points are
dyadic with a ``bits``-bit mantissa and track how many of those bits are
still trustworthy after integer multiplications.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .surd import Real, Root

HALF = Fraction(1, 2)
MIN_VALID_BITS = 32


class PrecisionError(ArithmeticError):
    """Fixed-point precision budget exhausted."""


class BackendMismatch(ValueError):
    """Rational and fixed-point values were combined in one computation."""


def frac(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class CirclePoint:
    value: Fraction
    bits: int | None = None
    valid_bits: int | None = None

    def __post_init__(self):
        v = frac(self.value)
        object.__setattr__(self, "value", v)
        if self.bits is not None:
            if (v * (1 << self.bits)).denominator != 1:
                raise ValueError(f"{v} is not representable with {self.bits} bits")
            if self.valid_bits is None:
                object.__setattr__(self, "valid_bits", self.bits)

    @classmethod
    def fixed(cls, mantissa: int, bits: int, valid_bits: int | None = None) -> "CirclePoint":
        return cls(Fraction(mantissa % (1 << bits), 1 << bits), bits, valid_bits)

    @classmethod
    def rounded(cls, x, bits: int | None) -> "CirclePoint":
        """Round ``x`` down onto the backend grid (exact when ``bits`` is None)."""
        x = Fraction(x)
        if bits is None:
            return cls(x)
        return cls.fixed((x.numerator << bits) // x.denominator, bits)

    @property
    def is_fixed(self) -> bool:
        return self.bits is not None

    @property
    def mantissa(self) -> int:
        if self.bits is None:
            raise BackendMismatch("rational point has no mantissa")
        return int(self.value * (1 << self.bits))

    def _check(self, other: "CirclePoint"):
        if self.bits != other.bits:
            raise BackendMismatch(f"cannot mix backends ({self.bits} vs {other.bits} bits)")

    def __add__(self, other: "CirclePoint") -> "CirclePoint":
        self._check(other)
        vb = None if self.bits is None else min(self.valid_bits, other.valid_bits)
        return CirclePoint(self.value + other.value, self.bits, vb)

    def __sub__(self, other: "CirclePoint") -> "CirclePoint":
        self._check(other)
        vb = None if self.bits is None else min(self.valid_bits, other.valid_bits)
        return CirclePoint(self.value - other.value, self.bits, vb)

    def __neg__(self) -> "CirclePoint":
        return CirclePoint(-self.value, self.bits, self.valid_bits)

    def shift(self, t) -> "CirclePoint":
        """Translate by a rational amount (must stay on the fixed grid)."""
        return CirclePoint(self.value + Fraction(t), self.bits, self.valid_bits)

    def scale(self, k: int, min_bits: int = MIN_VALID_BITS) -> "CirclePoint":
        """``k * self mod 1``; each doubling of ``k`` costs one valid bit."""
        if k < 0:
            raise ValueError("scale factor must be a nonnegative integer")
        if self.bits is None:
            return CirclePoint(self.value * k)
        valid = self.valid_bits - max(k - 1, 0).bit_length()
        if valid < min_bits:
            raise PrecisionError(
                f"multiplying by {k} leaves {valid} valid bits (< {min_bits})")
        return CirclePoint(self.value * k, self.bits, valid)

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        if self.bits is None:
            return f"CirclePoint({self.value})"
        return f"CirclePoint({float(self.value)!r}, bits={self.bits})"


def point(x, bits: int | None = None) -> CirclePoint:
    if isinstance(x, CirclePoint):
        return x
    if isinstance(x, str):
        x = Fraction(x)
    return CirclePoint.rounded(x, bits)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[CirclePoint, ...]

    def __post_init__(self):
        coords = tuple(point(c) for c in self.coords)
        if not coords:
            raise ValueError("torus dimension must be >= 1")
        if len({c.bits for c in coords}) != 1:
            raise BackendMismatch("all torus coordinates must share one backend")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *values, bits: int | None = None) -> "TorusPoint":
        return cls(tuple(point(v, bits) for v in values))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __getitem__(self, j: int) -> CirclePoint:
        return self.coords[j]

    def __iter__(self):
        return iter(self.coords)


def as_torus(x) -> TorusPoint:
    if isinstance(x, TorusPoint):
        return x
    if isinstance(x, (tuple, list)):
        return TorusPoint(tuple(point(c) for c in x))
    return TorusPoint((point(x),))


# -- semigroup N^n under componentwise multiplication -------------------------

def semigroup_index(k) -> tuple[int, ...]:
    k = (k,) if isinstance(k, int) else tuple(k)
    if not k or any((not isinstance(c, int)) or c < 1 for c in k):
        raise ValueError(f"semigroup index must be positive integers, got {k!r}")
    return k


def compose(k, l) -> tuple[int, ...]:
    k, l = semigroup_index(k), semigroup_index(l)
    if len(k) != len(l):
        raise ValueError("dimension mismatch")
    return tuple(a * b for a, b in zip(k, l))


def identity(n: int) -> tuple[int, ...]:
    return (1,) * n


def act(k, alpha, min_bits: int = MIN_VALID_BITS) -> TorusPoint:
    """The expanding action ``alpha -> (k_1 alpha_1, ..., k_n alpha_n) mod 1``."""
    k = semigroup_index(k)
    alpha = as_torus(alpha)
    if len(k) != alpha.dim:
        raise ValueError(f"index of length {len(k)} acting on T^{alpha.dim}")
    return TorusPoint(tuple(a.scale(kj, min_bits) for kj, a in zip(k, alpha)))


# -- distance, balls -------------------------------------------------------

def _value(x) -> Fraction:
    return x.value if isinstance(x, CirclePoint) else frac(x)


def dist(x, y) -> Fraction:
    d = frac(_value(x) - _value(y))
    return min(d, 1 - d)


class Side(enum.Enum):
    LEFT = "Left"
    RIGHT = "Right"
    CENTER = "Center"
    ANTIPODE = "Antipode"


def signed_offset(center, y) -> Fraction:
    """Lift of ``y`` into (-1/2, 1/2] around ``center``."""
    d = frac(_value(y) - _value(center))
    return d if d <= HALF else d - 1


def half_interval_side(center, y) -> Side:
    d = frac(_value(y) - _value(center))
    if d == 0:
        return Side.CENTER
    if d == HALF:
        return Side.ANTIPODE
    return Side.RIGHT if d < HALF else Side.LEFT


def ordered_less(center, a, b) -> bool:
    """The ordering on B(center, 1/2) induced by lifting to one component."""
    for y in (a, b):
        if half_interval_side(center, y) is Side.ANTIPODE:
            raise ValueError("the antipode is outside B(center, 1/2)")
    return signed_offset(center, a) < signed_offset(center, b)


@dataclass(frozen=True)
class Arc:
    """Open ball B(center, radius); radii above 1/2 are clamped to 1/2."""

    center: CirclePoint
    radius: Real

    def __post_init__(self):
        object.__setattr__(self, "center", point(self.center))
        r = self.radius
        if not isinstance(r, Root):
            r = Fraction(r)
        if r < 0:
            raise ValueError("negative radius")
        if r > HALF:
            r = HALF
        object.__setattr__(self, "radius", r)

    @property
    def is_empty(self) -> bool:
        return self.radius == 0

    @property
    def is_full(self) -> bool:
        return self.radius == HALF

    @property
    def length(self) -> Real:
        return 2 * self.radius

    def diameter(self) -> Fraction:
        """Metric diameter, computed from the endpoint form."""
        a, b = self.endpoints()
        if self.is_full:
            return HALF
        span = frac(b - a)
        return min(span, HALF)

    def endpoints(self) -> tuple[Fraction, Fraction]:
        if isinstance(self.radius, Root):
            raise TypeError("endpoint form needs a rational radius")
        c = self.center.value
        return frac(c - self.radius), frac(c + self.radius)

    @classmethod
    def from_endpoints(cls, a, b, full: bool = False, bits: int | None = None) -> "Arc":
        """The open arc from ``a`` counterclockwise to ``b``.

        ``a == b`` is the empty arc unless ``full`` is set, in which case it is
        the circle minus the single point ``a``.
        """
        a, b = _value(a), _value(b)
        if a == b:
            if full:
                return cls(CirclePoint.rounded(a + HALF, bits) if bits else CirclePoint(a + HALF), HALF)
            return cls(CirclePoint.rounded(a, bits) if bits else CirclePoint(a), 0)
        span = frac(b - a)
        c = a + span / 2
        return cls(CirclePoint.rounded(c, bits) if bits else CirclePoint(c), span / 2)

    def contains(self, y) -> bool:
        return ball_contains(self, y)


def ball(center, radius) -> Arc:
    return Arc(point(center), radius)


def ball_contains(b: Arc, y) -> bool:
    return dist(b.center, y) < b.radius


def arc_pieces(b: Arc) -> list[tuple[Fraction, Fraction]]:
    """Split an arc into lifted intervals inside [0, 1]."""
    if b.is_empty:
        return []
    if b.is_full:
        return [(Fraction(0), Fraction(1))]
    a, e = b.endpoints()
    if a < e:
        return [(a, e)]
    pieces = [(a, Fraction(1))]
    if e > 0:
        pieces.append((Fraction(0), e))
    return pieces


def union_measure(arcs: Iterable[Arc]) -> Fraction:
    """Exact Lebesgue measure of a finite union of arcs (sort and sweep)."""
    pieces = sorted(p for b in arcs for p in arc_pieces(b))
    total = Fraction(0)
    cur_a = cur_b = None
    for a, b in pieces:
        if cur_b is None or a > cur_b:
            if cur_b is not None:
                total += cur_b - cur_a
            cur_a, cur_b = a, b
        elif b > cur_b:
            cur_b = b
    if cur_b is not None:
        total += cur_b - cur_a
    return total


def disjoint_pieces(arcs: Iterable[Arc]) -> list[tuple[Fraction, Fraction]]:
    """The union of ``arcs`` as sorted disjoint lifted intervals in [0, 1]."""
    out: list[list[Fraction]] = []
    for a, b in sorted(p for arc in arcs for p in arc_pieces(arc)):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def product_ball_contains(centers: Sequence, radius, y: TorusPoint) -> bool:
    """Membership in the product of equal-radius balls (per coordinate)."""
    return all(dist(c, yj) < radius for c, yj in zip(centers, y))


Number = Union[int, Fraction]
