"""Non-atomic Borel probability measures on the circle, given by their CDFs.

Singular measures (Cantor, Denjoy) are first-class: everything here works
from ``F`` alone, evaluated on exact rationals.
"""
from __future__ import annotations

import enum
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .circle import HALF, Arc, CirclePoint, frac, point
from .surd import Real, Root

DEFAULT_TOL = Fraction(1, 1 << 40)


class ToleranceError(ArithmeticError):
    """The requested accuracy is below what the measure can certify."""


class CircleMeasure:
    """Base class: subclasses implement ``cdf`` on [0, 1]."""

    kind = "custom"
    cdf_error = Fraction(0)

    def cdf(self, x: Fraction) -> Fraction:
        raise NotImplementedError

    def knots(self) -> Sequence[Fraction] | None:
        """Breakpoints of a piecewise-linear CDF, or None if not piecewise linear."""
        return None

    def describe(self) -> dict:
        return {"kind": self.kind}

    def _F(self, x: Fraction) -> Fraction:
        if x <= 0:
            return Fraction(0)
        if x >= 1:
            return Fraction(1)
        return self.cdf(x)

    def interval(self, a, b) -> Fraction:
        """nu((a, b)) with (a, b) read counterclockwise; a == b is empty."""
        a, b = frac(_val(a)), frac(_val(b))
        if a <= b:
            return self._F(b) - self._F(a)
        return 1 - self._F(a) + self._F(b)

    def ball(self, center, radius) -> Real:
        """nu(B(center, radius)); radii >= 1/2 give the whole circle."""
        if not isinstance(radius, Root):
            radius = Fraction(radius)
        if radius <= 0:
            return Fraction(0)
        if radius >= HALF:
            return Fraction(1)
        if isinstance(radius, Root):
            raise TypeError(f"{self.kind} measure needs rational radii")
        c = _val(center)
        return self.interval(c - radius, c + radius)

    def arc(self, b: Arc) -> Real:
        return self.ball(b.center, b.radius)

    def pieces(self, pieces: Sequence[tuple[Fraction, Fraction]]) -> Fraction:
        """Measure of disjoint lifted intervals inside [0, 1]."""
        return sum((self._F(b) - self._F(a) for a, b in pieces), Fraction(0))


def _val(x) -> Fraction:
    return x.value if isinstance(x, CirclePoint) else Fraction(x)


class Lebesgue(CircleMeasure):
    kind = "lebesgue"

    def cdf(self, x):
        return Fraction(x)

    def knots(self):
        return []

    def ball(self, center, radius):
        # exact for Root radii too
        if radius >= HALF:
            return Fraction(1)
        if radius <= 0:
            return Fraction(0)
        return 2 * radius


class CantorStaircase(CircleMeasure):
    """The middle-thirds Cantor measure; F is read off base-3 digits."""

    kind = "cantor"

    def __init__(self, depth: int = 60):
        if depth < 1:
            raise ValueError("depth must be positive")
        self.depth = depth
        self.cdf_error = Fraction(1, 1 << depth)

    def describe(self):
        return {"kind": self.kind, "depth": self.depth}

    def cdf(self, x):
        x = Fraction(x)
        if x <= 0:
            return Fraction(0)
        if x >= 1:
            return Fraction(1)
        num, den = x.numerator, x.denominator
        depth = self.depth
        acc = 0
        for i in range(1, depth + 1):
            d, num = divmod(3 * num, den)
            if d:
                acc += 1 << (depth - i)
                if d == 1:
                    break
            if num == 0:
                break
        return Fraction(acc, 1 << depth)


class DenjoyInvariant(CircleMeasure):
    """nu(A) = Lebesgue(h(A)) where h collapses the inserted Denjoy gaps."""

    kind = "denjoy"

    def __init__(self, system):
        self.system = system
        self._knots = system.gap_knots()

    def describe(self):
        return {"kind": self.kind, "system": self.system.describe()}

    def cdf(self, x):
        return self.system.collapse(Fraction(x))

    def knots(self):
        return self._knots


class CustomMeasure(CircleMeasure):
    def __init__(self, cdf: Callable[[Fraction], Fraction], error=0, name: str = "custom"):
        self._cdf = cdf
        self.cdf_error = Fraction(error)
        self.name = name

    def describe(self):
        return {"kind": self.kind, "name": self.name}

    def cdf(self, x):
        return Fraction(self._cdf(Fraction(x)))


def interval_measure(m: CircleMeasure, a, b, tol=None) -> Fraction:
    if tol is not None and 2 * m.cdf_error > Fraction(tol):
        raise ToleranceError(f"{m.kind} CDF error {float(m.cdf_error):.3g} exceeds tol/2")
    return m.interval(a, b)


def max_atom_mass(m: CircleMeasure, delta, grid: int = 256) -> Fraction:
    """Non-atomicity proxy: the largest mass of B(x, delta) over a uniform grid."""
    delta = Fraction(delta)
    return max(m.ball(Fraction(i, grid), delta) for i in range(grid))


# -- t_n ----------------------------------------------------------------------

class _MassProfile:
    """r -> nu(B(x, r)) for piecewise-linear CDFs, tabulated at its knots."""

    def __init__(self, m: CircleMeasure, x: Fraction):
        self.m, self.x = m, x
        radii = {HALF}
        for k in m.knots():
            for d in (frac(k - x), frac(x - k)):
                if 0 < d < HALF:
                    radii.add(d)
        self.radii = [Fraction(0)] + sorted(radii)
        self.mass = [m.ball(x, r) for r in self.radii]

    def inverse(self, v: Fraction) -> Fraction:
        """inf{r : nu(B(x, r)) >= v}, exact."""
        i = bisect_left(self.mass, v)
        if i == 0:
            return Fraction(0)
        r0, r1 = self.radii[i - 1], self.radii[i]
        g0, g1 = self.mass[i - 1], self.mass[i]
        return r0 + (v - g0) * (r1 - r0) / (g1 - g0)


_profiles: dict = {}


def _profile(m, x):
    key = (id(m), x)
    prof = _profiles.get(key)
    if prof is None or prof.m is not m:
        prof = _MassProfile(m, x)
        if len(_profiles) > 64:
            _profiles.clear()
        _profiles[key] = prof
    return prof


def _bisect_t(m: CircleMeasure, x: Fraction, v: Fraction, tol: Fraction, max_iter: int) -> Fraction:
    lo, hi = Fraction(0), HALF
    for _ in range(max_iter):
        if hi - lo <= tol:
            return hi
        mid = (lo + hi) / 2
        if m.ball(x, mid) >= v:
            hi = mid
        else:
            lo = mid
    raise ToleranceError(f"bisection did not reach tol={float(tol):.3g} in {max_iter} steps")


def t_sequence(m: CircleMeasure, x, n: int, tol=DEFAULT_TOL, method: str = "auto",
               max_iter: int = 400) -> Fraction:
    """t_n = inf{r >= 0 : nu(B(x, r)) >= 1/n}.

    ``method='exact'`` inverts a piecewise-linear CDF at its knots;
    ``'bisect'`` bisects on the dyadic grid down to ``tol`` and returns the
    upper bracket, so nu(B(x, t_n)) >= 1/n always holds.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x = _val(point(x))
    v = Fraction(1, n)
    knots = m.knots()
    if method == "auto":
        method = "exact" if knots is not None else "bisect"
    if method == "exact":
        if knots is None:
            raise ValueError(f"{m.kind} measure has no piecewise-linear CDF")
        return _profile(m, x).inverse(v)
    if method == "bisect":
        return _bisect_t(m, x, v, Fraction(tol), max_iter)
    raise ValueError(f"unknown method {method!r}")


def t_values(m: CircleMeasure, x, count: int, **kw) -> list[Fraction]:
    return [t_sequence(m, x, n, **kw) for n in range(1, count + 1)]


# -- support ---------------------------------------------------------------

def _schedule(tol: Fraction):
    r = HALF
    while r >= tol:
        yield r
        r /= 2


def _positive(m: CircleMeasure, mass) -> bool:
    return mass > 2 * m.cdf_error


def support_contains(m: CircleMeasure, x, tol=DEFAULT_TOL) -> bool:
    """Whether every ball around x down to radius ``tol`` has positive mass.

    This is a resolution-limited answer: a point at distance below ``tol``
    from the support is reported as inside it.
    """
    x = _val(point(x))
    return all(_positive(m, m.ball(x, r)) for r in _schedule(Fraction(tol)))


class SupportKind(enum.Enum):
    BOTH_SIDES = "BothSides"
    ISOLATED_LEFT = "IsolatedLeft"
    ISOLATED_RIGHT = "IsolatedRight"


class AmbiguousClassification(ValueError):
    pass


@dataclass(frozen=True)
class SupportClassification:
    kind: SupportKind
    gap_partner: Fraction | None = None
    gap_size: Fraction | None = None
    resolution: Fraction = DEFAULT_TOL
    certified: bool = True

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "resolution": str(self.resolution),
             "certified": self.certified}
        if self.gap_partner is not None:
            d["y"] = str(self.gap_partner)
            d["s_x"] = str(self.gap_size)
        return d


def _one_sided(m, x, rho, side):
    if side > 0:
        return m.interval(x, x + rho)
    return m.interval(x - rho, x)


def _gap_edge(m, x, side, tol, max_den):
    """Largest rho with nu of the one-sided interval of length rho equal to 0."""
    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _positive(m, _one_sided(m, x, mid, side)):
            hi = mid
        else:
            lo = mid
    # snap to a nearby simple rational and certify it exactly
    cand = ((lo + hi) / 2).limit_denominator(max_den)
    if 0 < cand and abs(cand - lo) <= tol:
        if (not _positive(m, _one_sided(m, x, cand, side))
                and _positive(m, _one_sided(m, x, cand + tol, side))):
            return cand, True
    return lo, False


def classify_support_point(m: CircleMeasure, x, tol=DEFAULT_TOL,
                           max_den: int = 10 ** 5) -> SupportClassification:
    """Decide whether x is approached by supp(nu) from both sides.

    For a one-sided point the partner y closes the null gap and s_x is the
    Lebesgue length of that gap. Gaps narrower than ``tol`` are invisible.
    """
    tol = Fraction(tol)
    xv = _val(point(x))
    right = _positive(m, _one_sided(m, xv, tol, +1))
    left = _positive(m, _one_sided(m, xv, tol, -1))
    if right and left:
        return SupportClassification(SupportKind.BOTH_SIDES, resolution=tol)
    if not right and not left:
        raise AmbiguousClassification(
            f"no mass within {float(tol):.3g} of x on either side; x is not in the support at this resolution")
    side = +1 if not right else -1
    rho, certified = _gap_edge(m, xv, side, tol, max_den)
    y = frac(xv + side * rho)
    kind = SupportKind.ISOLATED_RIGHT if side > 0 else SupportKind.ISOLATED_LEFT
    return SupportClassification(kind, y, rho, tol, certified)
