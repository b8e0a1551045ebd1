"""The dynamical systems: expanding maps, rotations and a Denjoy homeomorphism."""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import contfrac
from .circle import (HALF, MIN_VALID_BITS, Arc, CirclePoint, TorusPoint, act, as_torus,
                     dist, frac, point, semigroup_index)


class NotInvertible(TypeError):
    pass


class ScanBudgetExceeded(RuntimeError):
    """Fewer best returns than requested were found; ``partial`` holds them."""

    def __init__(self, msg, partial):
        super().__init__(msg)
        self.partial = partial


class TruncationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PreimageInterval:
    a: Fraction
    b: Fraction
    step: int
    arc: Arc


@dataclass(frozen=True)
class RecurrenceTimes:
    base: CirclePoint
    times: tuple[int, ...]
    distances: tuple[Fraction, ...]

    def __len__(self):
        return len(self.times)


class System:
    invertible = False
    isometry = False
    kind = "system"

    def describe(self) -> dict:
        return {"kind": self.kind}

    def forward(self, g, alpha):
        raise NotImplementedError

    # invertible systems override these
    def iterate(self, z: CirclePoint, n: int) -> CirclePoint:
        raise NotInvertible(f"{self.kind} has no inverse")

    def preimage_ball(self, n: int, b: Arc) -> PreimageInterval:
        raise NotInvertible(f"{self.kind} has no inverse; count forward hits instead")

    def recurrence_times(self, x, count: int, **kw) -> RecurrenceTimes:
        raise NotInvertible(f"{self.kind} has no inverse")


class MultExpanding(System):
    """T^k(alpha) = k alpha on T^1 for k in (N, *)."""

    kind = "mult_expanding"
    dim = 1

    def forward(self, k, alpha, min_bits: int = MIN_VALID_BITS):
        k = semigroup_index(k)
        if len(k) != 1:
            raise ValueError("MultExpanding acts by scalars")
        res = act(k, alpha, min_bits)
        return res if isinstance(alpha, TorusPoint) else res[0]


class SimultExpanding(System):
    """T^k(alpha) = (k_1 alpha_1, ..., k_n alpha_n) on T^n for k in N^n."""

    kind = "simult_expanding"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = dim

    def describe(self):
        return {"kind": self.kind, "dim": self.dim}

    def forward(self, k, alpha, min_bits: int = MIN_VALID_BITS):
        alpha = as_torus(alpha)
        if alpha.dim != self.dim:
            raise ValueError(f"point on T^{alpha.dim}, system on T^{self.dim}")
        return act(k, alpha, min_bits)


def _records(distances: Iterator[tuple[int, Fraction]], count: int):
    times, dists = [], []
    best = None
    for n, d in distances:
        if best is None or d < best:
            times.append(n)
            dists.append(d)
            best = d
            if len(times) == count or d == 0:
                break
    return times, dists


class _Invertible(System):
    invertible = True

    def _map(self, v: Fraction, n: int) -> Fraction:
        """f^n on exact rationals (negative n for preimages)."""
        raise NotImplementedError

    def _check_steps(self, n: int):
        """Raise if n steps exceed the backend's precision budget."""

    def iterate(self, z, n: int) -> CirclePoint:
        z = point(z)
        self._check_steps(n)
        return CirclePoint(self._map(z.value, n))

    def backward(self, n: int, z) -> CirclePoint:
        return self.iterate(z, -n)

    def preimage_ball(self, n: int, b: Arc) -> PreimageInterval:
        """f^{-n}(b), mapping the two endpoints (orientation is preserved)."""
        self._check_steps(n)
        c = self._map(b.center.value, -n)
        if b.is_empty:
            return PreimageInterval(c, c, n, Arc(CirclePoint(c), 0))
        if b.is_full:
            anti = self._map(b.center.value + HALF, -n)
            return PreimageInterval(anti, anti, n, Arc.from_endpoints(anti, anti, full=True))
        a0, b0 = b.endpoints()
        an, bn = self._map(a0, -n), self._map(b0, -n)
        if frac(c - an) > frac(bn - an):
            raise TruncationError(f"f^-{n}(center) escaped its preimage interval")
        return PreimageInterval(an, bn, n, Arc.from_endpoints(an, bn))

    def _scan(self, x: Fraction, budget: int):
        z = x
        for n in range(1, budget + 1):
            z = self._map(z, -1)
            yield n, dist(z, x)

    def recurrence_times(self, x, count: int, method: str = "auto",
                         budget: int = 10 ** 6) -> RecurrenceTimes:
        """The first ``count`` best-return times of f^{-1} at x.

        n is a best return when d(f^{-n}x, x) < d(f^{-m}x, x) for 1 <= m < n.
        ``method='scan'`` iterates up to ``budget`` steps; ``'auto'`` uses the
        system's continued-fraction shortcut when it has one.
        """
        x = point(x)
        xv = x.value
        if method == "auto":
            method = "fast" if hasattr(self, "_fast_candidates") else "scan"
        if method == "scan":
            stream = self._scan(xv, budget)
        elif method == "fast":
            stream = ((n, dist(self._map(xv, -n), xv)) for n in self._fast_candidates())
        else:
            raise ValueError(f"unknown method {method!r}")
        times, dists = _records(stream, count)
        if times:
            self._check_steps(times[-1])
        result = RecurrenceTimes(x, tuple(times), tuple(dists))
        if len(times) < count:
            raise ScanBudgetExceeded(
                f"found {len(times)} of {count} best returns", result)
        return result

    def rotation_number_estimate(self, n: int, start=0) -> Fraction:
        """Average lifted displacement over n steps.

        The lift is normalised so one step moves by an amount in [0, 1);
        valid for orientation-preserving maps without fixed points and for
        the identity.
        """
        z = point(start).value
        total = Fraction(0)
        for _ in range(n):
            w = self._map(z, 1)
            total += frac(w - z)
            z = w
        return total / n


class Rotation(_Invertible):
    isometry = True
    kind = "rotation"

    def __init__(self, theta):
        self.theta = point(theta)

    @property
    def bits(self):
        return self.theta.bits

    def describe(self):
        d = {"kind": self.kind, "theta": float(self.theta.value)}
        if self.theta.bits is None:
            d["theta_exact"] = str(self.theta.value)
        else:
            d["bits"] = self.theta.bits
        return d

    def _check_steps(self, n: int):
        self.theta.scale(abs(n))

    def _map(self, v, n):
        return frac(v + n * self.theta.value)

    def forward(self, n: int, alpha):
        return self.iterate(alpha, n)

    def iterate(self, z, n: int) -> CirclePoint:
        z = point(z)
        step = self.theta.scale(abs(n))
        if z.bits == step.bits:
            return z + step if n >= 0 else z - step
        return CirclePoint(self._map(z.value, n))

    def _fast_candidates(self):
        return contfrac.best_return_denominators(self.theta.value)


def make_rotation(theta) -> Rotation:
    return Rotation(theta)


# -- Denjoy ---------------------------------------------------------------

class DenjoyParameterError(ValueError):
    pass


class Denjoy(_Invertible):
    """Truncated Denjoy homeomorphism built by blowing up the orbit of 0.

    Gaps I_n of length c * lam**|n| are inserted at the rotation orbit points
    {n theta} for |n| <= n_max; the rest of the circle is the old circle
    shrunk by the inserted length. The map sends I_n affinely onto I_{n+1},
    collapses I_{n_max} onto the point Phi({(n_max+1) theta}), and elsewhere
    is Phi o R_theta o h. With that closure the collapse h satisfies
    h(f(z)) = h(z) + theta exactly; the only departures from a true
    homeomorphism are the collapsed gap and the uncovered gap I_{-n_max},
    both of length <= the reported tail.
    """

    kind = "denjoy"

    def __init__(self, theta, c=Fraction(1, 6), lam=Fraction(1, 2), n_max: int = 64,
                 tol=Fraction(1, 10 ** 18)):
        theta = point(theta)
        c, lam, tol = Fraction(c), Fraction(lam), Fraction(tol)
        if not 0 < lam < 1:
            raise DenjoyParameterError("need 0 < lambda < 1")
        if c <= 0:
            raise DenjoyParameterError("need c > 0")
        total = c * (1 + 2 * lam / (1 - lam))
        if total >= 1:
            raise DenjoyParameterError(f"total gap length {total} must be < 1")
        tail = 2 * c * lam ** (n_max + 1) / (1 - lam)
        if tail >= tol:
            raise DenjoyParameterError(
                f"tail {float(tail):.3g} beyond n_max={n_max} is not below tol={float(tol):.3g}")
        th = theta.value
        if th == 0 or th.denominator <= 10 ** 6:
            raise DenjoyParameterError("theta must have no denominator <= 10^6")
        self.theta_point = theta
        self.theta, self.c, self.lam, self.n_max, self.tol = th, c, lam, n_max, tol
        self.total_gap_length = total
        self.tail = tail
        idx = range(-n_max, n_max + 1)
        self.lengths = {n: c * lam ** abs(n) for n in idx}
        self.inserted = sum(self.lengths.values())
        self.shrink = 1 - self.inserted
        orbit = {n: frac(n * th) for n in idx}
        if len(set(orbit.values())) != len(orbit):
            raise DenjoyParameterError("orbit points collide; theta too close to rational")
        self.orbit = orbit
        order = sorted(idx, key=orbit.__getitem__)
        self._order = order
        self._pts = [orbit[n] for n in order]
        prefix = [Fraction(0)]
        for n in order:
            prefix.append(prefix[-1] + self.lengths[n])
        self._prefix = prefix
        self.start = {n: self.shrink * orbit[n] + prefix[i] for i, n in enumerate(order)}
        self._starts = [self.start[n] for n in order]

    def describe(self):
        return {"kind": self.kind, "theta": float(self.theta), "c": str(self.c),
                "lambda": str(self.lam), "n_max": self.n_max, "tol": str(self.tol),
                "tail_bound": float(self.tail), "total_gap_length": str(self.total_gap_length)}

    # the blow-up and its left inverse
    def embed(self, y) -> Fraction:
        """Phi(y) = (1 - L) y + sum of gap lengths at orbit points left of y."""
        y = frac(y)
        return self.shrink * y + self._prefix[bisect_left(self._pts, y)]

    def gap_index(self, z: Fraction) -> int | None:
        i = bisect_right(self._starts, z) - 1
        if i < 0:
            return None
        n = self._order[i]
        return n if z <= self._starts[i] + self.lengths[n] else None

    def collapse(self, z) -> Fraction:
        """h(z): gaps go to their orbit point, h(Phi(y)) = y elsewhere."""
        z = frac(z)
        i = bisect_right(self._starts, z) - 1
        n = self._order[i]
        if z <= self._starts[i] + self.lengths[n]:
            return self._pts[i]
        return (z - self._prefix[i + 1]) / self.shrink

    def gap_knots(self) -> list[Fraction]:
        out = []
        for n in self._order:
            out += [self.start[n], self.start[n] + self.lengths[n]]
        return sorted(frac(k) for k in out)

    def gaps(self) -> list[tuple[int, Fraction, Fraction]]:
        return [(n, self.start[n], self.lengths[n]) for n in self._order]

    def _map(self, zv, n: int) -> Fraction:
        zv = frac(zv)
        m = self.gap_index(zv)
        if m is not None:
            j = m + n
            if -self.n_max <= j <= self.n_max:
                out = self.start[j] + (zv - self.start[m]) * self.lengths[j] / self.lengths[m]
            else:
                out = self.embed(j * self.theta)
        else:
            out = self.embed(self.collapse(zv) + n * self.theta)
        return out

    def forward(self, n: int, alpha):
        return self.iterate(alpha, n)

    def apply(self, direction: int, z) -> CirclePoint:
        if direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        return self.iterate(point(z), direction)

    def semiconjugacy_defect(self, z) -> Fraction:
        """d(h(f(z)), h(z) + theta) on the circle."""
        z = point(z)
        fz = self.iterate(z, 1)
        return dist(self.collapse(fz.value), self.collapse(z.value) + self.theta)

    def _fast_candidates(self):
        # Denjoy best returns are one-sided returns of the rotation (h is monotone)
        return contfrac.merged_records(self.theta)


def denjoy_build(theta, c=Fraction(1, 6), lam=Fraction(1, 2), n_max: int = 64,
                 tol=Fraction(1, 10 ** 18)) -> Denjoy:
    return Denjoy(theta, c, lam, n_max, tol)


def denjoy_apply(s: Denjoy, direction: int, x) -> CirclePoint:
    return s.apply(direction, x)


def forward(s: System, g, alpha):
    return s.forward(g, alpha)


def preimage_ball(s: System, n: int, b: Arc) -> PreimageInterval:
    return s.preimage_ball(n, b)


def recurrence_times(s: System, x, count: int, **kw) -> RecurrenceTimes:
    return s.recurrence_times(x, count, **kw)


def rotation_number_estimate(s: System, n: int) -> Fraction:
    return s.rotation_number_estimate(n)
