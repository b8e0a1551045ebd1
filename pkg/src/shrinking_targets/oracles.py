"""Brute-force cross-checks, each computed along a route independent of the
production code path."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .circle import Arc, as_torus, union_measure
from .experiments import HitKernel, counting_profile, hit_count
from .measures import CantorStaircase, CircleMeasure, Lebesgue, t_sequence
from .sequences import MonotoneSequence, RadiusSequence, ScaledSequence, partial_measure_sum
from .surd import Root
from .systems import MultExpanding, Rotation, SimultExpanding, System

HIT_COUNT_CAP = 1000
MC_POINTS = 10 ** 6
GRID_STEP = 1e-6


@dataclass
class OracleResult:
    component: str
    passed: bool
    witness: Any = None
    details: dict = field(default_factory=dict)


# -- hit counting -----------------------------------------------------------

def _less(d: Fraction, radius) -> bool:
    # d < radius without any helper from the production path
    if isinstance(radius, Root):
        if d < 0:
            return True
        return d ** radius.index < radius.radicand
    return d < radius


def naive_hits(s: System, alpha, x, r: RadiusSequence, h: int) -> list:
    """Literal double loop over parameters and coordinates in plain Fractions."""
    alpha = [Fraction(c.value) for c in as_torus(alpha)]
    x = [Fraction(c.value) for c in as_torus(x)]
    hits = []
    if isinstance(s, Rotation):
        theta = s.theta.value
        for n in range(1, h + 1):
            radius = r(n)
            if radius == 0:
                continue
            y = (alpha[0] + n * theta) % 1
            d = abs(y - x[0]) % 1
            d = min(d, 1 - d)
            if _less(d, radius):
                hits.append(n)
        return hits
    inner, C = r, Fraction(1)
    while isinstance(inner, ScaledSequence):
        C *= inner.C
        inner = inner.inner
    if isinstance(inner, MonotoneSequence):
        curve, start = (lambda q: (q,)), 1
    else:
        curve, start = inner.spec.curve, inner.spec.start
    for q in range(start, h + 1):
        k = curve(q)
        radius = C * inner.profile(q)
        if radius == 0:
            continue
        ok = True
        for kj, aj, xj in zip(k, alpha, x):
            y = (kj * aj) % 1
            d = abs(y - xj) % 1
            d = min(d, 1 - d)
            if not _less(d, radius):
                ok = False
                break
        if ok:
            hits.append(q)
    return hits


def check_hit_count(s: System, alpha, x, r: RadiusSequence, h: int) -> OracleResult:
    if h > HIT_COUNT_CAP:
        raise ValueError(f"naive enumeration is capped at h = {HIT_COUNT_CAP}")
    expected = naive_hits(s, alpha, x, r, h)
    got = hit_count(s, alpha, x, r, h, log_hits=True)
    routes = {"generic": got.count}
    alpha_t = as_torus(alpha)
    if isinstance(s, (MultExpanding, SimultExpanding)) and all(c.is_fixed for c in alpha_t):
        bits = alpha_t[0].bits
        kernel = HitKernel(x, r, [h], bits)
        routes["kernel"] = int(kernel.count([c.mantissa for c in alpha_t])[0, -1])
    passed = all(v == len(expected) for v in routes.values()) and got.hits == expected
    witness = None if passed else {"naive": expected, "generic": got.hits, **routes}
    return OracleResult("hit_count", passed, witness, {"naive": len(expected), **routes})


# -- arc unions ----------------------------------------------------------------

def check_union_measure(arcs: list[Arc], points: int = MC_POINTS, seed: int = 0,
                        sigmas: float = 3.0) -> OracleResult:
    """Exact sweep against the covered fraction of uniform sample points."""
    exact = union_measure(arcs)
    u = np.random.default_rng(seed).random(points)
    covered = np.zeros(points, dtype=bool)
    for a in arcs:
        if a.is_empty:
            continue
        c, rad = float(a.center.value), float(a.radius)
        d = np.abs(u - c) % 1.0
        covered |= np.minimum(d, 1.0 - d) < rad
    p = float(np.mean(covered))
    pe = float(exact)
    sigma = math.sqrt(max(pe * (1 - pe), 1.0 / points) / points)
    dev = abs(p - pe)
    passed = dev <= sigmas * sigma
    return OracleResult("union_measure", passed, None if passed else {"exact": pe, "sampled": p},
                        {"exact": str(exact), "sampled": p, "sigma": sigma, "deviation_sigmas": dev / sigma})


# -- t_n ---------------------------------------------------------------------

def _cantor_cdf_array(xs: np.ndarray, depth: int = 40) -> np.ndarray:
    """Cantor function by ternary digit expansion, vectorized in floats."""
    x = np.clip(xs, 0.0, 1.0).copy()
    out = np.zeros_like(x)
    alive = np.ones(x.shape, dtype=bool)
    w = 0.5
    for _ in range(depth):
        x *= 3.0
        d = np.floor(x)
        x -= d
        mid = alive & (d == 1)
        out[mid] += w
        alive &= ~mid
        out[alive & (d >= 2)] += w
        w /= 2
    out[xs >= 1.0] = 1.0
    return out


def float_cdf(m: CircleMeasure):
    """Vectorized float CDF for the grid scan."""
    if isinstance(m, Lebesgue):
        return lambda xs: np.clip(xs, 0.0, 1.0)
    if isinstance(m, CantorStaircase):
        return _cantor_cdf_array
    knots = m.knots()
    if knots is not None:
        # the CDF is linear between its knots
        ks = sorted({Fraction(0), Fraction(1), *knots})
        kx = np.array([float(k) for k in ks])
        ky = np.array([float(m._F(k)) for k in ks])
        return lambda xs: np.interp(xs, kx, ky)
    return np.vectorize(lambda v: float(m._F(Fraction(v))))


def grid_t(m: CircleMeasure, x: float, n: int, step: float = GRID_STEP) -> float:
    """Smallest grid radius whose ball carries mass >= 1/n."""
    F = float_cdf(m)
    r = np.arange(0, 0.5 + step / 2, step)
    lo, hi = x - r, x + r
    lo_wrap, hi_wrap = lo < 0, hi > 1
    mass = F(np.clip(hi, 0, 1)) - F(np.clip(lo, 0, 1))
    mass = mass + np.where(lo_wrap, 1.0 - F(np.mod(lo, 1.0)), 0.0)
    mass = mass + np.where(hi_wrap, F(np.mod(hi, 1.0)), 0.0)
    mass[-1] = 1.0
    i = int(np.argmax(mass >= 1.0 / n - 1e-12))
    return float(r[i])


def check_t_sequence(m: CircleMeasure, x, ns, step: float = GRID_STEP) -> OracleResult:
    """Bisection t_n against a dense grid scan, within 2 grid steps."""
    tol = Fraction(1, 2 ** math.ceil(-math.log2(step)))
    xf = float(Fraction(getattr(x, "value", x)))
    worst, witness = 0.0, None
    for n in ns:
        t_b = float(t_sequence(m, x, n, tol=tol, method="bisect"))
        t_g = grid_t(m, xf, n, step)
        err = abs(t_b - t_g)
        if err > worst:
            worst = err
        if err > 2 * step and witness is None:
            witness = {"n": n, "bisect": t_b, "grid": t_g}
    return OracleResult("t_sequence", witness is None, witness, {"max_deviation": worst, "bound": 2 * step})


# -- counting profile ----------------------------------------------------------

def check_counting_profile(m, x, r: RadiusSequence, h: int) -> OracleResult:
    _, psi = counting_profile(m, x, r, h)
    total = partial_measure_sum(m, x, r, 1, h)
    passed = total.exact and isinstance(psi, Fraction) and psi == total.value
    return OracleResult("counting_profile", passed, None if passed else {"psi": str(psi), "sum": str(total.value)},
                        {"value": str(psi)})


# -- dispatcher ----------------------------------------------------------------

_CHECKS = {
    "hit_count": check_hit_count,
    "union_measure": check_union_measure,
    "t_sequence": check_t_sequence,
    "counting_profile": check_counting_profile,
}


def oracle_check(component: str, *args, **kwargs) -> OracleResult:
    """Run one named oracle; failures carry a witness instead of raising."""
    try:
        check = _CHECKS[component]
    except KeyError:
        raise ValueError(f"unknown oracle component {component!r}; have {sorted(_CHECKS)}") from None
    return check(*args, **kwargs)
