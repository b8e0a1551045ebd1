"""Hit counting against the counting profile, tail unions of preimages,
and error-exponent regression."""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .circle import (HALF, Arc, CirclePoint, arc_pieces, as_torus, dist,
                     disjoint_pieces, union_measure)
from .measures import CircleMeasure, Lebesgue
from .sequences import (MonotoneSequence, PolynomialSpec, PolynomialSupported, RadiusSequence,
                        ScaledSequence, SubsetSequence, ball_measure_product)
from .surd import Real, Root, iroot
from .systems import MultExpanding, Rotation, SimultExpanding, System

REPEAT_THRESHOLD = 10
MIN_PSI = 5


# -- counting profile -------------------------------------------------------

def _curve_sequence(r: RadiusSequence):
    """(spec, profile-scale C, base) for curve-supported sequences."""
    C = Fraction(1)
    while isinstance(r, ScaledSequence):
        C *= r.C
        r = r.inner
    if isinstance(r, PolynomialSupported):
        return r.spec, C, r.profile
    if isinstance(r, MonotoneSequence):
        return PolynomialSpec(((0, 1),), 1), C, r.profile
    raise TypeError("counting profile needs a polynomial-supported or monotone sequence")


def counting_profile(m, x, r: RadiusSequence, h: int):
    """psi(q) = prod_j mu(B(x_j, C R_q)) for q <= h and Psi(h) = sum psi(q)."""
    spec, C, profile = _curve_sequence(r)
    x = as_torus(x)
    measures = [m] * x.dim if isinstance(m, CircleMeasure) else list(m)
    psi: list[Real] = []
    for q in range(1, h + 1):
        if q < spec.start:
            psi.append(Fraction(0))
            continue
        radius = C * profile(q)
        factor: Real = Fraction(1)
        for mj, xj in zip(measures, x):
            factor = factor * mj.ball(xj, radius)
        psi.append(factor)
    if all(isinstance(v, Fraction) for v in psi):
        return psi, sum(psi, Fraction(0))
    return psi, math.fsum(float(v) for v in psi)


# -- generic hit counting ---------------------------------------------------

@dataclass
class HitCountResult:
    horizon: int
    count: int
    psi: Fraction | float
    hits: list | None = None

    @property
    def ratio(self) -> float:
        return float(self.count) / float(self.psi) if self.psi else float("nan")


def hit_count(s: System, alpha, x, r: RadiusSequence, h: int, log_hits: bool = False,
              measure: CircleMeasure | None = None) -> HitCountResult:
    """Count support points g within the horizon with T^g(alpha) in B(x, r_g).

    For expanding systems the horizon is the curve parameter q; for rotations
    it is the time n. Works on CirclePoints, exact in either backend.
    """
    measure = measure or Lebesgue()
    alpha, x = as_torus(alpha), as_torus(x)
    hits = [] if log_hits else None
    n = 0
    psi_terms = []
    for p in r.support(h):
        if isinstance(s, Rotation):
            y = as_torus(s.forward(p.index, alpha[0]))
        else:
            y = as_torus(s.forward(p.index, alpha))
        psi_terms.append(ball_measure_product([measure] * x.dim, x, p.radius))
        if all(dist(yj, xj) < p.radius for yj, xj in zip(y, x)):
            n += 1
            if hits is not None:
                hits.append(p.param)
    if all(isinstance(t, Fraction) for t in psi_terms):
        psi = sum(psi_terms, Fraction(0))
    else:
        psi = math.fsum(float(t) for t in psi_terms)
    return HitCountResult(h, n, psi, hits)


# -- fast kernel for random alpha ------------------------------------------

def _threshold(radius: Real, unit: int) -> int:
    """Smallest integer T with d < T  <=>  d / unit < radius, for d >= 0."""
    if radius > HALF:
        radius = HALF
    if isinstance(radius, Root):
        m = radius.index
        a, b = radius.radicand.numerator, radius.radicand.denominator
        X = a * unit ** m
        t = iroot(X // b, m)
        while t ** m * b < X:
            t += 1
        while t > 0 and (t - 1) ** m * b >= X:
            t -= 1
        return t
    radius = Fraction(radius)
    return -((-radius.numerator * unit) // radius.denominator)


class HitKernel:
    """Counts hits for dyadic alpha with pure integer arithmetic.

    alpha_j = a_j / 2^bits; the event is d(P_j(q) alpha_j, x_j) < C R_q for
    all j, tested as an integer comparison against a precomputed threshold.
    The result equals :func:`hit_count` on the same dyadic alpha.
    """

    def __init__(self, x, r: RadiusSequence, horizons: Sequence[int], bits: int,
                 scales: Sequence = (1,), min_valid_bits: int = 32):
        self.spec, base_C, self.profile = _curve_sequence(r)
        self.x = as_torus(x)
        if self.x.dim != self.spec.dim:
            raise ValueError("target point dimension does not match the sequence")
        self.horizons = sorted(set(int(h) for h in horizons))
        self.bits = bits
        self.scales = [base_C * Fraction(c) for c in scales]
        h = self.horizons[-1]
        qs = range(self.spec.start, h + 1)
        self.q_values = list(qs)
        self.curve = [self.spec.curve(q) for q in qs]
        top = max((max(c) for c in self.curve), default=1)
        if bits - max(top - 1, 0).bit_length() < min_valid_bits:
            from .circle import PrecisionError
            raise PrecisionError(f"{bits} bits cannot resolve P(q) up to {top}")
        M = 1 << bits
        self.M = M
        # per coordinate: target numerator/denominator over unit = den * M
        self.targets = []
        for xj in self.x:
            v = xj.value
            self.targets.append((v.numerator, v.denominator))
        self.thresholds = []  # [scale][coord][q-index]
        for C in self.scales:
            per_coord = []
            for num, den in self.targets:
                unit = den * M
                per_coord.append([_threshold(C * self.profile(q), unit) for q in qs])
            self.thresholds.append(per_coord)
        self.cut = [bisect_right(self.q_values, hh) for hh in self.horizons]

    def psi_cumulative(self, scale_i: int = 0, measure: CircleMeasure | None = None) -> list:
        """Psi at each horizon for the given scale (Lebesgue by default)."""
        m = measure or Lebesgue()
        C = self.scales[scale_i]
        out, acc, hs = [], Fraction(0), iter(self.horizons)
        target = next(hs)
        exact = True
        for q in range(1, self.horizons[-1] + 1):
            if q >= self.spec.start:
                term = ball_measure_product([m] * self.x.dim, self.x, C * self.profile(q))
                if isinstance(term, Fraction) and exact:
                    acc += term
                else:
                    acc = float(acc) + float(term)
                    exact = False
            if q == target:
                out.append(acc)
                target = next(hs, None)
        return out

    def count(self, mantissas: Sequence[int]) -> np.ndarray:
        """Hit counts, shape (len(scales), len(horizons)), for one alpha."""
        M, mask = self.M, self.M - 1
        dims = range(self.x.dim)
        n_scales = len(self.scales)
        counts = [[0] * len(self.horizons) for _ in range(n_scales)]
        running = [0] * n_scales
        coords = []
        for j in dims:
            num, den = self.targets[j]
            coords.append((mantissas[j], num * M, den, den * M))
        cut_i = 0
        cuts = self.cut
        curve = self.curve
        thr = self.thresholds
        for i in range(len(curve)):
            while cut_i < len(cuts) and cuts[cut_i] == i:
                for s in range(n_scales):
                    counts[s][cut_i] = running[s]
                cut_i += 1
            k = curve[i]
            ds = []
            for j in dims:
                a, xo, den, unit = coords[j]
                v = (k[j] * a) & mask
                w = (v * den - xo) % unit
                ds.append(w if w <= unit - w else unit - w)
            for s in range(n_scales):
                t = thr[s]
                for j in dims:
                    if ds[j] >= t[j][i]:
                        break
                else:
                    running[s] += 1
        while cut_i < len(cuts):
            for s in range(n_scales):
                counts[s][cut_i] = running[s]
            cut_i += 1
        return np.array(counts, dtype=np.int64)


# -- sampling --------------------------------------------------------------

@dataclass(frozen=True)
class SampleSpec:
    samples: int
    bits: int = 128
    seed: int = 0
    min_denominator_bits: int = 64

    def rng(self, index: int) -> np.random.Generator:
        """Per-sample generator, a pure function of (seed, index)."""
        return np.random.default_rng(np.random.SeedSequence([self.seed, index]))

    def draw(self, index: int, dim: int) -> list[int]:
        """dim uniform mantissas with denominators of at least 2^min_denominator_bits."""
        rng = self.rng(index)
        words = -(-self.bits // 32)
        out = []
        while len(out) < dim:
            chunk = rng.integers(0, 1 << 32, size=words, dtype=np.uint64)
            a = 0
            for w in chunk:
                a = (a << 32) | int(w)
            a >>= words * 32 - self.bits
            if a == 0 or (a & -a).bit_length() - 1 > self.bits - self.min_denominator_bits:
                continue  # small-denominator rational: measure zero, excluded
            out.append(a)
        return out


def _run_samples(kernel: HitKernel, spec: SampleSpec, indices):
    return [(i, kernel.count(spec.draw(i, kernel.x.dim))) for i in indices]


def sample_counts(kernel: HitKernel, spec: SampleSpec, workers: int = 1) -> np.ndarray:
    """Counts for every sample, shape (samples, scales, horizons), index order."""
    idx = list(range(spec.samples))
    if workers <= 1:
        results = _run_samples(kernel, spec, idx)
    else:
        chunks = [idx[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            parts = ex.map(_run_samples, [kernel] * workers, [spec] * workers, chunks)
        results = [item for part in parts for item in part]
    results.sort(key=lambda t: t[0])
    return np.stack([c for _, c in results])


# -- error exponent ---------------------------------------------------------

@dataclass(frozen=True)
class ExponentFit:
    slope: float | None
    intercept: float | None
    residual: float | None
    size: int
    degenerate: bool = False
    reason: str = ""


def error_exponent_fit(data: Sequence[tuple]) -> ExponentFit:
    """Least-squares slope of log|N - Psi| against log Psi."""
    pts = [(float(psi), float(n)) for _, n, psi in data if float(psi) > 1 and float(n) != float(psi)]
    if len(pts) < 5:
        return ExponentFit(None, None, None, len(pts), True,
                           f"need >= 5 points with Psi > 1 and N != Psi, have {len(pts)}")
    X = np.log([p for p, _ in pts])
    Y = np.log([abs(n - p) for p, n in pts])
    if np.ptp(X) == 0:
        return ExponentFit(None, None, None, len(pts), True, "Psi is constant")
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    return ExponentFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2))), len(pts))


# -- Monte Carlo trial ------------------------------------------------------

@dataclass
class KgsTrialResult:
    horizons: list[int]
    scales: list[Fraction]
    psi: list[list]                  # [scale][horizon]
    counts: np.ndarray               # (samples, scales, horizons)
    spec: SampleSpec
    underpowered: list[bool]         # per scale, at the final horizon
    stats: list[dict] = field(default_factory=list)
    exponent_fits: list[list[ExponentFit]] = field(default_factory=list)

    def ratios(self, scale_i: int = 0, horizon_i: int = -1) -> np.ndarray:
        return self.counts[:, scale_i, horizon_i] / float(self.psi[scale_i][horizon_i])

    def median_exponent(self, scale_i: int = 0) -> float | None:
        slopes = [f.slope for f in self.exponent_fits[scale_i] if not f.degenerate]
        return float(np.median(slopes)) if slopes else None


def _summary(values: np.ndarray) -> dict:
    q = np.quantile(values, [0.05, 0.25, 0.5, 0.75, 0.95])
    return {"mean": float(np.mean(values)), "median": float(q[2]), "std": float(np.std(values)),
            "q05": float(q[0]), "q25": float(q[1]), "q75": float(q[3]), "q95": float(q[4])}


def kgs_trial(s: System, x, r: RadiusSequence, horizons, samples: SampleSpec,
              scales: Sequence = (1,), workers: int = 1) -> KgsTrialResult:
    """N(h; alpha) against Psi(h) for uniformly sampled alpha.

    Deterministic given ``samples.seed``. A scale whose final Psi is below 5
    is flagged underpowered: its statistics are reported but carry no verdict.
    """
    if isinstance(horizons, int):
        horizons = [horizons]
    if not isinstance(s, (MultExpanding, SimultExpanding)):
        raise TypeError("kgs_trial samples alpha for expanding systems")
    kernel = HitKernel(x, r, horizons, samples.bits, scales)
    if getattr(s, "dim", 1) != kernel.x.dim:
        raise ValueError("system and sequence dimensions differ")
    hs = kernel.horizons
    psi_table = [kernel.psi_cumulative(si) for si in range(len(kernel.scales))]
    counts = sample_counts(kernel, samples, workers)
    res = KgsTrialResult(hs, kernel.scales, psi_table, counts, samples,
                         [float(p[-1]) < MIN_PSI for p in psi_table])
    for si, psis in enumerate(psi_table):
        psi_f = np.array([float(p) for p in psis])
        final = counts[:, si, -1]
        st = {"psi": float(psi_f[-1]), "ratio": _summary(final / psi_f[-1]),
              "z": _summary((final - psi_f[-1]) / math.sqrt(psi_f[-1])) if psi_f[-1] > 0 else None,
              "repeat_fraction": float(np.mean(final >= REPEAT_THRESHOLD)),
              "underpowered": res.underpowered[si]}
        fits = [error_exponent_fit([(h, int(n), p) for h, n, p in zip(hs, counts[i, si], psi_f)])
                for i in range(counts.shape[0])]
        slopes = [f.slope for f in fits if not f.degenerate]
        st["exponent_median"] = float(np.median(slopes)) if slopes else None
        st["exponent_fits"] = len(slopes)
        res.stats.append(st)
        res.exponent_fits.append(fits)
    return res


# -- tail unions ------------------------------------------------------------

@dataclass(frozen=True)
class TailUnionResult:
    start: int
    horizon: int
    measure: Fraction
    ball_sum: Fraction


def preimage_arcs(s: System, x, r: SubsetSequence, K: int) -> list[Arc]:
    """f^{-n_k} B(x, r_{n_k}) for k = 1..K, in k order."""
    x = x if isinstance(x, CirclePoint) else CirclePoint(Fraction(x))
    out = []
    for k, n in enumerate(r.times[:K], start=1):
        out.append(s.preimage_ball(n, Arc(x, r.values[k - 1])).arc)
    return out


def union_measure_under(m: CircleMeasure, arcs: Sequence[Arc]) -> Fraction:
    """Reference measure of a finite arc union, via the swept disjoint pieces."""
    if isinstance(m, Lebesgue):
        return union_measure(arcs)
    return m.pieces(disjoint_pieces(arcs))


def tail_union_measure(s: System, x, r: SubsetSequence, l: int, K: int,
                       reference: CircleMeasure | None = None, arcs=None) -> TailUnionResult:
    """Measure of the union of f^{-n_k} B(x, r_{n_k}) over l <= k <= K."""
    if not 1 <= l <= K:
        raise ValueError("need 1 <= l <= K")
    reference = reference or Lebesgue()
    arcs = arcs if arcs is not None else preimage_arcs(s, x, r, K)
    tail = arcs[l - 1:K]
    ball_sum = sum((reference.arc(a) for a in tail), Fraction(0))
    return TailUnionResult(l, K, union_measure_under(reference, tail), ball_sum)


class ArcUnion:
    """Incrementally maintained union of arcs with its running measure."""

    def __init__(self, reference: CircleMeasure | None = None):
        self.m = reference or Lebesgue()
        self.starts: list[Fraction] = []
        self.ends: list[Fraction] = []
        self.measure = Fraction(0)

    def _piece_measure(self, a, b):
        return self.m._F(b) - self.m._F(a)

    def add(self, arc: Arc):
        for a, b in arc_pieces(arc):
            i = bisect_left(self.ends, a)
            j = bisect_right(self.starts, b)
            if i < j:
                a = min(a, self.starts[i])
                b = max(b, self.ends[j - 1])
                for k in range(i, j):
                    self.measure -= self._piece_measure(self.starts[k], self.ends[k])
                del self.starts[i:j], self.ends[i:j]
            self.starts.insert(i, a)
            self.ends.insert(i, b)
            self.measure += self._piece_measure(a, b)
        return self.measure


def tail_union_profile(arcs: Sequence[Arc], reference: CircleMeasure | None = None) -> list[Fraction]:
    """U_l for every l = 1..K, inserting arcs from k = K downwards."""
    u = ArcUnion(reference)
    out = [Fraction(0)] * len(arcs)
    for k in range(len(arcs), 0, -1):
        out[k - 1] = u.add(arcs[k - 1])
    return out
