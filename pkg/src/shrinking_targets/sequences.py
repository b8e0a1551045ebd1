"""Radius sequences r: G -> R>=0 and the constructions that feed the experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .circle import TorusPoint, as_torus, point
from .measures import CircleMeasure, t_sequence
from .surd import Real, Root, power, root

# domains
ADDITIVE = "additive"          # (N, +): rotations, homeomorphisms
MULTIPLICATIVE = "multiplicative"  # (N, *): expanding circle maps
PRODUCT = "product"            # (N^n, o)


class SequenceError(ValueError):
    pass


def _radius(x) -> Real:
    if isinstance(x, Root):
        return x
    x = Fraction(x)
    if x < 0:
        raise SequenceError("radii must be nonnegative")
    return x


@dataclass(frozen=True)
class Profile:
    """R_q = scale * q ** (-exponent) for q >= 1."""

    scale: Fraction
    exponent: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.scale < 0 or self.exponent < 0:
            raise SequenceError("profile needs scale >= 0 and exponent >= 0")

    def __call__(self, q: int) -> Real:
        if self.scale == 0:
            return Fraction(0)
        e = self.exponent
        if e.denominator == 1:
            return self.scale / Fraction(q) ** e.numerator
        m = e.denominator
        return root(self.scale ** m / Fraction(q) ** e.numerator, m)

    def divergence(self, n: int = 1, s=1) -> str:
        """Whether sum_q (prod of n ball measures)^s diverges for this profile."""
        if self.scale == 0:
            return "convergent"
        return "divergent" if n * self.exponent * Fraction(s) <= 1 else "convergent"

    def to_dict(self):
        return {"scale": str(self.scale), "exponent": str(self.exponent)}


def harmonic(scale=Fraction(1, 2)) -> Profile:
    return Profile(scale, 1)


@dataclass(frozen=True)
class SupportPoint:
    param: int            # q for curve-supported, k for subset/monotone
    index: object         # semigroup element (int or tuple)
    radius: Real


class RadiusSequence:
    domain = ADDITIVE
    dim = 1
    variant = "custom"

    def __call__(self, index) -> Real:
        raise NotImplementedError

    def support(self, horizon: int) -> Iterator[SupportPoint]:
        raise NotImplementedError

    def divergence(self, s=1) -> str | None:
        return None

    def scaled(self, C) -> "RadiusSequence":
        return ScaledSequence(Fraction(C), self)

    def to_dict(self) -> dict:
        raise SequenceError(f"{self.variant} sequences are not serializable")


class MonotoneSequence(RadiusSequence):
    """r_k = R(k) for a weakly decreasing profile R (a member of DR(N))."""

    variant = "monotone"

    def __init__(self, profile: Profile, domain: str = MULTIPLICATIVE):
        if domain not in (ADDITIVE, MULTIPLICATIVE):
            raise SequenceError(f"monotone sequences live on N, not {domain}")
        self.profile, self.domain = profile, domain

    def __call__(self, k) -> Real:
        k = _scalar(k)
        return self.profile(k) if k >= 1 else Fraction(0)

    def support(self, horizon):
        for k in range(1, horizon + 1):
            r = self.profile(k)
            if r > 0:
                yield SupportPoint(k, k, r)

    def divergence(self, s=1):
        return self.profile.divergence(1, s)

    def to_dict(self):
        return {"variant": self.variant, "domain": self.domain, "profile": self.profile.to_dict()}


def _scalar(k) -> int:
    if isinstance(k, tuple):
        if len(k) != 1:
            raise SequenceError("scalar sequence indexed by a tuple")
        k = k[0]
    return int(k)


@dataclass(frozen=True)
class PolynomialSpec:
    """Integer polynomials P_1..P_n (coefficients in increasing degree) and N_0."""

    coefficients: tuple[tuple[int, ...], ...]
    start: int | None = None

    def __post_init__(self):
        coeffs = tuple(tuple(int(c) for c in p) for p in self.coefficients)
        for p in coeffs:
            while len(p) > 1 and p[-1] == 0:
                p = p[:-1]
            if len(p) < 2 or p[-1] <= 0:
                raise SequenceError(f"{p} is not a nonconstant polynomial with positive leading coefficient")
        object.__setattr__(self, "coefficients", coeffs)
        n0 = self._minimal_start()
        if self.start is None:
            object.__setattr__(self, "start", n0)
        elif self.start < n0:
            raise SequenceError(f"P_j is not injective and >= 1 from q = {self.start} (need q >= {n0})")

    @property
    def dim(self) -> int:
        return len(self.coefficients)

    @staticmethod
    def evaluate(p: Sequence[int], q: int) -> int:
        acc = 0
        for c in reversed(p):
            acc = acc * q + c
        return acc

    def curve(self, q: int) -> tuple[int, ...]:
        return tuple(self.evaluate(p, q) for p in self.coefficients)

    def _minimal_start(self) -> int:
        # past this bound every P_j and every difference P_j(q+1) - P_j(q) is
        # dominated by its leading term (Cauchy bound on both)
        bound = 1
        for p in self.coefficients:
            lead = p[-1]
            bound = max(bound, 2 + math.ceil(sum(abs(c) for c in p[:-1]) / lead))
        n0 = bound
        for q in range(bound, 0, -1):
            ok = all(self.evaluate(p, q) >= 1 and self.evaluate(p, q + 1) > self.evaluate(p, q)
                     for p in self.coefficients)
            if not ok:
                break
            n0 = q
        return n0

    def to_dict(self):
        return {"coefficients": [list(p) for p in self.coefficients], "start": self.start}


class PolynomialSupported(RadiusSequence):
    """r(P_1(q), ..., P_n(q)) = R_q for q >= N_0 and r = 0 off that curve."""

    variant = "polynomial"

    def __init__(self, spec: PolynomialSpec, profile: Profile):
        self.spec, self.profile = spec, profile
        self.dim = spec.dim
        self.domain = PRODUCT if spec.dim > 1 else MULTIPLICATIVE

    def _param(self, index) -> int | None:
        index = (index,) if isinstance(index, int) else tuple(index)
        if len(index) != self.dim:
            raise SequenceError("index dimension mismatch")
        p = self.spec.coefficients[0]
        lo, hi = self.spec.start, self.spec.start
        while self.spec.evaluate(p, hi) < index[0]:
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if self.spec.evaluate(p, mid) < index[0]:
                lo = mid + 1
            else:
                hi = mid
        return lo if self.spec.curve(lo) == index else None

    def __call__(self, index) -> Real:
        q = self._param(index)
        return Fraction(0) if q is None else self.profile(q)

    def support(self, horizon):
        for q in range(self.spec.start, horizon + 1):
            r = self.profile(q)
            if r > 0:
                yield SupportPoint(q, self.spec.curve(q) if self.dim > 1 else self.spec.curve(q)[0], r)

    def divergence(self, s=1):
        return self.profile.divergence(self.dim, s)

    def to_dict(self):
        return {"variant": self.variant, "polynomials": self.spec.to_dict(),
                "profile": self.profile.to_dict()}


class SubsetSequence(RadiusSequence):
    """Shrinking radius sequence on a subset {n_k}: r(n_k) = values[k-1], else 0."""

    variant = "subset"

    def __init__(self, times: Sequence[int], values: Sequence, tag: str | None = None):
        if len(times) != len(values):
            raise SequenceError("times and values differ in length")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise SequenceError("times must be strictly increasing")
        self.times = tuple(int(t) for t in times)
        self.values = tuple(_radius(v) for v in values)
        self._lookup = dict(zip(self.times, self.values))
        self.tag = tag

    def __call__(self, n) -> Real:
        return self._lookup.get(_scalar(n), Fraction(0))

    def support(self, horizon):
        for k, (n, r) in enumerate(zip(self.times[:horizon], self.values[:horizon]), start=1):
            if r > 0:
                yield SupportPoint(k, n, r)

    def divergence(self, s=1):
        return self.tag

    def is_shrinking(self, eps) -> bool:
        """Only finitely many (here: not the final) values reach eps."""
        eps = Fraction(eps)
        last = max((k for k, v in enumerate(self.values, start=1) if v >= eps), default=0)
        return last < len(self.values)

    def to_dict(self):
        return {"variant": self.variant, "times": [str(t) for t in self.times],
                "values": [str(v) for v in self.values], "tag": self.tag}


class ScaledSequence(RadiusSequence):
    variant = "scaled"

    def __init__(self, C: Fraction, inner: RadiusSequence):
        if C <= 0:
            raise SequenceError("scale must be positive")
        self.C, self.inner = C, inner
        self.domain, self.dim = inner.domain, inner.dim

    def __call__(self, index):
        return self.C * self.inner(index)

    def support(self, horizon):
        for p in self.inner.support(horizon):
            yield SupportPoint(p.param, p.index, self.C * p.radius)

    def divergence(self, s=1):
        return self.inner.divergence(s)

    @property
    def spec(self):
        return self.inner.spec

    def to_dict(self):
        return {"variant": self.variant, "C": str(self.C), "inner": self.inner.to_dict()}


class CustomSequence(RadiusSequence):
    def __init__(self, func: Callable, support: Callable[[int], Iterator[SupportPoint]],
                 domain: str = ADDITIVE, dim: int = 1):
        self._func, self._support = func, support
        self.domain, self.dim = domain, dim

    def __call__(self, index):
        return _radius(self._func(index))

    def support(self, horizon):
        return self._support(horizon)


# -- constructors -----------------------------------------------------------

def make_monotone(profile: Profile, domain: str = MULTIPLICATIVE) -> MonotoneSequence:
    return MonotoneSequence(profile, domain)


def make_polynomial_supported(spec: PolynomialSpec, profile: Profile) -> PolynomialSupported:
    return PolynomialSupported(spec, profile)


def make_counterexample(m: CircleMeasure, x, times, **t_kw) -> SubsetSequence:
    """r_{n_k} = 2 t_k on the recurrence times, zero elsewhere.

    Every ball B(x, r_{n_k}) then has nu-mass at least 1/k, so the measure
    sum diverges like the harmonic series.
    """
    seq = getattr(times, "times", times)
    x = point(x)
    values = [2 * t_sequence(m, x, k, **t_kw) for k in range(1, len(seq) + 1)]
    return SubsetSequence(seq, values, tag="divergent")


def from_dict(d: dict) -> RadiusSequence:
    v = d.get("variant")
    if v == "monotone":
        return MonotoneSequence(Profile(**_profile_args(d["profile"])), d.get("domain", MULTIPLICATIVE))
    if v == "polynomial":
        poly = d["polynomials"]
        spec = PolynomialSpec(tuple(tuple(p) for p in poly["coefficients"]), poly.get("start"))
        return PolynomialSupported(spec, Profile(**_profile_args(d["profile"])))
    if v == "subset":
        return SubsetSequence([int(t) for t in d["times"]], [Fraction(x) for x in d["values"]], d.get("tag"))
    if v == "scaled":
        return ScaledSequence(Fraction(d["C"]), from_dict(d["inner"]))
    raise SequenceError(f"unknown sequence variant {v!r}")


def _profile_args(p: dict) -> dict:
    return {"scale": Fraction(p["scale"]), "exponent": Fraction(p.get("exponent", 1))}


# -- measure sums and equivalence -------------------------------------------

@dataclass(frozen=True)
class MeasureSum:
    value: Fraction | float
    exact: bool
    terms: int
    divergence: str | None


def ball_measure_product(measures, x: TorusPoint, radius) -> Real:
    """prod_j nu_j(B(x_j, radius)); Root-valued factors multiply exactly."""
    out: Real = Fraction(1)
    for m, xj in zip(measures, x):
        out = out * m.ball(xj, radius)
        if out == 0:
            return Fraction(0)
    return out


def _as_measures(m, dim):
    if isinstance(m, CircleMeasure):
        return [m] * dim
    m = list(m)
    if len(m) != dim:
        raise SequenceError("one measure per torus coordinate")
    return m


def partial_measure_sum(m, x, r: RadiusSequence, s=1, horizon: int = 100) -> MeasureSum:
    """sum over support points within the horizon of (mu(B(x, r_g)))^s."""
    if Fraction(s) < 1:
        raise SequenceError("exponent s must be >= 1")
    x = as_torus(x)
    if x.dim != r.dim:
        raise SequenceError(f"point on T^{x.dim}, sequence on dimension {r.dim}")
    measures = _as_measures(m, x.dim)
    s_int = Fraction(s).denominator == 1
    exact_terms: list[Fraction] = []
    float_terms: list[float] = []
    count = 0
    for p in r.support(horizon):
        mu = ball_measure_product(measures, x, p.radius)
        term = power(mu, int(s)) if s_int else float(mu) ** float(s)
        count += 1
        if isinstance(term, Fraction):
            exact_terms.append(term)
        else:
            float_terms.append(float(term))
    total = sum(exact_terms, Fraction(0))
    if float_terms:
        return MeasureSum(math.fsum(float_terms) + float(total), False, count, r.divergence(s))
    return MeasureSum(total, True, count, r.divergence(s))


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    c1: Real | None
    c2: Real | None
    horizon: int
    witness: object = None
    reason: str = ""


def equivalence_check(r: RadiusSequence, s: RadiusSequence, horizon: int,
                      ignore_prefix: int = 10, threshold=10 ** 6) -> Equivalence:
    """Constants C1 <= r/s <= C2 over the support within the horizon.

    The first ``ignore_prefix`` support points stand in for the finitely many
    exceptions allowed; the answer is relative to the horizon.
    """
    threshold = Fraction(threshold)
    rs = list(r.support(horizon))
    ss = list(s.support(horizon))
    ri = {_key(p.index): p.radius for p in rs}
    si = {_key(p.index): p.radius for p in ss}
    if ri.keys() != si.keys():
        diff = sorted(ri.keys() ^ si.keys())
        return Equivalence(False, None, None, horizon, diff[0], "supports differ")
    order = [_key(p.index) for p in rs][ignore_prefix:]
    if not order:
        return Equivalence(False, None, None, horizon, None, "no support beyond the ignored prefix")
    c1 = c2 = None
    for k in order:
        ratio = ri[k] / si[k]
        if ratio == 0:
            return Equivalence(False, None, None, horizon, k, "ratio is zero")
        if c1 is None or ratio < c1:
            c1 = ratio
        if c2 is None or ratio > c2:
            c2 = ratio
            arg_max = k
        if c1 is not None and ratio == c1:
            arg_min = k
    if c2 > threshold or c1 < 1 / threshold:
        witness = arg_max if c2 > threshold else arg_min
        return Equivalence(False, c1, c2, horizon, witness, "ratio unbounded at this horizon")
    return Equivalence(True, c1, c2, horizon)


def _key(index):
    return index if isinstance(index, tuple) else (index,)
