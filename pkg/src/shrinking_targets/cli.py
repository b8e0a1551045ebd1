"""Command-line runner: ``shrinking-targets run <experiment> [flags]``.

Config is one JSON object; flags override its fields. Exit codes: 0 ok,
2 config error (nothing written), 3 precision or budget exhaustion
(partial outputs written and flagged).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .circle import CirclePoint, PrecisionError, TorusPoint, point
from .contfrac import golden_dyadic
from .experiments import (SampleSpec, kgs_trial, preimage_arcs, tail_union_measure,
                          tail_union_profile)
from .measures import (AmbiguousClassification, CantorStaircase, DenjoyInvariant, Lebesgue,
                       ToleranceError, classify_support_point, t_sequence)
from .oracles import (check_counting_profile, check_hit_count, check_t_sequence,
                      check_union_measure)
from .report import KGS_COLUMNS, emit_report, number
from .sequences import (PolynomialSpec, Profile, make_counterexample, make_monotone,
                        make_polynomial_supported, partial_measure_sum)
from .systems import (Denjoy, DenjoyParameterError, MultExpanding, Rotation, ScanBudgetExceeded,
                      SimultExpanding, TruncationError)

LOG2_PHI = math.log2((1 + math.sqrt(5)) / 2)


class ConfigError(ValueError):
    pass


COMMON = {"horizon": None, "seed": 7, "bits": None, "backend": "rational", "out": "results"}

DEFAULTS = {
    "kgs-verify": {"horizon": 100000, "samples": 200, "bits": 128, "point": "0", "workers": 1,
                   "profile": {"scale": "1/2", "exponent": 1},
                   "exponent_horizons": [1000, 2000, 5000, 10000, 20000, 50000, 100000]},
    "mstp-expanding": {"horizon": 10000, "samples": 100, "bits": 128, "point": "1/3", "workers": 1,
                       "profile": {"scale": "1/2", "exponent": 1},
                       "exponent_horizons": [1000, 2000, 5000, 10000]},
    "simult-expanding": {"horizon": 10000, "samples": 100, "bits": 128, "point": ["0", "0"],
                         "workers": 1, "polynomials": [[0, 1], [0, 0, 1]],
                         "profile": {"scale": "1/2", "exponent": "1/2"}, "scales": ["1/4", "1", "4"]},
    "rotation-counterexample": {"horizon": 10000, "point": "0", "theta": "golden",
                                "report_l": [1, 10, 100, 1000]},
    "denjoy-counterexample": {"horizon": 1000, "point": "0", "theta": "golden",
                              "c": "1/6", "lam": "1/2", "n_max": 64, "tol": "1e-18",
                              "report_l": [1, 10, 100, 1000], "grid": 1000, "rotation_steps": 10000},
    "classify-support": {"measure": "cantor", "point": "1/3", "tol": "2^-40"},
    "t-sequence": {"measure": "lebesgue", "point": "0", "horizon": 1000, "tol": "2^-40"},
    "oracle-suite": {"horizon": 1000, "samples": 1000000},
}
COMMANDS = tuple(DEFAULTS)


# -- config -------------------------------------------------------------------

def parse_number(v) -> Fraction:
    """Exact value from an int, a decimal/fraction string, or '2^-k'."""
    if isinstance(v, bool):
        raise ConfigError(f"not a number: {v!r}")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(str(v))
    s = str(v).strip()
    try:
        if "^" in s:
            base, exp = s.split("^")
            return Fraction(base) ** int(exp)
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"not a number: {v!r}") from e


def build_config(command: str, file_cfg: dict | None, flags: dict) -> dict:
    if command not in DEFAULTS:
        raise ConfigError(f"unknown experiment {command!r}")
    cfg = {**COMMON, **DEFAULTS[command]}
    file_cfg = dict(file_cfg or {})
    named = file_cfg.pop("command", command)
    if named != command:
        raise ConfigError(f"config is for {named!r}, not {command!r}")
    unknown = set(file_cfg) - set(cfg)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    cfg.update(file_cfg)
    for k, v in flags.items():
        if v is not None:
            if k not in cfg:
                raise ConfigError(f"--{k} does not apply to {command}")
            cfg[k] = v
    _validate(command, cfg)
    return {"command": command, **cfg}


def _positive_int(cfg, key):
    v = cfg.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ConfigError(f"{key} must be a positive integer, got {v!r}")


def _validate(command, cfg):
    for key in ("horizon", "samples", "workers", "grid", "rotation_steps", "n_max"):
        if key in cfg and cfg[key] is not None:
            _positive_int(cfg, key)
    if cfg["bits"] is not None:
        _positive_int(cfg, "bits")
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed must be a nonnegative integer")
    if cfg["backend"] not in ("rational", "fixed"):
        raise ConfigError("backend must be 'rational' or 'fixed'")
    if "point" in cfg:
        pts = cfg["point"] if isinstance(cfg["point"], list) else [cfg["point"]]
        for p in pts:
            parse_number(p)
    if "profile" in cfg:
        prof = cfg["profile"]
        if not isinstance(prof, dict) or set(prof) - {"scale", "exponent"}:
            raise ConfigError("profile must be {scale, exponent}")
        if parse_number(prof.get("scale", 1)) <= 0 or parse_number(prof.get("exponent", 1)) < 0:
            raise ConfigError("profile needs scale > 0 and exponent >= 0")
    if "measure" in cfg and cfg["measure"] not in ("lebesgue", "cantor", "denjoy"):
        raise ConfigError("measure must be lebesgue, cantor or denjoy")
    if "scales" in cfg:
        if not cfg["scales"] or any(parse_number(c) <= 0 for c in cfg["scales"]):
            raise ConfigError("scales must be a nonempty list of positive numbers")
    if "polynomials" in cfg:
        try:
            PolynomialSpec(tuple(tuple(p) for p in cfg["polynomials"]))
        except (ValueError, TypeError) as e:
            raise ConfigError(str(e)) from e
        if isinstance(cfg["point"], list) and len(cfg["point"]) != len(cfg["polynomials"]):
            raise ConfigError("one target coordinate per polynomial")
    if "theta" in cfg and cfg["theta"] != "golden":
        parse_number(cfg["theta"])
    if command in ("kgs-verify", "mstp-expanding", "simult-expanding") and cfg["bits"] < 64:
        raise ConfigError("sampling needs at least 64 bits")


# -- experiment runners ---------------------------------------------------------

def _profile(cfg) -> Profile:
    p = cfg["profile"]
    return Profile(parse_number(p.get("scale", 1)), parse_number(p.get("exponent", 1)))


def _seeds(cfg):
    return {"master": cfg["seed"], "per_sample": "SeedSequence([master, sample_index])"}


def _kgs_summary(res, cfg, scale_i=0):
    st = dict(res.stats[scale_i])
    st["psi"] = number(res.psi[scale_i][-1])
    return st


def _expanding(cfg, system, x, r, horizons, scales=(1,)):
    spec = SampleSpec(cfg["samples"], cfg["bits"], cfg["seed"])
    res = kgs_trial(system, x, r, horizons, spec, scales=scales, workers=cfg["workers"])
    tables = {}
    h = res.horizons[-1]
    for si, C in enumerate(res.scales):
        psi = float(res.psi[si][-1])
        rows = [(h, i, int(res.counts[i, si, -1]), psi,
                 float(res.counts[i, si, -1]) / psi if psi else float("nan"))
                for i in range(res.counts.shape[0])]
        suffix = "" if len(res.scales) == 1 else f".C{str(scales[si]).replace('/', '_')}"
        tables[suffix] = (KGS_COLUMNS, rows)
    return res, tables


def run_kgs(cfg):
    h = cfg["horizon"]
    grid = sorted({g for g in cfg["exponent_horizons"] if g <= h} | {h})
    x = point(parse_number(cfg["point"]))
    r = make_monotone(_profile(cfg))
    res, tables = _expanding(cfg, MultExpanding(), x, r, grid)
    summary = {"system": MultExpanding().describe(), "sequence": r.to_dict(),
               "horizons": res.horizons, "statistics": _kgs_summary(res, cfg),
               "psi_by_horizon": [number(p) for p in res.psi[0]],
               "exponent": {"median_slope": res.median_exponent(0),
                            "fits": len([f for f in res.exponent_fits[0] if not f.degenerate]),
                            "estimator": "median over samples of the least-squares slope of log|N-Psi| vs log Psi"},
               "seeds": _seeds(cfg)}
    return summary, tables


def run_simult(cfg):
    polys = tuple(tuple(p) for p in cfg["polynomials"])
    spec = PolynomialSpec(polys)
    x = TorusPoint.of(*[parse_number(p) for p in cfg["point"]])
    r = make_polynomial_supported(spec, _profile(cfg))
    scales = [parse_number(c) for c in cfg["scales"]]
    res, tables = _expanding(cfg, SimultExpanding(spec.dim), x, r, [cfg["horizon"]], scales)
    per_scale = {str(C): _kgs_summary(res, cfg, i) for i, C in enumerate(scales)}
    summary = {"system": SimultExpanding(spec.dim).describe(), "sequence": r.to_dict(),
               "curve_start": spec.start, "statistics": per_scale, "seeds": _seeds(cfg)}
    return summary, tables


def _theta(cfg, stride):
    K = cfg["horizon"]
    bits = cfg["bits"] or 64 * math.ceil((2 * stride * LOG2_PHI * (K + 2) + 128) / 64)
    if cfg["theta"] == "golden":
        value = golden_dyadic(bits)
    else:
        value = parse_number(cfg["theta"]) % 1
    if cfg["backend"] == "fixed":
        return CirclePoint.rounded(value, bits), bits
    return CirclePoint(value), bits


def _tail_rows(U, seq, arcs, m):
    rows = []
    ball = [m.arc(a) for a in arcs]
    tail = [Fraction(0)] * (len(arcs) + 1)
    for k in range(len(arcs) - 1, -1, -1):
        tail[k] = tail[k + 1] + ball[k]
    for l in range(1, len(arcs) + 1):
        rows.append((l, seq.times[l - 1], float(seq.values[l - 1]), float(U[l - 1]), float(tail[l - 1])))
    return rows


def _counterexample(system, m, x, K, cfg, extra):
    times = system.recurrence_times(x, K)
    seq = make_counterexample(m, x, times)
    arcs = preimage_arcs(system, x, seq, K)
    U = tail_union_profile(arcs, m)
    sums = partial_measure_sum(m, x, seq, 1, K)
    harmonic = sum(Fraction(1, k) for k in range(1, K + 1))
    checks = {}
    for l in cfg["report_l"]:
        if l <= K:
            direct = tail_union_measure(system, x, seq, l, K, reference=m, arcs=arcs)
            checks[str(l)] = {"U": number(U[l - 1]), "direct_sweep_agrees": direct.measure == U[l - 1],
                              "tail_ball_sum": number(direct.ball_sum)}
    summary = {"system": system.describe(), "measure": m.describe(), "K": K,
               "times_head": list(times.times[:12]),
               "measure_sum": {"value": number(sums.value) if sums.exact else {"value": sums.value},
                               "at_least_harmonic": sums.value >= harmonic,
                               "harmonic": number(harmonic)},
               "tail_unions": checks,
               "nonincreasing": all(a >= b for a, b in zip(U, U[1:])),
               "strictly_decreasing_below_one": all(a > b for a, b in zip(U, U[1:]) if a < 1),
               **extra}
    cols = ("l", "n_l", "radius", "U_l", "tail_ball_sum")
    return summary, {"": (cols, _tail_rows(U, seq, arcs, m))}


def run_rotation(cfg):
    theta, bits = _theta(cfg, 1)
    rot = Rotation(theta)
    x = point(parse_number(cfg["point"]))
    m = Lebesgue()
    summary, tables = _counterexample(rot, m, x, cfg["horizon"], cfg, {"theta_bits": bits})
    return summary, tables


def _denjoy(cfg, stride=2):
    theta, bits = _theta(cfg, stride)
    d = Denjoy(theta.value, parse_number(cfg["c"]), parse_number(cfg["lam"]), cfg["n_max"],
               parse_number(cfg["tol"]))
    return d, bits


def run_denjoy(cfg):
    d, bits = _denjoy(cfg)
    m = DenjoyInvariant(d)
    x = point(parse_number(cfg["point"]))
    grid = cfg["grid"]
    defect = max(d.semiconjugacy_defect(Fraction(i, grid)) for i in range(grid))
    n = cfg["rotation_steps"]
    est = d.rotation_number_estimate(n)
    extra = {"theta_bits": bits, "arithmetic": "rational",
             "semiconjugacy_defect": {"sup": number(defect), "grid": grid, "bound": number(10 * d.tol)},
             "rotation_number": {"estimate": number(est), "steps": n,
                                 "error": float(abs(est - d.theta)), "bound": 2 / n}}
    return _counterexample(d, m, x, cfg["horizon"], cfg, extra)


def _measure(cfg):
    name = cfg["measure"]
    if name == "lebesgue":
        return Lebesgue()
    if name == "cantor":
        return CantorStaircase()
    d = Denjoy(golden_dyadic(256))
    return DenjoyInvariant(d)


def run_classify(cfg):
    m = _measure(cfg)
    x = point(parse_number(cfg["point"]))
    c = classify_support_point(m, x, tol=parse_number(cfg["tol"]))
    summary = {"measure": m.describe(), "point": x.value, **c.to_dict()}
    row = (cfg["point"], c.kind.value, "" if c.gap_partner is None else str(c.gap_partner),
           "" if c.gap_size is None else str(c.gap_size), c.certified)
    return summary, {"": (("point", "kind", "y", "s_x", "certified"), [row])}


def run_tseq(cfg):
    m = _measure(cfg)
    x = point(parse_number(cfg["point"]))
    tol = parse_number(cfg["tol"])
    exact = m.knots() is not None
    rows = []
    for n in range(1, cfg["horizon"] + 1):
        t = t_sequence(m, x, n, tol=tol)
        rows.append((n, float(t), "exact" if exact else repr(float(tol))))
    summary = {"measure": m.describe(), "point": x.value, "count": cfg["horizon"],
               "method": "exact" if exact else "bisect", "error_bound": 0 if exact else float(tol),
               "t_last": number(t, None if exact else tol)}
    return summary, {"": (("n", "t_n", "error_bound"), rows)}


def run_oracles(cfg):
    h = min(cfg["horizon"], 1000)
    rng = np.random.default_rng(cfg["seed"])
    results = []
    half = make_monotone(Profile(Fraction(1, 2)))
    for i in range(3):
        a = CirclePoint.fixed(int(rng.integers(1, 2 ** 62)) * 2 + 1, 64)
        results.append(check_hit_count(MultExpanding(), a, CirclePoint(Fraction(i, 3)), half, h))
    curve = make_polynomial_supported(PolynomialSpec(((0, 1), (0, 0, 1))), Profile(Fraction(1, 2), Fraction(1, 2)))
    for i in range(2):
        a = TorusPoint.of(*[CirclePoint.fixed(int(v) * 2 + 1, 64) for v in rng.integers(1, 2 ** 62, 2)])
        results.append(check_hit_count(SimultExpanding(2), a, TorusPoint.of(0, 0), curve.scaled(4), h))
    rot = Rotation(golden_dyadic(128))
    results.append(check_hit_count(rot, CirclePoint(Fraction(0)), CirclePoint(Fraction(1, 7)),
                                   make_monotone(Profile(Fraction(1, 2)), "additive"), h))
    from .circle import Arc
    arcs = [Arc(CirclePoint(Fraction(int(c), 997)), Fraction(int(r), 20000))
            for c, r in zip(rng.integers(0, 997, 40), rng.integers(1, 400, 40))]
    results.append(check_union_measure(arcs, cfg["samples"], cfg["seed"]))
    results.append(check_t_sequence(Lebesgue(), Fraction(1, 5), [1, 2, 3, 10, 100]))
    results.append(check_t_sequence(CantorStaircase(), Fraction(0), [1, 2, 3, 4, 10, 100]))
    results.append(check_counting_profile(Lebesgue(), CirclePoint(Fraction(0)), half, h))
    rows = [(r.component, r.passed, json.dumps(r.details, sort_keys=True, default=str)) for r in results]
    summary = {"all_passed": all(r.passed for r in results),
               "results": [{"component": r.component, "passed": r.passed, "witness": r.witness,
                            "details": r.details} for r in results]}
    return summary, {"": (("component", "passed", "details"), rows)}


RUNNERS = {
    "kgs-verify": run_kgs, "mstp-expanding": run_kgs, "simult-expanding": run_simult,
    "rotation-counterexample": run_rotation, "denjoy-counterexample": run_denjoy,
    "classify-support": run_classify, "t-sequence": run_tseq, "oracle-suite": run_oracles,
}

BUDGET_ERRORS = (PrecisionError, ScanBudgetExceeded, ToleranceError, TruncationError,
                 AmbiguousClassification)


def _clear_stale(out, command):
    # a previous run's tables must not sit next to a new (possibly partial) summary
    out = Path(out)
    if out.is_dir():
        for f in list(out.glob(f"{command}.csv")) + list(out.glob(f"{command}.C*.csv")):
            f.unlink()


def run(cfg: dict) -> tuple[int, list[Path]]:
    """Execute a validated config; returns (exit status, written files)."""
    command = cfg["command"]
    base = {"config": cfg, "version": __version__, "command": command}
    _clear_stale(cfg["out"], command)
    try:
        summary, tables = RUNNERS[command](cfg)
    except BUDGET_ERRORS as e:
        partial = {**base, "partial": True, "error": f"{type(e).__name__}: {e}"}
        if isinstance(e, ScanBudgetExceeded):
            partial["partial_result"] = {"times": list(e.partial.times)}
        return 3, emit_report(cfg["out"], command, partial)
    except DenjoyParameterError as e:
        raise ConfigError(str(e)) from e
    return 0, emit_report(cfg["out"], command, {**base, "partial": False, **summary}, tables)


# -- argument parsing -------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shrinking-targets")
    sub = p.add_subparsers(dest="action", required=True)
    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("experiment", choices=COMMANDS)
    r.add_argument("--config", type=Path)
    r.add_argument("--horizon", type=int)
    r.add_argument("--samples", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--bits", type=int)
    r.add_argument("--backend", choices=("rational", "fixed"))
    r.add_argument("--out")
    r.add_argument("--measure", choices=("lebesgue", "cantor", "denjoy"))
    r.add_argument("--point")
    r.add_argument("--workers", type=int)
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    flags = {k: getattr(args, k) for k in ("horizon", "samples", "seed", "bits", "backend",
                                           "out", "measure", "point", "workers")}
    try:
        file_cfg = None
        if args.config is not None:
            try:
                file_cfg = json.loads(args.config.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read config: {e}") from e
            if not isinstance(file_cfg, dict):
                raise ConfigError("config must be a JSON object")
        cfg = build_config(args.experiment, file_cfg, flags)
        status, files = run(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    for f in files:
        print(f)
    return status


if __name__ == "__main__":
    sys.exit(main())
