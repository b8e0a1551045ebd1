"""Hit counts of k*alpha against the counting profile for random alpha.

Prints N/Psi statistics per horizon and the error-exponent diagnostics:
the per-sample fitted slopes, the pooled slope of mean |N - Psi|, and the
slope implied by the variance sum_q psi(q)(1 - psi(q)) over the same range.
"""
import argparse
from fractions import Fraction

import numpy as np

from shrinking_targets.circle import CirclePoint
from shrinking_targets.experiments import SampleSpec, kgs_trial
from shrinking_targets.sequences import Profile, make_monotone
from shrinking_targets.systems import MultExpanding


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--horizons", type=int, nargs="+",
                   default=[1000, 2000, 5000, 10000, 20000, 50000, 100000])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--point", default="0")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()

    r = make_monotone(Profile(Fraction(1, 2)))
    res = kgs_trial(MultExpanding(), CirclePoint(Fraction(args.point)), r, args.horizons,
                    SampleSpec(args.samples, args.bits, args.seed), workers=args.workers)
    psi = np.array([float(v) for v in res.psi[0]])
    counts = res.counts[:, 0, :]
    print(f"{'h':>8} {'Psi':>8} {'mean N/Psi':>11} {'sd N':>7} {'mean|N-Psi|':>12}")
    for j, h in enumerate(res.horizons):
        c = counts[:, j]
        print(f"{h:>8} {psi[j]:8.3f} {np.mean(c / psi[j]):11.4f} {np.std(c):7.3f} {np.mean(np.abs(c - psi[j])):12.3f}")
    slopes = np.array([f.slope for f in res.exponent_fits[0] if not f.degenerate])
    if len(slopes):
        print(f"\nper-sample slopes: median {np.median(slopes):.3f}, "
              f"quartiles {np.quantile(slopes, 0.25):.3f} .. {np.quantile(slopes, 0.75):.3f}")
    else:
        print("\nno per-sample fits: need at least 5 horizons with N != Psi")
    if len(res.horizons) >= 2:
        logp = np.log(psi)
        pooled = np.polyfit(logp, np.log(np.mean(np.abs(counts - psi), axis=0)), 1)[0]
        var = np.array([sum(1 / q - 1 / q ** 2 for q in range(1, h + 1)) for h in res.horizons])
        implied = np.polyfit(logp, 0.5 * np.log(var), 1)[0]
        print(f"pooled slope of mean|N-Psi|: {pooled:.3f}")
        print(f"slope implied by sum psi(1-psi): {implied:.3f}")
    print(f"repeat fraction (N >= 10 at final h): {res.stats[0]['repeat_fraction']:.3f}")


if __name__ == "__main__":
    main()
