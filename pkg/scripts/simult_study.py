"""Hit counts on T^2 along the curve (q, q^2) with psi(q) = C^2 / q."""
import argparse
from fractions import Fraction

from shrinking_targets.circle import TorusPoint
from shrinking_targets.experiments import SampleSpec, kgs_trial
from shrinking_targets.sequences import PolynomialSpec, Profile, make_polynomial_supported
from shrinking_targets.systems import SimultExpanding


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--horizon", type=int, default=10000)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--scales", nargs="+", default=["1/4", "1", "4"])
    args = p.parse_args()

    r = make_polynomial_supported(PolynomialSpec(((0, 1), (0, 0, 1))), Profile(Fraction(1, 2), Fraction(1, 2)))
    scales = [Fraction(c) for c in args.scales]
    res = kgs_trial(SimultExpanding(2), TorusPoint.of(0, 0), r, args.horizon,
                    SampleSpec(args.samples, 128, args.seed), scales=scales)
    for C, st in zip(scales, res.stats):
        flag = "  (underpowered)" if st["underpowered"] else ""
        print(f"C={str(C):>4}  Psi={st['psi']:9.3f}  mean N/Psi={st['ratio']['mean']:.4f}  "
              f"mean z={st['z']['mean']:+.3f}{flag}")


if __name__ == "__main__":
    main()
