"""Exact tail-union measures U_l for the golden rotation or the Denjoy model.

Radii r_{n_k} = 2 t_k sit on the best-return times n_k of x; U_l is the
reference measure of the union of the preimage balls with k >= l.
"""
import argparse
import math
import time
from fractions import Fraction

from shrinking_targets.circle import CirclePoint
from shrinking_targets.contfrac import golden_dyadic
from shrinking_targets.experiments import preimage_arcs, tail_union_profile
from shrinking_targets.measures import DenjoyInvariant, Lebesgue
from shrinking_targets.sequences import make_counterexample, partial_measure_sum
from shrinking_targets.systems import Denjoy, Rotation

LOG2_PHI = math.log2((1 + math.sqrt(5)) / 2)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("system", choices=("rotation", "denjoy"))
    p.add_argument("--count", type=int, default=1000, help="number of recurrence times K")
    p.add_argument("--point", default="0")
    p.add_argument("--report", type=int, nargs="+", default=[1, 2, 3, 10, 30, 100, 300, 1000])
    args = p.parse_args()

    K = args.count
    stride = 1 if args.system == "rotation" else 2
    bits = 64 * math.ceil((2 * stride * LOG2_PHI * (K + 2) + 128) / 64)
    theta = golden_dyadic(bits)
    t0 = time.perf_counter()
    if args.system == "rotation":
        s, m = Rotation(theta), Lebesgue()
    else:
        s = Denjoy(theta)
        m = DenjoyInvariant(s)
    x = CirclePoint(Fraction(args.point))
    times = s.recurrence_times(x, K)
    seq = make_counterexample(m, x, times)
    U = tail_union_profile(preimage_arcs(s, x, seq, K), m)
    total = partial_measure_sum(m, x, seq, 1, K)
    print(f"{args.system}: K={K}, theta to {bits} bits, first times {times.times[:10]}")
    print(f"sum of ball measures: {float(total.value):.4f} (harmonic number {sum(1 / k for k in range(1, K + 1)):.4f})")
    for l in args.report:
        if l <= K:
            print(f"  U_{l:<6} = {float(U[l - 1]):.6g}")
    print(f"nonincreasing: {all(a >= b for a, b in zip(U, U[1:]))}; {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
