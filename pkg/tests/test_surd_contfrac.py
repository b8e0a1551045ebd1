from fractions import Fraction as F

from hypothesis import given, strategies as st

from shrinking_targets.contfrac import (best_return_denominators, convergents, fibonacci,
                                        golden_dyadic, merged_records)
from shrinking_targets.surd import Root, iroot, root


@given(st.integers(0, 10 ** 40), st.integers(2, 5))
def test_iroot_floor(x, m):
    r = iroot(x, m)
    assert r ** m <= x < (r + 1) ** m


@given(st.fractions(min_value=F(1, 10 ** 6), max_value=10 ** 6, max_denominator=10 ** 6),
       st.fractions(min_value=F(1, 10 ** 6), max_value=10 ** 6, max_denominator=10 ** 6))
def test_root_comparisons_agree_with_squares(a, b):
    ra, rb = root(a, 2), root(b, 2)
    assert (ra < rb) == (a < b)
    assert (ra == rb) == (a == b)


def test_root_products():
    assert root(F(9, 4), 2) == F(3, 2)
    r = Root(F(1, 8), 2)
    assert r * r == F(1, 8)
    assert 2 * Root(F(1, 28), 2) * 2 * Root(F(1, 28), 2) == F(1, 7)


def brute_force_returns(theta, count, limit):
    best, out = None, []
    for n in range(1, limit):
        d = (n * theta) % 1
        d = min(d, 1 - d)
        if best is None or d < best:
            out.append(n)
            best = d
            if d == 0 or len(out) == count:
                break
    return out


def test_golden_times_are_fibonacci():
    theta = golden_dyadic(256)
    times = [q for _, q in zip(range(20), best_return_denominators(theta))]
    assert times[:6] == [1, 2, 3, 5, 8, 13]
    assert times == [fibonacci(k) for k in range(2, 22)]
    assert times[:12] == brute_force_returns(theta, 12, 10 ** 4)


@given(st.fractions(min_value=0, max_value=1, max_denominator=5000).filter(lambda v: 0 < v < 1))
def test_best_returns_match_scan(theta):
    fast = list(best_return_denominators(theta))
    assert fast == brute_force_returns(theta, len(fast) + 1, theta.denominator + 1)


@given(st.fractions(min_value=0, max_value=1, max_denominator=2000).filter(lambda v: 0 < v < 1))
def test_merged_records_cover_both_sides(theta):
    """Every one-sided distance record appears among the merged candidates."""
    cands = set(merged_records(theta))
    best_above = best_below = None
    for n in range(1, theta.denominator + 1):
        v = (n * theta) % 1
        if v == 0:
            assert n in cands
            break
        if best_above is None or v < best_above:
            best_above = v
            assert n in cands
        if best_below is None or 1 - v < best_below:
            best_below = 1 - v
            assert n in cands


def test_convergents_of_golden():
    cs = [c for _, c in zip(range(6), convergents(golden_dyadic(128)))]
    assert [q for _, q in cs] == [1, 1, 2, 3, 5, 8]
