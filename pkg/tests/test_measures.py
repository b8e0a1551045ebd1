from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shrinking_targets.contfrac import golden_dyadic
from shrinking_targets.measures import (AmbiguousClassification, CantorStaircase, CustomMeasure,
                                        DenjoyInvariant, Lebesgue, SupportKind,
                                        classify_support_point, support_contains, t_sequence,
                                        t_values)
from shrinking_targets.oracles import check_t_sequence
from shrinking_targets.systems import Denjoy

CANTOR = CantorStaircase()


def cantor_gaps(levels):
    """Removed middle thirds, generated by the recursive construction."""
    gaps, intervals = [], [(F(0), F(1))]
    for _ in range(levels):
        nxt = []
        for a, b in intervals:
            w = (b - a) / 3
            gaps.append((a + w, b - w))
            nxt += [(a, a + w), (b - w, b)]
        intervals = nxt
    return gaps


def test_interval_measures():
    assert Lebesgue().interval(F(1, 5), F(1, 2)) == F(3, 10)
    assert CANTOR.interval(F(1, 3), F(2, 3)) == 0
    assert CANTOR.interval(0, F(1, 3)) == F(1, 2)


@given(st.fractions(0, 1, max_denominator=3 ** 12))
def test_cantor_cdf_self_similarity(x):
    # F(x/3) = F(x)/2 and F(2/3 + x/3) = 1/2 + F(x)/2
    assert CANTOR.cdf(x / 3) == CANTOR.cdf(x) / 2
    if x < 1:
        assert CANTOR.cdf(F(2, 3) + x / 3) == F(1, 2) + CANTOR.cdf(x) / 2


def test_lebesgue_t_sequence():
    for n in (1, 2, 3, 10, 999, 1000):
        assert t_sequence(Lebesgue(), F(3, 7), n) == F(1, 2 * n)


def test_cantor_t2():
    assert abs(t_sequence(CANTOR, F(1, 3), 2) - F(1, 3)) <= F(1, 10 ** 9)


@pytest.mark.parametrize("m,x", [(Lebesgue(), F(1, 5)), (CANTOR, F(1, 3)), (CANTOR, F(0))])
def test_t_sequence_nonincreasing(m, x):
    ts = t_values(m, x, 60)
    assert all(a >= b for a, b in zip(ts, ts[1:]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 200), st.fractions(0, 1, max_denominator=3 ** 8).filter(lambda v: v < 1))
def test_bisection_returns_a_valid_radius(n, x):
    if not support_contains(CANTOR, x):
        return
    t = t_sequence(CANTOR, x, n)
    assert CANTOR.ball(x, t) + 2 * CANTOR.cdf_error >= F(1, n)


def test_t_sequence_grid_oracle():
    assert check_t_sequence(CANTOR, F(1, 3), [1, 2, 3, 7, 50]).passed


def test_support_membership():
    assert support_contains(Lebesgue(), F(37, 100))
    assert not support_contains(CANTOR, F(1, 2))
    assert support_contains(CANTOR, F(1, 3))


def test_classification_examples():
    c = classify_support_point(Lebesgue(), F(1, 7))
    assert c.kind is SupportKind.BOTH_SIDES
    c = classify_support_point(CANTOR, F(1, 3))
    assert (c.kind, c.gap_partner, c.gap_size) == (SupportKind.ISOLATED_RIGHT, F(2, 3), F(1, 3))
    c = classify_support_point(CANTOR, F(2, 3))
    assert (c.kind, c.gap_partner, c.gap_size) == (SupportKind.ISOLATED_LEFT, F(1, 3), F(1, 3))
    assert classify_support_point(CANTOR, F(1, 4)).kind is SupportKind.BOTH_SIDES


def test_classification_outside_support():
    with pytest.raises(AmbiguousClassification):
        classify_support_point(CANTOR, F(1, 2))


def test_gap_enumeration_has_fourteen_endpoints():
    ends = {e for g in cantor_gaps(3) for e in g}
    assert len(ends) == 14


def test_denjoy_measure_is_piecewise_linear():
    d = Denjoy(golden_dyadic(200))
    nu = DenjoyInvariant(d)
    assert nu.interval(0, d.c) == 0
    xs = np.linspace(0, 1, 201)[:-1]
    vals = [nu.cdf(F(float(v))) for v in xs]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    tol = F(1, 2 ** 60)
    for n in (1, 2, 5, 40):
        exact = t_sequence(nu, 0, n, method="exact")
        assert 0 <= t_sequence(nu, 0, n, method="bisect", tol=tol) - exact <= tol


def test_custom_measure_interval():
    m = CustomMeasure(lambda x: F(0) if x < F(1, 2) else F(1))
    assert m.interval(F(1, 4), F(3, 4)) == 1
