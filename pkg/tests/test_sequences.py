from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from shrinking_targets.circle import CirclePoint
from shrinking_targets.contfrac import golden_dyadic
from shrinking_targets.measures import CantorStaircase, Lebesgue
from shrinking_targets.sequences import (PolynomialSpec, Profile, SequenceError, SubsetSequence,
                                         equivalence_check, from_dict, harmonic, make_counterexample,
                                         make_monotone, make_polynomial_supported,
                                         partial_measure_sum)
from shrinking_targets.surd import Root
from shrinking_targets.systems import Rotation

ZERO = CirclePoint(F(0))


def test_monotone_harmonic():
    r = make_monotone(harmonic())
    assert [r(k) for k in (1, 2, 7)] == [F(1, 2), F(1, 4), F(1, 14)]
    assert r.divergence() == "divergent"
    assert make_monotone(Profile(F(1, 2), 2)).divergence() == "convergent"


def test_curve_support():
    r = make_polynomial_supported(PolynomialSpec(((0, 1), (0, 0, 1))), Profile(F(1, 2), F(1, 2)))
    assert r((2, 4)) == Root(F(1, 8), 2)
    assert r((2, 3)) == 0
    assert r.spec.start == 1
    pts = list(r.support(5))
    assert [p.index for p in pts] == [(q, q * q) for q in range(1, 6)]


@pytest.mark.parametrize("coeffs,start", [(((-5, 0, 1),), 3), (((3, -4, 1),), 4), (((0, 1),), 1)])
def test_minimal_start(coeffs, start):
    assert PolynomialSpec(coeffs).start == start


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=3), st.integers(1, 5))
def test_curve_is_injective_and_positive_after_start(low, lead):
    spec = PolynomialSpec((tuple(low) + (lead,),))
    vals = [spec.curve(q)[0] for q in range(spec.start, spec.start + 60)]
    assert all(v >= 1 for v in vals)
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_start_below_minimum_is_rejected():
    with pytest.raises(SequenceError):
        PolynomialSpec(((-5, 0, 1),), start=2)


@given(st.fractions(F(1, 100), 100, max_denominator=100))
def test_scaled_copies_keep_support(C):
    r = make_polynomial_supported(PolynomialSpec(((0, 1), (0, 0, 1))), Profile(F(1, 2), F(1, 2)))
    s = r.scaled(C)
    assert [p.index for p in s.support(20)] == [p.index for p in r.support(20)]
    assert all(p.radius == C * q.radius for p, q in zip(s.support(20), r.support(20)))


def test_measure_sums():
    r = make_monotone(harmonic())
    assert partial_measure_sum(Lebesgue(), ZERO, r, 1, 4).value == F(25, 12)
    assert partial_measure_sum(Lebesgue(), ZERO, r, 2, 4).value == F(205, 144)
    z = make_monotone(Profile(F(0)))
    assert partial_measure_sum(Lebesgue(), ZERO, z, 1, 50).value == 0


def test_counterexample_radii_under_lebesgue():
    rot = Rotation(golden_dyadic(256))
    times = rot.recurrence_times(0, 30)
    seq = make_counterexample(Lebesgue(), ZERO, times)
    assert list(seq.values) == [F(1, k) for k in range(1, 31)]
    assert seq(4) == 0 and seq(5) == F(1, 4)
    total = partial_measure_sum(Lebesgue(), ZERO, seq, 1, 30).value
    assert total >= sum(F(1, k) for k in range(1, 31))


def test_counterexample_sum_under_cantor():
    seq = make_counterexample(CantorStaircase(), F(1, 3), range(1, 41))
    total = partial_measure_sum(CantorStaircase(), F(1, 3), seq, 1, 40).value
    assert total >= sum(F(1, k) for k in range(1, 41))


def test_equivalence():
    r = make_monotone(harmonic())
    e = equivalence_check(r, r, 100)
    assert (e.equivalent, e.c1, e.c2) == (True, 1, 1)
    e = equivalence_check(r, r.scaled(2), 100)
    assert (e.c1, e.c2) == (F(1, 2), F(1, 2))
    e = equivalence_check(make_monotone(Profile(F(1))), make_monotone(Profile(F(1), 2)), 1000, threshold=100)
    assert not e.equivalent and e.witness == (1000,) and e.c2 == 1000


def test_serialization_round_trip():
    r = make_polynomial_supported(PolynomialSpec(((0, 1), (1, 0, 2))), Profile(F(1, 3), F(1, 2)))
    s = from_dict(r.to_dict())
    assert [(p.index, p.radius) for p in s.support(30)] == [(p.index, p.radius) for p in r.support(30)]


def test_subset_sequence_validation():
    with pytest.raises(SequenceError):
        SubsetSequence([3, 2], [F(1), F(1)])
    assert SubsetSequence([1, 2, 3], [F(1), F(1, 2), F(1, 3)]).is_shrinking(F(1, 2))
