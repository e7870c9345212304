"""Polarization readout: rates, intervals, and trial planning."""

import math
from fractions import Fraction

import pytest

from pentaspin import (
    CoincidencePlan,
    Direction,
    SpinState,
    StokesDirection,
    biphoton_state,
    clopper_pearson,
    coincidence_rate,
    concurrence,
    degree_of_polarization,
    plan_trials,
    s_squared_expectation,
    simulate_counts,
    symmetric_test_angle,
    visibility_adjusted_rate,
)
from pentaspin.biphoton import _wrong_side_probability
from pentaspin.errors import InfeasiblePlan, ValidationError

from conftest import random_direction, random_state

SQRT5 = math.sqrt(5.0)


def test_stokes_validation_is_strict():
    StokesDirection(1.0, 0.0, 0.0)
    with pytest.raises(ValidationError):
        StokesDirection(1.0 + 1e-6, 0.0, 0.0)
    d = StokesDirection(1.0 + 1e-6, 0.0, 0.0, normalize=True)
    assert d.s1 == pytest.approx(1.0)


def test_stokes_json_round_trip():
    d = StokesDirection(0.6, 0.0, 0.8)
    assert d.to_json() == [0.6, 0.0, 0.8]
    back = StokesDirection.from_json([0.6, 0.0, 0.8])
    assert (back.s1, back.s2, back.s3) == (d.s1, d.s2, d.s3)
    with pytest.raises(ValidationError):
        StokesDirection.from_json([1.0, 0.0])


def test_biphoton_state_is_real_and_unentangled_in_spin_terms():
    psi = biphoton_state(StokesDirection(0.0, 0.0, 1.0))
    assert psi.equals(SpinState(0.0, 0.0, 1.0))
    assert concurrence(psi) == pytest.approx(1.0)
    assert degree_of_polarization(psi) == pytest.approx(0.0)


def test_coincidence_rate_identity(rng):
    for _ in range(100):
        l = random_direction(rng)
        psi = random_state(rng)
        rate = coincidence_rate(l, psi)
        assert rate == pytest.approx(1.0 - s_squared_expectation(l, psi),
                                     abs=1e-12)
        assert 0.0 - 1e-12 <= rate <= 1.0 + 1e-12


def test_symmetric_angle_and_rate():
    delta = symmetric_test_angle()
    assert delta == pytest.approx(math.acos(5.0 ** -0.25), abs=1e-15)
    assert abs(delta - 0.8383) < 5e-4
    analyzer = Direction(math.sin(delta), 0.0, math.cos(delta))
    rate = coincidence_rate(analyzer, SpinState(0.0, 0.0, 1.0))
    assert rate == pytest.approx(1.0 / SQRT5, abs=1e-12)


def test_visibility_adjustment():
    assert visibility_adjusted_rate(0.7, 1.0) == pytest.approx(0.7)
    assert visibility_adjusted_rate(0.7, 0.0) == pytest.approx(0.25)
    assert visibility_adjusted_rate(0.5, 0.8) == pytest.approx(0.45)
    with pytest.raises(ValidationError):
        visibility_adjusted_rate(1.2)
    with pytest.raises(ValidationError):
        visibility_adjusted_rate(0.5, 2.0)


def test_clopper_pearson_edges():
    lo, hi = clopper_pearson(0, 100)
    assert lo == 0.0
    assert 0.0 < hi < 0.06
    lo, hi = clopper_pearson(100, 100)
    assert hi == 1.0
    assert lo > 0.94
    lo, hi = clopper_pearson(50, 100)
    assert lo < 0.5 < hi


def test_clopper_pearson_validation():
    with pytest.raises(ValidationError):
        clopper_pearson(5, 4)
    with pytest.raises(ValidationError):
        clopper_pearson(-1, 4)
    with pytest.raises(ValidationError):
        clopper_pearson(1, 4, confidence=1.0)


def test_simulate_counts_is_deterministic():
    a = simulate_counts(0.4472, 1000, seed=99)
    b = simulate_counts(0.4472, 1000, seed=99)
    assert a == b
    count, est, (lo, hi) = a
    assert 0 <= count <= 1000
    assert est == count / 1000
    assert lo <= est <= hi


def test_simulate_counts_seed_matters():
    counts = {simulate_counts(0.5, 500, seed=s)[0] for s in range(8)}
    assert len(counts) > 1


def test_coincidence_plan_validation():
    CoincidencePlan(0.45, 0.4, 0.95, 287)
    with pytest.raises(ValidationError):
        CoincidencePlan(1.2, 0.4, 0.95, 10)
    with pytest.raises(ValidationError):
        CoincidencePlan(0.45, -0.1, 0.95, 10)
    with pytest.raises(ValidationError):
        CoincidencePlan(0.45, 0.4, 1.0, 10)
    with pytest.raises(ValidationError):
        CoincidencePlan(0.45, 0.4, 0.95, 0)


def _oracle_plan(true_rate, threshold, confidence, n_max=2000):
    """Smallest n with wrong-side mass at most 1 - confidence, brute force."""
    p = Fraction(true_rate)
    thr = Fraction(threshold)
    alpha = 1 - Fraction(confidence)
    for n in range(1, n_max):
        if p > thr:
            ks = range(0, math.floor(thr * n) + 1)
        else:
            ks = range(math.ceil(thr * n), n + 1)
        mass = sum(
            Fraction(math.comb(n, k)) * p ** k * (1 - p) ** (n - k) for k in ks
        )
        if mass <= alpha:
            return n
    raise AssertionError("oracle exhausted")


@pytest.mark.parametrize("rate,thr,conf", [
    (Fraction(3, 5), Fraction(1, 2), Fraction(9, 10)),
    (Fraction(2, 5), Fraction(1, 2), Fraction(9, 10)),
    (Fraction(7, 10), Fraction(1, 2), Fraction(99, 100)),
    (Fraction(9, 20), Fraction(2, 5), Fraction(9, 10)),
])
def test_plan_trials_matches_oracle(rate, thr, conf):
    got = plan_trials(float(rate), float(thr), float(conf))
    # the oracle sees the same binary-rounded inputs plan_trials received
    want = _oracle_plan(
        Fraction(float(rate)), Fraction(float(thr)), Fraction(float(conf))
    )
    assert got == want


def test_plan_trials_headline_case():
    assert plan_trials(0.44721, 0.4, 0.95) == 287


def test_plan_trials_is_symmetric():
    up = plan_trials(0.6, 0.5, 0.9)
    down = plan_trials(0.4, 0.5, 0.9)
    assert up == down


def test_plan_trials_monotone_in_confidence():
    n90 = plan_trials(0.45, 0.4, 0.90)
    n95 = plan_trials(0.45, 0.4, 0.95)
    n99 = plan_trials(0.45, 0.4, 0.99)
    assert n90 <= n95 <= n99


def test_plan_trials_harder_when_rates_are_close():
    assert plan_trials(0.45, 0.4, 0.9) > plan_trials(0.6, 0.4, 0.9)


def test_plan_trials_rejects_equal_rates():
    with pytest.raises(InfeasiblePlan):
        plan_trials(0.4, 0.4, 0.95)


def test_plan_trials_validation():
    with pytest.raises(ValidationError):
        plan_trials(1.1, 0.4, 0.95)
    with pytest.raises(ValidationError):
        plan_trials(0.45, 0.4, 0.0)


def test_wrong_side_probability_ties_count_against():
    # n = 10, threshold 1/2: outcome 5 sits on the line and counts as wrong
    p = Fraction(3, 5)
    with_tie = _wrong_side_probability(10, p, Fraction(1, 2))
    k5 = Fraction(math.comb(10, 5)) * p ** 5 * (1 - p) ** 5
    below = sum(
        Fraction(math.comb(10, k)) * p ** k * (1 - p) ** (10 - k)
        for k in range(5)
    )
    assert with_tie == below + k5
