"""Polarization-entangled photon pairs as the spin-1 triplet.

A symmetric two-photon polarization state occupies the triplet sector,
which is exactly the spin-1 Hilbert space: complexifying the Stokes space
sends analyzer settings to directions and the squared overlap to the
two-detector coincidence rate of a Hanbury Brown-Twiss measurement.  This
module carries that dictionary plus the experiment-planning arithmetic:
how many pairs to collect before an observed rate beyond the classical
threshold is statistically convincing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InfeasiblePlan, ValidationError
from .spin_core import Direction, SpinState, overlap

__all__ = [
    "STOKES_TOL",
    "StokesDirection",
    "CoincidencePlan",
    "biphoton_state",
    "coincidence_rate",
    "symmetric_test_angle",
    "visibility_adjusted_rate",
    "simulate_counts",
    "clopper_pearson",
    "plan_trials",
]

STOKES_TOL = 1e-12


@dataclass(frozen=True)
class StokesDirection:
    """Unit Stokes vector: a point of the Poincare sphere."""

    s1: float
    s2: float
    s3: float

    def __init__(self, s1: float, s2: float, s3: float, normalize: bool = False):
        s1, s2, s3 = float(s1), float(s2), float(s3)
        norm = math.sqrt(s1 * s1 + s2 * s2 + s3 * s3)
        if norm == 0.0 or not math.isfinite(norm):
            raise ValidationError("Stokes vector must be finite and nonzero")
        if not normalize and abs(norm - 1.0) > STOKES_TOL:
            raise ValidationError(f"Stokes vector norm {norm} is not 1")
        object.__setattr__(self, "s1", s1 / norm)
        object.__setattr__(self, "s2", s2 / norm)
        object.__setattr__(self, "s3", s3 / norm)

    def direction(self) -> Direction:
        return Direction(self.s1, self.s2, self.s3, normalize=True)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3])

    def to_json(self) -> list:
        return [self.s1, self.s2, self.s3]

    @classmethod
    def from_json(cls, obj) -> "StokesDirection":
        if not isinstance(obj, (list, tuple)) or len(obj) != 3:
            raise ValidationError("Stokes JSON must be [s1, s2, s3]")
        return cls(float(obj[0]), float(obj[1]), float(obj[2]))


@dataclass(frozen=True)
class CoincidencePlan:
    """A sized coincidence experiment: rate hypothesis, decision bar, budget."""

    true_rate: float
    threshold: float
    confidence: float
    trials: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.true_rate <= 1.0):
            raise ValidationError("true_rate must lie in [0, 1]")
        if not (0.0 <= self.threshold <= 1.0):
            raise ValidationError("threshold must lie in [0, 1]")
        if not (0.0 < self.confidence < 1.0):
            raise ValidationError("confidence must lie in (0, 1)")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")

    def to_json(self) -> dict:
        return {
            "true_rate": self.true_rate,
            "threshold": self.threshold,
            "confidence": self.confidence,
            "trials": self.trials,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CoincidencePlan":
        try:
            return cls(
                float(obj["true_rate"]), float(obj["threshold"]),
                float(obj["confidence"]), int(obj["trials"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError("bad plan JSON") from exc


def biphoton_state(p: StokesDirection) -> SpinState:
    """Triplet state read off a neutrally polarized pair source.

    The dictionary sends the Stokes vector itself to the (real) spin-1
    amplitude vector; real components mean concurrence 1 and zero degree
    of polarization.
    """
    return SpinState(p.s1, p.s2, p.s3)


def coincidence_rate(l: StokesDirection | Direction, psi: SpinState) -> float:
    """Two-detector coincidence probability with both analyzers along l.

    Equals the squared overlap, which is 1 minus the squared-spin
    expectation along l.
    """
    d = l.direction() if isinstance(l, StokesDirection) else l
    return float(abs(overlap(d, psi)) ** 2)


def symmetric_test_angle() -> float:
    """Analyzer opening angle of the symmetric pentagram test.

    arccos(5^(-1/4)) ~ 0.8383 rad: each pentagram leg makes this angle
    with the axis state, and the per-leg coincidence rate is 1/sqrt(5),
    clear of the classical bar 2/5.
    """
    return math.acos(5.0 ** -0.25)


def visibility_adjusted_rate(rate: float, visibility: float = 1.0) -> float:
    """Ideal rate degraded by interference visibility v.

    The unpolarized background contributes 1/4 per analyzer setting.
    """
    if not (0.0 <= visibility <= 1.0):
        raise ValidationError("visibility must lie in [0, 1]")
    if not (0.0 <= rate <= 1.0):
        raise ValidationError("rate must lie in [0, 1]")
    return visibility * rate + (1.0 - visibility) * 0.25


def clopper_pearson(count: int, trials: int, confidence: float = 0.95):
    """Exact central binomial confidence interval for the rate."""
    from scipy.stats import beta

    if not (0 <= count <= trials):
        raise ValidationError("count must lie in [0, trials]")
    if not (0.0 < confidence < 1.0):
        raise ValidationError("confidence must lie in (0, 1)")
    alpha = 1.0 - confidence
    lo = 0.0 if count == 0 else float(beta.ppf(alpha / 2, count, trials - count + 1))
    hi = 1.0 if count == trials else float(
        beta.ppf(1 - alpha / 2, count + 1, trials - count)
    )
    return lo, hi


def simulate_counts(rate: float, trials: int, seed: int, confidence: float = 0.95):
    """Draw one binomial coincidence count and summarize it.

    Returns (coincidences, estimate, (ci_lo, ci_hi)).  Counter-based
    generator: the same seed always reproduces the same run, and batch k
    of a larger campaign should use seed + k.
    """
    if not (0.0 <= rate <= 1.0):
        raise ValidationError("rate must lie in [0, 1]")
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    count = int(rng.binomial(trials, rate))
    return count, count / trials, clopper_pearson(count, trials, confidence)


def _binom_cdf_leq(n: int, k: int, p: Fraction) -> Fraction:
    """P[X <= k] for X ~ Bin(n, p), exactly."""
    if k < 0:
        return Fraction(0)
    if k >= n:
        return Fraction(1)
    q = 1 - p
    term = q ** n
    total = term
    for i in range(1, k + 1):
        term = term * (n - i + 1) * p / (i * q)
        total += term
    return total


def _wrong_side_probability(n: int, true_rate: Fraction, threshold: Fraction) -> Fraction:
    """P[estimate lands on the wrong side of threshold], X ~ Bin(n, true).

    An estimate exactly on the threshold counts as wrong for either
    direction (the conservative, direction-symmetric tie rule).
    """
    bar = n * threshold
    if true_rate > threshold:
        return _binom_cdf_leq(n, math.floor(bar), true_rate)
    return 1 - _binom_cdf_leq(n, math.ceil(bar) - 1, true_rate)


def plan_trials(true_rate: float, threshold: float, confidence: float) -> int:
    """Smallest trial count that puts the estimate on the right side.

    For X ~ Bin(n, true_rate) the wrong-side probability is the exact
    binomial tail across the threshold (ties count as wrong); this returns
    the least n making it at most 1 - confidence.  Works for either
    direction of the gap and raises InfeasiblePlan when the rate sits on
    the threshold, where no amount of data decides.
    """
    if not (0.0 <= true_rate <= 1.0):
        raise ValidationError("true_rate must lie in [0, 1]")
    if not (0.0 <= threshold <= 1.0):
        raise ValidationError("threshold must lie in [0, 1]")
    if not (0.0 < confidence < 1.0):
        raise ValidationError("confidence must lie in (0, 1)")
    if true_rate == threshold:
        raise InfeasiblePlan("the rate sits exactly on the threshold")

    from scipy.stats import binom

    p = Fraction(true_rate)
    thr = Fraction(threshold)
    miss_cap = 1 - Fraction(confidence)
    cap_f = float(miss_cap)

    # the wrong-side probability sawtooths in n (the threshold bar jumps at
    # integers), so the passing set is a union of intervals: scan n upward,
    # filtering with the float tail and settling anything near the cap
    # exactly
    for n in range(1, 10 ** 6 + 1):
        bar = n * thr
        if p > thr:
            miss_f = float(binom.cdf(math.floor(bar), n, true_rate))
        else:
            miss_f = float(binom.sf(math.ceil(bar) - 1, n, true_rate))
        if miss_f <= cap_f + 1e-9:
            if _wrong_side_probability(n, p, thr) <= miss_cap:
                return n
    raise InfeasiblePlan("no practical trial count reaches the confidence")
