"""The acceptance suite: every headline number, checked from scratch.

Each criterion is a self-contained function returning a CheckResult; the
CLI repro command prints them as a table and the test suite asserts them
one by one.  Checks recompute their expected values independently where
possible (brute-force oracles, rank conditions, cross-mode agreement)
rather than trusting the code paths under test.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import biphoton as bp
from . import hv_solver as hv
from ._dd import exact_rank
from ._rational import qq
from .pentagram_geom import (
    ChainParams,
    Pentagram,
    correlation_form,
    from_chain,
    kcbs_spin_form,
    kcbs_sum,
    regular_pentagram,
)
from .search import SearchConfig, detection_scan, optimize_pentagram, regular_K
from .spin_core import (
    Direction,
    SpinState,
    concurrence,
    overlap,
    rotate,
    s_squared_expectation,
    to_canonical,
    two_qubit,
    wootters_concurrence,
)
from .errors import DegenerateClosure, InvalidPentagram

__all__ = ["CheckResult", "CRITERIA", "run_all"]

_SQRT5 = math.sqrt(5.0)

# the nontrivial pentagram ray: 3 + sum of the five cyclic edge products
PENTAGRAM_RAY_COEFFS = {
    (): 3, (0, 1): 1, (1, 2): 1, (2, 3): 1, (3, 4): 1, (0, 4): 1,
}

# the CHSH ray on contexts (0,2), (0,3), (1,2), (1,3)
CHSH_RAY_COEFFS = {
    (): 2, (0, 2): 1, (0, 3): 1, (1, 2): 1, (1, 3): -1,
}


@dataclass(frozen=True)
class CheckResult:
    criterion: str
    passed: bool
    detail: str


def _axis_state() -> SpinState:
    return SpinState(0.0, 0.0, 1.0)


def _random_direction(rng) -> Direction:
    v = rng.normal(size=3)
    return Direction.from_vec(v, normalize=True)


def _random_state(rng) -> SpinState:
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    a = a / np.linalg.norm(a)
    return SpinState(a[0], a[1], a[2])


def _random_coherent(rng) -> SpinState:
    m = rng.normal(size=3)
    m = m / np.linalg.norm(m)
    n = rng.normal(size=3)
    n = n - (n @ m) * m
    n = n / np.linalg.norm(n)
    a = (m + 1j * n) / math.sqrt(2.0)
    return SpinState(a[0], a[1], a[2])


def _random_pentagram(rng) -> Pentagram:
    while True:
        l1 = _random_direction(rng)
        t = rng.uniform(-math.pi, math.pi, size=3)
        try:
            return from_chain(ChainParams(l1, t[0], t[1], t[2]))
        except (DegenerateClosure, InvalidPentagram):
            continue


def _canonical_phi_state(phi: float) -> SpinState:
    return SpinState(math.cos(phi), 1j * math.sin(phi), 0.0)


# ------------------------------------------------------------- criterion 1


def check_1_regular_violation() -> CheckResult:
    p = regular_pentagram()
    psi = _axis_state()
    k = kcbs_sum(p, psi)
    spin = kcbs_spin_form(p, psi)
    corr = correlation_form(p, psi)
    errs = [
        abs(k - _SQRT5),
        abs(spin - (5.0 - _SQRT5)),
        abs(corr - (5.0 - 4.0 * _SQRT5)),
    ]
    passed = max(errs) <= 1e-9 and spin < 3.0 and corr < -3.0
    return CheckResult(
        "1",
        passed,
        f"K={k:.12f} spin={spin:.12f} corr={corr:.12f} max_err={max(errs):.2e}",
    )


# ------------------------------------------------------------- criterion 2


def check_2_certify_decisions() -> CheckResult:
    model = hv.marginals_from_state(regular_pentagram(), _axis_state())
    cert = hv.lp_feasible(model, mode="exact")
    if cert.verdict != "infeasible" or cert.violated is None:
        return CheckResult("2", False, f"axis verdict {cert.verdict}")
    if cert.violated.coeff_dict() != PENTAGRAM_RAY_COEFFS:
        return CheckResult(
            "2", False, f"violated ray {cert.violated.to_json()['coeffs']}"
        )
    rng = np.random.Generator(np.random.Philox(20260817))
    structure = hv.pentagram5()
    for i in range(100):
        pent = _random_pentagram(rng)
        psi = _random_coherent(rng)
        m = hv.marginals_from_state(pent, psi)
        c = hv.lp_feasible(m, mode="exact")
        if c.verdict != "feasible" or c.witness is None:
            return CheckResult("2", False, f"coherent case {i}: {c.verdict}")
        if c.witness.pushforward(structure) != m.rationalized():
            return CheckResult("2", False, f"coherent case {i}: witness mismatch")
    return CheckResult(
        "2", True,
        "axis model infeasible with the pentagram ray; "
        "100/100 coherent models feasible with exact witnesses",
    )


# ------------------------------------------------------------- criterion 3


def check_3_chsh_rays() -> CheckResult:
    t0 = time.perf_counter()
    structure = hv.chsh()
    rays = hv.enumerate_extremal_rays(structure)
    elapsed = time.perf_counter() - t0
    nontrivial = [r for r in rays if r.kind == "nontrivial"]
    if len(nontrivial) != 8:
        return CheckResult("3", False, f"{len(nontrivial)} nontrivial rays")
    base = hv.RayFunction(
        structure, tuple(CHSH_RAY_COEFFS.items()), "nontrivial"
    )
    images = set()
    for bits in itertools.product((0, 1), repeat=4):
        s = {i for i in range(4) if bits[i]}
        images.add(hv.flip(base, s).coeffs)
    found = {r.coeffs for r in nontrivial}
    passed = found == images and len(images) == 8 and elapsed < 10.0
    return CheckResult(
        "3", passed,
        f"8 nontrivial rays = flip orbit of the 2+a0a2+a0a3+a1a2-a1a3 "
        f"functional in {elapsed:.2f}s",
    )


# ------------------------------------------------------------- criterion 4


def _independent_extremality_check(structure, ray) -> bool:
    """Extremal iff the monomial vectors of its zero assignments span a
    codimension-1 subspace, and the function is nonnegative everywhere."""
    monos = structure.monomials()
    zero_rows = []
    for a in structure.assignments():
        v = ray.value_at(a)
        if v < 0:
            return False
        if v == 0:
            zero_rows.append([
                qq(math.prod(a[i] for i in mono)) for mono in monos
            ])
    if not zero_rows:
        return False
    return exact_rank(zero_rows) == len(monos) - 1


def check_4_pentagram_rays() -> CheckResult:
    t0 = time.perf_counter()
    structure = hv.pentagram5()
    rays = hv.enumerate_extremal_rays(structure)
    elapsed = time.perf_counter() - t0
    counts = (
        sum(r.kind == "trivial" for r in rays),
        sum(r.kind == "nontrivial" for r in rays),
    )
    if counts != (20, 16):
        return CheckResult("4", False, f"counts {counts}")
    if len({r.coeffs for r in rays}) != 36:
        return CheckResult("4", False, "duplicate rays")
    target = tuple(sorted(PENTAGRAM_RAY_COEFFS.items(), key=lambda kv: (len(kv[0]), kv[0])))
    if target not in {r.coeffs for r in rays}:
        return CheckResult("4", False, "pentagram ray missing")
    bad = [r for r in rays if not _independent_extremality_check(structure, r)]
    passed = not bad and elapsed < 60.0
    return CheckResult(
        "4", passed,
        f"20 trivial + 16 nontrivial, pentagram ray present, all 36 pass "
        f"the rank-10 extremality check, enumeration {elapsed:.2f}s",
    )


# ------------------------------------------------------------- criterion 5


def _random_model_for_duality(rng, case: int) -> hv.MarginalModel:
    structure = hv.pentagram5()
    variant = case % 3
    if variant == 0:
        w = rng.dirichlet(np.ones(32))
        weights = {
            a: float(w[i])
            for i, a in enumerate(structure.assignments())
            if w[i] > 0
        }
        return hv.JointDistribution(5, weights, "float").pushforward(structure)
    if variant == 1:
        quantum = hv.marginals_from_state(regular_pentagram(), _axis_state())
        t = float(rng.random())
        marginals = []
        for ctx, qm in zip(structure.contexts, quantum.marginals):
            tab = {
                k: t * qm.table[k] + (1.0 - t) * 0.25 for k in qm.table
            }
            marginals.append(hv.ContextMarginal(ctx, tab))
        return hv.MarginalModel(structure, tuple(marginals), "float")
    pent = _random_pentagram(rng)
    psi = _random_state(rng)
    return hv.marginals_from_state(pent, psi)


def check_5_duality() -> CheckResult:
    rng = np.random.Generator(np.random.Philox(5150))
    structure = hv.pentagram5()
    rays = [
        r for r in hv.enumerate_extremal_rays(structure)
        if r.kind == "nontrivial"
    ]
    n_feasible = 0
    for case in range(1000):
        model = _random_model_for_duality(rng, case).rationalized()
        cert = hv.lp_feasible(model, mode="exact")
        cone_ok = all(hv.ray_expectation(r, model) >= 0 for r in rays)
        if (cert.verdict == "feasible") != cone_ok:
            return CheckResult(
                "5", False, f"case {case}: LP {cert.verdict}, cone {cone_ok}"
            )
        n_feasible += cert.verdict == "feasible"
    return CheckResult(
        "5", True,
        f"1000/1000 exact LP verdicts match the ray criterion "
        f"({n_feasible} feasible, {1000 - n_feasible} infeasible)",
    )


# ------------------------------------------------------------- criterion 6


def check_6_concurrence() -> CheckResult:
    worst = 0.0
    for i in range(100):
        phi = (math.pi / 4.0) * i / 99.0
        psi = _canonical_phi_state(phi)
        c = math.cos(2.0 * phi)
        w = wootters_concurrence(two_qubit(psi))
        worst = max(worst, abs(w - c), abs(concurrence(psi) - c))
    return CheckResult(
        "6", worst <= 1e-9,
        f"wootters = |sum a^2| = cos(2 phi) on 100 phi, max err {worst:.2e}",
    )


# ------------------------------------------------------------- criterion 7


def check_7a_threshold() -> CheckResult:
    phi = 0.5 * math.acos(1.0 / _SQRT5)
    err = abs(regular_K(phi) - 2.0)
    return CheckResult(
        "7a", err <= 1e-12,
        f"regular_K at cos(2 phi)=1/sqrt(5) is 2 within {err:.2e}",
    )


def check_7b_neutral() -> CheckResult:
    err = abs(regular_K(0.0) - _SQRT5)
    return CheckResult("7b", err <= 1e-12, f"regular_K(0)=sqrt(5) within {err:.2e}")


def check_7c_quarter_pi() -> CheckResult:
    stated = (5.0 - _SQRT5) / 2.0
    got = regular_K(math.pi / 4.0)
    passed = abs(got - stated) <= 1e-12
    return CheckResult(
        "7c", passed,
        f"regular_K(pi/4)={got:.6f}; the stated value {stated:.6f} is the "
        "spin-axis-aligned configuration, but the m-axis closed form "
        "(which alone yields the 1/sqrt(5) threshold) gives (5+sqrt(5))/4",
    )


# ------------------------------------------------------------- criterion 8


def check_8_skew_detection() -> CheckResult:
    details = []
    for c in (0.1, 0.2, 0.3):
        phi = math.acos(c) / 2.0
        cfg = SearchConfig(restarts=24, max_iterations=600, seed=int(c * 1000))
        t0 = time.perf_counter()
        res = optimize_pentagram(_canonical_phi_state(phi), cfg)
        dt = time.perf_counter() - t0
        if res.best_K <= 2.0 or dt >= 60.0:
            return CheckResult(
                "8", False, f"c={c}: best K {res.best_K:.9f} in {dt:.1f}s"
            )
        details.append(f"c={c}: K={res.best_K:.6f}")
    cfg = SearchConfig(restarts=64, max_iterations=600, seed=8)
    t0 = time.perf_counter()
    res = optimize_pentagram(_canonical_phi_state(math.pi / 4.0), cfg)
    dt = time.perf_counter() - t0
    over = [r.K for r in res.restarts if r.K > 2.0 + 1e-6]
    if over or dt >= 60.0:
        return CheckResult(
            "8", False, f"c=0: {len(over)} restarts exceed 2+1e-6 in {dt:.1f}s"
        )
    details.append(f"c=0: max K={res.best_K:.9f} over 64 restarts")
    return CheckResult("8", True, "; ".join(details))


# ------------------------------------------------------------- criterion 9


def check_9_biphoton_numbers() -> CheckResult:
    delta = bp.symmetric_test_angle()
    psi = bp.biphoton_state(bp.StokesDirection(0.0, 0.0, 1.0))
    analyzer = Direction(math.sin(delta), 0.0, math.cos(delta))
    rate = bp.coincidence_rate(analyzer, psi)
    checks = [
        abs(delta - 0.8383) <= 5e-4,
        abs(rate - 0.4472) <= 1e-4,
        5.0 * 0.4 == 2.0,
    ]
    return CheckResult(
        "9", all(checks),
        f"delta={delta:.7f}, rate={rate:.7f}=1/sqrt(5), threshold 0.4 = 2/5",
    )


# ------------------------------------------------------------ criterion 10


def _oracle_plan_trials(true_rate: float, threshold: float, confidence: float) -> int:
    """Brute-force exact binomial scan, written independently of biphoton."""
    p = Fraction(true_rate)
    thr = Fraction(threshold)
    cap = 1 - Fraction(confidence)
    n = 0
    while True:
        n += 1
        bar = math.floor(n * thr) if p > thr else math.ceil(n * thr) - 1
        # P[X <= bar] by direct summation of C(n,k) p^k q^(n-k)
        total = Fraction(0)
        for k in range(bar + 1):
            total += (
                Fraction(math.comb(n, k)) * p ** k * (1 - p) ** (n - k)
            )
        miss = total if p > thr else 1 - total
        if miss <= cap:
            return n
        if n > 5000:
            raise RuntimeError("oracle runaway")


def check_10_statistics() -> CheckResult:
    n = bp.plan_trials(0.44721, 0.4, 0.95)
    oracle = _oracle_plan_trials(0.44721, 0.4, 0.95)
    if n != oracle:
        return CheckResult("10", False, f"plan {n} vs oracle {oracle}")
    wrong = 0
    for seed in range(1000):
        _, est, _ = bp.simulate_counts(0.44721, n, seed)
        if est <= 0.4:
            wrong += 1
    passed = wrong <= 70
    return CheckResult(
        "10", passed,
        f"plan_trials={n} matches the brute-force oracle; "
        f"{wrong}/1000 seeded runs land wrong-side (cap 70)",
    )


# ------------------------------------------------------------ criterion 11


def _props_spin_core(rng) -> tuple[int, str | None]:
    cases = 0
    for _ in range(1000):
        psi = _random_state(rng)
        l = _random_direction(rng)
        if abs(abs(overlap(l, psi)) ** 2 + s_squared_expectation(l, psi) - 1.0) > 1e-12:
            return cases, "overlap/s^2 identity"
        form = to_canonical(psi)
        if not form.state().equals(psi, up_to_phase=True, tol=1e-9):
            return cases, "canonical reconstruction"
        c = concurrence(psi)
        if abs(c - math.cos(2.0 * form.phi)) > 1e-9:
            return cases, "concurrence vs phi"
        if abs(wootters_concurrence(two_qubit(psi)) - c) > 1e-9:
            return cases, "wootters vs concurrence"
        cases += 1
    return cases, None


def _props_pentagram_geom(rng) -> tuple[int, str | None]:
    cases = 0
    for _ in range(1000):
        pent = _random_pentagram(rng)
        psi = _random_state(rng)
        k = kcbs_sum(pent, psi)
        if abs(kcbs_spin_form(pent, psi) - (5.0 - k)) > 1e-12:
            return cases, "spin form identity"
        if abs(correlation_form(pent, psi) - (4.0 * (5.0 - k) - 15.0)) > 1e-12:
            return cases, "correlation form identity"
        g = [abs(l.dot(m)) for l, m in zip(pent.legs, pent.legs[1:] + pent.legs[:1])]
        if max(g) > 1e-10:
            return cases, "adjacent orthogonality"
        cases += 1
    return cases, None


def _props_hv_solver(rng) -> tuple[int, str | None]:
    structure = hv.pentagram5()
    rays = hv.enumerate_extremal_rays(structure)
    nontrivial = [r for r in rays if r.kind == "nontrivial"]
    cases = 0
    for i in range(1000):
        w = rng.dirichlet(np.ones(32))
        weights = {
            a: float(w[j]) for j, a in enumerate(structure.assignments())
        }
        joint = hv.JointDistribution(5, weights, "float")
        model = joint.pushforward(structure)
        ray = nontrivial[i % len(nontrivial)]
        if float(hv.ray_expectation(ray, model)) < -1e-12:
            return cases, "pushforward violates a ray"
        s = {int(v) for v in rng.integers(0, 5, size=2)}
        if hv.flip(hv.flip(ray, s), s) != ray:
            return cases, "flip involution"
        e1 = hv.ray_expectation(hv.flip(ray, s), hv.flip(model, s))
        if abs(float(e1) - float(hv.ray_expectation(ray, model))) > 1e-12:
            return cases, "flip equivariance"
        cases += 1
    return cases, None


def _props_search(rng) -> tuple[int, str | None]:
    cases = 0
    for _ in range(1000):
        phi = float(rng.random()) * math.pi / 4.0
        psi = _canonical_phi_state(phi)
        pent = regular_pentagram(axis=Direction(1.0, 0.0, 0.0))
        if abs(regular_K(phi) - kcbs_sum(pent, psi)) > 1e-12:
            return cases, "regular_K closed form vs direct evaluation"
        cases += 1
    rows = detection_scan([0.0, 0.25, 0.5], SearchConfig(restarts=8, seed=11))
    ks = [r["best_K"] for r in rows]
    if not all(b >= a - 1e-6 for a, b in zip(ks, ks[1:])):
        return cases, "scan monotonicity"
    return cases + len(rows), None


def _props_biphoton(rng) -> tuple[int, str | None]:
    cases = 0
    for _ in range(1000):
        s = rng.normal(size=3)
        stokes = bp.StokesDirection(s[0], s[1], s[2], normalize=True)
        psi = bp.biphoton_state(stokes)
        l = _random_direction(rng)
        r = bp.coincidence_rate(l, psi)
        if abs(r + s_squared_expectation(l, psi) - 1.0) > 1e-12:
            return cases, "rate + s^2 identity"
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        lr = l.rotated(q)
        pr = rotate(psi, q)
        if abs(bp.coincidence_rate(lr, pr) - r) > 1e-12:
            return cases, "rotational covariance"
        cases += 1
    return cases, None


def check_11_property_suites() -> CheckResult:
    rng = np.random.Generator(np.random.Philox(11011))
    parts = []
    for name, fn in (
        ("spin_core", _props_spin_core),
        ("pentagram_geom", _props_pentagram_geom),
        ("hv_solver", _props_hv_solver),
        ("search", _props_search),
        ("biphoton", _props_biphoton),
    ):
        cases, failure = fn(rng)
        if failure is not None:
            return CheckResult(
                "11", False, f"{name} failed after {cases} cases: {failure}"
            )
        parts.append(f"{name} {cases}")
    return CheckResult("11", True, "cases passed: " + ", ".join(parts))


CRITERIA = (
    check_1_regular_violation,
    check_2_certify_decisions,
    check_3_chsh_rays,
    check_4_pentagram_rays,
    check_5_duality,
    check_6_concurrence,
    check_7a_threshold,
    check_7b_neutral,
    check_7c_quarter_pi,
    check_8_skew_detection,
    check_9_biphoton_numbers,
    check_10_statistics,
    check_11_property_suites,
)


def run_all() -> list[CheckResult]:
    return [fn() for fn in CRITERIA]
