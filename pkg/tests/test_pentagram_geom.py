"""Pentagram geometry, chain coordinates, and the overlap forms."""

import math

import numpy as np
import pytest

from pentaspin import (
    ChainParams,
    Direction,
    Pentagram,
    SpinState,
    correlation_form,
    frame_operator,
    from_chain,
    gram,
    gram_max,
    kcbs_spin_form,
    kcbs_sum,
    overlap,
    regular_pentagram,
)
from pentaspin.errors import DegenerateClosure, InvalidPentagram, ValidationError
from pentaspin.spin_core import orthonormal_frame

from conftest import random_pentagram, random_rotation, random_state

SQRT5 = math.sqrt(5.0)


def test_regular_pentagram_adjacency():
    p = regular_pentagram()
    for k in range(5):
        assert abs(p.legs[k].dot(p.legs[(k + 1) % 5])) < 1e-12


def test_regular_pentagram_axis_symmetry():
    """All five legs make the same angle with the symmetry axis."""
    p = regular_pentagram()
    cosines = [l.z for l in p.legs]
    assert max(cosines) - min(cosines) < 1e-12
    # the common cosine squared is 1/5^(1/2) at the KCBS optimum
    assert cosines[0] ** 2 == pytest.approx(1.0 / SQRT5, abs=1e-12)


def test_regular_pentagram_custom_axis():
    axis = Direction(1.0, 0.0, 0.0)
    p = regular_pentagram(axis=axis)
    for l in p.legs:
        assert l.dot(axis) ** 2 == pytest.approx(1.0 / SQRT5, abs=1e-12)


def test_regular_pentagram_chi_rotates_about_axis():
    p0 = regular_pentagram()
    p1 = regular_pentagram(chi=0.4)
    c, s = math.cos(0.4), math.sin(0.4)
    R = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    assert p0.rotated(R).equals(p1, tol=1e-12)


def test_frame_operator_spectrum():
    """The regular frame operator has eigenvalues sqrt(5) and (5-sqrt(5))/2."""
    T = frame_operator(regular_pentagram())
    vals = sorted(np.linalg.eigvalsh(T))
    assert vals[2] == pytest.approx(SQRT5, abs=1e-12)
    assert vals[0] == pytest.approx((5.0 - SQRT5) / 2.0, abs=1e-12)
    assert vals[1] == pytest.approx((5.0 - SQRT5) / 2.0, abs=1e-12)
    assert np.trace(T) == pytest.approx(5.0, abs=1e-12)


def test_gram_max_equals_top_eigenvalue(rng):
    for _ in range(20):
        p = random_pentagram(rng)
        T = frame_operator(p)
        assert gram_max(p) == pytest.approx(max(np.linalg.eigvalsh(T)), abs=1e-9)
    assert gram_max(regular_pentagram()) == pytest.approx(SQRT5, abs=1e-12)


def test_gram_diagonal_and_adjacent_zeros(rng):
    p = random_pentagram(rng)
    g = gram(p)
    assert np.allclose(np.diag(g), 1.0, atol=1e-12)
    for k in range(5):
        assert abs(g[k, (k + 1) % 5]) < 1e-9


def test_kcbs_forms_are_consistent(rng):
    for _ in range(100):
        p = random_pentagram(rng)
        psi = random_state(rng)
        k = kcbs_sum(p, psi)
        assert kcbs_spin_form(p, psi) == pytest.approx(5.0 - k, abs=1e-12)
        assert correlation_form(p, psi) == pytest.approx(5.0 - 4.0 * k, abs=1e-12)


def test_kcbs_sum_matches_direct_overlaps(rng):
    for _ in range(50):
        p = random_pentagram(rng)
        psi = random_state(rng)
        direct = sum(abs(overlap(l, psi)) ** 2 for l in p.legs)
        assert kcbs_sum(p, psi) == pytest.approx(direct, abs=1e-12)


def test_regular_axis_state_reaches_sqrt5():
    k = kcbs_sum(regular_pentagram(), SpinState(0.0, 0.0, 1.0))
    assert k == pytest.approx(SQRT5, abs=1e-12)


def test_kcbs_sum_rotation_invariance(rng):
    for _ in range(20):
        p = random_pentagram(rng)
        psi = random_state(rng)
        R = random_rotation(rng)
        from pentaspin import rotate

        assert kcbs_sum(p.rotated(R), rotate(psi, R)) == pytest.approx(
            kcbs_sum(p, psi), abs=1e-12
        )


def test_chain_round_trip(rng):
    """Bend angles recovered from legs rebuild the same pentagram."""
    for _ in range(50):
        p = random_pentagram(rng)
        t = []
        for k in range(3):
            m, n = orthonormal_frame(p.legs[k])
            nxt = p.legs[k + 1]
            t.append(math.atan2(nxt.dot(n), nxt.dot(m)))
        rebuilt = from_chain(ChainParams(p.legs[0], t[0], t[1], t[2]))
        assert rebuilt.equals(p, tol=1e-9, up_to_sign=True)


def test_from_chain_degenerate_closure():
    z = Direction(0.0, 0.0, 1.0)
    with pytest.raises(DegenerateClosure):
        from_chain(ChainParams(z, 0.0, 0.0, -math.pi / 2.0))


def test_from_chain_parallel_legs():
    z = Direction(0.0, 0.0, 1.0)
    with pytest.raises(InvalidPentagram):
        from_chain(ChainParams(z, 0.0, math.pi / 2.0, 0.3))


def test_pentagram_rejects_non_orthogonal_adjacent():
    e = [Direction(1.0, 0.0, 0.0), Direction(0.0, 1.0, 0.0),
         Direction(0.0, 0.0, 1.0)]
    with pytest.raises(InvalidPentagram):
        Pentagram((e[0], e[1], e[0], e[1], e[2]))


def test_pentagram_rejects_wrong_count():
    e = regular_pentagram().legs
    with pytest.raises(InvalidPentagram):
        Pentagram(e[:4])


def test_pentagram_canonical_hemisphere(rng):
    p = random_pentagram(rng).canonical()
    for l in p.legs:
        assert (l.z, l.y, l.x) > (0.0, 0.0, 0.0)


def test_pentagram_json_round_trip(rng):
    p = random_pentagram(rng)
    assert Pentagram.from_json(p.to_json()).equals(p, tol=1e-15)
    with pytest.raises(ValidationError):
        Pentagram.from_json({"legs": [[1, 0, 0]]})


def test_chain_params_json_round_trip(rng):
    cp = ChainParams(Direction(0.0, 0.0, 1.0), 0.3, -1.2, 2.0)
    back = ChainParams.from_json(cp.to_json())
    assert back.l1.equals(cp.l1, tol=1e-15)
    assert (back.t1, back.t2, back.t3) == (cp.t1, cp.t2, cp.t3)
    with pytest.raises(ValidationError):
        ChainParams.from_json({"l1": [0, 0, 1], "t": [1.0]})
