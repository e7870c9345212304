"""Backend agreement between the compiled kernel and the pure fallback."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from pentaspin import _chainkernel_py as pure
from pentaspin import kernels

try:
    from pentaspin import _chainkernel as compiled
except ImportError:
    compiled = None

needs_compiled = pytest.mark.skipif(
    compiled is None, reason="compiled extension not built"
)


def unit(rng):
    v = rng.normal(size=3)
    return tuple(v / np.linalg.norm(v))


def test_completion_is_orthonormal_right_handed(rng):
    for _ in range(200):
        lx, ly, lz = unit(rng)
        mx, my, mz, nx, ny, nz = pure.completion(lx, ly, lz)
        m = np.array([mx, my, mz])
        n = np.array([nx, ny, nz])
        l = np.array([lx, ly, lz])
        assert abs(np.linalg.norm(m) - 1.0) < 1e-12
        assert abs(m @ l) < 1e-12
        assert np.max(np.abs(np.cross(l, m) - n)) < 1e-12


def test_chain_legs_adjacent_orthogonality(rng):
    for _ in range(200):
        lx, ly, lz = unit(rng)
        t = rng.uniform(-math.pi, math.pi, size=3)
        legs = pure.chain_legs(lx, ly, lz, t[0], t[1], t[2])
        if legs is None:
            continue
        v = np.array(legs).reshape(5, 3)
        for k in range(5):
            assert abs(v[k] @ v[(k + 1) % 5]) < 1e-10
            assert abs(np.linalg.norm(v[k]) - 1.0) < 1e-12


def test_chain_legs_degenerate_returns_none():
    assert pure.chain_legs(0.0, 0.0, 1.0, 0.0, 0.0, -math.pi / 2.0) is None


def test_chain_kcbs_sentinel_on_parallel_legs():
    # t2 = pi/2 sends leg 3 back onto leg 1
    triad = (1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
    pr = (0.0, 0.0, 1.0)
    pi_ = (0.0, 0.0, 0.0)
    val = pure.chain_kcbs(0.0, 0.0, 0.0, math.pi / 2.0, 0.3, triad, pr, pi_)
    assert val == -1.0


def test_chain_kcbs_regular_value():
    """Chain angles of the regular pentagram reproduce sqrt(5)."""
    from pentaspin import regular_pentagram
    from pentaspin.spin_core import orthonormal_frame

    p = regular_pentagram()
    t = []
    for k in range(3):
        m, n = orthonormal_frame(p.legs[k])
        nxt = p.legs[k + 1]
        t.append(math.atan2(nxt.dot(n), nxt.dot(m)))
    l1 = p.legs[0]
    triad = (l1.x, l1.y, l1.z, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    val = pure.chain_kcbs(0.0, 0.0, t[0], t[1], t[2], triad,
                          (0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    assert val == pytest.approx(math.sqrt(5.0), abs=1e-9)


@needs_compiled
def test_backends_agree_on_completion(rng):
    for _ in range(500):
        l = unit(rng)
        assert compiled.completion(*l) == pytest.approx(
            pure.completion(*l), abs=1e-15
        )


@needs_compiled
def test_backends_agree_on_chain_legs(rng):
    for _ in range(500):
        l = unit(rng)
        t = rng.uniform(-math.pi, math.pi, size=3)
        a = pure.chain_legs(*l, t[0], t[1], t[2])
        b = compiled.chain_legs(*l, t[0], t[1], t[2])
        if a is None or b is None:
            assert a == b
        else:
            assert np.max(np.abs(np.array(a) - np.array(b))) < 1e-14


@needs_compiled
def test_backends_agree_on_chain_kcbs(rng):
    for _ in range(500):
        w = rng.normal(size=(3, 3))
        q, r = np.linalg.qr(w)
        q = q * np.sign(np.diag(r))
        # the compiled signature wants contiguous float64 buffers
        triad = np.ascontiguousarray(q.T.reshape(9))
        a, b = rng.uniform(0.0, math.pi), rng.uniform(-math.pi, math.pi)
        t = rng.uniform(-math.pi, math.pi, size=3)
        pr = rng.normal(size=3)
        pi_ = rng.normal(size=3)
        va = pure.chain_kcbs(a, b, t[0], t[1], t[2], triad, pr, pi_)
        vb = compiled.chain_kcbs(a, b, t[0], t[1], t[2], triad, pr, pi_)
        assert vb == pytest.approx(va, abs=1e-12)


@needs_compiled
def test_backend_constants_match():
    assert compiled.CLOSURE_TOL == pure.CLOSURE_TOL
    assert compiled.PARALLEL_TOL == pure.PARALLEL_TOL


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("PENTASPIN_KERNEL", None)
    else:
        env["PENTASPIN_KERNEL"] = env_value
    out = subprocess.run(
        [sys.executable, "-c", "import pentaspin.kernels as k; print(k.BACKEND)"],
        capture_output=True, text=True, env=env,
    )
    return out.returncode, out.stdout.strip()


def test_env_var_forces_python_backend():
    code, backend = _backend_in_subprocess("python")
    assert code == 0
    assert backend == "python"


@needs_compiled
def test_env_var_forces_compiled_backend():
    code, backend = _backend_in_subprocess("compiled")
    assert code == 0
    assert backend == "compiled"


def test_active_backend_exports_kernel_api():
    for name in ("completion", "chain_legs", "kcbs_from_legs", "chain_kcbs"):
        assert callable(getattr(kernels, name))
    assert kernels.BACKEND in ("compiled", "python")
