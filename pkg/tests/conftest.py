"""Shared seeded generators for the property tests."""

import math

import numpy as np
import pytest

from pentaspin import ChainParams, Direction, SpinState, from_chain
from pentaspin.errors import DegenerateClosure, InvalidPentagram


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20260817))


def random_direction(rng) -> Direction:
    return Direction.from_vec(rng.normal(size=3), normalize=True)


def random_state(rng) -> SpinState:
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    return SpinState.from_vec(a, normalize=True)


def random_coherent(rng) -> SpinState:
    m = rng.normal(size=3)
    m = m / np.linalg.norm(m)
    n = rng.normal(size=3)
    n = n - (n @ m) * m
    n = n / np.linalg.norm(n)
    return SpinState.from_vec((m + 1j * n) / math.sqrt(2.0))


def random_pentagram(rng):
    while True:
        l1 = random_direction(rng)
        t = rng.uniform(-math.pi, math.pi, size=3)
        try:
            return from_chain(ChainParams(l1, t[0], t[1], t[2]))
        except (DegenerateClosure, InvalidPentagram):
            continue


def random_rotation(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
