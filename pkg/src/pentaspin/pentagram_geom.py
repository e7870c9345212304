"""Pentagrams of measurement directions and the cyclic overlap inequality.

A pentagram is five unit directions l_1..l_5 with each cyclically adjacent
pair orthogonal, so adjacent squared-spin measurements are compatible.  For
any state the noncontextual bound on the cyclic overlap sum
K = sum_k |<l_k, psi>|^2 is 2; equivalently sum_k <S_k^2> >= 3 in the spin
form, or sum_k <A_k A_{k+1}> >= -3 for the dichotomic A = I - 2 P_l.  The
maximum of K over states equals the largest eigenvalue of the Gram matrix
of the legs, which reaches sqrt(5) ~ 2.236 for the regular pentagram.

Pentagrams are built either regularly around an axis or by a chain: pick
leg 1, bend through three in-plane angles to get legs 2..4, and close with
leg 5 = unit(l_4 x l_1).  The chain covers all pentagrams up to the closure
degeneracy l_4 || l_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateClosure, InvalidPentagram, ValidationError
from .spin_core import Direction, SpinState, orthonormal_frame, overlap

__all__ = [
    "ORTHO_TOL",
    "Pentagram",
    "ChainParams",
    "regular_pentagram",
    "from_chain",
    "kcbs_sum",
    "kcbs_spin_form",
    "correlation_form",
    "gram",
    "frame_operator",
    "gram_max",
]

# adjacent legs must be orthogonal to this tolerance; no two legs may be
# closer than PARALLEL_TOL to (anti)parallel
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class Pentagram:
    """Five directions with cyclically adjacent pairs orthogonal."""

    legs: tuple[Direction, Direction, Direction, Direction, Direction]

    def __post_init__(self) -> None:
        legs = tuple(self.legs)
        if len(legs) != 5 or not all(isinstance(l, Direction) for l in legs):
            raise InvalidPentagram("a pentagram needs exactly five directions")
        object.__setattr__(self, "legs", legs)
        for k in range(5):
            d = legs[k].dot(legs[(k + 1) % 5])
            if abs(d) > ORTHO_TOL:
                raise InvalidPentagram(
                    f"legs {k + 1} and {(k + 1) % 5 + 1} not orthogonal "
                    f"(dot = {d:.3e})"
                )
        for i in range(5):
            for j in range(i + 1, 5):
                if abs(legs[i].dot(legs[j])) > 1.0 - kernels.PARALLEL_TOL:
                    raise InvalidPentagram(f"legs {i + 1} and {j + 1} are parallel")

    def rotated(self, R: np.ndarray) -> "Pentagram":
        return Pentagram(tuple(l.rotated(R) for l in self.legs))

    def canonical(self) -> "Pentagram":
        """Hemisphere representative of each leg, for reproducible output."""
        return Pentagram(tuple(l.canonical() for l in self.legs))

    def equals(self, other: "Pentagram", tol: float = 1e-9,
               up_to_sign: bool = False) -> bool:
        return all(
            a.equals(b, tol=tol, up_to_sign=up_to_sign)
            for a, b in zip(self.legs, other.legs)
        )

    def to_json(self) -> dict:
        return {"legs": [l.to_json() for l in self.legs]}

    @classmethod
    def from_json(cls, obj: dict, normalize: bool = False) -> "Pentagram":
        legs = obj.get("legs") if isinstance(obj, dict) else None
        if not isinstance(legs, list) or len(legs) != 5:
            raise ValidationError("pentagram JSON needs a list of five legs")
        return cls(tuple(Direction.from_json(l, normalize=normalize) for l in legs))


@dataclass(frozen=True)
class ChainParams:
    """Chain coordinates: first leg plus three bend angles (radians)."""

    l1: Direction
    t1: float
    t2: float
    t3: float

    def to_json(self) -> dict:
        return {"l1": self.l1.to_json(), "t": [self.t1, self.t2, self.t3]}

    @classmethod
    def from_json(cls, obj: dict) -> "ChainParams":
        try:
            t = obj["t"]
            if len(t) != 3:
                raise ValidationError("chain JSON needs three bend angles")
            return cls(
                l1=Direction.from_json(obj["l1"]),
                t1=float(t[0]),
                t2=float(t[1]),
                t3=float(t[2]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError('chain JSON needs "l1" and "t": [t1, t2, t3]') from exc


def regular_pentagram(axis: Direction | None = None, chi: float = 0.0) -> Pentagram:
    """Regular pentagram around an axis (default z), rotated by azimuth chi.

    Legs sit at the common polar angle with cos^2(theta) = 1/sqrt(5) and at
    azimuths 4 pi k / 5 + chi in the completion frame of the axis; stepping
    the azimuth by 4 pi / 5 (star order) makes consecutive legs orthogonal.
    """
    if axis is None:
        axis = Direction(0.0, 0.0, 1.0)
    ct = 5.0 ** -0.25
    st = math.sqrt(1.0 - math.sqrt(0.2))
    m, n = orthonormal_frame(axis)
    legs = []
    for k in range(5):
        az = 4.0 * math.pi * k / 5.0 + chi
        v = ct * axis.vec + st * (math.cos(az) * m.vec + math.sin(az) * n.vec)
        legs.append(Direction.from_vec(v, normalize=True))
    return Pentagram(tuple(legs))


def from_chain(params: ChainParams) -> Pentagram:
    """Build the pentagram determined by chain coordinates.

    Raises DegenerateClosure when legs 4 and 1 are too close to parallel for
    the closing cross product (norm below the kernel closure tolerance), and
    InvalidPentagram when the closed chain has parallel legs.
    """
    l1 = params.l1
    legs = kernels.chain_legs(l1.x, l1.y, l1.z, params.t1, params.t2, params.t3)
    if legs is None:
        raise DegenerateClosure(
            "legs 4 and 1 are (anti)parallel; the chain does not close"
        )
    dirs = tuple(
        Direction(legs[3 * k], legs[3 * k + 1], legs[3 * k + 2], normalize=True)
        for k in range(5)
    )
    return Pentagram(dirs)


def kcbs_sum(p: Pentagram, psi: SpinState) -> float:
    """K = sum_k |<l_k, psi>|^2.  Below 2 is classically explainable."""
    return float(sum(abs(overlap(l, psi)) ** 2 for l in p.legs))


def kcbs_spin_form(p: Pentagram, psi: SpinState) -> float:
    """sum_k <S_k^2> = 5 - K; the noncontextual bound is >= 3."""
    return float(sum(1.0 - abs(overlap(l, psi)) ** 2 for l in p.legs))


def correlation_form(p: Pentagram, psi: SpinState) -> float:
    """sum_k <A_k A_{k+1}> for A = I - 2 P_l; the noncontextual bound is >= -3.

    Adjacent projectors are orthogonal, so each term is
    1 - 2 p_k - 2 p_{k+1} with p_k = |<l_k, psi>|^2.
    """
    probs = [abs(overlap(l, psi)) ** 2 for l in p.legs]
    return float(sum(1.0 - 2.0 * probs[k] - 2.0 * probs[(k + 1) % 5]
                     for k in range(5)))


def gram(p: Pentagram) -> np.ndarray:
    """5x5 Gram matrix of the legs."""
    basis = np.array([l.vec for l in p.legs])
    return basis @ basis.T


def frame_operator(p: Pentagram) -> np.ndarray:
    """3x3 real symmetric operator sum_k l_k l_k^T; its trace is 5."""
    basis = np.array([l.vec for l in p.legs])
    return basis.T @ basis


def gram_max(p: Pentagram) -> float:
    """Largest eigenvalue of the frame operator: the sharp bound max_psi K.

    The maximum is attained at the dominant (real) eigenvector; complex
    states cannot exceed it because K splits into the same quadratic form on
    the real and imaginary parts.
    """
    return float(np.linalg.eigvalsh(frame_operator(p))[-1])
