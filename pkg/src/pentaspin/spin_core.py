"""Spin-1 states, measurement directions, and polarization structure.

A spin-1 system is described here in its Cartesian representation: a state is
a complex unit 3-vector psi, and the spin component along a real unit
direction l acts as S_l psi = i (l x psi).  In this picture S_l^2 = I - l l^T,
so the probability that a squared spin measurement along l yields 0 is
|overlap(l, psi)|^2 with the bilinear overlap sum_j l_j psi_j (no complex
conjugation).  Orthogonal directions therefore correspond to compatible
S^2 measurements, which is what the pentagram construction exploits.

Every state factors as psi = phase * (m cos(phi) + i n sin(phi)) with m, n
real orthonormal and phi in [0, pi/4]; the canonical form extracted here
fixes that factorization deterministically.  The invariant |sum_j psi_j^2|
(the concurrence of the state under the symmetric two-qubit embedding)
measures how far the state is from the coherent, fully polarized case.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import InitVar, dataclass, field

import numpy as np

from . import kernels
from .errors import ValidationError

__all__ = [
    "NORM_TOL",
    "Direction",
    "SpinState",
    "CanonicalForm",
    "TwoQubitSymmetricState",
    "orthonormal_frame",
    "overlap",
    "spin_apply",
    "spin_expectation",
    "s_squared_expectation",
    "eigenbasis",
    "rotate",
    "to_canonical",
    "concurrence",
    "degree_of_polarization",
    "two_qubit",
    "wootters_concurrence",
]

# constructors reject norms farther than this from 1 (unless normalize=True);
# accepted vectors are rescaled so downstream code sees unit norm to 1e-12
NORM_TOL = 1e-9

_ROTATION_TOL = 1e-12

# sigma_y (x) sigma_y on the product basis (uu, ud, du, dd); the pure-state
# concurrence is |psi^T M psi| for this M
_SPIN_FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


def _check_norm(r: float, what: str, normalize: bool) -> float:
    if r == 0.0 or not math.isfinite(r):
        raise ValidationError(f"{what} must be a finite nonzero vector")
    if not normalize and abs(r - 1.0) > NORM_TOL:
        raise ValidationError(
            f"{what} norm deviates from 1 by {abs(r - 1.0):.3e}; "
            "pass normalize=True to rescale"
        )
    return r


@dataclass(frozen=True)
class Direction:
    """Real unit vector: a measurement direction on the sphere.

    Construction rejects vectors whose norm deviates from 1 by more than
    NORM_TOL unless normalize=True; either way the stored components are
    rescaled by the exact norm.  Directions l and -l label the same
    measurement, so equals() offers a sign-insensitive mode and canonical()
    picks the hemisphere representative (z > 0, ties broken by y then x)
    for reproducible output.
    """

    x: float
    y: float
    z: float
    normalize: InitVar[bool] = False

    def __post_init__(self, normalize: bool) -> None:
        x = float(self.x)
        y = float(self.y)
        z = float(self.z)
        r = _check_norm(math.sqrt(x * x + y * y + z * z), "direction", normalize)
        object.__setattr__(self, "x", x / r)
        object.__setattr__(self, "y", y / r)
        object.__setattr__(self, "z", z / r)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def dot(self, other: "Direction") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Direction") -> np.ndarray:
        """Cross product as a plain array (generally not unit length)."""
        return np.cross(self.vec, other.vec)

    def canonical(self) -> "Direction":
        s = 1.0
        if self.z != 0.0:
            s = math.copysign(1.0, self.z)
        elif self.y != 0.0:
            s = math.copysign(1.0, self.y)
        elif self.x != 0.0:
            s = math.copysign(1.0, self.x)
        return Direction(s * self.x, s * self.y, s * self.z)

    def equals(self, other: "Direction", tol: float = 1e-9,
               up_to_sign: bool = False) -> bool:
        d = max(abs(self.x - other.x), abs(self.y - other.y), abs(self.z - other.z))
        if d <= tol:
            return True
        if up_to_sign:
            d = max(abs(self.x + other.x), abs(self.y + other.y),
                    abs(self.z + other.z))
            return d <= tol
        return False

    def rotated(self, R: np.ndarray) -> "Direction":
        _check_rotation(R)
        v = np.asarray(R) @ self.vec
        return Direction(v[0], v[1], v[2], normalize=True)

    @classmethod
    def from_vec(cls, v, normalize: bool = False) -> "Direction":
        v = np.asarray(v, dtype=float).reshape(3)
        return cls(v[0], v[1], v[2], normalize=normalize)

    def to_json(self) -> list:
        return [self.x, self.y, self.z]

    @classmethod
    def from_json(cls, obj, normalize: bool = False) -> "Direction":
        if not isinstance(obj, (list, tuple)) or len(obj) != 3:
            raise ValidationError(f"direction JSON must be a [x, y, z] triple: {obj!r}")
        try:
            return cls(float(obj[0]), float(obj[1]), float(obj[2]),
                       normalize=normalize)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"direction JSON has non-numeric entries: {obj!r}") from exc


@dataclass(frozen=True)
class SpinState:
    """Complex unit 3-vector in the Cartesian spin-1 representation."""

    a1: complex
    a2: complex
    a3: complex
    normalize: InitVar[bool] = False

    def __post_init__(self, normalize: bool) -> None:
        a1 = complex(self.a1)
        a2 = complex(self.a2)
        a3 = complex(self.a3)
        r = _check_norm(
            math.sqrt(abs(a1) ** 2 + abs(a2) ** 2 + abs(a3) ** 2), "state", normalize
        )
        object.__setattr__(self, "a1", a1 / r)
        object.__setattr__(self, "a2", a2 / r)
        object.__setattr__(self, "a3", a3 / r)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))

    def equals(self, other: "SpinState", tol: float = 1e-9,
               up_to_phase: bool = False) -> bool:
        if up_to_phase:
            # physical equivalence: |<self|other>| = 1
            ip = abs(np.vdot(self.vec, other.vec))
            return ip >= 1.0 - tol
        return bool(np.max(np.abs(self.vec - other.vec)) <= tol)

    @classmethod
    def from_vec(cls, v, normalize: bool = False) -> "SpinState":
        v = np.asarray(v, dtype=complex).reshape(3)
        return cls(v[0], v[1], v[2], normalize=normalize)

    @classmethod
    def from_direction(cls, d: Direction) -> "SpinState":
        """Real state along d: the S_d = 0 eigenstate."""
        return cls(d.x, d.y, d.z)

    def to_json(self) -> dict:
        return {
            "re": [self.a1.real, self.a2.real, self.a3.real],
            "im": [self.a1.imag, self.a2.imag, self.a3.imag],
        }

    @classmethod
    def from_json(cls, obj: dict, normalize: bool = False) -> "SpinState":
        try:
            re = [float(v) for v in obj["re"]]
            im = [float(v) for v in obj["im"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"state JSON needs re, im arrays: {obj!r}") from exc
        if len(re) != 3 or len(im) != 3:
            raise ValidationError("state JSON arrays must have length 3")
        return cls(complex(re[0], im[0]), complex(re[1], im[1]),
                   complex(re[2], im[2]), normalize=normalize)


@dataclass(frozen=True)
class CanonicalForm:
    """Deterministic factorization psi = phase * (m cos(phi) + i n sin(phi)).

    phi lies in [0, pi/4], m and n are orthonormal real directions and phase
    is a unit complex number.  state() rebuilds the input state exactly (to
    float roundoff), so the form is lossless.
    """

    phi: float
    m: Direction
    n: Direction
    phase: complex

    def __post_init__(self) -> None:
        if not -1e-12 <= self.phi <= math.pi / 4 + 1e-12:
            raise ValidationError(f"phi {self.phi} outside [0, pi/4]")
        if abs(self.m.dot(self.n)) > 1e-10:
            raise ValidationError("canonical axes m, n must be orthogonal")
        if abs(abs(self.phase) - 1.0) > 1e-9:
            raise ValidationError("phase must be unimodular")

    def state(self) -> SpinState:
        v = self.phase * (math.cos(self.phi) * self.m.vec
                          + 1j * math.sin(self.phi) * self.n.vec)
        return SpinState.from_vec(v, normalize=True)

    def to_json(self) -> dict:
        return {
            "phi": self.phi,
            "m": self.m.to_json(),
            "n": self.n.to_json(),
            "phase": {"re": self.phase.real, "im": self.phase.imag},
        }


@dataclass(frozen=True)
class TwoQubitSymmetricState:
    """State in the triplet (symmetric) sector of two spin-1/2 particles.

    Amplitudes are on the total-spin basis along the z reference axis:
    c_plus on |uu>, c_zero on (|ud> + |du>)/sqrt(2), c_minus on |dd>.
    """

    c_plus: complex
    c_zero: complex
    c_minus: complex

    def __post_init__(self) -> None:
        r = math.sqrt(abs(self.c_plus) ** 2 + abs(self.c_zero) ** 2
                      + abs(self.c_minus) ** 2)
        if abs(r - 1.0) > NORM_TOL:
            raise ValidationError("two-qubit amplitudes must be normalized")

    def four_vector(self) -> np.ndarray:
        """Amplitudes on the product basis (uu, ud, du, dd)."""
        s = self.c_zero / math.sqrt(2.0)
        return np.array([self.c_plus, s, s, self.c_minus])


def _check_rotation(R: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValidationError("rotation must be a 3x3 matrix")
    if np.max(np.abs(R.T @ R - np.eye(3))) > _ROTATION_TOL:
        raise ValidationError("rotation matrix is not orthogonal")
    if abs(np.linalg.det(R) - 1.0) > _ROTATION_TOL:
        raise ValidationError("rotation matrix must have determinant +1")
    return R


def orthonormal_frame(l: Direction) -> tuple[Direction, Direction]:
    """Deterministic right-handed completion (m, n) with n = l x m.

    The rule (shared with the chain kernel) projects out the coordinate axis
    with the smallest absolute component of l, lowest index winning ties.
    """
    mx, my, mz, nx, ny, nz = kernels.completion(l.x, l.y, l.z)
    return Direction(mx, my, mz, normalize=True), Direction(nx, ny, nz, normalize=True)


def overlap(l: Direction, psi: SpinState) -> complex:
    """Bilinear overlap sum_j l_j psi_j; |overlap|^2 = P(S_l = 0)."""
    return l.x * psi.a1 + l.y * psi.a2 + l.z * psi.a3


def spin_apply(l: Direction, psi: SpinState) -> np.ndarray:
    """S_l psi = i (l x psi).  Returns a plain complex array (not unit)."""
    return 1j * np.cross(l.vec, psi.vec)


def spin_expectation(psi: SpinState) -> np.ndarray:
    """Vector of <S_x>, <S_y>, <S_z>; real up to roundoff."""
    v = psi.vec
    axes = np.eye(3)
    return np.array([np.vdot(v, 1j * np.cross(axes[k], v)).real for k in range(3)])


def s_squared_expectation(l: Direction, psi: SpinState) -> float:
    """<psi| S_l^2 |psi> = 1 - |overlap(l, psi)|^2."""
    return 1.0 - abs(overlap(l, psi)) ** 2


def eigenbasis(l: Direction) -> tuple[SpinState, SpinState, SpinState]:
    """Eigenstates (zero, plus, minus) of S_l for eigenvalues (0, +1, -1).

    zero is the real state along l; plus/minus are (m +- i n)/sqrt(2) in the
    deterministic completion frame of l.
    """
    m, n = orthonormal_frame(l)
    plus = SpinState.from_vec((m.vec + 1j * n.vec) / math.sqrt(2.0), normalize=True)
    minus = SpinState.from_vec((m.vec - 1j * n.vec) / math.sqrt(2.0), normalize=True)
    return SpinState.from_direction(l), plus, minus


def rotate(psi: SpinState, R: np.ndarray) -> SpinState:
    """Rotate a state by a proper rotation matrix (det +1, orthogonal)."""
    R = _check_rotation(R)
    return SpinState.from_vec(R @ psi.vec, normalize=True)


def concurrence(psi: SpinState) -> float:
    """|sum_j psi_j^2|: 0 for coherent states, 1 for real (unpolarized) ones."""
    return abs(psi.a1 ** 2 + psi.a2 ** 2 + psi.a3 ** 2)


def degree_of_polarization(psi: SpinState) -> float:
    """|<S>| = sqrt(1 - concurrence^2)."""
    c = concurrence(psi)
    return math.sqrt(max(0.0, 1.0 - c * c))


def to_canonical(psi: SpinState, tol: float = 1e-12) -> CanonicalForm:
    """Extract the canonical factorization of a state.

    Writes e^{i alpha} psi = u + i v with sum_j (e^{i alpha} psi_j)^2 real
    and nonnegative, which forces u . v = 0 and |u| >= |v|; then
    phi = atan2(|v|, |u|), m = u/|u|, n = v/|v| and phase = e^{-i alpha}.
    When the quadratic invariant vanishes (coherent state) alpha is fixed
    to 0, and when v vanishes (real state) n falls back to the
    deterministic completion of m.  Both branches keep reconstruction
    error at the tol scale.
    """
    v = psi.vec
    s = complex(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
    if abs(s) < tol:
        alpha = 0.0
    else:
        alpha = -cmath.phase(s) / 2.0
    w = cmath.exp(1j * alpha) * v
    u = w.real
    q = w.imag
    nu = float(np.linalg.norm(u))
    nq = float(np.linalg.norm(q))
    # |u| >= |v| >= 0 and |u|^2 + |v|^2 = 1, so |u| >= 1/sqrt(2) always
    m = Direction.from_vec(u / nu)
    if nq < tol:
        n, _ = orthonormal_frame(m)
        nq = 0.0
    else:
        n = Direction.from_vec(q / nq, normalize=True)
    phi = math.atan2(nq, nu)
    phase = cmath.exp(-1j * alpha)
    return CanonicalForm(phi=min(phi, math.pi / 4), m=m, n=n, phase=phase)


def two_qubit(psi: SpinState) -> TwoQubitSymmetricState:
    """Embed the spin-1 state into the symmetric sector of two qubits.

    Uses the spherical components relative to the z axis,
    e_+ = (e_x + i e_y)/sqrt(2), e_0 = e_z, e_- = -(e_x - i e_y)/sqrt(2),
    with the sign convention placed so the Wootters concurrence of the
    image equals |sum_j psi_j^2| exactly.
    """
    c_plus = (psi.a1 - 1j * psi.a2) / math.sqrt(2.0)
    c_minus = -(psi.a1 + 1j * psi.a2) / math.sqrt(2.0)
    return TwoQubitSymmetricState(c_plus=c_plus, c_zero=psi.a3, c_minus=c_minus)


def wootters_concurrence(state: TwoQubitSymmetricState) -> float:
    """Pure-state concurrence |psi^T (sigma_y (x) sigma_y) psi|."""
    v = state.four_vector()
    return abs(v @ _SPIN_FLIP @ v)
