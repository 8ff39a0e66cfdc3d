"""Exact two-qubit reference model.

Pauli observables, the ``rho(q)`` family of Bell-diagonal mixtures, CHSH
combinations and the closed-form predictions that the optical backends are
checked against.  Everything here is plain linear algebra on 2x2 and 4x4
matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10

TWO_PI = 2.0 * math.pi

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)

# Observables the grating processor can realize: sigma_x (Hadamard),
# sin(t) sigma_x + cos(t) sigma_z (rotation) and sigma_z (no optics at all).
FAMILY_X = "x"
FAMILY_Z = "z"
FAMILY_ROTATION = "rotation"


def canonical_angle(theta: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    t = math.fmod(float(theta), TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


@dataclass(frozen=True)
class Observable:
    """Spin observable ``n . sigma`` along a unit axis.

    ``family`` tags observables the optical path knows how to diagonalize;
    general axes leave it ``None`` and are only usable by the exact oracle.
    """

    axis: tuple[float, float, float]
    family: Optional[str] = None
    theta: Optional[float] = None
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = np.asarray(self.axis, dtype=float)
        if n.shape != (3,) or not np.all(np.isfinite(n)):
            raise ValueError(f"axis must be a finite 3-vector, got {self.axis!r}")
        if abs(np.linalg.norm(n) - 1.0) > HERMITIAN_TOL:
            raise ValueError(f"axis must have unit length, |n| = {np.linalg.norm(n)!r}")
        m = n[0] * SX + n[1] * SY + n[2] * SZ
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def observable(axis: Sequence[float]) -> Observable:
    """Observable along an arbitrary unit axis (normalized on the way in)."""
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ValueError("zero axis")
    n = n / norm
    return Observable(axis=(float(n[0]), float(n[1]), float(n[2])))


def observable_from_angle(theta: float) -> Observable:
    """``sin(theta) sigma_x + cos(theta) sigma_z``, Bob's swept observable."""
    t = canonical_angle(theta)
    return Observable(axis=(math.sin(t), 0.0, math.cos(t)), family=FAMILY_ROTATION, theta=t)


SIGMA_X = Observable(axis=(1.0, 0.0, 0.0), family=FAMILY_X, theta=math.pi / 2)
SIGMA_Z = Observable(axis=(0.0, 0.0, 1.0), family=FAMILY_Z, theta=0.0)


# --- states ---------------------------------------------------------------

def as_pure_state(amplitudes: Sequence[complex]) -> np.ndarray:
    """Validate four amplitudes ordered |00>, |01>, |10>, |11> (A major)."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got shape {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise ValueError("amplitudes must be finite")
    if not np.any(psi != 0):
        raise ValueError("all amplitudes are zero")
    return psi


def basis_state(label: str) -> np.ndarray:
    """Computational basis state from a two-character label such as ``'01'``."""
    if len(label) != 2 or any(c not in "01" for c in label):
        raise ValueError(f"basis label must be two bits, got {label!r}")
    psi = np.zeros(4, dtype=complex)
    psi[int(label, 2)] = 1.0
    return psi


BELL_STATE = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2.0)


def pure_density(psi: Sequence[complex]) -> np.ndarray:
    """Normalized projector onto ``psi``."""
    v = as_pure_state(psi)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def check_density(rho: np.ndarray) -> np.ndarray:
    """Return ``rho`` as a complex 4x4 array after checking it is a state.

    Raises ``ValueError`` for non-Hermitian, non-unit-trace or non-positive input.
    """
    r = np.asarray(rho, dtype=complex)
    if r.shape != (4, 4):
        raise ValueError(f"density matrix must be 4x4, got {r.shape}")
    if np.max(np.abs(r - r.conj().T)) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(r) - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {np.trace(r).real!r}, not 1")
    if np.min(np.linalg.eigvalsh(r)) < -POSITIVITY_TOL:
        raise ValueError("density matrix has a negative eigenvalue")
    return r


def rho_of_q(q: float) -> np.ndarray:
    """Mixture ``q |Bell><Bell| + (1-q) (|00><00| + |11><11|)/2``."""
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q!r}")
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = 0.5
    rho[0, 3] = rho[3, 0] = q / 2.0
    return rho


# --- expectations ---------------------------------------------------------

def expectation_pair(x: Observable, y: Observable, rho: np.ndarray) -> float:
    """``tr[(X (x) Y) rho]``."""
    r = check_density(rho)
    value = np.trace(np.kron(x.matrix, y.matrix) @ r)
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary part {value.imag!r}")
    return float(value.real)


def bell_O_reduced(theta: float, q: float) -> float:
    """``<A(x)B> + <A(x)C> - <C(x)B>`` with A = sigma_x, B = B(theta), C = sigma_z."""
    rho = rho_of_q(q)
    b = observable_from_angle(theta)
    return (
        expectation_pair(SIGMA_X, b, rho)
        + expectation_pair(SIGMA_X, SIGMA_Z, rho)
        - expectation_pair(SIGMA_Z, b, rho)
    )


def bell_O_closed_form(theta: float, q: float) -> float:
    return q * math.sin(theta) - math.cos(theta)


@dataclass(frozen=True)
class BellSettings:
    """Alice's pair (A, A') and Bob's pair (B, B') for a CHSH run."""

    a: Observable
    a_prime: Observable
    b: Observable
    b_prime: Observable
    reduced: bool = False

    def __post_init__(self) -> None:
        if self.reduced and not (
            self.a_prime.axis == SIGMA_Z.axis and self.b_prime.axis == SIGMA_Z.axis
        ):
            raise ValueError("reduced settings need A' = B' = sigma_z")

    @classmethod
    def reduced_for(cls, theta: float) -> "BellSettings":
        return cls(SIGMA_X, SIGMA_Z, observable_from_angle(theta), SIGMA_Z, reduced=True)


def chsh_full(settings: BellSettings, rho: np.ndarray) -> float:
    """``<AB> + <AB'> + <A'B'> - <A'B>``."""
    s = settings
    return (
        expectation_pair(s.a, s.b, rho)
        + expectation_pair(s.a, s.b_prime, rho)
        + expectation_pair(s.a_prime, s.b_prime, rho)
        - expectation_pair(s.a_prime, s.b, rho)
    )


def theta_critical(q: float) -> float:
    """Onset angle of the reduced-inequality violation, root of q = cot(theta/2)."""
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"theta_critical needs q in (0, 1], got {q!r}")
    return 2.0 * math.atan(1.0 / q)


def theta_of_max(q: float) -> float:
    """Angle maximizing q sin(theta) - cos(theta)."""
    return math.pi - math.atan(q)


def max_O(q: float) -> float:
    return math.hypot(1.0, q)


# --- change of basis ------------------------------------------------------

def rotation_y(theta: float) -> np.ndarray:
    """``exp(-i theta sigma_y / 2)``."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def unitary_for_observable(obs: Observable) -> tuple[np.ndarray, bool]:
    """Change-of-basis unitary mapping ``obs`` onto sigma_z, plus plate flag.

    The flag says whether the optical realization needs a sigma_z phase
    plate in front of the processor; the unitary returned already includes it.
    """
    if obs.family == FAMILY_X:
        return HADAMARD.copy(), True
    if obs.family == FAMILY_ROTATION:
        return rotation_y(obs.theta) @ SZ, True
    if obs.family == FAMILY_Z:
        return I2.copy(), False
    raise ValueError(
        f"observable with axis {obs.axis} is outside the optically realizable family"
    )
