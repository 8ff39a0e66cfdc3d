"""Binary phase gratings and the 4f coherent processor.

A binary square-wave phase grating of depth ``phi``, half-period ``p``
and pulse center ``f_c`` sits in the Fourier plane.  Its three central
orders couple the two slices of a qubit, which is captured by
:func:`transfer_matrix`; :func:`propagate_4f` does the same job by brute
force with FFTs and keeps every order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.fft as sfft

from .encoding import Scene, SceneGeometry
from .quantum import SZ, TWO_PI, canonical_angle

_FREQ_TOL = 1e-12


class Orientation(str, enum.Enum):
    """Grating line direction.

    Horizontal lines modulate the vertical frequency axis and diffract
    up/down (qubit A); vertical lines modulate the horizontal axis (qubit B).
    """

    HORIZONTAL_LINES = "horizontal"
    VERTICAL_LINES = "vertical"

    @property
    def axis(self) -> int:
        return 0 if self is Orientation.HORIZONTAL_LINES else 1


QUBIT_A = Orientation.HORIZONTAL_LINES
QUBIT_B = Orientation.VERTICAL_LINES


@dataclass(frozen=True)
class GratingSpec:
    phi: float
    p: float
    f_c: float = 0.0
    orientation: Orientation = QUBIT_B

    def __post_init__(self) -> None:
        if not self.p > 0:
            raise ValueError(f"pulse width p must be positive, got {self.p!r}")
        object.__setattr__(self, "phi", canonical_angle(self.phi))
        object.__setattr__(self, "orientation", Orientation(self.orientation))

    @property
    def period(self) -> float:
        return 2.0 * self.p


def grating_for(phi: float, geometry: SceneGeometry, orientation: Orientation,
                f_c: Optional[float] = None) -> GratingSpec:
    """Grating whose period matches the slice separation (2p = 1/2a).

    ``f_c`` defaults to ``-p/2``, the offset used for every observable in the
    protocol.
    """
    p = geometry.grating_half_period
    return GratingSpec(phi=phi, p=p, f_c=-p / 2.0 if f_c is None else f_c,
                       orientation=orientation)


def _offset_in_period(g: GratingSpec, f):
    """Distance of ``f`` from the nearest pulse center, in [0, p]."""
    d = np.mod(np.asarray(f, dtype=float) - g.f_c, g.period)
    return np.minimum(d, g.period - d)


def transmittance(g: GratingSpec, f):
    """Complex transmittance at frequency ``f``: e^{i phi} inside a pulse, 1 outside.

    A point exactly on a pulse edge counts as inside.
    """
    inside = _offset_in_period(g, f) <= g.p / 2.0
    out = np.where(inside, np.exp(1j * g.phi), 1.0 + 0j)
    return out[()] if out.ndim == 0 else out


def _pulse_measure(g: GratingSpec, f):
    """Length of pulse support in (-inf, f], up to a constant."""
    t = np.asarray(f, dtype=float) - (g.f_c - g.p / 2.0)
    k = np.floor(t / g.period)
    return g.p * k + np.minimum(t - k * g.period, g.p)


def sampled_transmittance(g: GratingSpec, freqs, df: float) -> np.ndarray:
    """Transmittance averaged over each frequency cell ``[f - df/2, f + df/2]``.

    Cells straddling a pulse edge take the area-weighted mix of e^{i phi}
    and 1; an edge exactly on a sample therefore gives the midpoint value.
    """
    f = np.asarray(freqs, dtype=float)
    frac = (_pulse_measure(g, f + df / 2.0) - _pulse_measure(g, f - df / 2.0)) / df
    return 1.0 + (np.exp(1j * g.phi) - 1.0) * frac


def order_amplitudes(g: GratingSpec, n_max: int) -> dict[int, complex]:
    """Exact Fourier-series coefficients C_n, |n| <= n_max.

    Convention: ``H(f) = sum_n C_n exp(i pi n f / p)``; order n shifts the
    image by ``-n / (2p)``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    du = np.exp(1j * g.phi) - 1.0
    coeffs = {0: complex(1.0 + du / 2.0)}
    for n in range(1, n_max + 1):
        for m in (n, -n):
            c = du * math.sin(math.pi * m / 2.0) / (math.pi * m)
            coeffs[m] = complex(c * np.exp(-1j * math.pi * m * g.f_c / g.p))
    return dict(sorted(coeffs.items()))


@dataclass(frozen=True)
class ImpulseResponse3:
    """Zero and first orders of the grating's impulse response.

    ``c1_minus`` weights the copy shifted to ``x + shift`` (delta at
    ``x = -shift``), ``c1_plus`` the copy at ``x - shift``.  A common factor
    e^{i phi/2} is dropped.
    """

    c0: float
    c1_plus: complex
    c1_minus: complex
    shift: float
    gamma_plus: float
    gamma_minus: float


def impulse_response(g: GratingSpec) -> ImpulseResponse3:
    gp, gm = _gammas(g.f_c, g.p)
    s = 2.0 / math.pi * math.sin(g.phi / 2.0)
    return ImpulseResponse3(
        c0=math.cos(g.phi / 2.0),
        c1_plus=s * complex(np.exp(1j * gp)),
        c1_minus=s * complex(np.exp(1j * gm)),
        shift=1.0 / (2.0 * g.p),
        gamma_plus=gp,
        gamma_minus=gm,
    )


def _gammas(f_c: float, p: float) -> tuple[float, float]:
    return math.pi / 2.0 + math.pi * f_c / p, math.pi / 2.0 - math.pi * f_c / p


def transfer_matrix(phi: float, f_c: float, p: float) -> np.ndarray:
    """2x2 map on slice amplitudes (alpha, beta) from the three central orders."""
    if not p > 0:
        raise ValueError("p must be positive")
    gp, gm = _gammas(f_c, p)
    c = math.cos(phi / 2.0)
    s = 2.0 / math.pi * math.sin(phi / 2.0)
    return np.array([[c, s * np.exp(1j * gm)],
                     [s * np.exp(1j * gp), c]], dtype=complex)


def two_qubit_transfer(m_a: Optional[np.ndarray] = None, m_b: Optional[np.ndarray] = None) -> np.ndarray:
    """``m_a (x) m_b`` in the |00>, |01>, |10>, |11> ordering; ``None`` is identity."""
    eye = np.eye(2, dtype=complex)
    return np.kron(eye if m_a is None else m_a, eye if m_b is None else m_b)


def phi_for_theta(theta: float, table1_literal: bool = False) -> float:
    """Grating depth realizing ``exp(-i theta sigma_y / 2) sigma_z``.

    The first-to-zero order amplitude ratio is (2/pi) tan(phi/2); it must equal
    tan(theta/2), so tan(phi/2) = (pi/2) tan(theta/2).  ``table1_literal``
    swaps in the reciprocal factor 2/pi, which does not balance the orders
    and is kept only as a negative control for ``validate``.
    """
    t = canonical_angle(theta)
    k = 2.0 / math.pi if table1_literal else math.pi / 2.0
    # atan2 keeps phi/2 in the same quadrant as theta/2, so theta = pi maps to pi
    half = math.atan2(k * math.sin(t / 2.0), math.cos(t / 2.0))
    return canonical_angle(2.0 * half)


def theta_for_phi(phi: float, table1_literal: bool = False) -> float:
    """Inverse of :func:`phi_for_theta`."""
    f = canonical_angle(phi)
    k = 2.0 / math.pi if table1_literal else math.pi / 2.0
    return canonical_angle(2.0 * math.atan2(math.sin(f / 2.0) / k, math.cos(f / 2.0)))


def realized_unitary(theta: float, table1_literal: bool = False) -> np.ndarray:
    """Three-order transfer matrix for ``phi_for_theta(theta)`` at f_c = -p/2, after the plate.

    The half-period cancels out of the phases, so any p gives the same matrix.
    """
    p = 1.0
    return transfer_matrix(phi_for_theta(theta, table1_literal), -p / 2.0, p) @ SZ


@dataclass(frozen=True)
class PhasePlate:
    """sigma_z plate: pi phase on the |1> half of each flagged qubit."""

    qubit_a: bool = False
    qubit_b: bool = False

    def __bool__(self) -> bool:
        return self.qubit_a or self.qubit_b

    def mask(self, geometry: SceneGeometry) -> np.ndarray:
        x = geometry.coordinates()
        row = np.where(x > 0, -1.0, 1.0) if self.qubit_a else np.ones(geometry.n)
        col = np.where(x > 0, -1.0, 1.0) if self.qubit_b else np.ones(geometry.n)
        return np.outer(row, col)


def frequencies(geometry: SceneGeometry) -> np.ndarray:
    """Frequency grid in FFT order."""
    return sfft.fftfreq(geometry.n, d=geometry.pitch)


def _check_gratings(gratings: Sequence[GratingSpec], geometry: SceneGeometry) -> None:
    seen = set()
    for g in gratings:
        if g.orientation in seen:
            raise ValueError(f"two gratings with {g.orientation.value} lines")
        seen.add(g.orientation)
        p0 = geometry.grating_half_period
        if abs(g.p - p0) > _FREQ_TOL * p0:
            raise ValueError(
                f"grating half-period p={g.p} does not satisfy 2p = 1/(2a) (expected {p0})"
            )


def filter_profile(gratings: Sequence[GratingSpec], geometry: SceneGeometry) -> np.ndarray:
    """Separable Fourier-plane filter, FFT ordering."""
    gratings = list(gratings)
    _check_gratings(gratings, geometry)
    f = frequencies(geometry)
    ones = np.ones(geometry.n, dtype=complex)
    profiles = {QUBIT_A: ones, QUBIT_B: ones}
    for g in gratings:
        profiles[g.orientation] = sampled_transmittance(g, f, geometry.df)
    return np.outer(profiles[QUBIT_A], profiles[QUBIT_B])


def fourier_plane(scene: Scene, plate: Optional[PhasePlate] = None) -> np.ndarray:
    """Field behind the first lens (FFT order); the plate sits in front of it."""
    field = scene.field
    if plate:
        field = field * plate.mask(scene.geometry)
    return sfft.fft2(sfft.ifftshift(field), workers=-1)


def image_plane(spectrum: np.ndarray, geometry: SceneGeometry,
                gratings: Iterable[GratingSpec] = ()) -> Scene:
    """Second lens: filter, transform again, undo the 4f image inversion."""
    filt = filter_profile(tuple(gratings), geometry)
    raw = sfft.fft2(spectrum * filt, workers=-1, overwrite_x=True)
    # A second forward transform images x onto -x.  Index (N/2 - j) mod N both
    # flips about the origin and moves back to the centered layout.
    n = geometry.n
    idx = (n // 2 - np.arange(n)) % n
    out = raw[np.ix_(idx, idx)]
    out /= n * n
    return Scene._adopt(out, geometry)


def propagate_4f(scene: Scene, gratings: Iterable[GratingSpec] = (),
                 plate: Optional[PhasePlate] = None) -> Scene:
    """Run ``scene`` through the processor with the given Fourier-plane gratings."""
    if scene is None or scene.geometry is None:
        raise ValueError("scene with geometry required")
    return image_plane(fourier_plane(scene, plate), scene.geometry, gratings)


def grating_phase_profile(gratings: Sequence[GratingSpec], geometry: SceneGeometry) -> np.ndarray:
    """Pointwise 2D phase of the combined grating, centered frequency layout, in [0, 2pi)."""
    _check_gratings(gratings, geometry)
    f = (np.arange(geometry.n) - geometry.n // 2) * geometry.df
    phase = np.zeros((geometry.n, geometry.n))
    for g in gratings:
        inside = _offset_in_period(g, f) <= g.p / 2.0
        line = np.where(inside, g.phi, 0.0)
        phase += line[:, None] if g.orientation is QUBIT_A else line[None, :]
    return np.mod(phase, TWO_PI)


def phase_image(phase: np.ndarray) -> np.ndarray:
    """Map phase 0..2pi onto gray levels 0..255."""
    return np.clip(np.rint(np.mod(phase, TWO_PI) / TWO_PI * 255.0), 0, 255).astype(np.uint8)
