"""Unary encoding of one and two qubits as sampled optical scenes.

Qubit B lives on the horizontal axis (left slice = |0>, right slice = |1>)
and qubit A on the vertical axis (upper slice = |0>, lower slice = |1>).
Arrays are indexed ``[row, col]`` with row 0 at the top of the plane, so the
vertical coordinate grows downward and "up" is the negative half.

Lengths are in units where lambda*f = 1, so Fourier-plane positions and
spatial frequencies coincide numerically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .quantum import BELL_STATE, as_pure_state, basis_state

DEFAULT_PITCH = 0.5
_GRID_TOL = 1e-9


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _near_integer(x: float) -> bool:
    return abs(x - round(x)) <= _GRID_TOL * max(1.0, abs(x))


@dataclass(frozen=True)
class SceneGeometry:
    """Square sampling grid plus the slice layout.

    n: samples per axis; width: plane width L; a: slice-center offset;
    b: slice width.  The defaults put 128 frequency samples in each grating
    period (``L / 2a``), which is what keeps the sampled grating's
    diffraction orders within 1e-3 of their continuum values.
    """

    n: int = 1024
    width: float = 512.0
    a: float = 2.0
    b: float = 0.5

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or not _is_power_of_two(int(self.n)):
            raise ValueError(f"N must be a power of two, got {self.n!r}")
        if self.n < 256:
            raise ValueError(f"N must be at least 256, got {self.n}")
        if not (self.width > 0 and self.a > 0 and self.b > 0):
            raise ValueError("L, a and b must be positive")
        if self.b > self.a / 4.0 * (1 + _GRID_TOL):
            raise ValueError(f"slice width b={self.b} exceeds a/4={self.a / 4}")
        if not 2 * self.a + self.b < self.width / 2:
            raise ValueError(
                f"slices leak past the half-plane: 2a+b={2 * self.a + self.b} >= L/2={self.width / 2}"
            )
        if not _near_integer(self.a / self.pitch):
            raise ValueError(f"a={self.a} is not a whole number of samples (pitch {self.pitch})")
        if not _near_integer(self.samples_per_period):
            raise ValueError(
                f"L/(2a)={self.samples_per_period} must be an integer so the grating "
                "is periodic on the frequency grid"
            )

    @classmethod
    def with_resolution(cls, n: int, pitch: float = DEFAULT_PITCH, a: float = 2.0,
                        b: float = 0.5) -> "SceneGeometry":
        """Geometry at ``n`` samples keeping the sample pitch fixed."""
        return cls(n=n, width=n * pitch, a=a, b=b)

    @property
    def pitch(self) -> float:
        return self.width / self.n

    @property
    def df(self) -> float:
        """Frequency-grid spacing."""
        return 1.0 / self.width

    @property
    def grating_half_period(self) -> float:
        """Pulse width p matched to the slices, 2p = 1/(2a)."""
        return 1.0 / (4.0 * self.a)

    @property
    def samples_per_period(self) -> float:
        return self.width / (2.0 * self.a)

    def coordinates(self) -> np.ndarray:
        """Sample positions along either axis, ``[-L/2, L/2)``."""
        return (np.arange(self.n) - self.n // 2) * self.pitch

    def window(self, center: float) -> np.ndarray:
        """1D boolean mask of the width-b slice centered at ``center``."""
        x = self.coordinates()
        return np.abs(x - center) <= self.b / 2.0 + _GRID_TOL * self.pitch

    def quadrant_windows(self) -> list[np.ndarray]:
        """Masks for |00>, |01>, |10>, |11> (up-left, up-right, down-left, down-right)."""
        rows = (self.window(-self.a), self.window(self.a))
        cols = (self.window(-self.a), self.window(self.a))
        return [np.outer(rows[m], cols[k]) for m in (0, 1) for k in (0, 1)]

    def single_windows(self) -> list[np.ndarray]:
        """Masks of the |0> and |1> slices of a one-qubit scene (centered row band)."""
        band = self.window(0.0)
        return [np.outer(band, self.window(-self.a)), np.outer(band, self.window(self.a))]

    def to_dict(self) -> dict[str, Any]:
        return {"N": int(self.n), "L": float(self.width), "a": float(self.a), "b": float(self.b)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SceneGeometry":
        unknown = set(data) - {"N", "L", "a", "b"}
        if unknown:
            raise ValueError(f"unknown geometry keys: {sorted(unknown)}")
        n = int(data.get("N", 1024))
        width = float(data["L"]) if "L" in data else n * DEFAULT_PITCH
        return cls(n=n, width=width, a=float(data.get("a", 2.0)), b=float(data.get("b", 0.5)))


DEFAULT_GEOMETRY = SceneGeometry()


@dataclass(frozen=True)
class Scene:
    """Complex field sampled on ``geometry``; the array is read-only."""

    field: np.ndarray = field(repr=False)
    geometry: SceneGeometry

    def __post_init__(self) -> None:
        f = np.asarray(self.field, dtype=complex)
        n = self.geometry.n
        if f.shape != (n, n):
            raise ValueError(f"field shape {f.shape} does not match geometry N={n}")
        if f is self.field:
            f = f.copy()
        f.setflags(write=False)
        object.__setattr__(self, "field", f)

    @classmethod
    def _adopt(cls, field: np.ndarray, geometry: SceneGeometry) -> "Scene":
        """Wrap a freshly computed complex array without copying it."""
        obj = cls.__new__(cls)
        field.setflags(write=False)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "geometry", geometry)
        return obj

    @property
    def intensity(self) -> np.ndarray:
        f = self.field
        return f.real ** 2 + f.imag ** 2


def encode_single(alpha: complex, beta: complex, geometry: SceneGeometry = DEFAULT_GEOMETRY) -> Scene:
    """One qubit: alpha on the left slice, beta on the right, in a central row band."""
    if alpha == 0 and beta == 0:
        raise ValueError("single-qubit amplitudes are both zero")
    w0, w1 = geometry.single_windows()
    f = np.zeros((geometry.n, geometry.n), dtype=complex)
    f[w0] = alpha
    f[w1] = beta
    return Scene(f, geometry)


def encode_two_qubit(psi, geometry: SceneGeometry = DEFAULT_GEOMETRY) -> Scene:
    """Write each amplitude alpha_mn into its b x b quadrant rectangle."""
    amps = as_pure_state(psi)
    f = np.zeros((geometry.n, geometry.n), dtype=complex)
    for amp, mask in zip(amps, geometry.quadrant_windows()):
        f[mask] = amp
    return Scene(f, geometry)


def decode_regions(scene: Scene) -> np.ndarray:
    """Coherent mean of the field over each quadrant window, ordered 00, 01, 10, 11."""
    return np.array([scene.field[m].mean() for m in scene.geometry.quadrant_windows()])


def decode_single(scene: Scene) -> np.ndarray:
    return np.array([scene.field[m].mean() for m in scene.geometry.single_windows()])


def mixture_members(q: float) -> list[tuple[np.ndarray, float]]:
    """Pure-state ensemble reproducing ``rho_of_q(q)``; zero-weight members are dropped."""
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q!r}")
    members = [(BELL_STATE.copy(), q),
               (basis_state("00"), (1.0 - q) / 2.0),
               (basis_state("11"), (1.0 - q) / 2.0)]
    return [(psi, w) for psi, w in members if w > 0.0]


def named_state(name: str) -> np.ndarray:
    """States addressable from the command line."""
    key = name.lower()
    if key == "bell":
        return BELL_STATE.copy()
    if key in ("mixed00", "mixed11"):
        return basis_state(key[-2:])
    if key.startswith("basis"):
        key = key[len("basis"):].lstrip("_- ")
    try:
        return basis_state(key)
    except ValueError:
        raise ValueError(
            f"unknown state {name!r}; expected bell, mixed00, mixed11 or a basis label like 01"
        ) from None


def intensity_image(scene: Scene) -> np.ndarray:
    """8-bit intensity normalized to the scene's peak; top row is "up"."""
    i = scene.intensity
    peak = i.max()
    if peak <= 0:
        return np.zeros(i.shape, dtype=np.uint8)
    return np.rint(255.0 * i / peak).astype(np.uint8)

