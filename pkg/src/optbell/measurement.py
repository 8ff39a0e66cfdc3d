"""Reading joint statistics off output intensity distributions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .encoding import Scene

PROB_TOL = 1e-12
OUTCOMES = (+1, -1)


class DegenerateIntensityError(ValueError):
    """No light reached the registered windows."""


def region_intensities(scene: Scene) -> np.ndarray:
    """Registered power in the four computational windows, ordered 00, 01, 10, 11.

    Light outside the windows is discarded.
    """
    i = scene.intensity
    out = np.array([i[m].sum() for m in scene.geometry.quadrant_windows()])
    if not out.sum() > 0:
        raise DegenerateIntensityError("no intensity in any computational window")
    return out


def slice_intensities(scene: Scene) -> np.ndarray:
    """Registered power in the |0> and |1> slices of a one-qubit scene."""
    i = scene.intensity
    return np.array([i[m].sum() for m in scene.geometry.single_windows()])


def _index(outcome: int) -> int:
    if outcome == +1:
        return 0
    if outcome == -1:
        return 1
    raise KeyError(f"outcome must be +1 or -1, got {outcome!r}")


@dataclass(frozen=True)
class JointProbabilities:
    """P(A_i, B_j) with outcome +1 for |0> and -1 for |1>.

    ``p`` is the 2x2 table ``[[P(++), P(+-)], [P(-+), P(--)]]``.
    """

    p: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        p = np.array(self.p, dtype=float).reshape(2, 2)
        if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"not a probability table: {p.tolist()}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __getitem__(self, outcomes: tuple[int, int]) -> float:
        i, j = outcomes
        return float(self.p[_index(i), _index(j)])

    def flat(self) -> np.ndarray:
        """P(++), P(+-), P(-+), P(--)."""
        return self.p.reshape(-1).copy()

    def __repr__(self) -> str:
        return "JointProbabilities(" + ", ".join(f"{x:.6g}" for x in self.flat()) + ")"


def joint_probabilities(intensities: Sequence[float]) -> JointProbabilities:
    """Normalize the four window intensities into a joint distribution."""
    i = np.asarray(intensities, dtype=float).reshape(-1)
    if i.shape != (4,) or np.any(i < 0):
        raise ValueError("expected four non-negative intensities")
    total = i.sum()
    if not total > 0:
        raise DegenerateIntensityError("total registered intensity is zero")
    return JointProbabilities(i / total)


@dataclass(frozen=True)
class Marginals:
    """Marginals of both parties and Bob's outcome conditioned on Alice's.

    ``conditional[(j, i)]`` is P(B_j | A_i), or ``None`` when P(A_i) = 0.
    """

    p_a: dict[int, float]
    p_b: dict[int, float]
    conditional: dict[tuple[int, int], Optional[float]]

    def b_given_a(self, j: int, i: int) -> Optional[float]:
        return self.conditional[(j, i)]


def marginals_and_conditionals(jp: JointProbabilities) -> Marginals:
    p_a = {i: jp[i, +1] + jp[i, -1] for i in OUTCOMES}
    p_b = {j: jp[+1, j] + jp[-1, j] for j in OUTCOMES}
    cond: dict[tuple[int, int], Optional[float]] = {}
    for i in OUTCOMES:
        for j in OUTCOMES:
            cond[(j, i)] = jp[i, j] / p_a[i] if p_a[i] > 0 else None
    return Marginals(p_a=p_a, p_b=p_b, conditional=cond)


def expectation_zz(jp: JointProbabilities) -> float:
    """<sigma_z (x) sigma_z> = P(++) + P(--) - P(+-) - P(-+)."""
    return jp[+1, +1] + jp[-1, -1] - jp[+1, -1] - jp[-1, +1]


def measure_zz(scene: Scene) -> float:
    return expectation_zz(joint_probabilities(region_intensities(scene)))
