"""Classical-optics CHSH simulator.

Two-qubit states are encoded as four quadrants of an optical field; binary
phase gratings in a 4f processor implement local measurements and Bell
correlations are read off output intensities.
"""

from .encoding import DEFAULT_GEOMETRY, Scene, SceneGeometry, encode_single, encode_two_qubit
from .experiment import (
    Backend,
    BellCurve,
    BellRow,
    ViolationReport,
    bell_point,
    bell_sweep,
    measure_setting,
    theta_grid,
    violation_report,
)
from .measurement import JointProbabilities, joint_probabilities, region_intensities
from .optics import GratingSpec, PhasePlate, phi_for_theta, propagate_4f, transfer_matrix
from .quantum import BELL_STATE, Observable, observable, observable_from_angle, rho_of_q

__version__ = "0.1.0"

__all__ = [
    "BELL_STATE", "Backend", "BellCurve", "BellRow", "DEFAULT_GEOMETRY", "GratingSpec",
    "JointProbabilities", "Observable", "PhasePlate", "Scene", "SceneGeometry",
    "ViolationReport", "bell_point", "bell_sweep", "encode_single", "encode_two_qubit",
    "joint_probabilities", "measure_setting", "observable", "observable_from_angle",
    "phi_for_theta", "propagate_4f", "region_intensities", "rho_of_q", "theta_grid",
    "transfer_matrix", "violation_report",
]
