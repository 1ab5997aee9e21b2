"""Spectral laboratory for a fifth-order modified KdV equation on the torus.

Simulation of the direct / renormalized / normal-form formulations, plus
exact-arithmetic certification of the multiplier identities and phase-function
bounds that drive the normal-form reduction.
"""

from .spectral import (
    EquationCoefficients,
    AssumptionFlags,
    SpectralField,
    SolverConfig,
    TrajectoryRecord,
    transform_forward,
    inverse_transform,
    sobolev_norm,
    energy,
    check_assumptions,
    propagate_linear,
)
from .phase import (
    PhaseParams,
    phase_coeff,
    phase_mismatch,
    phase_mismatch_factored,
    phase_remainder,
)
from .cutoffs import cutoff

__version__ = "0.1.0"

__all__ = [
    "EquationCoefficients",
    "AssumptionFlags",
    "SpectralField",
    "SolverConfig",
    "TrajectoryRecord",
    "transform_forward",
    "inverse_transform",
    "sobolev_norm",
    "energy",
    "check_assumptions",
    "propagate_linear",
    "PhaseParams",
    "phase_coeff",
    "phase_mismatch",
    "phase_mismatch_factored",
    "phase_remainder",
    "cutoff",
]
