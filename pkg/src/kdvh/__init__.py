"""Small-dispersion KdV-hierarchy solutions and their breakup asymptotics.

The package evolves u_t = rhs_m(u) for the first three flows of the KdV
hierarchy, solves the dispersionless limit by characteristics up to its
gradient catastrophe, integrates the pole-free second-Painleve-hierarchy
profile on the line, and combines the three to verify the quadratic
small-eps rate before breakup and the eps^(2/7) critical-window
expansion at it.
"""

from .errors import (BoundaryMismatch, DegenerateCatastrophe, DomainError,
                     DomainTooSmall, Instability, KdvhError, NoConvergence,
                     OutOfWindow, PastBreakup, ResolutionLoss,
                     SingularDerivative, UnsupportedFlow)
from .hierarchy import EVOLVABLE_M, FlowParams, coefficient, conserved, rhs
from .hodograph import (CatastrophePoint, CharacteristicSolution,
                        catastrophe, minimum_trajectory, solve_u)
from .io import read_checkpoint, write_checkpoint
from .painleve import PainleveField, ode_residual, q_field, solve_p12
from .profiles import (GAUSSIAN, SECH2, InitialProfile,
                       branch_derivatives, eval_profile, get_profile,
                       invert_branch, validate_assumptions)
from .spectral import (FourierGrid, SpectralState, evolve, init_state,
                       sample, tail_ratio)
from .universality import (ScalingReport, UniversalityConstants,
                           WindowSample, constants, predict, scaling_study,
                           window_map)

__version__ = "0.1.0"

__all__ = [
    "BoundaryMismatch", "CatastrophePoint", "CharacteristicSolution",
    "DegenerateCatastrophe", "DomainError", "DomainTooSmall", "EVOLVABLE_M",
    "FlowParams", "FourierGrid", "GAUSSIAN", "Instability", "InitialProfile",
    "KdvhError", "NoConvergence", "OutOfWindow", "PainleveField",
    "PastBreakup", "ResolutionLoss", "SECH2", "ScalingReport",
    "SingularDerivative", "SpectralState", "UniversalityConstants",
    "UnsupportedFlow", "WindowSample", "branch_derivatives",
    "catastrophe", "coefficient",
    "conserved", "constants", "eval_profile", "evolve", "get_profile",
    "init_state",
    "invert_branch", "minimum_trajectory", "ode_residual", "predict",
    "q_field", "read_checkpoint", "rhs", "sample", "scaling_study",
    "solve_p12", "solve_u", "tail_ratio", "validate_assumptions",
    "window_map", "write_checkpoint",
]
