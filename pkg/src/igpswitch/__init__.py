"""Lotka-Volterra intraguild predation with top-predator feeding switching.

Equilibria and their stability, saddle-focus chaos diagnostics, adaptive
trajectory integration, Lyapunov exponents and bifurcation sweeps over the
switching intensity ``c`` and the top-predator attack rate ``a13``.
"""

__version__ = "0.1.0"

from .model import REFERENCE_PARAMS, DomainError, ModelParams, State, jacobian, vector_field
from .equilibria import boundary_equilibria, boundary_stability, routh_hurwitz, solve_coexistence
from .spectral import cardano_roots, silnikov_check
from .integrate import SolverOptions, integrate, integrate_with_tangent
from .analysis import SweepSpec, attractor_extrema, largest_lyapunov, locate_threshold, sweep

__all__ = [
    "REFERENCE_PARAMS", "DomainError", "ModelParams", "State", "jacobian", "vector_field",
    "boundary_equilibria", "boundary_stability", "routh_hurwitz", "solve_coexistence",
    "cardano_roots", "silnikov_check",
    "SolverOptions", "integrate", "integrate_with_tangent",
    "SweepSpec", "attractor_extrema", "largest_lyapunov", "locate_threshold", "sweep",
]
