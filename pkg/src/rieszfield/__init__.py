"""Weighted Riesz equilibrium measures on a hyperplane conductor."""

from .balayage import ball_balayage, ball_balayage_density, ball_balayage_mass, lambda_star
from .equilibrium_single import (
    EquilibriumSolution,
    robin_constant,
    signed_ball_equilibrium,
    solve_radius,
    solve_single_attractor,
    verify_frostman,
)
from .errors import (
    DomainError,
    IntegrationError,
    InternalConsistencyError,
    NumericError,
    RieszFieldError,
    SingularBoundaryWarning,
    UnsupportedEndpointError,
)
from .kernel_core import ChargeConfig, RadialProfile, RieszKernel, radial_potential
from .oracle import minimize_particles, radial_histogram, support_radius_estimate
from .weak_admissible import ClassificationReport, Verdict, classify_config, classify_pair

__version__ = "0.1.0"
