"""Equilibrium measure of ``R^d`` in the field of one attracting charge.

A charge ``gamma < -1`` at height ``h`` gives an equilibrium measure supported
on a ball ``B_R0``.  The radius solves a monotone scalar equation in
``z = (R0 / h)**2``; the density on ``B_R0`` is ``-gamma`` times the balayage
density minus its edge part, which this module evaluates through the
non-negative gap of :mod:`rieszfield.balayage`.  ``gamma = -1`` gives a
measure on all of ``R^d`` (the plane balayage of the charge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .balayage import (
    _gap_from_A,
    _plane_constant,
    ball_balayage_mass,
    lambda_star,
    plane_balayage_profile,
)
from .errors import DomainError, NumericError, UnsupportedEndpointError
from .kernel_core import (
    ChargeConfig,
    RadialProfile,
    RieszKernel,
    _ball_constant,
    _scalar_or_array,
    ball_energy,
    external_field,
    radial_potential,
)
from .quadrature import integrate_halfline_weighted
from .special_functions import gamma_value, gauss_2f1

__all__ = [
    "EquilibriumSolution",
    "FrostmanReport",
    "SignedBallEquilibrium",
    "boundary_coefficient_H",
    "equilibrium_density",
    "largest_root_of_H",
    "robin_constant",
    "signed_ball_equilibrium",
    "solve_radius",
    "solve_radius_newton",
    "solve_single_attractor",
    "verify_frostman",
]

RADIUS_REL_TOL = 1e-10
EXTERIOR_FACTORS = (1.01, 1.1, 2.0, 5.0, 10.0)


def _check_attractor(gamma, h, allow_critical=False):
    if not (h > 0.0 and math.isfinite(h)):
        raise DomainError(f"height must be positive, got {h}")
    if allow_critical and gamma == -1.0:
        return
    if not gamma < -1.0:
        raise DomainError(f"a compact equilibrium support needs gamma < -1, got {gamma}")


def _radius_lhs(kernel: RieszKernel, z: float) -> float:
    d, s = kernel.d, kernel.s
    return z ** (s / 2 + 1) * gauss_2f1(1 + s / 2, 1 + d / 2, 2 + s / 2, -z)


def solve_radius(kernel: RieszKernel, gamma: float, h: float) -> float:
    """Support radius ``R0`` for a single charge ``gamma < -1`` at height ``h``."""
    kernel.require_full("solve_radius")
    _check_attractor(gamma, h)
    d, s, a = kernel.d, kernel.s, kernel.alpha
    sup = gamma_value(a / 2) * gamma_value(2 + s / 2) / gamma_value(1 + d / 2)
    target = sup / (-gamma)
    if not target < sup:
        raise NumericError("radius equation has no root", target=target, supremum=sup)
    lo, hi = 1e-12, 1.0
    f = lambda z: _radius_lhs(kernel, z) / target - 1.0
    if f(lo) > 0.0:
        raise NumericError("radius bracket failed at the lower end", gamma=gamma)
    grown = 0
    while f(hi) < 0.0:
        lo, hi = hi, 4.0 * hi
        grown += 1
        if grown > 200:
            raise NumericError("radius bracket did not close", gamma=gamma, z=hi)
    z = brentq(f, lo, hi, xtol=1e-300, rtol=RADIUS_REL_TOL * 1e-3, maxiter=500)
    return h * math.sqrt(z)


def solve_radius_newton(d: int, gamma: float, h: float) -> float:
    """Support radius at ``s = d - 2``.

    There ``R^(d-1) Q'(R) = d - 2`` reduces to ``(R^2 / (R^2 + h^2))**(d/2) = -1/gamma``,
    whose left side increases from 0 to 1, so the smallest root is the only one.
    """
    if int(d) != d or d < 3:
        raise DomainError(f"the Newton case needs an integer d >= 3, got {d}")
    _check_attractor(gamma, h)
    q = (-1.0 / gamma) ** (2.0 / d)
    return h * math.sqrt(q / (1.0 - q))


def _edge_density(kernel, gamma, h, R0, A, P):
    a = kernel.alpha / 2
    A = np.asarray(A, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -gamma * _gap_from_A(kernel, h, A, P) / A**a
    at_edge = -gamma * _plane_constant(kernel, h) * P ** (-(kernel.d - kernel.s / 2)) if kernel.is_newton else 0.0
    return np.where(A > 0.0, out, at_edge)


def equilibrium_density(kernel: RieszKernel, gamma: float, h: float, R0: float, r, *,
                        method: str = "stable"):
    """Density of the equilibrium measure at ``|x| = r`` for ``r`` in ``[0, R0]``.

    ``method="stable"`` uses the gap form (exact when ``R0`` is the solved
    radius); ``method="literal"`` evaluates the plane term minus the
    ``J``-integral by adaptive quadrature, one radius at a time.
    """
    kernel.require_full("equilibrium_density")
    _check_attractor(gamma, h)
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0.0) or np.any(rr > R0):
        raise DomainError(f"radius outside [0, {R0}]")
    A = (R0 - rr) * (R0 + rr)
    P = rr * rr + h * h
    if method == "stable":
        out = _edge_density(kernel, gamma, h, R0, A, P)
    elif method == "literal":
        out = np.vectorize(lambda x: _literal_density(kernel, gamma, h, R0, x))(rr)
    else:
        raise DomainError(f"unknown method {method!r}")
    return _scalar_or_array(out, r)


def _literal_density(kernel, gamma, h, R0, r):
    a, m = kernel.alpha / 2, kernel.d - kernel.s / 2
    P = r * r + h * h
    plane = P ** (-m)
    if kernel.is_newton:
        return -gamma * _plane_constant(kernel, h) * plane
    A = (R0 - r) * (R0 + r)
    T = R0 * R0 + h * h
    core = lambda u: 1.0 / ((u + 1.0) * (A * u + T) ** m)
    J = integrate_halfline_weighted(a - 1.0, 1.0 + (m if A > 0.0 else 0.0), core).value
    return -gamma * _plane_constant(kernel, h) * (plane - math.sin(math.pi * a) / math.pi * J)


def _equilibrium_profile(kernel, gamma, h, R0, n=200) -> RadialProfile:
    def dens(r):
        r = np.asarray(r, dtype=float)
        return _edge_density(kernel, gamma, h, R0, (R0 - r) * (R0 + r), r * r + h * h)

    def edge(e):
        e = np.asarray(e, dtype=float)
        r = R0 - e
        return _edge_density(kernel, gamma, h, R0, e * (2.0 * R0 - e), r * r + h * h)

    return RadialProfile.from_function(kernel, R0, dens, n=n, edge_func=edge)


@dataclass(frozen=True)
class EquilibriumSolution:
    """Solved single-attractor problem.  ``R0 = inf`` marks a full-plane support."""

    kernel: RieszKernel
    gamma: float
    h: float
    R0: float
    density: RadialProfile = field(repr=False)
    robin_constant: float
    mass_check: float

    @property
    def config(self) -> ChargeConfig:
        return ChargeConfig.single(self.kernel, self.gamma, self.h)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.R0)


def solve_single_attractor(kernel: RieszKernel, gamma: float, h: float, *,
                           n: int = 200) -> EquilibriumSolution:
    """Radius, density, Robin constant and a mass check for one attracting charge."""
    kernel.require_full("solve_single_attractor")
    _check_attractor(gamma, h, allow_critical=True)
    if gamma == -1.0:
        config = ChargeConfig.single(kernel, gamma, h)
        profile = plane_balayage_profile(config, sample_radius=4.0 * h)
        R0 = math.inf
    else:
        R0 = solve_radius(kernel, gamma, h)
        profile = _equilibrium_profile(kernel, gamma, h, R0, n)
    config = ChargeConfig.single(kernel, gamma, h)
    F = radial_potential(profile, 0.0) + external_field(config, 0.0)
    return EquilibriumSolution(kernel, float(gamma), float(h), R0, profile, F, profile.mass())


def robin_constant(solution: EquilibriumSolution, *, at: float = 0.0) -> float:
    """``U(x) + Q(x)`` at a support point ``|x| = at`` (the centre by default)."""
    if not 0.0 <= at < solution.R0:
        raise DomainError(f"{at} is not an interior support radius")
    return radial_potential(solution.density, at) + external_field(solution.config, at)


# ----------------------------------------------------------------------------
# signed ball equilibrium and the edge coefficient H


@dataclass(frozen=True)
class SignedBallEquilibrium:
    """Signed measure on ``B_R`` of mass 1 whose potential plus ``Q`` is constant there."""

    config: ChargeConfig
    R: float
    constant: float
    mass: float
    profile: RadialProfile = field(repr=False)

    def density(self, r):
        return self.profile.density(r)


def signed_ball_equilibrium(config_or_kernel, gamma=None, h=None, R=None, *, n: int = 200):
    """``sum_j -gamma_j Bal(delta_j, B_R) + (1 + sum_j gamma_j m_j) omega_R``.

    Call either as ``(kernel, gamma, h, R)`` or as ``(config, R=R)``.
    """
    if isinstance(config_or_kernel, ChargeConfig):
        config = config_or_kernel
        R = gamma if R is None else R
    else:
        config = ChargeConfig.single(config_or_kernel, gamma, h)
    kernel = config.kernel
    kernel.require_interior("signed_ball_equilibrium")
    if not (R is not None and R > 0.0):
        raise DomainError(f"radius must be positive, got {R}")
    a = kernel.alpha / 2
    masses = [ball_balayage_mass(kernel, R, hj) for _, hj in config.charges]
    weight = 1.0 + math.fsum(g * mj for (g, _), mj in zip(config.charges, masses))
    c_R = _ball_constant(kernel, R)

    def from_geometry(A, r):
        # every term is (something) / A**a; combine before dividing
        num = weight * c_R
        for g, hj in config.charges:
            lam = lambda_star(kernel, R, hj) + _gap_from_A(kernel, hj, A, r * r + hj * hj)
            num = num - g * lam
        return num / A**a

    def dens(r):
        r = np.asarray(r, dtype=float)
        return from_geometry((R - r) * (R + r), r)

    def edge(e):
        e = np.asarray(e, dtype=float)
        return from_geometry(e * (2.0 * R - e), R - e)

    profile = RadialProfile.from_function(kernel, R, dens, n=n, edge_func=edge,
                                          edge_exponent=a, signed=True)
    mass = -math.fsum(g * mj for (g, _), mj in zip(config.charges, masses)) + weight
    return SignedBallEquilibrium(config, float(R), weight * ball_energy(kernel, R), mass, profile)


def boundary_coefficient_H(kernel: RieszKernel, gamma: float, h: float, R: float) -> float:
    """Edge coefficient ``-gamma Lambda*_R + (1 + gamma m_R) c_R`` of the signed ball equilibrium."""
    kernel.require_full("boundary_coefficient_H")
    if kernel.is_newton:
        raise UnsupportedEndpointError(
            "at s = d-2 both edge coefficients vanish and H is identically zero"
        )
    if not R > 0.0:
        raise DomainError(f"radius must be positive, got {R}")
    m = ball_balayage_mass(kernel, R, h)
    return -gamma * lambda_star(kernel, R, h) + (1.0 + gamma * m) * _ball_constant(kernel, R)


def largest_root_of_H(kernel: RieszKernel, gamma: float, h: float, *,
                      r_min: float = None, r_max: float = None, samples: int = 400) -> float:
    """Largest sign change of ``boundary_coefficient_H`` on a log-spaced scan."""
    r_min = r_min or 1e-4 * h
    r_max = r_max or 1e4 * h
    grid = np.geomspace(r_min, r_max, samples)
    vals = np.array([boundary_coefficient_H(kernel, gamma, h, R) for R in grid])
    idx = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if idx.size == 0:
        raise NumericError("no sign change of H on the scanned range",
                           r_min=r_min, r_max=r_max)
    i = idx[-1]
    f = lambda R: boundary_coefficient_H(kernel, gamma, h, R)
    return brentq(f, grid[i], grid[i + 1], xtol=1e-300, rtol=1e-13)


# ----------------------------------------------------------------------------
# Frostman check


@dataclass(frozen=True)
class FrostmanReport:
    constant: float
    interior_radii: tuple
    interior_values: tuple
    exterior_radii: tuple
    exterior_values: tuple
    interior_deviation: float
    exterior_slack: float
    tol_eq: float
    tol_ineq: float

    @property
    def passed(self) -> bool:
        return self.interior_deviation <= self.tol_eq and self.exterior_slack >= -self.tol_ineq

    def as_dict(self) -> dict:
        return {
            "constant": self.constant,
            "interior_deviation": self.interior_deviation,
            "exterior_slack": self.exterior_slack,
            "tol_eq": self.tol_eq,
            "tol_ineq": self.tol_ineq,
            "passed": self.passed,
            "interior": [[r, v] for r, v in zip(self.interior_radii, self.interior_values)],
            "exterior": [[r, v] for r, v in zip(self.exterior_radii, self.exterior_values)],
        }


def chebyshev_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    k = np.arange(n)
    return lo + 0.5 * (hi - lo) * (1.0 - np.cos((2 * k + 1) * math.pi / (2 * n)))


def verify_frostman(solution: EquilibriumSolution, config: Optional[ChargeConfig] = None,
                    interior_samples: int = 20,
                    exterior_factors: Sequence[float] = EXTERIOR_FACTORS, *,
                    field_shift: float = 0.0, tol_eq: Optional[float] = None,
                    tol_ineq: float = 1e-6) -> FrostmanReport:
    """Check ``U + Q = F`` on the support and ``U + Q >= F`` outside it.

    ``field_shift`` adds a constant to ``Q``; the measure is unchanged and the
    reported constant moves by the same amount.  ``tol_eq`` defaults to
    ``1e-4 |F|`` (``1e-4 |Q(0)|`` when ``F`` is zero).  For a full-plane support only the equality is sampled,
    on ``[0, 10 h]``.
    """
    config = config or solution.config
    profile = solution.density

    def total(r):
        return radial_potential(profile, r) + external_field(config, r) + field_shift

    F = total(0.0)
    if solution.bounded:
        inner = chebyshev_nodes(0.0, solution.R0 * (1.0 - 1e-3), interior_samples)
        outer = solution.R0 * np.asarray(exterior_factors, dtype=float)
    else:
        inner = chebyshev_nodes(0.0, 10.0 * solution.h, interior_samples)
        outer = np.array([])
    iv = [total(float(r)) for r in inner]
    ov = [total(float(r)) for r in outer]
    dev = max(abs(v - F) for v in iv)
    slack = min((v - F for v in ov), default=math.inf)
    if tol_eq is None:
        # relative to F, or to the field scale when F vanishes (full plane)
        scale = abs(F) if abs(F) > 1e-12 * abs(external_field(config, 0.0)) else abs(external_field(config, 0.0))
        tol_eq = 1e-4 * scale
    return FrostmanReport(F, tuple(map(float, inner)), tuple(iv), tuple(map(float, outer)),
                          tuple(ov), dev, slack, tol_eq, tol_ineq)
