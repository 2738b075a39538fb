"""Discrete particle minimization as an independent check of the analytic results.

The weighted energy of a probability measure is replaced by its ``N``-point
discretization

    E(x) = (1/N**2) sum_{i != j} |x_i - x_j|**(-s) + (2/N) sum_i Q(x_i)

and minimized by gradient descent with Armijo backtracking.  Everything here
is empirical: radii and histograms are observations, not proven results.
The module also holds the candidate-radius search for multi-charge fields,
which tests the conjectured ball-shaped support by locating the largest
zero of the edge coefficient of the signed ball equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .balayage import ball_balayage_mass, lambda_star
from .errors import DomainError, NumericError, UnsupportedEndpointError
from .kernel_core import ChargeConfig, RadialProfile, RieszKernel, _ball_constant, surface_area
from .quadrature import graded_rule

__all__ = [
    "CandidateEquilibrium",
    "ParticleSystem",
    "candidate_equilibrium",
    "candidate_support_radius",
    "config_boundary_coefficient",
    "discrete_energy",
    "histogram_mass",
    "l1_distance",
    "minimize_particles",
    "radial_histogram",
    "support_radius_estimate",
]

ARMIJO = 1e-4
STEP_GROWTH = 1.5
_CHUNK = 1024


@dataclass(frozen=True)
class ParticleSystem:
    kernel: RieszKernel
    config: ChargeConfig
    positions: np.ndarray
    energy: float
    iteration_count: int
    seed: int
    energy_trace: tuple = field(default=(), repr=False)
    gradient_norm: float = math.nan
    converged: bool = False

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != self.kernel.d:
            raise DomainError(f"positions must have shape (N, {self.kernel.d})")
        if not np.all(np.isfinite(pos)):
            raise NumericError("non-finite particle position")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.positions, axis=1)


# ----------------------------------------------------------------------------
# energy and gradient


def _field_and_grad(config: ChargeConfig, x: np.ndarray):
    s = config.kernel.s
    r2 = np.einsum("ij,ij->i", x, x)
    q = np.zeros(x.shape[0])
    dq = np.zeros(x.shape[0])  # dQ/d(r^2)
    for g, h in config.charges:
        base = r2 + h * h
        q += g * base ** (-s / 2)
        dq += g * (-s / 2) * base ** (-s / 2 - 1)
    return q, 2.0 * dq[:, None] * x


def _inverse_power(d2: np.ndarray, s: float) -> np.ndarray:
    """``d2**(-s/2)``, with a square root in place of ``pow`` when ``s`` is an integer."""
    if s == int(s):
        n = int(s)
        out = 1.0 / np.sqrt(d2) if n % 2 else np.ones_like(d2)
        if n >= 2:
            out = out / d2 ** (n // 2)
        return out
    return d2 ** (-s / 2)


def _energy_and_grad(config: ChargeConfig, x: np.ndarray, want_grad: bool = True):
    n, dim = x.shape
    s = config.kernel.s
    pair = 0.0
    grad = np.zeros_like(x) if want_grad else None
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        diffs = [x[lo:hi, k, None] - x[None, :, k] for k in range(dim)]
        d2 = diffs[0] * diffs[0]
        for dk in diffs[1:]:
            d2 += dk * dk
        d2[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
        if not np.all(d2 > 0.0):
            return math.inf, grad
        pk = _inverse_power(d2, s)
        pair += float(pk.sum())
        if want_grad:
            # d/dx_i of sum_{j != i} |x_i - x_j|^-s, counted twice in the double sum
            # sum_j w_ij (x_i - x_j) = x_i sum_j w_ij - (w x)_i; w_ii = 0
            w = pk / d2
            grad[lo:hi] -= 2.0 * s * (x[lo:hi] * w.sum(axis=1)[:, None] - w @ x)
    q, dq = _field_and_grad(config, x)
    energy = pair / n**2 + 2.0 * float(q.sum()) / n
    if want_grad:
        grad = grad / n**2 + 2.0 * dq / n
    return energy, grad


def discrete_energy(config: ChargeConfig, positions) -> float:
    """The discretized weighted energy of a point configuration."""
    return _energy_and_grad(config, np.asarray(positions, dtype=float), want_grad=False)[0]


# ----------------------------------------------------------------------------
# minimization


def _scale_estimate(config: ChargeConfig) -> float:
    """Rough support radius used only for the divergence check."""
    from .equilibrium_single import solve_radius

    if len(config.charges) == 1 and config.total_charge < -1.0 and config.kernel.is_full:
        g, h = config.charges[0]
        return solve_radius(config.kernel, g, h)
    return float(config.heights.max())


def _check_admissible(config: ChargeConfig) -> None:
    from .weak_admissible import Verdict, classify_config

    verdict = classify_config(config).verdict
    if verdict not in (Verdict.ADMISSIBLE_COMPACT, Verdict.WEAK_COMPACT):
        raise DomainError(
            f"particle minimization needs a compactly supported equilibrium; verdict is "
            f"{verdict.value} (pass require_compact=False to run anyway)"
        )


def initial_positions(config: ChargeConfig, n: int, seed: int) -> np.ndarray:
    """Uniform sample of the disk of radius ``2 max h`` (seeded)."""
    d = config.kernel.d
    rng = np.random.default_rng(seed)
    radius = 2.0 * float(config.heights.max())
    direction = rng.standard_normal((n, d))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    return radius * rng.random(n)[:, None] ** (1.0 / d) * direction


def minimize_particles(config: ChargeConfig, N: int, seed: int = 0, max_iters: int = 5000, *,
                       initial: Optional[np.ndarray] = None, require_compact: bool = True,
                       grad_tol: Optional[float] = None,
                       divergence_factor: float = 1e6) -> ParticleSystem:
    """Gradient descent with Armijo backtracking on the discrete weighted energy.

    The first trial step is ``1e-2 h`` (largest height); later trial steps
    are Barzilai-Borwein estimates (falling back to 1.5 times the last
    accepted step), halved until the sufficient-decrease test passes.  The descent direction is the
    per-particle force ``-N grad E``, whose size does not shrink with ``N``.
    Stops at ``max_iters``, when ``|grad E| < 1e-8 N``, or when no step of
    size above ``1e-14 h`` decreases the energy.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N!r}")
    if max_iters < 0:
        raise DomainError("max_iters must be non-negative")
    if require_compact:
        _check_admissible(config)
    N = int(N)
    h = float(config.heights.max())
    x = initial_positions(config, N, seed) if initial is None else np.array(initial, dtype=float)
    if x.shape != (N, config.kernel.d):
        raise DomainError(f"initial positions must have shape ({N}, {config.kernel.d})")
    tol = 1e-8 * N if grad_tol is None else grad_tol
    limit = divergence_factor * _scale_estimate(config)

    energy, grad = _energy_and_grad(config, x)
    if not math.isfinite(energy):
        raise NumericError("initial configuration has coincident particles")
    trace = [energy]
    step = 1e-2 * h
    it = 0
    gnorm = float(np.linalg.norm(grad))
    converged = gnorm < tol
    while it < max_iters and not converged:
        direction = -N * grad
        slope = float(np.vdot(grad, direction))
        if it > 0:
            # Barzilai-Borwein trial step, capped by the growth rule
            dx, dg = x - x_prev, N * (grad - grad_prev)
            curv = float(np.vdot(dx, dg))
            if curv > 0.0:
                step = min(float(np.vdot(dx, dx)) / curv, STEP_GROWTH * step_prev * 1e3)
        while True:
            trial = x + step * direction
            e_new, g_new = _energy_and_grad(config, trial)
            if math.isfinite(e_new) and e_new <= energy + ARMIJO * step * slope:
                break
            step *= 0.5
            if step < 1e-14 * h:
                break
        if step < 1e-14 * h:
            break
        x_prev, grad_prev, step_prev = x, grad, step
        x, energy, grad = trial, e_new, g_new
        trace.append(energy)
        it += 1
        gnorm = float(np.linalg.norm(grad))
        converged = gnorm < tol
        rmax = float(np.sqrt(np.einsum("ij,ij->i", x, x).max()))
        if rmax > limit:
            raise NumericError(
                "particles escaped to infinity; the support is probably not compact",
                max_radius=rmax, limit=limit, iteration=it,
            )
        step *= STEP_GROWTH
    return ParticleSystem(config.kernel, config, x, energy, it, int(seed), tuple(trace),
                          gnorm, converged)


# ----------------------------------------------------------------------------
# empirical summaries


def support_radius_estimate(system: ParticleSystem, quantile: float = 0.99) -> float:
    """Quantile of the particle radii."""
    if system.n == 0:
        raise DomainError("empty particle system")
    if not 0.0 < quantile <= 1.0:
        raise DomainError(f"quantile must lie in (0, 1], got {quantile}")
    return float(np.quantile(system.radii, quantile))


def radial_histogram(system: ParticleSystem, bins: int = 15) -> RadialProfile:
    """Step-function density on ``R^d``: counts over ``N`` times the shell volume."""
    if int(bins) != bins or bins < 1:
        raise DomainError(f"bins must be an integer >= 1, got {bins!r}")
    d = system.kernel.d
    radii = system.radii
    R = float(radii.max())
    if not R > 0.0:
        raise DomainError("all particles sit at the origin")
    edges = np.linspace(0.0, R, int(bins) + 1)
    counts, _ = np.histogram(radii, bins=edges)
    shells = surface_area(d - 1) / d * np.diff(edges**d)
    f = counts / (system.n * shells)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return RadialProfile(system.kernel, R, centers, f, bin_edges=edges)


def histogram_mass(profile: RadialProfile) -> float:
    """Exact mass of a step profile (sum of density times shell volume)."""
    if profile.bin_edges is None:
        raise DomainError("profile has no bins")
    d = profile.kernel.d
    shells = surface_area(d - 1) / d * np.diff(profile.bin_edges**d)
    return float(np.dot(profile.f, shells))


def l1_distance(p: RadialProfile, q: RadialProfile, *, panels: int = 400) -> float:
    """``int |p - q| dx`` over ``R^d`` for two compactly supported profiles."""
    if math.isinf(p.outer_radius) or math.isinf(q.outer_radius):
        raise DomainError("l1_distance needs compactly supported profiles")
    d = p.kernel.d
    top = max(p.outer_radius, q.outer_radius)
    cuts = set(np.linspace(0.0, top, panels + 1).tolist())
    for prof in (p, q):
        cuts.add(prof.outer_radius)
        cuts.update(prof.breakpoints())
    x, w = graded_rule(sorted(cuts))
    diff = np.abs(np.asarray(p.density(x)) - np.asarray(q.density(x)))
    return float(surface_area(d - 1) * np.dot(w, diff * x ** (d - 1)))


# ----------------------------------------------------------------------------
# candidate ball support for several charges


def config_boundary_coefficient(config: ChargeConfig, R: float) -> float:
    """Edge coefficient of the signed equilibrium of ``B_R`` for a general field."""
    kernel = config.kernel
    kernel.require_full("config_boundary_coefficient")
    if kernel.is_newton:
        raise UnsupportedEndpointError("the edge coefficient vanishes identically at s = d-2")
    if not R > 0.0:
        raise DomainError(f"radius must be positive, got {R}")
    weight = 1.0 + math.fsum(g * ball_balayage_mass(kernel, R, h) for g, h in config.charges)
    lam = math.fsum(-g * lambda_star(kernel, R, h) for g, h in config.charges)
    return lam + weight * _ball_constant(kernel, R)


def candidate_support_radius(config: ChargeConfig, *, r_min: Optional[float] = None,
                             r_max: Optional[float] = None, samples: int = 400,
                             check_points: int = 400) -> float:
    """Largest zero of :func:`config_boundary_coefficient`, checked for positivity.

    Under the working hypothesis that the support is a centered ball, its
    radius is the largest ``R`` whose signed ball equilibrium has a vanishing
    edge coefficient and a nonnegative density.  The positivity is checked on
    ``check_points`` radii; a failure raises :class:`NumericError`.
    """
    from .equilibrium_single import signed_ball_equilibrium

    h = float(config.heights.max())
    lo = r_min or 1e-3 * float(config.heights.min())
    hi = r_max or 1e4 * h
    grid = np.geomspace(lo, hi, samples)
    vals = np.array([config_boundary_coefficient(config, R) for R in grid])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size == 0:
        raise NumericError("edge coefficient has no sign change on the scanned range",
                           r_min=lo, r_max=hi)
    i = idx[-1]
    R = brentq(lambda t: config_boundary_coefficient(config, t), grid[i], grid[i + 1],
               xtol=1e-300, rtol=1e-13)
    signed = signed_ball_equilibrium(config, R=R)
    r = R * np.sin(0.5 * math.pi * np.arange(check_points) / check_points)
    dens = np.asarray(signed.profile.density(r))
    if np.any(dens < -1e-10 * np.abs(dens).max()):
        raise NumericError("signed ball equilibrium at the candidate radius is not positive",
                           radius=R, min_density=float(dens.min()))
    return float(R)


@dataclass(frozen=True)
class CandidateEquilibrium:
    """Signed ball equilibrium at a candidate radius, shaped for ``verify_frostman``."""

    config: ChargeConfig
    R0: float
    density: RadialProfile = field(repr=False)
    robin_constant: float
    mass_check: float

    @property
    def kernel(self) -> RieszKernel:
        return self.config.kernel

    @property
    def h(self) -> float:
        return float(self.config.heights.max())

    @property
    def bounded(self) -> bool:
        return True


def candidate_equilibrium(config: ChargeConfig, **kw) -> CandidateEquilibrium:
    """Candidate ball support and its signed equilibrium (empirical)."""
    from .equilibrium_single import signed_ball_equilibrium
    from .kernel_core import external_field, radial_potential

    R = candidate_support_radius(config, **kw)
    signed = signed_ball_equilibrium(config, R=R)
    F = radial_potential(signed.profile, 0.0) + external_field(config, 0.0)
    return CandidateEquilibrium(config, R, signed.profile, F, signed.profile.mass())
