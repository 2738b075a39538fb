"""Balayage of a point charge onto the hyperplane ``R^d`` and onto balls.

Notation used throughout: ``a = alpha / 2``, ``m = d - s / 2``,
``A = R^2 - r^2`` (distance to the edge, squared form), ``P = r^2 + h^2`` and
``C = (2h)**alpha / (W(S^d) omega_d)``.

The ball density is evaluated as ``(Lambda* + gap(r)) / A**a`` where
``Lambda*`` is the edge coefficient and

    gap(r) = C A P**-m (sin(pi a)/pi) int_0^inf v**(a-1)/(v+A) (1 - (1+(v+A)/P)**-m) dv

is the non-negative remainder.  That integrand has no cancellation, so the
density keeps full relative accuracy up to the edge.  The textbook form with
the improper integral ``I(r)`` is kept as :func:`ball_balayage_density` with
``method="integral"`` for cross-checking.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InternalConsistencyError, SingularBoundaryWarning
from .kernel_core import (
    ChargeConfig,
    RadialProfile,
    RieszKernel,
    _scalar_or_array,
    ball_axis_potential,
    ball_energy,
    sphere_energy,
    surface_area,
)
from .quadrature import graded_rule, integrate_halfline_weighted
from .special_functions import beta_value

__all__ = [
    "BallBalayage",
    "ball_balayage",
    "ball_balayage_density",
    "ball_balayage_mass",
    "lambda_gap",
    "lambda_star",
    "plane_balayage_profile",
    "plane_config_density",
    "plane_point_balayage_density",
]

GAP_TOLERANCE = 1e-12


def _plane_constant(kernel: RieszKernel, h: float) -> float:
    return (2.0 * h) ** kernel.alpha / (surface_area(kernel.d) * sphere_energy(kernel))


def _check_height(h):
    if not (h > 0.0 and math.isfinite(h)):
        raise DomainError(f"height must be positive and finite, got {h}")


def plane_point_balayage_density(kernel: RieszKernel, h: float, r):
    """Density at ``|x| = r`` of the balayage of a unit charge at height ``h`` onto ``R^d``."""
    _check_height(h)
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0.0):
        raise DomainError("radius must be non-negative")
    out = _plane_constant(kernel, h) * (rr * rr + h * h) ** (-(2 * kernel.d - kernel.s) / 2)
    return _scalar_or_array(out, r)


def plane_config_density(config: ChargeConfig, r):
    """``sum gamma_j`` times the plane balayage density of each charge."""
    rr = np.asarray(r, dtype=float)
    out = np.zeros_like(rr)
    for g, h in config.charges:
        out = out + g * plane_point_balayage_density(config.kernel, h, rr)
    return _scalar_or_array(out, r)


def plane_balayage_profile(config: ChargeConfig, *, scale: float = -1.0,
                           sample_radius: float = None) -> RadialProfile:
    """``scale * plane_config_density`` as an unbounded :class:`RadialProfile`.

    With the default ``scale = -1`` a configuration of total charge ``-1``
    gives a probability measure when its plane density is positive.
    """
    k = config.kernel
    func = lambda r: scale * plane_config_density(config, r)
    signed = bool(np.any(func(np.linspace(0.0, 50.0 * config.heights.max(), 400)) < 0.0))
    return RadialProfile.from_function(
        k, math.inf, func, signed=signed, tail_decay=2 * k.d - k.s,
        sample_radius=sample_radius or 4.0 * config.heights.max(),
    )


# ----------------------------------------------------------------------------
# ball balayage


def lambda_star(kernel: RieszKernel, R: float, h: float) -> float:
    """Edge coefficient: the limit of ``(R^2 - r^2)**(alpha/2)`` times the density."""
    kernel.require_full("lambda_star")
    _check_height(h)
    if not R > 0.0:
        raise DomainError(f"radius must be positive, got {R}")
    d, a = kernel.d, kernel.alpha
    if kernel.is_newton:
        return 0.0
    k1 = (2.0**a * math.sin(a * math.pi / 2) * beta_value(d / 2, a / 2)
          / (math.pi * surface_area(d) * sphere_energy(kernel)))
    return h**a * k1 / (R * R + h * h) ** (d / 2)


_LOW_ORDER = 16
_MID_PANELS = 64
_TAIL_TERMS = 12
_TAIL_FACTOR = 64.0
_GEOMETRIC_UNIT = np.concatenate([[0.0], 2.0 ** np.arange(-40.0, 1.0)])


_GAP_CHUNK = 512


def _gap_factor(a: float, m: float, A, P):
    """``(sin(pi a)/pi) int_0^inf v**(a-1)/(v+A) (1 - (1+(v+A)/P)**-m) dv``.

    Vectorized over ``A`` and ``P``.  The integral is split at ``A`` and at
    ``V = 64 (A + P)``; beyond ``V`` the ``1`` and the power term are
    integrated separately, the first by its convergent series in ``A / V``.
    """
    A, P = np.broadcast_arrays(np.asarray(A, dtype=float), np.asarray(P, dtype=float))
    if A.size <= _GAP_CHUNK:
        return _gap_block(a, m, A, P)
    flat_a, flat_p = A.ravel(), P.ravel()
    out = np.concatenate([_gap_block(a, m, flat_a[i:i + _GAP_CHUNK], flat_p[i:i + _GAP_CHUNK])
                          for i in range(0, flat_a.size, _GAP_CHUNK)])
    return out.reshape(A.shape)


def _gap_block(a, m, A, P):
    S = math.sin(math.pi * a) / math.pi
    V = _TAIL_FACTOR * (A + P)
    Ae, Pe, Ve = A[..., None], P[..., None], V[..., None]

    def one_minus_e(v):
        return -np.expm1(-m * np.log1p((v + Ae) / Pe))

    # [0, A] with v = A t**(1/a): v**(a-1) dv = A**a / a dt
    # h(A t**(1/a)) has a t**(1/a) term, so grade the mesh towards t = 0
    t, w = graded_rule(_GEOMETRIC_UNIT, _LOW_ORDER)
    v = Ae * t ** (1.0 / a)
    low = A**a / a * np.sum(w * one_minus_e(v) / (v + Ae), axis=-1)

    # [A, V] on a geometric mesh
    k = np.arange(_MID_PANELS + 1) / _MID_PANELS
    v, w = graded_rule(Ae * (Ve / Ae) ** k, _LOW_ORDER)
    mid = np.sum(w * v ** (a - 1.0) * one_minus_e(v) / (v + Ae), axis=-1)

    # [V, inf): int v**(a-1)/(v+A) as a series; n = 0 term carries the
    # sin factor through sinc so that a -> 1 stays finite
    series = np.sinc(1.0 - a) * V ** (a - 1.0)
    ratio = -A / V
    term = V ** (a - 1.0)
    for n in range(1, _TAIL_TERMS):
        term = term * ratio
        series = series + S * term / (n + 1.0 - a)
    # minus int_V^inf v**(a-1) E / (v+A), in t = V / v
    t, w = graded_rule(_GEOMETRIC_UNIT, _LOW_ORDER)
    te = t
    power = Ve**a * Pe**m * te ** (m - a) / ((Ve + Ae * te) * (te * Pe + Ve + Ae * te) ** m)
    tail_e = np.sum(w * power, axis=-1)
    return S * (low + mid - tail_e) + series


def _gap_from_A(kernel: RieszKernel, h: float, A, P):
    a, m = kernel.alpha / 2, kernel.d - kernel.s / 2
    return _plane_constant(kernel, h) * A * P ** (-m) * _gap_factor(a, m, A, P)


def _edge_geometry(R, h, r=None, e=None):
    if e is not None:
        e = np.asarray(e, dtype=float)
        A = e * (2.0 * R - e)
        r = R - e
    else:
        r = np.asarray(r, dtype=float)
        A = (R - r) * (R + r)
    return A, r * r + h * h


def _check_ball_args(kernel, R, h, r):
    kernel.require_full("ball balayage")
    _check_height(h)
    if not R > 0.0:
        raise DomainError(f"radius must be positive, got {R}")
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0.0) or np.any(rr >= R):
        raise DomainError(f"radius outside [0, {R})")
    return rr


def lambda_gap(kernel: RieszKernel, R: float, h: float, r):
    """``Lambda_R(r) - Lambda*_R``, non-negative for every ``r`` in ``[0, R)``."""
    rr = _check_ball_args(kernel, R, h, r)
    A, P = _edge_geometry(R, h, r=rr)
    out = _gap_from_A(kernel, h, A, P)
    lo = float(np.min(out)) if np.size(out) else 0.0
    if lo < -GAP_TOLERANCE:
        raise InternalConsistencyError(
            "balayage gap came out negative", minimum=lo, R=R, h=h,
        )
    return _scalar_or_array(out, r)


def _warn_endpoint(kernel):
    if kernel.is_newton:
        warnings.warn(
            "at s = d-2 the balayage onto a ball has a singular part on the "
            "sphere |x| = R; the density returned covers the absolutely "
            "continuous part only", SingularBoundaryWarning, stacklevel=3,
        )


def _stable_density(kernel, R, h, A, P):
    a = kernel.alpha / 2
    lam = lambda_star(kernel, R, h) + _gap_from_A(kernel, h, A, P)
    return lam / A**a


def ball_balayage_density(kernel: RieszKernel, R: float, h: float, r, *, method: str = "stable"):
    """Density of the balayage of a unit charge at height ``h`` onto ``B_R``.

    ``method="integral"`` evaluates the improper integral form by adaptive
    quadrature (one integral per radius); it is slower and loses relative
    accuracy as ``r -> R``.
    """
    rr = _check_ball_args(kernel, R, h, r)
    _warn_endpoint(kernel)
    A, P = _edge_geometry(R, h, r=rr)
    if method == "stable":
        out = _stable_density(kernel, R, h, A, P)
    elif method == "integral":
        out = np.vectorize(lambda x: _integral_density(kernel, R, h, x))(rr)
    else:
        raise DomainError(f"unknown method {method!r}")
    return _scalar_or_array(out, r)


def _integral_density(kernel, R, h, r):
    a, m = kernel.alpha / 2, kernel.d - kernel.s / 2
    A = (R - r) * (R + r)
    P = r * r + h * h
    T = R * R + h * h
    first = P ** (-m)
    if kernel.is_newton:
        return _plane_constant(kernel, h) * first
    core = lambda v: 1.0 / ((v + T) ** m * (v + A))
    integral = integrate_halfline_weighted(a, m + 1.0, core).value
    second = math.sin(math.pi * a) / math.pi * integral / A**a
    return _plane_constant(kernel, h) * (first + second)


def ball_balayage_mass(kernel: RieszKernel, R: float, h: float) -> float:
    """Mass of the balayage of a unit charge at height ``h`` onto ``B_R``."""
    kernel.require_full("ball_balayage_mass")
    _check_height(h)
    return ball_axis_potential(kernel, R, h, allow_endpoint=True) / ball_energy(kernel, R)


@dataclass(frozen=True)
class BallBalayage:
    """The balayage of a unit charge at height ``h`` onto ``B_R``."""

    kernel: RieszKernel
    R: float
    h: float
    mass: float
    boundary_coefficient: float

    def density(self, r):
        return ball_balayage_density(self.kernel, self.R, self.h, r)

    def density_from_edge(self, e):
        A, P = _edge_geometry(self.R, self.h, e=e)
        return _stable_density(self.kernel, self.R, self.h, A, P)

    def profile(self, n: int = 200) -> RadialProfile:
        _warn_endpoint(self.kernel)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SingularBoundaryWarning)
            return RadialProfile.from_function(
                self.kernel, self.R,
                lambda r: _stable_density(self.kernel, self.R, self.h, *_edge_geometry(self.R, self.h, r=r)),
                n=n, edge_func=self.density_from_edge,
                edge_exponent=0.0 if self.kernel.is_newton else self.kernel.alpha / 2,
            )

    def absolutely_continuous_mass(self) -> float:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SingularBoundaryWarning)
            return self.profile().mass()

    @property
    def boundary_mass(self) -> float:
        """Mass on the sphere ``|x| = R``; zero unless ``s = d - 2``."""
        if not self.kernel.is_newton:
            return 0.0
        return self.mass - self.absolutely_continuous_mass()


def ball_balayage(kernel: RieszKernel, R: float, h: float) -> BallBalayage:
    return BallBalayage(kernel, float(R), float(h), ball_balayage_mass(kernel, R, h),
                        lambda_star(kernel, R, h))
