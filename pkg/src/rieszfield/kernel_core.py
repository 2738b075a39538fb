"""Riesz kernel parameters, closed-form ball constants, fields and potentials.

Everything here lives on the conductor ``R^d`` sitting inside ``R^(d+1)`` as
the hyperplane ``x_(d+1) = 0``.  Measures are rotationally symmetric and
described by a radial Lebesgue density, so the potential of a measure is a
one-dimensional integral against the angular average of ``|x - t|**(-s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, UnsupportedEndpointError
from .quadrature import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    IntegrationSpec,
    graded_rule,
    integrate,
)
from .special_functions import beta_value, gamma_value, gauss_2f1

__all__ = [
    "AmbientPoint",
    "ChargeConfig",
    "RadialProfile",
    "RieszKernel",
    "angular_kernel",
    "ball_axis_potential",
    "ball_energy",
    "ball_equilibrium_density",
    "ball_equilibrium_profile",
    "external_field",
    "kelvin_map",
    "radial_potential",
    "sphere_energy",
    "surface_area",
]


def _scalar_or_array(values, like):
    return float(values) if np.ndim(like) == 0 else values


@dataclass(frozen=True)
class RieszKernel:
    """The kernel ``|x - t|**(-s)`` on ``R^d``.

    The full formula set needs ``d - 2 <= s < d``.  ``weak=True`` also admits
    ``0 < s < d - 2``, where only the plane balayage and field evaluation
    remain meaningful.
    """

    d: int
    s: float
    weak: bool = False

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d:
            raise DomainError(f"dimension must be an integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "s", float(self.s))
        if self.d < 2:
            raise DomainError(f"dimension must be at least 2, got {self.d}")
        if not (0.0 < self.s < self.d):
            raise DomainError(f"need 0 < s < d, got s={self.s}, d={self.d}")
        if self.s < self.d - 2 and not self.weak:
            raise DomainError(
                f"s={self.s} < d-2={self.d - 2} requires weak=True "
                "(balayage inequalities fail there)"
            )

    @property
    def alpha(self) -> float:
        return self.d - self.s

    @property
    def is_full(self) -> bool:
        return self.s >= self.d - 2

    @property
    def is_newton(self) -> bool:
        """True at the endpoint ``s = d - 2`` (superharmonic kernel)."""
        return self.s == self.d - 2

    def require_full(self, what: str) -> None:
        if not self.is_full:
            raise DomainError(f"{what} needs d-2 <= s < d; got s={self.s}, d={self.d}")

    def require_interior(self, what: str) -> None:
        self.require_full(what)
        if self.is_newton:
            raise UnsupportedEndpointError(
                f"{what} has no density form at s = d-2 = {self.s}: the ball "
                "equilibrium measure there is carried by the boundary sphere"
            )


@dataclass(frozen=True)
class ChargeConfig:
    """Point charges ``gamma_j`` at heights ``h_j`` above the conductor.

    Heights are stored as ``|h_j|``: the field depends on ``h_j**2`` only.
    """

    kernel: RieszKernel
    charges: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        items = []
        for item in self.charges:
            if isinstance(item, dict):
                g, h = item["gamma"], item["height"]
            else:
                g, h = item
            g, h = float(g), abs(float(h))
            if not (math.isfinite(g) and math.isfinite(h)):
                raise DomainError(f"non-finite charge entry ({g}, {h})")
            if h == 0.0:
                raise DomainError("a charge at height 0 sits on the conductor")
            items.append((g, h))
        if not items:
            raise DomainError("charge list is empty")
        object.__setattr__(self, "charges", tuple(items))

    @classmethod
    def single(cls, kernel: RieszKernel, gamma: float, h: float) -> "ChargeConfig":
        return cls(kernel, ((gamma, h),))

    @property
    def gammas(self) -> np.ndarray:
        return np.array([g for g, _ in self.charges])

    @property
    def heights(self) -> np.ndarray:
        return np.array([h for _, h in self.charges])

    @property
    def total_charge(self) -> float:
        return math.fsum(g for g, _ in self.charges)

    @property
    def negative_charge(self) -> float:
        return math.fsum(g for g, _ in self.charges if g < 0.0)

    @property
    def moment(self) -> float:
        """``sum gamma_j h_j**alpha``."""
        a = self.kernel.alpha
        return math.fsum(g * h**a for g, h in self.charges)

    def field(self, r):
        return external_field(self, r)


@dataclass(frozen=True)
class AmbientPoint:
    """A point ``(base, height)`` of ``R^(d+1)``."""

    base: Tuple[float, ...]
    height: float

    def __post_init__(self):
        base = tuple(float(v) for v in np.atleast_1d(self.base))
        if not all(math.isfinite(v) for v in base) or not math.isfinite(self.height):
            raise DomainError("ambient point has non-finite coordinates")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "height", float(self.height))

    def as_array(self) -> np.ndarray:
        return np.array(self.base + (self.height,))

    @classmethod
    def from_array(cls, v) -> "AmbientPoint":
        v = np.asarray(v, dtype=float)
        return cls(tuple(v[:-1]), float(v[-1]))


def surface_area(n: int) -> float:
    """Area of the unit sphere ``S^n`` in ``R^(n+1)``."""
    if int(n) != n or n < 1:
        raise DomainError(f"sphere dimension must be an integer >= 1, got {n!r}")
    return 2.0 * math.pi ** ((n + 1) / 2) / gamma_value((n + 1) / 2)


def sphere_energy(kernel: RieszKernel) -> float:
    """Riesz s-energy of the normalized surface measure on ``S^d``."""
    d, s = kernel.d, kernel.s
    if d == 2:
        return 2.0 ** (1.0 - s) / (2.0 - s)
    a = kernel.alpha
    return (gamma_value((d + 1) / 2) * gamma_value(a)
            / (gamma_value((a + 1) / 2) * gamma_value(d - s / 2)))


def ball_energy(kernel: RieszKernel, R: float) -> float:
    """Riesz s-energy of the equilibrium measure of the closed ball ``B_R``."""
    kernel.require_full("ball_energy")
    if not R > 0.0:
        raise DomainError(f"radius must be positive, got {R}")
    s = kernel.s
    return s / (2.0 * R**s) * beta_value(s / 2, kernel.alpha / 2)


def _ball_constant(kernel: RieszKernel, R: float) -> float:
    d, s = kernel.d, kernel.s
    return math.pi ** (-d / 2) * gamma_value(1 + s / 2) / (R**s * gamma_value(1 - kernel.alpha / 2))


def ball_equilibrium_density(kernel: RieszKernel, R: float, r):
    """Density of the ball equilibrium measure ``c_R (R^2 - r^2)**(-alpha/2)``."""
    kernel.require_interior("ball_equilibrium_density")
    if not R > 0.0:
        raise DomainError(f"radius must be positive, got {R}")
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0.0) or np.any(rr >= R):
        raise DomainError(f"radius outside [0, {R})")
    out = _ball_constant(kernel, R) * (R * R - rr * rr) ** (-kernel.alpha / 2)
    return _scalar_or_array(out, r)


def _ball_density_from_edge(kernel, R, e):
    e = np.asarray(e, dtype=float)
    return _ball_constant(kernel, R) * (e * (2.0 * R - e)) ** (-kernel.alpha / 2)


def ball_axis_potential(kernel: RieszKernel, R: float, height: float, *,
                        allow_endpoint: bool = False) -> float:
    """Potential of the ball equilibrium measure at the point ``(0, height)``.

    ``allow_endpoint`` lets internal callers use the formula at ``s = d - 2``,
    where the hypergeometric expression stays finite.
    """
    if allow_endpoint:
        kernel.require_full("ball_axis_potential")
    else:
        kernel.require_interior("ball_axis_potential")
    if not (R > 0.0 and height > 0.0):
        raise DomainError(f"need R > 0 and height > 0, got R={R}, height={height}")
    s, d = kernel.s, kernel.d
    return height ** (-s) * gauss_2f1(s / 2, d / 2, 1 + s / 2, -(R * R) / (height * height))


def external_field(config: ChargeConfig, r):
    """``Q(r) = sum gamma_j (r^2 + h_j^2)**(-s/2)``."""
    rr = np.asarray(r, dtype=float)
    s = config.kernel.s
    out = np.zeros_like(rr)
    for g, h in config.charges:
        out = out + g * (rr * rr + h * h) ** (-s / 2)
    return _scalar_or_array(out, r)


# ----------------------------------------------------------------------------
# angular average of the kernel

_KERNEL_PANELS = 80
_KERNEL_ORDER = 16


def angular_kernel(kernel: RieszKernel, rho, r, delta=None):
    """Average of ``|x - t|**(-s)`` over ``|t| = r`` for a fixed ``|x| = rho``.

    ``delta`` may pass ``|rho - r|`` exactly when it is known to more digits
    than the difference of the rounded radii.  With ``u`` the cosine of the
    angle, each half ``u in [0, 1]`` and ``[-1, 0]`` is written in
    ``t = sqrt(1 -+ u)``, which absorbs the ``(1 - u^2)**((d-3)/2)`` weight;
    the near-diagonal peak of width ``delta / sqrt(2 rho r)`` is resolved by a
    geometric mesh.
    """
    d, s = kernel.d, kernel.s
    rho, r = np.broadcast_arrays(np.asarray(rho, float), np.asarray(r, float))
    if delta is None:
        delta = np.abs(rho - r)
    delta = np.broadcast_to(np.asarray(delta, float), rho.shape)
    two = 2.0 * rho * r
    e = (d - 3) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(two > 0.0, delta / np.sqrt(two), np.inf)
    steps = 2.0 ** np.arange(_KERNEL_PANELS)
    inner = np.minimum(1.0, tau[..., None] * steps)
    zeros = np.zeros(rho.shape + (1,))
    ones = np.ones(rho.shape + (1,))
    t, w = graded_rule(np.concatenate([zeros, inner, ones], axis=-1), _KERNEL_ORDER)
    wt = 2.0 * t ** (d - 2) * (2.0 - t * t) ** e
    upper = np.sum(w * wt * (delta[..., None] ** 2 + two[..., None] * t * t) ** (-s / 2), axis=-1)
    t2, w2 = graded_rule(np.array([0.0, 0.5, 1.0]), _KERNEL_ORDER)
    wt2 = 2.0 * t2 ** (d - 2) * (2.0 - t2 * t2) ** e
    far = ((rho + r)[..., None] ** 2 - two[..., None] * t2 * t2) ** (-s / 2)
    lower = np.sum(w2 * wt2 * far, axis=-1)
    out = (upper + lower) / beta_value(0.5, (d - 1) / 2)
    return _scalar_or_array(out, rho)


# ----------------------------------------------------------------------------
# radial profiles and their potentials


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RadialProfile:
    """A rotationally symmetric measure on ``R^d`` given by its radial density.

    ``r``/``f`` are samples; ``evaluator`` (vectorized in ``r``) is used when
    present, otherwise the samples are interpolated linearly, or as a step
    function if ``bin_edges`` is set.  ``edge_evaluator(e)`` evaluates the
    density at ``outer_radius - e`` without forming that difference, and
    ``edge_exponent`` is ``p`` in ``f ~ (R - r)**(-p)`` at the outer edge.
    An unbounded support (``outer_radius = inf``) needs an evaluator and a
    ``tail_decay`` ``q`` with ``f ~ r**(-q)``.
    """

    kernel: RieszKernel
    outer_radius: float
    r: np.ndarray
    f: np.ndarray
    evaluator: Optional[Callable] = field(default=None, compare=False)
    edge_evaluator: Optional[Callable] = field(default=None, compare=False)
    edge_exponent: float = 0.0
    tail_decay: Optional[float] = None
    signed: bool = False
    bin_edges: Optional[np.ndarray] = None

    def __post_init__(self):
        R = float(self.outer_radius)
        object.__setattr__(self, "outer_radius", R)
        r, f = _readonly(self.r), _readonly(self.f)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "f", f)
        if not R > 0.0:
            raise DomainError(f"outer radius must be positive, got {R}")
        if r.ndim != 1 or r.shape != f.shape or r.size == 0:
            raise DomainError("samples r and f must be equal-length 1-d arrays")
        if r[0] < 0.0 or np.any(np.diff(r) <= 0.0) or r[-1] > R:
            raise DomainError("sample radii must increase strictly inside [0, R]")
        if not np.all(np.isfinite(f)):
            raise DomainError("sample densities must be finite")
        if not self.signed and np.any(f < 0.0):
            raise DomainError("negative density in a profile not flagged signed")
        if not 0.0 <= self.edge_exponent < 1.0:
            raise DomainError(f"edge exponent {self.edge_exponent} outside [0, 1)")
        if math.isinf(R):
            if self.evaluator is None or self.tail_decay is None:
                raise DomainError("unbounded profiles need an evaluator and a tail decay")
            if not self.tail_decay > self.kernel.d:
                raise DomainError("tail decay too slow for finite mass")
        if self.bin_edges is not None:
            edges = _readonly(self.bin_edges)
            if edges.size != r.size + 1 or np.any(np.diff(edges) <= 0.0):
                raise DomainError("bin_edges must bracket every sample")
            object.__setattr__(self, "bin_edges", edges)

    @classmethod
    def from_function(cls, kernel: RieszKernel, R: float, func: Callable, *, n: int = 200,
                      edge_func: Optional[Callable] = None, edge_exponent: float = 0.0,
                      signed: bool = False, tail_decay: Optional[float] = None,
                      sample_radius: Optional[float] = None) -> "RadialProfile":
        """Sample ``func`` on Chebyshev-type nodes clustered towards the edge."""
        span = R if math.isfinite(R) else (sample_radius or 1.0)
        r = span * np.sin(0.5 * math.pi * np.arange(n) / n)
        f = np.asarray(func(r), dtype=float)
        return cls(kernel, R, r, f, evaluator=func, edge_evaluator=edge_func,
                   edge_exponent=edge_exponent, signed=signed, tail_decay=tail_decay)

    def density(self, r):
        rr = np.asarray(r, dtype=float)
        if self.evaluator is not None:
            if math.isfinite(self.outer_radius):
                # zero outside the support; never call the evaluator there
                inside = rr <= self.outer_radius
                out = np.zeros(rr.shape)
                if np.any(inside):
                    out[inside] = np.asarray(self.evaluator(rr[inside]), dtype=float)
            else:
                out = np.asarray(self.evaluator(rr), dtype=float)
        elif self.bin_edges is not None:
            idx = np.searchsorted(self.bin_edges, rr, side="right") - 1
            inside = (idx >= 0) & (idx < self.f.size)
            out = np.where(inside, self.f[np.clip(idx, 0, self.f.size - 1)], 0.0)
        else:
            out = np.interp(rr, self.r, self.f, right=0.0)
        return _scalar_or_array(out, r)

    def density_from_edge(self, e):
        """Density at radius ``outer_radius - e``."""
        if self.edge_evaluator is not None:
            return np.asarray(self.edge_evaluator(np.asarray(e, dtype=float)), dtype=float)
        return np.asarray(self.density(self.outer_radius - np.asarray(e, dtype=float)))

    def breakpoints(self):
        return () if self.bin_edges is None else tuple(self.bin_edges[1:-1])

    def mass(self, *, rel_tol: float = DEFAULT_REL_TOL, abs_tol: float = DEFAULT_ABS_TOL) -> float:
        """Total mass ``omega_(d-1) int f(r) r^(d-1) dr``."""
        d = self.kernel.d
        R = self.outer_radius
        total = 0.0
        if math.isinf(R):
            g = lambda t: self.density(t) * t ** (d - 1)
            total += _integrate_value(g, 0.0, 1.0, (0.0, 0.0), rel_tol, abs_tol)
            total += integrate(IntegrationSpec(
                g, 1.0, math.inf, rel_tol=rel_tol, abs_tol=abs_tol,
                tail_decay=self.tail_decay - (d - 1))).value
            return surface_area(d - 1) * total
        for lo, hi in _segments(0.0, 0.5 * R, self.breakpoints()):
            total += _integrate_value(lambda t: self.density(t) * t ** (d - 1), lo, hi,
                                      (0.0, 0.0), rel_tol, abs_tol)
        g = lambda e: self.density_from_edge(e) * (R - e) ** (d - 1)
        total += _integrate_value(g, 0.0, 0.5 * R, (self.edge_exponent, 0.0), rel_tol, abs_tol)
        return surface_area(d - 1) * total


def _segments(lo, hi, cuts):
    pts = [lo] + [c for c in cuts if lo < c < hi] + [hi]
    return list(zip(pts[:-1], pts[1:]))


def _integrate_value(g, lo, hi, exps, rel_tol, abs_tol):
    if hi <= lo:
        return 0.0
    return integrate(IntegrationSpec(g, lo, hi, endpoint_exponents=exps,
                                     rel_tol=rel_tol, abs_tol=abs_tol)).value


def ball_equilibrium_profile(kernel: RieszKernel, R: float, n: int = 200) -> RadialProfile:
    """The ball equilibrium density packaged as a :class:`RadialProfile`."""
    kernel.require_interior("ball_equilibrium_profile")
    return RadialProfile.from_function(
        kernel, R, lambda r: ball_equilibrium_density(kernel, R, r), n=n,
        edge_func=lambda e: _ball_density_from_edge(kernel, R, e),
        edge_exponent=kernel.alpha / 2,
    )


def _diagonal_exponent(kernel: RieszKernel) -> float:
    # |rho - r|**-(s-d+1) for s > d-1, a logarithm at s = d-1; declaring a
    # strength between the true one and 1 costs nothing.
    p = max(kernel.s - kernel.d + 1, 0.0)
    return p + 0.3 * (1.0 - p)


def radial_potential(profile: RadialProfile, rho: float, *,
                     rel_tol: float = DEFAULT_REL_TOL,
                     abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """Riesz potential of ``profile`` at any point ``x`` of ``R^d`` with ``|x| = rho``."""
    if not (rho >= 0.0 and math.isfinite(rho)):
        raise DomainError(f"rho must be finite and non-negative, got {rho}")
    kernel = profile.kernel
    d, s = kernel.d, kernel.s
    R = profile.outer_radius
    p_edge = profile.edge_exponent
    dens = profile.density
    total = 0.0

    def add(g, lo, hi, exps=(0.0, 0.0)):
        nonlocal total
        total += _integrate_value(g, lo, hi, exps, rel_tol, abs_tol)

    if rho == 0.0:
        # the kernel reduces to r**(-s)
        for lo, hi in _segments(0.0, 0.5 * R if math.isfinite(R) else 1.0, profile.breakpoints()):
            add(lambda t: dens(t) * t ** (d - 1 - s), lo, hi,
                (max(0.0, s + 1.0 - d), 0.0) if lo == 0.0 else (0.0, 0.0))
        if math.isfinite(R):
            add(lambda e: profile.density_from_edge(e) * (R - e) ** (d - 1 - s),
                0.0, 0.5 * R, (p_edge, 0.0))
        else:
            total += integrate(IntegrationSpec(
                lambda t: dens(t) * t ** (d - 1 - s), 1.0, math.inf,
                rel_tol=rel_tol, abs_tol=abs_tol,
                tail_decay=profile.tail_decay - (d - 1 - s))).value
        return surface_area(d - 1) * total

    p_k = _diagonal_exponent(kernel)
    cuts = profile.breakpoints()

    def below(delta):  # r = rho - delta
        r = rho - delta
        return dens(r) * r ** (d - 1) * angular_kernel(kernel, rho, r, delta)

    def above(delta):  # r = rho + delta
        r = rho + delta
        return dens(r) * r ** (d - 1) * angular_kernel(kernel, rho, r, delta)

    def at_edge(e):  # r = R - e
        r = R - e
        return profile.density_from_edge(e) * r ** (d - 1) * angular_kernel(
            kernel, rho, r, np.abs(R - rho - e))

    def plain(r):
        return dens(r) * r ** (d - 1) * angular_kernel(kernel, rho, r)

    if math.isinf(R):
        top = 2.0 * rho + 1.0
        _add_split(add, below, 0.0, rho, p_k, rho, cuts, sign=-1)
        _add_split(add, above, 0.0, top - rho, p_k, rho, cuts, sign=+1)
        total += integrate(IntegrationSpec(
            plain, top, math.inf, rel_tol=rel_tol, abs_tol=abs_tol,
            tail_decay=profile.tail_decay - (d - 1) + s)).value
    elif rho < R:
        mid = 0.5 * (R - rho)
        _add_split(add, below, 0.0, rho, p_k, rho, cuts, sign=-1)
        _add_split(add, above, 0.0, mid, p_k, rho, cuts, sign=+1)
        add(at_edge, 0.0, mid, (p_edge, 0.0))
    elif rho == R:
        _add_split(add, plain, 0.0, 0.5 * R, 0.0, 0.0, cuts, sign=+1)
        add(at_edge, 0.0, 0.5 * R, (min(p_edge + p_k, 0.95), 0.0))
    else:
        for lo, hi in _segments(0.0, 0.5 * R, cuts):
            add(plain, lo, hi)
        add(at_edge, 0.0, 0.5 * R, (p_edge, 0.0))
    return surface_area(d - 1) * total


def _add_split(add, g, lo, hi, p0, origin, cuts, sign):
    """Integrate ``g`` over offsets ``[lo, hi]`` from ``origin``; singular at offset 0."""
    offsets = sorted(abs(c - origin) for c in cuts if lo < sign * (c - origin) < hi)
    pts = [lo] + offsets + [hi]
    for a, b in zip(pts[:-1], pts[1:]):
        add(g, a, b, (p0 if a == 0.0 else 0.0, 0.0))


def kelvin_map(x: AmbientPoint, center: AmbientPoint) -> AmbientPoint:
    """Inversion about ``center`` with squared radius ``2 * center.height``."""
    if not center.height > 0.0:
        raise DomainError("the inversion center must lie above the conductor")
    xv, cv = x.as_array(), center.as_array()
    if xv.size != cv.size:
        raise DomainError("points live in different dimensions")
    diff = xv - cv
    n2 = float(np.dot(diff, diff))
    if n2 == 0.0:
        raise DomainError("cannot invert the center itself")
    return AmbientPoint.from_array(cv + 2.0 * center.height * diff / n2)
