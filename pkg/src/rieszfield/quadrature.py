"""Adaptive Gauss-Kronrod quadrature for endpoint-singular and half-line integrals.

The integrators here are deterministic: panels are bisected in order of
their error estimate, ties broken by creation order, so a tighter tolerance
always continues the exact refinement sequence of a looser one.

Algebraic endpoint behaviour ``f(t) ~ (t - lo)**(-p)`` is removed before any
refinement by ``t = lo + w**(1 / (1 - p))``; a half-infinite range is mapped
onto ``[0, 1)`` by ``v = lo + t / (1 - t)``, and an algebraic tail becomes an
endpoint singularity of the mapped integrand at ``t = 1``.
"""

from __future__ import annotations

import heapq
import math
from functools import lru_cache
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError, IntegrationError, NumericError

__all__ = [
    "IntegrationSpec",
    "graded_rule",
    "QuadResult",
    "integrate",
    "integrate_halfline_weighted",
    "quad",
]

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-14
DEFAULT_MAX_PANELS = 4096
# Beyond this exponent the part of the integral living below ~1e-308 (or above
# ~1e308 on a tail) is no longer negligible at double precision.
MAX_SUBSTITUTION_EXPONENT = 0.96

# 21-point Kronrod rule with embedded 10-point Gauss rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(21)
_G_WEIGHTS[1:10:2] = _WG
_G_WEIGHTS[11:20:2] = _WG[::-1]
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int

    def __iter__(self):
        yield self.value
        yield self.error


@dataclass(frozen=True)
class IntegrationSpec:
    """An integral ``int_lo^hi f(t) dt`` together with what is known about ``f``.

    ``endpoint_exponents`` are the algebraic singularity strengths ``p`` at
    ``lo`` and ``hi`` (``f ~ |t - end|**(-p)``).  For ``hi = inf`` the second
    entry is ignored and ``tail_decay`` (``f ~ t**(-q)``, ``q > 1``) is used
    instead.  ``vectorized`` says whether ``integrand`` accepts numpy arrays.
    """

    integrand: Callable
    lo: float
    hi: float
    endpoint_exponents: Tuple[float, float] = (0.0, 0.0)
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    tail_decay: Optional[float] = None
    max_panels: int = DEFAULT_MAX_PANELS
    vectorized: bool = True

    def __post_init__(self):
        p_lo, p_hi = self.endpoint_exponents
        for p in (p_lo, p_hi):
            if not 0.0 <= p < 1.0:
                raise DomainError(f"endpoint exponent {p} outside [0, 1)")
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise DomainError("tolerances must be positive")
        if not math.isfinite(self.lo):
            raise DomainError("lower limit must be finite")
        if not self.hi > self.lo:
            raise DomainError(f"empty interval ({self.lo}, {self.hi})")
        if self.tail_decay is not None and not self.tail_decay > 1.0:
            raise DomainError(f"tail decay {self.tail_decay} is not integrable")


def _as_vector(f, vectorized):
    if vectorized:
        return lambda x: np.asarray(f(x), dtype=float) * np.ones_like(x)
    return lambda x: np.array([f(float(t)) for t in x], dtype=float)


def _gk21(f, a, b):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = f(center + half * _NODES)
    if not np.all(np.isfinite(fx)):
        raise IntegrationError("integrand is not finite on a panel", panel=(a, b))
    res_k = half * np.dot(_K_WEIGHTS, fx)
    res_g = half * np.dot(_G_WEIGHTS, fx)
    # QUADPACK-style error scaling
    mean = res_k / half * 0.5 if half else 0.0
    resasc = abs(half) * np.dot(_K_WEIGHTS, np.abs(fx - mean))
    resabs = abs(half) * np.dot(_K_WEIGHTS, np.abs(fx))
    err = abs(res_k - res_g)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    if not (np.isfinite(res_k) and np.isfinite(err)):
        raise IntegrationError(
            "integrand is not finite on a panel", estimate=float(res_k),
            error=float("inf"), panel=(a, b),
        )
    return float(res_k), float(err)


def _adaptive(f, pieces, rel_tol, abs_tol, max_panels):
    """Global adaptive refinement over the unit-variable pieces ``[(g, a, b)]``.

    Reports the trajectory state with the smallest total error estimate, so
    the reported error never grows when the tolerance is tightened.
    """
    heap = []
    counter = 0
    for g, a, b in pieces:
        val, err = _gk21(g, a, b)
        heap.append((-err, counter, g, a, b, val, err))
        counter += 1
    heapq.heapify(heap)
    total = math.fsum(item[5] for item in heap)
    total_err = math.fsum(item[6] for item in heap)
    best_err, best_val = total_err, total
    while total_err > max(rel_tol * abs(total), abs_tol):
        if counter + 2 > max_panels:
            raise IntegrationError(
                "panel budget exhausted before reaching tolerance",
                estimate=best_val, error=best_err, panels=counter,
            )
        _, _, g, a, b, val, err = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not (a < m < b):
            raise IntegrationError(
                "panel cannot be bisected further",
                estimate=best_val, error=best_err, panels=counter,
            )
        v1, e1 = _gk21(g, a, m)
        v2, e2 = _gk21(g, m, b)
        heapq.heappush(heap, (-e1, counter, g, a, m, v1, e1))
        heapq.heappush(heap, (-e2, counter + 1, g, m, b, v2, e2))
        counter += 2
        total += (v1 + v2) - val
        total_err += (e1 + e2) - err
        if counter % 64 == 0 or total_err <= max(rel_tol * abs(total), abs_tol):
            total = math.fsum(item[5] for item in heap)
            total_err = math.fsum(item[6] for item in heap)
        if total_err < best_err:
            best_err, best_val = total_err, total
    return QuadResult(best_val, best_err, counter)


def _check_exponent(p, where):
    if p > MAX_SUBSTITUTION_EXPONENT:
        raise NumericError(
            f"singularity strength {p:.6g} at {where} is too close to 1 to be "
            "resolved in double precision", exponent=p,
            limit=MAX_SUBSTITUTION_EXPONENT,
        )


def _substituted(f, a, b, p_a, p_b):
    """Unit-interval pieces for ``int_a^b f`` with singular strengths at the ends.

    The substituted point is ``a + width * w**k``; if ``a`` is not zero the
    offset is rounded, so integrands singular at a nonzero point should be
    rewritten in the distance to that point.
    """
    _check_exponent(p_a, a)
    _check_exponent(p_b, b)
    if p_a > 0.0 and p_b > 0.0:
        m = 0.5 * (a + b)
        return _substituted(f, a, m, p_a, 0.0) + _substituted(f, m, b, 0.0, p_b)
    width = b - a
    if p_a > 0.0:
        k = 1.0 / (1.0 - p_a)

        def g(w, k=k):
            jac = width * k * w ** (k - 1.0)
            with np.errstate(over="ignore", invalid="ignore"):
                out = f(a + width * w**k) * jac
            return np.where(jac > 0.0, out, 0.0)

        return [(g, 0.0, 1.0)]
    if p_b > 0.0:
        k = 1.0 / (1.0 - p_b)

        def g(w, k=k):
            jac = width * k * w ** (k - 1.0)
            with np.errstate(over="ignore", invalid="ignore"):
                out = f(b - width * w**k) * jac
            return np.where(jac > 0.0, out, 0.0)

        return [(g, 0.0, 1.0)]
    return [(f, a, b)]


def _tail_piece(f, lo, p):
    """``int_{lo+1}^inf f(v) dv`` as an integral over ``w`` in ``[0, 1]``.

    With ``s = 1 - t = w**k / 2`` the map gives ``v = lo - 1 + 2 w**(-k)`` and
    ``dv = 2k w**(-k-1) dw``; written this way nothing underflows until
    ``w**(-k)`` itself leaves the double range.
    """
    k = 1.0 / (1.0 - p)

    def g(w):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            inv = w ** (-k)
            out = f(lo - 1.0 + 2.0 * inv) * (2.0 * k * inv / w)
        return np.where(np.isfinite(inv * 2.0 * k / w), out, 0.0)

    return g


def integrate(spec: IntegrationSpec) -> QuadResult:
    """Adaptive integral of ``spec.integrand`` over ``(spec.lo, spec.hi)``."""
    f = _as_vector(spec.integrand, spec.vectorized)
    p_lo, p_hi = spec.endpoint_exponents
    if math.isinf(spec.hi):
        lo = spec.lo
        # v = lo + t/(1-t) on t <= 1/2; the tail half is written in s = 1 - t
        # directly so that no precision is lost next to the mapped infinity.
        q = spec.tail_decay
        p_tail = 0.0 if q is None else max(0.0, 2.0 - q)

        def head(t):
            one_minus = 1.0 - t
            return f(lo + t / one_minus) / (one_minus * one_minus)

        pieces = _substituted(head, 0.0, 0.5, p_lo, 0.0)
        _check_exponent(p_tail, "infinity")
        pieces.append((_tail_piece(f, lo, p_tail), 0.0, 1.0))
    else:
        pieces = _substituted(f, spec.lo, spec.hi, p_lo, p_hi)
    return _adaptive(f, pieces, spec.rel_tol, spec.abs_tol, spec.max_panels)


def quad(f, lo, hi, *, exponents=(0.0, 0.0), tail_decay=None,
         rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL,
         vectorized=True, max_panels=DEFAULT_MAX_PANELS) -> float:
    """Shorthand returning only the value of :func:`integrate`."""
    spec = IntegrationSpec(f, lo, hi, tuple(exponents), rel_tol, abs_tol,
                           tail_decay, max_panels, vectorized)
    return integrate(spec).value


def integrate_halfline_weighted(power: float, tail_decay: float, core: Callable,
                                *, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL,
                                vectorized=True) -> QuadResult:
    """``int_0^inf u**power * core(u) du`` with ``core(u) ~ u**(-tail_decay)``.

    ``core`` must be smooth and finite at 0.  For weights close to ``u**-1``
    the value ``core(0) / (power + 1)`` is split off analytically, which
    leaves a bounded integrand on ``[0, 1]``.
    """
    if not power > -1.0:
        raise DomainError(f"u**{power} is not integrable at 0")
    if not tail_decay > 1.0 + power:
        raise DomainError(
            f"tail decay {tail_decay} <= 1 + power = {1.0 + power}: divergent at infinity"
        )
    core_v = _as_vector(core, vectorized)
    if -power > 0.5:
        c0 = float(core_v(np.zeros(1))[0])

        def head(u):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(u > 0.0, u**power * (core_v(u) - c0), 0.0)

        head_p, offset = 0.0, c0 / (power + 1.0)
    else:
        def head(u):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(u > 0.0, u**power * core_v(u), 0.0)

        head_p, offset = max(0.0, -power), 0.0

    def tail(u):
        return u**power * core_v(u)

    pieces = _substituted(head, 0.0, 1.0, head_p, 0.0)
    pieces += integrate_pieces_tail(tail, 1.0, tail_decay - power)
    res = _adaptive(None, pieces, rel_tol, abs_tol, DEFAULT_MAX_PANELS)
    return QuadResult(res.value + offset, res.error, res.panels)


def integrate_pieces_tail(f, lo, q):
    """Unit pieces for ``int_lo^inf f`` with ``f ~ v**(-q)``; internal helper."""
    p_tail = max(0.0, 2.0 - q)
    _check_exponent(p_tail, "infinity")
    # v in [lo, lo + 1] directly, the rest through the tail map
    return [(f, lo, lo + 1.0), (_tail_piece(f, lo, p_tail), 0.0, 1.0)]


@lru_cache(maxsize=None)
def _legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def graded_rule(breaks, order: int = 16):
    """Gauss-Legendre nodes and weights on the panels between ``breaks``.

    ``breaks`` has shape ``(..., n + 1)`` and must be non-decreasing along
    the last axis; zero-width panels get zero weight.  The result has shape
    ``(..., n * order)``, so a batch of integrals with different meshes is
    ``np.sum(f(nodes) * weights, axis=-1)``.  This is a fixed rule: callers
    choose meshes that resolve their integrands (typically geometric).
    """
    breaks = np.asarray(breaks, dtype=float)
    x, w = _legendre(order)
    lo = breaks[..., :-1, None]
    half = 0.5 * (breaks[..., 1:, None] - lo)
    nodes = lo + half * (x + 1.0)
    weights = half * w
    shape = breaks.shape[:-1] + (-1,)
    return nodes.reshape(shape), weights.reshape(shape)
