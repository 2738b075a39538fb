"""Existence and compactness verdicts for discrete charge configurations.

With total charge ``Gamma = sum gamma_j`` and moment ``M = sum gamma_j h_j**alpha``:

* ``Gamma < -1``: an equilibrium measure exists and has compact support;
* ``Gamma = -1``: it exists; the support is compact when ``M > 0``, is all of
  ``R^d`` when the plane balayage of the charges is a positive measure
  (one attractor, or an attractor-repellent pair in the middle regime), and
  is left undecided otherwise;
* ``Gamma > -1``: no minimizer exists when the attracting part alone is
  weaker than a unit charge; otherwise the discrete data do not decide.

Comparisons with ``-1`` and with the pair thresholds are exact on the
decimal values of the inputs (``Fraction(repr(x))``) when that is feasible,
and otherwise use a ``1e-12`` relative band; hits inside the band are
flagged ``boundary``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, InternalConsistencyError
from .kernel_core import ChargeConfig, RieszKernel, _scalar_or_array, sphere_energy, surface_area

__all__ = [
    "ClassificationReport",
    "PairThresholds",
    "Verdict",
    "classify_config",
    "classify_pair",
    "pair_asymptotic_coefficient",
    "pair_radius",
    "pair_signed_density",
    "pair_thresholds",
]

BAND = 1e-12
_MAX_EXACT_DENOMINATOR = 64


class Verdict(str, enum.Enum):
    ADMISSIBLE_COMPACT = "Admissible-Compact"
    WEAK_COMPACT = "WeaklyAdmissible-Compact"
    WEAK_FULL_PLANE = "WeaklyAdmissible-FullPlane"
    WEAK_UNKNOWN = "WeaklyAdmissible-Unknown"
    NO_SOLUTION = "NoSolution"
    INDETERMINATE = "Indeterminate"


JUSTIFICATION = {
    Verdict.ADMISSIBLE_COMPACT: "total-charge-below-minus-one",
    Verdict.WEAK_COMPACT: "critical-charge-positive-moment",
    Verdict.WEAK_FULL_PLANE: "critical-charge-positive-plane-balayage",
    Verdict.WEAK_UNKNOWN: "critical-charge-nonpositive-moment",
    Verdict.NO_SOLUTION: "attraction-weaker-than-unit-charge",
    Verdict.INDETERMINATE: "pointwise-condition-undecided",
}


@dataclass(frozen=True)
class ClassificationReport:
    verdict: Verdict
    justification: str
    total_charge: float
    moment: float
    radius: Optional[float] = None
    thresholds: Optional[tuple] = None
    case: Optional[str] = None
    boundary: bool = False
    note: str = ""

    def __post_init__(self):
        if JUSTIFICATION[self.verdict] != self.justification:
            raise InternalConsistencyError(
                "verdict and justification disagree",
                verdict=self.verdict.value, justification=self.justification,
            )

    def as_dict(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict.value
        if self.thresholds is not None:
            out["thresholds"] = dict(zip(("g", "lower", "upper"), self.thresholds))
        return out


def _report(verdict: Verdict, **kw) -> ClassificationReport:
    return ClassificationReport(verdict, JUSTIFICATION[verdict], **kw)


def _rational(x: float) -> Fraction:
    return Fraction(repr(float(x)))


def _compare(value: float, target: float, exact: Optional[int] = None):
    """Sign of ``value - target`` and whether the decision is a boundary hit.

    An exact sign, when supplied, decides; the band then only sets the flag.
    """
    scale = max(abs(value), abs(target), 1.0)
    in_band = abs(value - target) <= BAND * scale
    if exact is not None:
        return exact, in_band or exact == 0
    if in_band:
        return 0, True
    return (1 if value > target else -1), False


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# ----------------------------------------------------------------------------
# attractor-repellent pair


class PairThresholds(NamedTuple):
    g: float
    lower: float
    upper: float


def pair_thresholds(kernel: RieszKernel, gamma: float) -> PairThresholds:
    """``g = gamma/(1+gamma)`` and the thresholds ``g**(1/d) < 1 < g**(-1/alpha)``."""
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise DomainError(f"the repellent charge must be positive, got {gamma}")
    g = gamma / (1.0 + gamma)
    return PairThresholds(g, g ** (1.0 / kernel.d), g ** (-1.0 / kernel.alpha))


def _pair_constant(kernel):
    return 2.0**kernel.alpha / (surface_area(kernel.d) * sphere_energy(kernel))


def pair_signed_density(kernel: RieszKernel, gamma: float, h1: float, h2: float, r):
    """Density of the signed plane equilibrium for charges ``-1-gamma`` at ``h1`` and ``gamma`` at ``h2``."""
    rr = np.asarray(r, dtype=float)
    a, m = kernel.alpha, (2 * kernel.d - kernel.s) / 2
    out = _pair_constant(kernel) * ((1.0 + gamma) * h1**a * (rr * rr + h1 * h1) ** (-m)
                                    - gamma * h2**a * (rr * rr + h2 * h2) ** (-m))
    return _scalar_or_array(out, r)


def pair_asymptotic_coefficient(kernel: RieszKernel, gamma: float, h1: float, h2: float) -> float:
    """Limit of ``r**(2d-s)`` times :func:`pair_signed_density`."""
    a = kernel.alpha
    return _pair_constant(kernel) * ((1.0 + gamma) * h1**a - gamma * h2**a)


def pair_radius(kernel: RieszKernel, gamma: float, h1: float, h2: float):
    """Sign-change radius of the pair density, with a flag for a boundary snap.

    Returns ``(R, snapped)``.  ``R`` is ``None`` when the density has no sign
    change (middle regime) and ``0`` when ``h2/h1`` sits on the lower
    threshold; the numerator is snapped to zero inside the band.
    """
    d, s, a = kernel.d, kernel.s, kernel.alpha
    g = gamma / (1.0 + gamma)
    q = h2 / h1
    rho = (g * q**a) ** (2.0 / (2 * d - s))
    num = rho * h1 * h1 - h2 * h2
    den = 1.0 - rho
    if abs(num) <= BAND * max(rho * h1 * h1, h2 * h2):
        return 0.0, True
    if den == 0.0 or num / den < 0.0:
        return None, False
    return math.sqrt(num / den), False


def _alpha_rational(kernel: RieszKernel) -> Optional[Fraction]:
    fa = _rational(kernel.alpha).limit_denominator(_MAX_EXACT_DENOMINATOR)
    return fa if float(fa) == kernel.alpha else None


def _exact_pair_signs(kernel, gamma, h1, h2):
    """Exact signs of ``q^d - g`` and ``q^alpha g - 1`` when alpha is a small rational."""
    fa = _alpha_rational(kernel)
    if fa is None:
        return None, None
    gm = _rational(gamma)
    g = gm / (1 + gm)
    q = _rational(h2) / _rational(h1)
    lower = _sign(q ** kernel.d - g)
    # q**(p/r) g vs 1  <=>  q**p g**r vs 1
    upper = _sign(q ** fa.numerator * g ** fa.denominator - 1)
    return lower, upper


def classify_pair(kernel: RieszKernel, gamma: float, h1: float, h2: float) -> ClassificationReport:
    """Attractor ``-1-gamma`` at ``h1`` with repellent ``gamma`` at ``h2``.

    Case ``i`` (``q`` below ``g**(1/d)``): the density is negative near the
    origin and the support avoids ``B_R``.  Case ``ii``: the signed plane
    equilibrium is positive and is the equilibrium measure.  Case ``iii``
    (``q`` above ``g**(-1/alpha)``): the support lies in ``B_R``.
    """
    kernel.require_full("classify_pair")
    for h in (h1, h2):
        if not (h > 0.0 and math.isfinite(h)):
            raise DomainError(f"heights must be positive, got {h}")
    th = pair_thresholds(kernel, gamma)
    q = h2 / h1
    ex_lo, ex_hi = _exact_pair_signs(kernel, gamma, h1, h2)
    lo_sign, lo_band = _compare(q, th.lower, ex_lo)
    hi_sign, hi_band = _compare(q, th.upper, ex_hi)
    boundary = lo_band or hi_band
    moment = -(1.0 + gamma) * h1**kernel.alpha + gamma * h2**kernel.alpha
    common = dict(total_charge=-1.0, moment=moment, thresholds=tuple(th), boundary=boundary)
    if lo_sign < 0:
        R, _ = pair_radius(kernel, gamma, h1, h2)
        if R is None:
            raise InternalConsistencyError("case i without a sign change", q=q, **th._asdict())
        return _report(Verdict.WEAK_UNKNOWN, radius=R, case="i",
                       note="support lies outside the ball of this radius", **common)
    if hi_sign > 0:
        R, _ = pair_radius(kernel, gamma, h1, h2)
        if R is None:
            raise InternalConsistencyError("case iii without a sign change", q=q, **th._asdict())
        return _report(Verdict.WEAK_COMPACT, radius=R, case="iii",
                       note="support lies inside the ball of this radius", **common)
    R = 0.0 if (lo_sign == 0 or lo_band) else None
    return _report(Verdict.WEAK_FULL_PLANE, radius=R, case="ii",
                   note="equilibrium measure is the signed plane equilibrium", **common)


# ----------------------------------------------------------------------------
# general configurations


def _as_pair(config: ChargeConfig):
    if len(config.charges) != 2:
        return None
    (g1, h1), (g2, h2) = sorted(config.charges)
    if g1 < 0.0 < g2:
        return g2, h1, h2
    return None


def classify_config(config: ChargeConfig) -> ClassificationReport:
    """Existence and compactness verdict for a discrete field."""
    kernel = config.kernel
    total_exact = sum((_rational(g) for g, _ in config.charges), Fraction(0))
    total = config.total_charge
    moment = config.moment
    if total_exact == -1:
        sign, band = 0, False
    else:
        # decimal inputs that miss -1 exactly but land inside the float band
        sign, band = _compare(total, -1.0)
    common = dict(total_charge=total, moment=moment, boundary=band)
    if sign < 0:
        return _report(Verdict.ADMISSIBLE_COMPACT, **common)
    if sign > 0:
        if kernel.is_full and config.negative_charge > -1.0:
            return _report(Verdict.NO_SOLUTION, note=(
                "attracting charge is above -1, so no minimizer exists"), **common)
        return _report(Verdict.INDETERMINATE, note=(
            "total charge exceeds -1 but the attracting part does not; "
            "existence depends on a pointwise bound the charges alone do not settle"), **common)
    # critical charge
    if len(config.charges) == 1:
        return _report(Verdict.WEAK_FULL_PLANE, case="single",
                       note="equilibrium measure is the plane balayage of the charge", **common)
    pair = _as_pair(config)
    if pair is not None and kernel.is_full:
        gamma, h1, h2 = pair
        rep = classify_pair(kernel, gamma, h1, h2)
        return ClassificationReport(rep.verdict, rep.justification, total, moment, rep.radius,
                                    rep.thresholds, rep.case, rep.boundary or band, rep.note)
    msign, mband = _compare(moment, 0.0)
    if msign > 0:
        return _report(Verdict.WEAK_COMPACT, **common)
    return _report(Verdict.WEAK_UNKNOWN, note="moment is not positive",
                   **{**common, "boundary": band or mband})
