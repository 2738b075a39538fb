"""Gamma, Beta and the Gauss hypergeometric function on the negative axis.

Every hypergeometric evaluation in this package has an argument ``-z`` with
``z >= 0``, so :func:`gauss_2f1` only accepts ``x <= 0``.  Near the origin the
defining series is summed directly; further out the Pfaff transformation
maps the argument into ``[1/3, 1)``, and once that image gets close to 1 the
``w -> 1 - w`` connection formula takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NumericError

__all__ = [
    "HypergeometricArgs",
    "beta_value",
    "gamma_value",
    "gauss_2f1",
    "log_gamma",
]

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficient set).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

SERIES_REL_CUTOFF = 1e-16
SERIES_QUIET_TERMS = 3
SERIES_MAX_TERMS = 10_000

# |x| below this: direct series. Pfaff image above this: connection formula.
_DIRECT_RADIUS = 0.5
_CONNECTION_THRESHOLD = 0.75
# c - a - b near an integer makes the two connection terms cancel. Within
# _SOFT_GUARD the series is preferred while it still converges quickly;
# within _HARD_GUARD it is used unconditionally.
_SOFT_GUARD = 0.05
_SOFT_GUARD_MAX_W = 0.98
_HARD_GUARD = 1e-6


def _lanczos_log(x: float) -> float:
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i, p in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += p / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def log_gamma(x: float) -> float:
    """Natural log of Gamma for ``x > 0``."""
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"log_gamma needs a finite positive argument, got {x!r}")
    if x < 0.5:
        return _lanczos_log(x + 1.0) - math.log(x)
    return _lanczos_log(x)


def gamma_value(x: float) -> float:
    """Gamma(x) for ``x > 0``, relative error around 1e-14 over (0, 171]."""
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"gamma_value needs a finite positive argument, got {x!r}")
    if x < 0.5:
        return gamma_value(x + 1.0) / x
    try:
        return math.exp(_lanczos_log(x))
    except OverflowError:
        raise NumericError("Gamma overflows double precision", x=x) from None


def beta_value(a: float, b: float) -> float:
    """Beta(a, b) computed from log-Gamma differences."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"beta_value needs positive arguments, got ({a!r}, {b!r})")
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def _nonpositive_integer(v: float) -> bool:
    return v <= 0.0 and v == math.floor(v)


def _rgamma(x: float) -> float:
    """1/Gamma(x) on the whole real line (zero at the poles)."""
    if _nonpositive_integer(x):
        return 0.0
    if x > 0.0:
        return 1.0 / gamma_value(x)
    # reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    return math.sin(math.pi * x) * gamma_value(1.0 - x) / math.pi


@dataclass(frozen=True)
class HypergeometricArgs:
    """Validated parameter set ``(a, b; c; x)`` for :func:`gauss_2f1`."""

    a: float
    b: float
    c: float
    x: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.x)
        if any(math.isnan(v) or math.isinf(v) for v in vals):
            raise DomainError(f"non-finite hypergeometric parameter in {vals}")
        if _nonpositive_integer(self.c):
            raise DomainError(f"c = {self.c} is zero or a negative integer")
        if self.x > 0.0:
            raise DomainError(f"argument must be <= 0, got x = {self.x}")


def _series(a: float, b: float, c: float, x: float) -> float:
    if x == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    term = 1.0
    total = 1.0
    quiet = 0
    for k in range(SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        total += term
        if term == 0.0:
            return total
        if abs(term) < SERIES_REL_CUTOFF * abs(total):
            quiet += 1
            if quiet >= SERIES_QUIET_TERMS:
                return total
        else:
            quiet = 0
    raise NumericError(
        "hypergeometric series did not converge",
        a=a, b=b, c=c, x=x, partial_sum=total, last_term=term,
        terms=SERIES_MAX_TERMS,
    )


def _connection(a: float, b: float, c: float, w: float) -> float:
    """2F1(a, b; c; w) for 0 < w < 1 via the 1 - w connection formula."""
    e = c - a - b
    v = 1.0 - w
    first = gamma_value_signed(c) * gamma_value_signed(e) * _rgamma(c - a) * _rgamma(c - b)
    second = gamma_value_signed(c) * gamma_value_signed(-e) * _rgamma(a) * _rgamma(b)
    total = 0.0
    if first != 0.0:
        total += first * _series(a, b, 1.0 - e, v)
    if second != 0.0:
        total += second * v**e * _series(c - a, c - b, 1.0 + e, v)
    return total


def gamma_value_signed(x: float) -> float:
    """Gamma(x) on the real line away from the poles."""
    if x > 0.0:
        return gamma_value(x)
    if _nonpositive_integer(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return math.pi / (math.sin(math.pi * x) * gamma_value(1.0 - x))


def _positive_unit(a: float, b: float, c: float, w: float) -> float:
    """2F1(a, b; c; w) for 0 <= w < 1."""
    if _nonpositive_integer(a) or _nonpositive_integer(b) or w <= _CONNECTION_THRESHOLD:
        return _series(a, b, c, w)
    e = c - a - b
    gap = abs(e - round(e))
    if gap < _HARD_GUARD or (gap < _SOFT_GUARD and w <= _SOFT_GUARD_MAX_W):
        return _series(a, b, c, w)
    return _connection(a, b, c, w)


def gauss_2f1(a, b=None, c=None, x=None) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; x) for real ``x <= 0``.

    Accepts either four numbers or a single :class:`HypergeometricArgs`.
    """
    if isinstance(a, HypergeometricArgs):
        args = a
    else:
        args = HypergeometricArgs(float(a), float(b), float(c), float(x))
    a, b, c, x = args.a, args.b, args.c, args.x
    if x == 0.0:
        return 1.0
    if _nonpositive_integer(a) or _nonpositive_integer(b) or -x < _DIRECT_RADIUS:
        return _series(a, b, c, x)
    w = x / (x - 1.0)
    # Pfaff on whichever upper parameter makes the transformed series terminate.
    if _nonpositive_integer(c - a) and not _nonpositive_integer(c - b):
        a, b = b, a
    return (1.0 - x) ** (-a) * _positive_unit(a, c - b, c, w)
