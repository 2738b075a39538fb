import math

import mpmath
import numpy as np
import pytest
from scipy import integrate as sci_integrate
from scipy import special as sci_special

from rieszfield.errors import DomainError, NumericError
from rieszfield.special_functions import (
    HypergeometricArgs,
    beta_value,
    gamma_value,
    gauss_2f1,
    log_gamma,
)


@pytest.mark.parametrize("x,expected", [
    (0.5, math.sqrt(math.pi)),
    (1.0, 1.0),
    (2.5, 1.5 * 0.5 * math.sqrt(math.pi)),
])
def test_gamma_known_values(x, expected):
    assert gamma_value(x) == pytest.approx(expected, rel=1e-13)


def test_gamma_against_stdlib(rng):
    xs = np.concatenate([rng.uniform(1e-6, 1.0, 300), rng.uniform(1.0, 170.0, 300)])
    worst = max(abs(gamma_value(x) / math.gamma(x) - 1.0) for x in xs)
    assert worst < 1e-12


def test_log_gamma_large_argument():
    assert log_gamma(1e4) == pytest.approx(math.lgamma(1e4), rel=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, math.inf, math.nan])
def test_gamma_rejects_nonpositive(bad):
    with pytest.raises(DomainError):
        gamma_value(bad)


def test_gamma_overflow_is_numeric_error():
    with pytest.raises(NumericError):
        gamma_value(200.0)


@pytest.mark.parametrize("a,b,expected", [
    (0.5, 1.0, 2.0),
    (1.0, 1.0, 1.0),
    (0.5, 0.5, math.pi),
])
def test_beta_known_values(a, b, expected):
    assert beta_value(a, b) == pytest.approx(expected, rel=1e-13)


def test_beta_symmetric_exactly(rng):
    for a, b in rng.uniform(0.01, 50.0, size=(100, 2)):
        assert beta_value(a, b) == beta_value(b, a)


def test_beta_large_parameters_do_not_overflow():
    val = beta_value(300.0, 400.0)
    assert val == pytest.approx(math.exp(sci_special.betaln(300.0, 400.0)), rel=1e-11)


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, -2.0)])
def test_beta_domain(a, b):
    with pytest.raises(DomainError):
        beta_value(a, b)


def test_2f1_trivial_cases():
    assert gauss_2f1(0.3, 0.7, 1.1, 0.0) == 1.0
    assert gauss_2f1(1.5, 2.5, 2.5, -1.0) == pytest.approx(2**-1.5, rel=1e-13)
    assert gauss_2f1(1.0, 1.0, 2.0, -1.0) == pytest.approx(math.log(2.0), rel=1e-13)


def test_2f1_accepts_args_record():
    args = HypergeometricArgs(0.75, 1.5, 1.75, -2.0)
    assert gauss_2f1(args) == gauss_2f1(0.75, 1.5, 1.75, -2.0)


def _euler_integral(a, b, c, x):
    pref = math.gamma(c) / (math.gamma(b) * math.gamma(c - b))
    val, _ = sci_integrate.quad(
        lambda t: (1 - x * t) ** (-a), 0.0, 1.0,
        weight="alg", wvar=(b - 1.0, c - b - 1.0), epsabs=0, epsrel=1e-13, limit=200,
    )
    return pref * val


def test_2f1_euler_integral_example():
    expected = _euler_integral(0.75, 1.5, 1.75, -2.0)
    assert gauss_2f1(0.75, 1.5, 1.75, -2.0) == pytest.approx(expected, rel=1e-10)
    assert expected == pytest.approx(float(mpmath.hyp2f1(0.75, 1.5, 1.75, -2.0)), rel=1e-11)


def test_2f1_euler_integral_random(rng):
    for _ in range(100):
        b = rng.uniform(0.1, 4.0)
        c = b + rng.uniform(0.1, 4.0)
        a = rng.uniform(0.05, 5.0)
        x = -rng.uniform(0.0, 50.0)
        assert gauss_2f1(a, b, c, x) == pytest.approx(_euler_integral(a, b, c, x), rel=1e-8)


def test_2f1_reduces_to_power(rng):
    for _ in range(100):
        a, b = rng.uniform(0.05, 6.0, size=2)
        x = -rng.uniform(0.0, 1e3)
        assert gauss_2f1(a, b, b, x) == pytest.approx((1 - x) ** (-a), rel=1e-10)


def test_2f1_against_mpmath_wide(rng):
    worst = 0.0
    for _ in range(400):
        a, b = rng.uniform(0.05, 6.0, size=2)
        c = rng.uniform(0.05, 8.0)
        x = -10 ** rng.uniform(-3, 4)
        ref = float(mpmath.hyp2f1(a, b, c, x))
        worst = max(worst, abs(gauss_2f1(a, b, c, x) / ref - 1.0))
    assert worst < 1e-10


def test_2f1_near_integer_parameter_gap():
    # c - a - b within 1e-9 of an integer exercises the series fallback
    a, b = 1.5, 2.0
    c = a + b + 1.0 + 1e-9
    ref = float(mpmath.hyp2f1(a, b, c, -40.0))
    assert gauss_2f1(a, b, c, -40.0) == pytest.approx(ref, rel=1e-10)


def test_g_contiguous_identity(rng):
    for _ in range(200):
        d = int(rng.integers(2, 6))
        s = rng.uniform(max(d - 2, 0) + 1e-3, d - 1e-3)
        z = rng.uniform(1e-6, 100.0)
        lhs = z ** (s / 2) * (gauss_2f1(s / 2, d / 2, 1 + s / 2, -z) - (1 + z) ** (-d / 2))
        rhs = d / (s + 2) * z ** (s / 2 + 1) * gauss_2f1(1 + s / 2, 1 + d / 2, 2 + s / 2, -z)
        assert lhs == pytest.approx(rhs, rel=1e-10)


@pytest.mark.parametrize("args", [(1.0, 1.0, 0.0, -1.0), (1.0, 1.0, -2.0, -1.0),
                                  (1.0, 1.0, 2.0, 0.5), (math.nan, 1.0, 2.0, -1.0)])
def test_2f1_domain(args):
    with pytest.raises(DomainError):
        gauss_2f1(*args)


def test_2f1_terminating_series():
    # a = -2: polynomial 1 + 2*(-2)*x... checked against mpmath
    assert gauss_2f1(-2.0, 1.5, 0.5, -7.0) == pytest.approx(float(mpmath.hyp2f1(-2, 1.5, 0.5, -7)), rel=1e-13)
