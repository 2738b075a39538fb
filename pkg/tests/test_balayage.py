import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from rieszfield.balayage import (
    ball_balayage,
    ball_balayage_density,
    ball_balayage_mass,
    lambda_gap,
    lambda_star,
    plane_balayage_profile,
    plane_config_density,
    plane_point_balayage_density,
)
from rieszfield.errors import DomainError, SingularBoundaryWarning
from rieszfield.kernel_core import ChargeConfig, RieszKernel, radial_potential, sphere_energy, surface_area
from rieszfield.special_functions import beta_value

K21 = RieszKernel(2, 1.0)


def _radial_mass(d, f, lo=0.0, hi=math.inf):
    return surface_area(d - 1) * integrate.quad(lambda r: f(r) * r ** (d - 1), lo, hi,
                                                epsabs=0, epsrel=1e-12, limit=400)[0]


# -- plane balayage ------------------------------------------------------------

def test_plane_point_density_values():
    assert plane_point_balayage_density(K21, 1.0, 0.0) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    # classical half-space harmonic measure for d=2, s=1
    for r, h in [(0.3, 1.0), (2.0, 0.5)]:
        expected = h / (2 * math.pi * (r * r + h * h) ** 1.5)
        assert plane_point_balayage_density(K21, h, r) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DomainError):
        plane_point_balayage_density(K21, 0.0, 1.0)


def test_plane_point_density_decay():
    k = RieszKernel(3, 1.7)
    h = 0.8
    r = 1e6
    coeff = (2 * h) ** k.alpha / (surface_area(3) * sphere_energy(k))
    assert plane_point_balayage_density(k, h, r) * r ** (2 * k.d - k.s) == pytest.approx(coeff, rel=1e-9)


def test_plane_balayage_unit_mass_random(rng):
    for _ in range(10):
        d = int(rng.integers(2, 5))
        weak = rng.random() < 0.3 and d >= 3
        lo = 0.05 if weak else max(d - 2, 0) + 0.05
        s = float(rng.uniform(lo, d - 0.05))
        h = float(rng.uniform(0.2, 4.0))
        k = RieszKernel(d, s, weak=weak)
        mass = _radial_mass(d, lambda r: plane_point_balayage_density(k, h, r))
        assert mass == pytest.approx(1.0, abs=1e-8)


def test_plane_config_density_pair_example():
    pair = ChargeConfig(K21, [(-2, 1), (1, 3)])
    assert plane_config_density(pair, 0.0) == pytest.approx(-1 / math.pi + 6 / (4 * math.pi * 27), rel=1e-14)
    assert plane_config_density(pair, 0.0) == pytest.approx(-0.3006260, abs=1e-7)
    mass = _radial_mass(2, lambda r: plane_config_density(pair, r))
    assert mass == pytest.approx(-1.0, abs=1e-9)
    single = ChargeConfig.single(K21, -1.0, 2.0)
    r = np.linspace(0, 5, 11)
    assert np.allclose(plane_config_density(single, r), -plane_point_balayage_density(K21, 2.0, r),
                       rtol=0, atol=0)


def test_plane_balayage_profile_mass():
    prof = plane_balayage_profile(ChargeConfig.single(RieszKernel(3, 1.5), -1.0, 1.3))
    assert prof.mass() == pytest.approx(1.0, abs=1e-9)


# -- ball balayage -------------------------------------------------------------

def test_lambda_star_constant():
    for R, h in [(1.0, 1.0), (2.0, 0.5)]:
        val = lambda_star(K21, R, h) * (R * R + h * h) / h
        assert val == pytest.approx(1 / math.pi**2, rel=1e-14)
    assert lambda_star(RieszKernel(3, 1.0), 1.0, 1.0) == 0.0


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0, 10.0])
def test_mass_closed_form_newton(R):
    assert ball_balayage_mass(RieszKernel(3, 1.0), R, 1.0) == pytest.approx(R / math.sqrt(1 + R * R),
                                                                            abs=1e-10)


def test_mass_limits_and_asymptotics():
    for k in (RieszKernel(3, 1.0), K21, RieszKernel(3, 2.4)):
        assert ball_balayage_mass(k, 1e-6, 1.0) < 1e-4
        assert ball_balayage_mass(k, 1e6, 1.0) > 1 - 1e-3
        s, a = k.s, k.alpha
        R, h = 100.0, 1.0
        predicted = 2 / (a * beta_value(s / 2, a / 2)) * (h / R) ** a
        assert 1 - ball_balayage_mass(k, R, h) == pytest.approx(predicted, rel=0.02)


def test_mass_monotone_grid():
    k = RieszKernel(3, 1.6)
    Rs = np.geomspace(0.05, 50, 20)
    hs = np.geomspace(0.05, 50, 20)
    M = np.array([[ball_balayage_mass(k, R, h) for h in hs] for R in Rs])
    assert np.all((M > 0) & (M < 1))
    assert np.all(np.diff(M, axis=0) >= 0)
    assert np.all(np.diff(M, axis=1) < 0)


def test_mass_matches_density_integral():
    for k, R, h in [(K21, 1.0, 1.0), (RieszKernel(3, 1.5), 2.0, 0.7), (RieszKernel(3, 2.5), 0.8, 1.4)]:
        bal = ball_balayage(k, R, h)
        assert bal.absolutely_continuous_mass() == pytest.approx(bal.mass, rel=1e-10)
        assert bal.boundary_mass == 0.0


def test_newton_endpoint_reports_boundary_mass():
    k = RieszKernel(3, 1.0)
    with pytest.warns(SingularBoundaryWarning):
        ball_balayage_density(k, 1.0, 1.0, 0.5)
    bal = ball_balayage(k, 1.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularBoundaryWarning)
        ac = bal.absolutely_continuous_mass()
    # plane density restricted to B_R integrates to R^3/(R^2+h^2)^(3/2)
    assert ac == pytest.approx(2**-1.5, rel=1e-10)
    assert bal.boundary_mass == pytest.approx(bal.mass - ac, abs=1e-15)
    assert bal.boundary_mass > 0


def test_newton_density_is_plane_restriction():
    k = RieszKernel(3, 1.0)
    r = np.linspace(0, 0.9, 5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularBoundaryWarning)
        got = ball_balayage_density(k, 1.0, 1.0, r)
    assert np.allclose(got, plane_point_balayage_density(k, 1.0, r), rtol=1e-13)


def test_stable_and_integral_densities_agree(rng):
    for _ in range(10):
        d = int(rng.integers(2, 5))
        s = float(rng.uniform(max(d - 2, 0) + 0.1, d - 0.1))
        k = RieszKernel(d, s)
        R, h = float(rng.uniform(0.3, 3)), float(rng.uniform(0.3, 3))
        r = float(rng.uniform(0, 0.99)) * R
        a = ball_balayage_density(k, R, h, r)
        b = ball_balayage_density(k, R, h, r, method="integral")
        assert a == pytest.approx(b, rel=1e-9)


def test_edge_limit_is_lambda_star():
    for k in (K21, RieszKernel(3, 1.5), RieszKernel(4, 3.1)):
        R, h = 1.0, 1.0
        r = R * (1 - 1e-6)
        scaled = (R * R - r * r) ** (k.alpha / 2) * ball_balayage_density(k, R, h, r)
        assert scaled == pytest.approx(lambda_star(k, R, h), rel=1e-4)


def test_gap_at_origin_two_ways():
    R, h = 1.0, 1.0
    direct = R ** K21.alpha * ball_balayage_density(K21, R, h, 0.0, method="integral") - lambda_star(K21, R, h)
    assert lambda_gap(K21, R, h, 0.0) == pytest.approx(direct, rel=1e-8)
    assert lambda_gap(K21, R, h, 0.0) > 0


def test_gap_nonnegative_and_vanishes_at_edge(rng):
    for _ in range(20):
        d = int(rng.integers(2, 4))
        s = float(rng.uniform(max(d - 2, 0) + 0.05, d - 0.05))
        k = RieszKernel(d, s)
        R, h = float(rng.uniform(0.1, 10)), float(rng.uniform(0.1, 10))
        g = lambda_gap(k, R, h, np.linspace(0, R * (1 - 1e-9), 100))
        assert np.all(g >= 0)
    k = RieszKernel(3, 1.5)
    assert lambda_gap(k, 1.0, 1.0, 1 - 1e-12) < 1e-9 * lambda_gap(k, 1.0, 1.0, 0.0)


def test_density_domain_errors():
    with pytest.raises(DomainError):
        ball_balayage_density(K21, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        ball_balayage_density(K21, 1.0, 1.0, 0.5, method="bogus")


def test_potential_identity_on_ball():
    R, h = 1.0, 1.0
    prof = ball_balayage(K21, R, h).profile()
    target = lambda z: (z * z + h * h) ** -0.5
    for z in np.linspace(0.0, 0.95, 10):
        assert radial_potential(prof, float(z)) == pytest.approx(target(z), rel=1e-5)
    for z in np.linspace(1.05, 5.0, 10):
        assert radial_potential(prof, float(z)) <= target(z)
