import math

import numpy as np
import pytest

from rieszfield.equilibrium_single import (
    signed_ball_equilibrium,
    solve_radius,
    solve_single_attractor,
    verify_frostman,
)
from rieszfield.errors import DomainError
from rieszfield.kernel_core import ChargeConfig, RadialProfile, RieszKernel, external_field
from rieszfield.oracle import (
    ParticleSystem,
    candidate_equilibrium,
    candidate_support_radius,
    config_boundary_coefficient,
    discrete_energy,
    histogram_mass,
    initial_positions,
    l1_distance,
    minimize_particles,
    radial_histogram,
    support_radius_estimate,
)

K21 = RieszKernel(2, 1.0)
SINGLE = ChargeConfig.single(K21, -5.0, 1.0)


def _system(positions, config=SINGLE):
    return ParticleSystem(config.kernel, config, np.asarray(positions, dtype=float), 0.0, 0, 0)


# -- energy -------------------------------------------------------------------

def test_discrete_energy_brute_force(rng):
    x = rng.normal(size=(30, 2))
    e = discrete_energy(SINGLE, x)
    n = len(x)
    pair = sum(np.linalg.norm(x[i] - x[j]) ** -1.0 for i in range(n) for j in range(n) if i != j)
    field = sum(external_field(SINGLE, float(np.linalg.norm(p))) for p in x)
    assert e == pytest.approx(pair / n**2 + 2 * field / n, rel=1e-12)


# -- minimization ------------------------------------------------------------------

def test_two_particles_inside_analytic_ball():
    R0 = solve_radius(K21, -5.0, 1.0)
    ps = minimize_particles(SINGLE, 2, seed=3)
    assert np.all(ps.radii < R0)
    assert ps.converged


def test_energy_trace_monotone_and_deterministic():
    a = minimize_particles(SINGLE, 60, seed=5, max_iters=300)
    assert np.all(np.diff(a.energy_trace) <= 0)
    assert a.energy == a.energy_trace[-1]
    b = minimize_particles(SINGLE, 60, seed=5, max_iters=300)
    assert np.array_equal(a.positions, b.positions)
    assert a.iteration_count == b.iteration_count
    with pytest.raises(ValueError):
        a.positions[0, 0] = 1.0


def test_rotation_invariance():
    x0 = initial_positions(SINGLE, 50, seed=9)
    t = 0.7
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    a = minimize_particles(SINGLE, 50, initial=x0)
    b = minimize_particles(SINGLE, 50, initial=x0 @ rot.T)
    # rounding differences grow along the trajectory; the minimum does not move
    assert np.allclose(a.energy_trace[:10], b.energy_trace[:10], rtol=1e-10)
    assert a.converged and b.converged
    assert a.energy == pytest.approx(b.energy, rel=1e-9)


def test_minimize_argument_checks():
    with pytest.raises(DomainError):
        minimize_particles(SINGLE, 1)
    with pytest.raises(DomainError):
        minimize_particles(ChargeConfig.single(K21, -1.0, 1.0), 10)
    with pytest.raises(DomainError):
        minimize_particles(SINGLE, 5, initial=np.zeros((4, 2)))


def test_initial_positions_in_disk():
    x = initial_positions(SINGLE, 500, seed=1)
    assert x.shape == (500, 2)
    assert np.linalg.norm(x, axis=1).max() <= 2.0


def test_critical_charge_spreads_with_n():
    # diagnostic only: with gamma = -1 the outermost particle moves out as N grows
    crit = ChargeConfig.single(K21, -1.0, 1.0)
    radii = [minimize_particles(crit, n, seed=0, max_iters=400, require_compact=False).radii.max()
             for n in (20, 80)]
    assert all(np.isfinite(radii))


# -- summaries -----------------------------------------------------------------

def test_support_radius_quantiles(rng):
    ang = rng.uniform(0, 2 * math.pi, 40)
    ring = _system(np.c_[np.cos(ang), np.sin(ang)])
    for q in (0.1, 0.99, 1.0):
        assert support_radius_estimate(ring, q) == pytest.approx(1.0, rel=1e-14)
    cloud = _system(rng.normal(size=(200, 2)))
    assert support_radius_estimate(cloud, 1.0) >= support_radius_estimate(cloud, 0.99)
    with pytest.raises(DomainError):
        support_radius_estimate(cloud, 0.0)


def test_histogram_shell_and_mass(rng):
    eps = 1e-3
    ang = rng.uniform(0, 2 * math.pi, 300)
    r = 1 + rng.uniform(-eps, eps, 300)
    shell = _system(np.c_[r * np.cos(ang), r * np.sin(ang)])
    prof = radial_histogram(shell, bins=20)
    counts = prof.f * np.diff(prof.bin_edges**2) * math.pi
    assert counts[-1] == pytest.approx(1.0)
    assert histogram_mass(prof) == pytest.approx(1.0, abs=1e-14)
    cloud = _system(rng.normal(size=(123, 2)))
    assert histogram_mass(radial_histogram(cloud, bins=7)) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DomainError):
        radial_histogram(cloud, bins=0)


def test_l1_distance_basic():
    k = RieszKernel(3, 2.0)
    p = RadialProfile.from_function(k, 1.0, lambda r: np.full_like(np.asarray(r, float), 3 / (4 * math.pi)))
    assert l1_distance(p, p) == pytest.approx(0.0, abs=1e-14)
    q = RadialProfile.from_function(k, 2.0, lambda r: np.full_like(np.asarray(r, float), 3 / (32 * math.pi)))
    # uniform on B_1 vs uniform on B_2: |p - q| integrates to 2 (1 - 1/8)
    assert l1_distance(p, q) == pytest.approx(1.75, rel=1e-6)


def test_small_run_tracks_analytic_density():
    sol = solve_single_attractor(K21, -5.0, 1.0)
    ps = minimize_particles(SINGLE, 200, seed=1)
    assert 0.75 * sol.R0 < support_radius_estimate(ps) < 1.05 * sol.R0
    assert l1_distance(radial_histogram(ps, bins=8), sol.density) < 0.4


# -- candidate radius for several charges ----------------------------------------------

def test_candidate_radius_matches_single_solver():
    k = RieszKernel(3, 2.0)
    for g, h in [(-5.0, 1.0), (-2.0, 0.5)]:
        c = ChargeConfig.single(k, g, h)
        assert candidate_support_radius(c) == pytest.approx(solve_radius(k, g, h), rel=1e-12)


def test_candidate_pair_passes_frostman():
    k = RieszKernel(3, 2.0)
    pair = ChargeConfig(k, [(-2.0, 1.0), (1.0, 4.0)])
    ce = candidate_equilibrium(pair)
    assert ce.R0 == pytest.approx(2.874069519970021, rel=1e-9)
    assert abs(config_boundary_coefficient(pair, ce.R0)) < 1e-10
    assert ce.mass_check == pytest.approx(1.0, abs=1e-6)
    assert signed_ball_equilibrium(pair, R=ce.R0).mass == pytest.approx(1.0, abs=1e-12)
    rep = verify_frostman(ce, pair)
    assert rep.passed
