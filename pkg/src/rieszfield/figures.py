"""Data sets behind figures 1-6.

Each builder returns ``(header, rows, comment)``; the CLI writes them as CSV.
Parameter sets:

1. ``R0`` against ``gamma in [-10, -1.05]``, d=3, s=2, h=1.
2. density against ``r``, d=3, s=2, gamma=-5, h in {1, 2}.
3. positive part of the pair signed density on the square ``[-8, 8]^2``,
   d=2, s=1, charges -2 at height 1 and +1 at height 3.
4. the same signed density against ``r in [0, 10]``.
5. candidate support radius of the pair (d=3, s=2, h1=1) against
   ``gamma in [0.4, 10]`` with h2=4, and against ``h2 in [2.1, 10]`` with
   gamma=1.  Both sweeps stay inside the compact regime ``q > (1+gamma)/gamma``.
6. candidate equilibrium density of the pair d=3, s=2, h1=1, h2=4 for
   gamma in {1, 3}.

Figures 5 and 6 rest on the ball-support hypothesis and are empirical.
"""

from __future__ import annotations

import numpy as np

from .equilibrium_single import solve_radius, solve_single_attractor
from .kernel_core import ChargeConfig, RieszKernel
from .oracle import candidate_equilibrium, candidate_support_radius
from .weak_admissible import classify_pair, pair_signed_density


def figure_1():
    k = RieszKernel(3, 2.0)
    gammas = np.linspace(-10.0, -1.05, 80)
    rows = [[g, solve_radius(k, g, 1.0)] for g in gammas]
    return ["gamma", "R0"], rows, "figure 1: support radius R0 against gamma (d=3, s=2, h=1)"


def figure_2(points: int = 101):
    k = RieszKernel(3, 2.0)
    rows = []
    for h in (1.0, 2.0):
        sol = solve_single_attractor(k, -5.0, h)
        r = np.linspace(0.0, sol.R0, points)
        dens = np.asarray(sol.density.density(r))
        dens[-1] = 0.0  # vanishes at the edge when s > d-2
        rows += [[h, ri, fi] for ri, fi in zip(r, dens)]
    return (["height", "r", "density"], rows,
            "figure 2: equilibrium density against r (d=3, s=2, gamma=-5, h=1 and h=2)")


def _pair_2d(r):
    return pair_signed_density(RieszKernel(2, 1.0), 1.0, 1.0, 3.0, r)


def figure_3(points: int = 81):
    axis = np.linspace(-8.0, 8.0, points)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    dens = np.maximum(_pair_2d(np.hypot(x, y)), 0.0)
    rows = [[xi, yi, fi] for xi, yi, fi in zip(x.ravel(), y.ravel(), dens.ravel())]
    return (["x", "y", "density_positive_part"], rows,
            "figure 3: positive part of the signed equilibrium density on the plane "
            "(d=2, s=1, charges -2 at height 1, +1 at height 3)")


def figure_4(points: int = 201):
    r = np.linspace(0.0, 10.0, points)
    rows = [[ri, fi] for ri, fi in zip(r, _pair_2d(r))]
    return (["r", "density"], rows,
            "figure 4: signed equilibrium density against r "
            "(d=2, s=1, charges -2 at height 1, +1 at height 3)")


def _pair(k, gamma, h2):
    return ChargeConfig(k, ((-1.0 - gamma, 1.0), (gamma, h2)))


def figure_5():
    k = RieszKernel(3, 2.0)
    rows = []
    for g in np.linspace(0.4, 10.0, 49):
        rows.append(["gamma", g, 4.0, candidate_support_radius(_pair(k, g, 4.0)),
                     classify_pair(k, g, 1.0, 4.0).radius])
    for h2 in np.linspace(2.1, 10.0, 80):
        rows.append(["h2", 1.0, h2, candidate_support_radius(_pair(k, 1.0, h2)),
                     classify_pair(k, 1.0, 1.0, h2).radius])
    return (["sweep", "gamma", "h2", "R0", "R_inclusion"], rows,
            "figure 5: candidate support radius of the attractor-repellent pair against gamma "
            "(h2=4) and against h2 (gamma=1); d=3, s=2, h1=1; empirical")


def figure_6(points: int = 101):
    k = RieszKernel(3, 2.0)
    rows = []
    for g in (1.0, 3.0):
        eq = candidate_equilibrium(_pair(k, g, 4.0))
        r = np.linspace(0.0, eq.R0, points)
        # the edge value is zero; the density formula is singular there
        dens = np.append(np.asarray(eq.density.density(r[:-1])), 0.0)
        rows += [[g, ri, fi] for ri, fi in zip(r, dens)]
    return (["gamma", "r", "density"], rows,
            "figure 6: candidate equilibrium density of the pair against r "
            "(d=3, s=2, h1=1, h2=4, gamma=1 and gamma=3); empirical")


FIGURES = {1: figure_1, 2: figure_2, 3: figure_3, 4: figure_4, 5: figure_5, 6: figure_6}
