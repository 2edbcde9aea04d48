"""Closed-loop simulation with a supplied value-gradient map."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .convex import b_star, h0_conj_grad
from .dynamics import step
from .model import ControlPath, Grid, LinearRevenue, ModelSpec

__all__ = ["closed_loop_simulate", "stationary_gradient_map"]


def closed_loop_simulate(x, gradient_map: Callable[[np.ndarray], np.ndarray], spec: ModelSpec, grid: Grid):
    """Run the state forward under ``u[k] = (h0*)'(-B* gradient_map(y[k]))``.

    Returns the state path and the realised control path.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (grid.n_s + 1,):
        raise ValueError(f"initial profile has shape {x.shape}, expected ({grid.n_s + 1},)")
    y = np.empty((grid.n_t + 1, grid.n_s + 1))
    u = ControlPath.zeros(grid)
    y[0] = x
    for k in range(grid.n_t):
        grad = np.asarray(gradient_map(y[k]), dtype=float)
        if grad.shape != x.shape:
            raise ValueError(f"gradient map returned shape {grad.shape}, expected {x.shape}")
        u.u0[k], u.u1[k] = h0_conj_grad(-b_star(grad), spec.cost)
        y[k + 1] = step(y[k], u.u0[k], u.u1[k], spec.mu, grid)
    return y, u


def stationary_gradient_map(spec: ModelSpec, grid: Grid) -> np.ndarray:
    """Value gradient for linear revenue, which does not depend on the state.

    ``pi(s) = -rho * int_s^sbar exp(-(lam+mu)(r-s)) alpha(r) dr``; closed form
    for constant ``alpha``, adaptive quadrature of the interpolated profile
    otherwise.
    """
    rev = spec.revenue
    if not isinstance(rev, LinearRevenue):
        raise ValueError("no closed-form gradient map for nonlinear revenue")
    c = spec.lam + spec.mu
    s = grid.ages
    if np.isscalar(spec.alpha):
        return -rev.rho * float(spec.alpha) * (1.0 - np.exp(-c * (spec.sbar - s))) / c
    from scipy.integrate import quad

    vals = np.asarray(spec.alpha, dtype=float)
    knots = np.linspace(0.0, spec.sbar, vals.size)

    def alpha(r):
        return np.interp(r, knots, vals)

    out = np.array(
        [quad(lambda r: math.exp(-c * (r - si)) * alpha(r), si, spec.sbar, points=knots)[0] if si < spec.sbar else 0.0
         for si in s]
    )
    return -rev.rho * out
