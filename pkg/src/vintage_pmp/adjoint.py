"""Costate (dual state) of the vintage-capital problem.

The costate solves, backward in time,

    pi[n_t] = 0,
    pi[k] = exp(-lam*dt) * S*(pi[k+1]) + dt*exp(-(lam+mu)*dt/2) * g0'(y_mid[k]),

where ``S*`` shifts one age node toward younger ages with decay
``exp(-mu*dt)`` and ``y_mid[k] = exp(-mu*dt/2) * y[k]``. This is the exact
transpose of :func:`vintage_pmp.dynamics.step` for the discrete cost, so the
derivative of the cost with respect to the control of step ``k`` is
``dt * exp(-lam*t_{k+1}) * (h0'(u[k]) + B* pi[k+1])`` up to round-off.
"""

from __future__ import annotations

import math

import numpy as np

from .convex import DualControl, b_star, g0_grad
from .dynamics import evolve_state
from .model import ControlPath, Grid, ModelSpec

__all__ = [
    "adjoint_semigroup_apply",
    "solve_costate",
    "control_duals",
    "cost_gradient",
    "metric_gradient",
    "costate_discounted_norm",
]


def adjoint_semigroup_apply(f, k: int, mu: float, grid: Grid) -> np.ndarray:
    """Transpose of :func:`~vintage_pmp.dynamics.semigroup_apply`.

    ``out[j] = exp(-mu*k*dt) * f[j+k]`` for ``j + k <= n_s`` and 0 otherwise,
    applied one step at a time. The transpose identity holds exactly for
    profiles vanishing at ``sbar``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = np.array(f, dtype=float)
    decay = math.exp(-mu * grid.dt)
    for _ in range(min(k, out.shape[-1])):
        out[..., :-1] = decay * out[..., 1:]
        out[..., -1] = 0.0
    return out


def solve_costate(y, spec: ModelSpec, grid: Grid) -> np.ndarray:
    """Costate path of shape ``(n_t+1, n_s+1)`` along the state path ``y``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (grid.n_t + 1, grid.n_s + 1):
        raise ValueError(f"state path has shape {y.shape}, expected {(grid.n_t + 1, grid.n_s + 1)}")
    dt = grid.dt
    half = math.exp(-0.5 * spec.mu * dt)
    back = math.exp(-(spec.lam + spec.mu) * dt)
    drive = dt * math.exp(-0.5 * (spec.lam + spec.mu) * dt)
    # driver for all steps at once; the recursion itself is sequential
    driver = drive * g0_grad(half * y[:-1], spec, grid)
    pi = np.zeros_like(y)
    for k in range(grid.n_t - 1, -1, -1):
        pi[k, :-1] = back * pi[k + 1, 1:] + driver[k, :-1]
    return pi


def control_duals(pi) -> DualControl:
    """``B* pi`` seen by the control of each step.

    The control of step ``k`` first acts on the state at ``t_{k+1}``, so it is
    paired with ``pi[k+1]``. Returns arrays with ``n_t`` rows.
    """
    return b_star(np.asarray(pi)[1:])


def _invest_weights(spec: ModelSpec, grid: Grid) -> np.ndarray:
    return grid.dt * np.exp(-spec.lam * grid.times[1:])


def metric_gradient(u: ControlPath, pi, spec: ModelSpec, grid: Grid, include_cost: bool = True):
    """Gradient of the cost in the discounted control metric.

    Equals ``gamma*u + B* pi[k+1]`` per step (``B* pi[k+1]`` alone with
    ``include_cost=False``). The node at ``sbar`` carries no weight and gets 0.
    """
    z = control_duals(pi)
    g0 = np.array(z.z0)
    g1 = np.array(z.z1)
    if include_cost:
        g0 += spec.cost.gamma0 * u.u0
        g1 += spec.cost.gamma1 * u.u1
    g1[:, -1] = 0.0
    return ControlPath(g0, g1)


def cost_gradient(x, u: ControlPath, spec: ModelSpec, grid: Grid, include_cost: bool = True) -> ControlPath:
    """Exact derivative of the discrete cost with respect to every control entry.

    With ``include_cost=False`` only the state part ``G`` is differentiated.
    """
    y = evolve_state(x, u, spec, grid)
    pi = solve_costate(y, spec, grid)
    m = metric_gradient(u, pi, spec, grid, include_cost=include_cost)
    w = _invest_weights(spec, grid)
    return ControlPath(w * m.u0, w[:, None] * grid.weights * m.u1)


def costate_discounted_norm(pi, q: float, lam: float, grid: Grid) -> float:
    """``(sum_k exp(-lam*t_k) * |pi[k]|_{L2}^q * dt)^(1/q)`` over the n_t steps."""
    if q < 1:
        raise ValueError("q must be >= 1")
    pi = np.asarray(pi, dtype=float)[:-1]
    l2 = np.sqrt(grid.integrate(pi * pi))
    return float(np.sum(grid.discount(lam) * l2**q * grid.dt) ** (1.0 / q))
