"""Forward state evolution by the method of characteristics.

One step of length ``dt = ds`` moves every vintage one age node older and
multiplies it by ``exp(-mu*dt)``. The distributed investment of step ``k`` is
integrated along the characteristic with the arrival-point rule, and the
boundary investment is injected at ``s = 0``::

    y[k+1, j] = exp(-mu*dt) * y[k, j-1] + dt * u1[k, j]     (j >= 1)
    y[k+1, 0] = u0[k] + dt * u1[k, 0]

The running cost of step ``k`` is

    dt * exp(-lam*(t_k + dt/2)) * g0(exp(-mu*dt/2) * y[k])
        + dt * exp(-lam*t_{k+1}) * h0(u[k])

(state cost at the mid-step, investment paid when it takes effect). With
these rules the costate recursion in :mod:`vintage_pmp.adjoint` is the exact
discrete adjoint.
"""

from __future__ import annotations

import math

import numpy as np

from .convex import g0_value, is_feasible
from .model import ControlPath, Grid, ModelSpec

__all__ = [
    "semigroup_apply",
    "step",
    "evolve_state",
    "output_path",
    "cost_weights",
    "cost_functional",
    "running_costs",
]


def semigroup_apply(f, k: int, mu: float, grid: Grid) -> np.ndarray:
    """Free transport over ``k`` steps: shift by ``k`` ages, decay, zero inflow.

    Applied as ``k`` single steps so that composition is bit-exact and agrees
    with :func:`evolve_state` under zero control.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = np.array(f, dtype=float)
    decay = math.exp(-mu * grid.dt)
    for _ in range(min(k, out.shape[-1])):
        out[..., 1:] = decay * out[..., :-1]
        out[..., 0] = 0.0
    return out


def step(y, u0, u1, mu: float, grid: Grid) -> np.ndarray:
    """One time step of the state; broadcasts over leading (batch) axes."""
    y = np.asarray(y, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    out = np.empty(np.broadcast_shapes(y.shape, u1.shape))
    out[..., 1:] = math.exp(-mu * grid.dt) * y[..., :-1] + grid.dt * u1[..., 1:]
    out[..., 0] = u0 + grid.dt * u1[..., 0]
    return out


def evolve_state(x, u: ControlPath, spec: ModelSpec, grid: Grid) -> np.ndarray:
    """State path ``y`` of shape ``(n_t+1, n_s+1)`` with ``y[0] = x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (grid.n_s + 1,):
        raise ValueError(f"initial profile has shape {x.shape}, expected ({grid.n_s + 1},)")
    u.check(grid)
    y = np.empty((grid.n_t + 1, grid.n_s + 1))
    y[0] = x
    for k in range(grid.n_t):
        y[k + 1] = step(y[k], u.u0[k], u.u1[k], spec.mu, grid)
    return y


def output_path(y, spec: ModelSpec, grid: Grid) -> np.ndarray:
    """Output rate ``Q[k] = int alpha y[k] ds``."""
    return grid.integrate(spec.alpha_profile(grid) * np.asarray(y, dtype=float))


def cost_weights(spec: ModelSpec, grid: Grid):
    """Per-step weights ``(w_state, w_invest)`` of the discounted running cost."""
    t = grid.times[:-1]
    w_state = grid.dt * np.exp(-spec.lam * (t + 0.5 * grid.dt))
    w_invest = grid.dt * np.exp(-spec.lam * (t + grid.dt))
    return w_state, w_invest


def running_costs(y, u: ControlPath, spec: ModelSpec, grid: Grid):
    """Undiscounted ``g0`` (at the mid-step state) and ``h0`` per step."""
    half = math.exp(-0.5 * spec.mu * grid.dt)
    g = g0_value(half * np.asarray(y)[:-1], spec, grid)
    h = 0.5 * spec.cost.gamma0 * u.u0**2 + grid.integrate(0.5 * spec.cost.gamma1 * u.u1**2)
    return g, h


def cost_functional(x, u: ControlPath, spec: ModelSpec, grid: Grid) -> float:
    """Discretised discounted cost; ``math.inf`` for infeasible controls."""
    u.check(grid)
    if not is_feasible(u.u0, u.u1, spec.cost):
        return math.inf
    y = evolve_state(x, u, spec, grid)
    g, h = running_costs(y, u, spec, grid)
    w_state, w_invest = cost_weights(spec, grid)
    return float(np.dot(w_state, g) + np.dot(w_invest, h))

