"""Running costs, their conjugates and the adjoint of the control operator.

All functions broadcast over leading axes, so a whole control or state path
(time along axis 0) can be passed where a single slice is documented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BoxQuadraticCost, Grid, ModelSpec

__all__ = [
    "DualControl",
    "h0_value",
    "h0_conj_grad",
    "h0_conj_value",
    "g0_value",
    "g0_grad",
    "b_star",
    "pairing",
    "is_feasible",
]


@dataclass
class DualControl:
    """Element of the control space paired with controls: ``(z0, z1)``."""

    z0: np.ndarray
    z1: np.ndarray

    def __neg__(self) -> "DualControl":
        return DualControl(-np.asarray(self.z0), -np.asarray(self.z1))


def is_feasible(u0, u1, cost) -> bool:
    (lo0, hi0), (lo1, hi1) = cost.bounds
    u0 = np.asarray(u0)
    u1 = np.asarray(u1)
    return bool(np.all((u0 >= lo0) & (u0 <= hi0)) and np.all((u1 >= lo1) & (u1 <= hi1)))


def h0_value(u0, u1, cost, grid: Grid):
    """Investment cost ``gamma0*u0**2/2 + int gamma1*u1**2/2 ds``.

    Returns ``math.inf`` for a box-constrained cost when any entry lies
    outside the box.
    """
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if isinstance(cost, BoxQuadraticCost) and not is_feasible(u0, u1, cost):
        return math.inf
    val = 0.5 * cost.gamma0 * u0**2 + grid.integrate(0.5 * cost.gamma1 * u1**2)
    return float(val) if np.ndim(val) == 0 else val


def h0_conj_grad(z: DualControl, cost):
    """Gradient of the conjugate cost: the minimiser of ``h0(u) - <z, u>``."""
    (lo0, hi0), (lo1, hi1) = cost.bounds
    u0 = np.clip(np.asarray(z.z0, dtype=float) / cost.gamma0, lo0, hi0)
    u1 = np.clip(np.asarray(z.z1, dtype=float) / cost.gamma1, lo1, hi1)
    return u0, u1


def _conj_1d(z, gamma, lo, hi):
    u = np.clip(z / gamma, lo, hi)
    return z * u - 0.5 * gamma * u * u


def h0_conj_value(z: DualControl, cost, grid: Grid):
    """Closed-form conjugate ``sup_u <z, u> - h0(u)``."""
    (lo0, hi0), (lo1, hi1) = cost.bounds
    z0 = np.asarray(z.z0, dtype=float)
    z1 = np.asarray(z.z1, dtype=float)
    val = _conj_1d(z0, cost.gamma0, lo0, hi0) + grid.integrate(_conj_1d(z1, cost.gamma1, lo1, hi1))
    return float(val) if np.ndim(val) == 0 else val


def g0_value(x, spec: ModelSpec, grid: Grid):
    """State cost ``-R(Q)`` with output ``Q = int alpha x ds``."""
    q = grid.integrate(spec.alpha_profile(grid) * np.asarray(x, dtype=float))
    val = -spec.revenue.value(q)
    return float(val) if np.ndim(val) == 0 else val


def g0_grad(x, spec: ModelSpec, grid: Grid) -> np.ndarray:
    """Profile ``s -> -R'(Q) alpha(s)`` representing the differential of g0."""
    alpha = spec.alpha_profile(grid)
    q = grid.integrate(alpha * np.asarray(x, dtype=float))
    return -np.asarray(spec.revenue.deriv(q))[..., None] * alpha


def b_star(pi_slice) -> DualControl:
    """Adjoint of ``B(u0, u1) = u1 + u0*delta_0``: evaluation at s=0 plus identity."""
    pi_slice = np.asarray(pi_slice, dtype=float)
    return DualControl(pi_slice[..., 0].copy(), pi_slice.copy())


def pairing(z: DualControl, u0, u1, grid: Grid):
    """``z0*u0 + int z1*u1 ds``."""
    return np.asarray(z.z0) * np.asarray(u0) + grid.inner(z.z1, u1)
