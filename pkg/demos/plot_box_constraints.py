"""
Bounded investment and nonlinear revenue
========================================

Investment rates are confined to a box, and revenue saturates above an
output cap. The sweep result is compared with the direct optimiser, and
the active bounds are checked for the right sign.
"""

# %%
import numpy as np

from vintage_pmp import (
    BoxQuadraticCost,
    CappedQuadraticRevenue,
    ModelSpec,
    direct_optimize,
    fb_sweep,
    make_grid,
    truncation_horizon,
)
from vintage_pmp.adjoint import control_duals

spec = ModelSpec(
    mu=0.1, lam=0.5, sbar=1.0,
    revenue=CappedQuadraticRevenue(a=1.0, qcap=0.3),
    cost=BoxQuadraticCost(1.0, 1.0, u0min=0.0, u0max=0.4, u1min=0.0, u1max=0.3),
    alpha=(1.0, 0.8, 0.5),
)
grid = make_grid(spec, 20, truncation_horizon(spec, 1e-8))
x = np.linspace(0.5, 0.2, grid.n_s + 1)

# %%
# Two solvers
# -----------
u, y, pi, rep = fb_sweep(x, spec, grid, tol=1e-10)
direct = direct_optimize(x, spec, grid, tol=1e-9)
print(f"sweep  J = {rep.final_cost:.12f} ({rep.iterations} iterations)")
print(f"direct J = {direct.J:.12f} ({direct.iterations} steps, converged={direct.converged})")

# %%
# Complementarity
# ---------------
# gamma*u + B*pi must vanish off the bounds, be >= 0 at a lower bound and
# <= 0 at an upper bound.
z = control_duals(pi)
g1 = (spec.cost.gamma1 * u.u1 + z.z1)[:, :-1]
v1 = u.u1[:, :-1]
print("at u1max:", v1[v1 == 0.3].size, "entries, max gradient", g1[v1 == 0.3].max())
print("at u1min:", v1[v1 == 0.0].size, "entries, min gradient", g1[v1 == 0.0].min())
inner = (v1 > 0) & (v1 < 0.3)
print("interior stationarity:", np.abs(g1[inner]).max() if inner.any() else 0.0)
