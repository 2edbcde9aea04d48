"""
Feedback from the value gradient
================================

For linear revenue the value function is affine, so its gradient is a fixed
age profile. Feeding that profile back as a policy recovers the open-loop
optimum from any starting capital stock.
"""

# %%
import numpy as np

from vintage_pmp import (
    LinearRevenue,
    ModelSpec,
    QuadraticCost,
    closed_loop_simulate,
    fb_sweep,
    make_grid,
    stationary_gradient_map,
    truncation_horizon,
)
from vintage_pmp.sweep import discounted_l2

spec = ModelSpec(mu=0.1, lam=0.5, sbar=1.0, revenue=LinearRevenue(1.0), cost=QuadraticCost(1.0, 1.0))
grid = make_grid(spec, 100, truncation_horizon(spec, 1e-8))
profile = stationary_gradient_map(spec, grid)

# %%
for level in (0.0, 0.5, 2.0):
    x = np.full(grid.n_s + 1, level)
    _, u_cl = closed_loop_simulate(x, lambda y: profile, spec, grid)
    u_ol, _, _, _ = fb_sweep(x, spec, grid, tol=1e-10)
    print(f"x = {level}: closed-loop vs open-loop distance {discounted_l2(u_cl - u_ol, spec.lam, grid):.2e}")
