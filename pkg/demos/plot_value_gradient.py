"""
The initial costate is the value gradient
=========================================

The minimal cost is computed by direct optimisation (no costate involved)
from perturbed initial stocks, and its difference quotient is compared with
the costate at time zero.
"""

# %%
import numpy as np

from vintage_pmp import CappedQuadraticRevenue, ModelSpec, QuadraticCost, make_grid, truncation_horizon
from vintage_pmp import value_gradient_check

spec = ModelSpec(mu=0.1, lam=0.5, sbar=1.0, revenue=CappedQuadraticRevenue(1.0, 0.3),
                 cost=QuadraticCost(1.0, 1.0), alpha=(1.0, 0.8, 0.5))
grid = make_grid(spec, 20, truncation_horizon(spec, 1e-8))
x = 0.3 * np.exp(-grid.ages)

rng = np.random.default_rng(0)
for _ in range(3):
    h = rng.standard_normal(grid.n_s + 1)
    chk = value_gradient_check(x, h, spec, grid, eps=1e-2)
    print(f"difference quotient {chk.fd_directional:+.8f}   costate {chk.costate_pairing:+.8f}"
          f"   rel err {chk.rel_err:.1e}")
