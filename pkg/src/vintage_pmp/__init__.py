"""Maximum-principle solver for optimal investment with vintage capital."""

from .adjoint import (
    adjoint_semigroup_apply,
    control_duals,
    cost_gradient,
    costate_discounted_norm,
    solve_costate,
)
from .convex import (
    DualControl,
    b_star,
    g0_grad,
    g0_value,
    h0_conj_grad,
    h0_conj_value,
    h0_value,
)
from .diagnostics import discounted_lp_norm, emit_results, load_config, run_scenario, solve_scenario
from .dynamics import cost_functional, evolve_state, output_path, semigroup_apply
from .feedback import closed_loop_simulate, stationary_gradient_map
from .model import (
    BoxQuadraticCost,
    CappedQuadraticRevenue,
    ControlPath,
    Grid,
    LinearRevenue,
    ModelSpec,
    QuadraticCost,
    QuadraticRevenue,
    make_grid,
    truncation_horizon,
    validate_model,
)
from .oracle import cost_gradient_fd, direct_optimize, value_at, value_gradient_check
from .sweep import SweepReport, extremality_certificate, fb_sweep, mp_residual

__version__ = "0.1.0"
