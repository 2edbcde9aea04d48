import math

import numpy as np
import pytest

from conftest import benchmark_spec, box_spec, capped_spec
from vintage_pmp import (
    ControlPath,
    cost_functional,
    evolve_state,
    make_grid,
    output_path,
    semigroup_apply,
)
from vintage_pmp.dynamics import step


@pytest.fixture
def setup():
    spec = benchmark_spec()
    return spec, make_grid(spec, 10, 3.0)


def random_control(grid, rng, scale=1.0):
    u = ControlPath(rng.normal(size=grid.n_t) * scale, rng.normal(size=(grid.n_t, grid.n_s + 1)) * scale)
    u.u1[:, -1] = 0.0
    return u


def test_semigroup_identity_and_value(setup):
    spec, grid = setup
    f = np.ones(grid.n_s + 1)
    np.testing.assert_array_equal(semigroup_apply(f, 0, 0.1, grid), f)
    out = semigroup_apply(f, 5, 0.1, grid)  # k*dt = 0.5
    np.testing.assert_allclose(out[grid.ages >= 0.5 - 1e-12], math.exp(-0.05), rtol=1e-14)
    assert not out[grid.ages < 0.5 - 1e-12].any()
    assert not semigroup_apply(f, grid.n_s + 1, 0.1, grid).any()


def test_semigroup_law_bit_exact(setup, rng):
    _, grid = setup
    f = rng.normal(size=grid.n_s + 1)
    for k1 in range(0, 12):
        for k2 in range(0, 12):
            a = semigroup_apply(semigroup_apply(f, k1, 0.1, grid), k2, 0.1, grid)
            np.testing.assert_array_equal(a, semigroup_apply(f, k1 + k2, 0.1, grid))


def test_zero_dynamics(setup):
    spec, grid = setup
    y = evolve_state(np.zeros(grid.n_s + 1), ControlPath.zeros(grid), spec, grid)
    assert y.shape == (grid.n_t + 1, grid.n_s + 1) and not y.any()


def test_free_decay_closed_form(setup):
    spec, grid = setup
    y = evolve_state(np.ones(grid.n_s + 1), ControlPath.zeros(grid), spec, grid)
    for k in range(grid.n_t + 1):
        tau = grid.times[k]
        exact = np.where(np.arange(grid.n_s + 1) >= k, math.exp(-0.1 * tau), 0.0)
        np.testing.assert_allclose(y[k], exact, rtol=1e-13, atol=0)
        np.testing.assert_array_equal(y[k], semigroup_apply(np.ones(grid.n_s + 1), k, 0.1, grid))


def test_boundary_characteristic_closed_form(setup):
    spec, grid = setup
    u = ControlPath.zeros(grid)
    u.u0[:] = 1.0
    y = evolve_state(np.zeros(grid.n_s + 1), u, spec, grid)
    j = np.arange(grid.n_s + 1)
    for k in range(grid.n_t + 1):
        exact = np.where(j < k, np.exp(-0.1 * grid.ages), 0.0)
        np.testing.assert_allclose(y[k], exact, rtol=1e-13, atol=0)


def test_boundary_node_identity(setup, rng):
    spec, grid = setup
    u = random_control(grid, rng)
    y = evolve_state(rng.normal(size=grid.n_s + 1), u, spec, grid)
    np.testing.assert_array_equal(y[1:, 0], u.u0 + grid.dt * u.u1[:, 0])


def test_distributed_source_converges_first_order():
    spec = benchmark_spec()
    mu = spec.mu
    errs = []
    for n_s in (20, 40, 80, 160):
        grid = make_grid(spec, n_s, 2.0)
        u = ControlPath.zeros(grid)
        u.u1[:] = 1.0
        y = evolve_state(np.zeros(n_s + 1), u, spec, grid)
        tau = grid.times[:, None]
        exact = (1 - np.exp(-mu * np.minimum(grid.ages[None, :], tau))) / mu
        errs.append(np.abs(y - exact).max())
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 0.9)


def test_state_map_affine(setup, rng):
    spec, grid = setup
    x = rng.normal(size=grid.n_s + 1)
    u, v = random_control(grid, rng), random_control(grid, rng)
    for a in (0.3, -1.7, 2.5):
        lhs = evolve_state(x, a * u + (1 - a) * v, spec, grid)
        rhs = a * evolve_state(x, u, spec, grid) + (1 - a) * evolve_state(x, v, spec, grid)
        assert np.abs(lhs - rhs).max() <= 1e-12


def test_restart_consistency(setup, rng):
    spec, grid = setup
    x = rng.normal(size=grid.n_s + 1)
    u = random_control(grid, rng)
    y = evolve_state(x, u, spec, grid)
    k1 = 7
    tail = make_grid(spec, grid.n_s, grid.T, t0=grid.times[k1])
    y2 = evolve_state(y[k1], ControlPath(u.u0[k1:], u.u1[k1:]), spec, tail)
    np.testing.assert_array_equal(y2, y[k1:])


def test_step_batches(setup, rng):
    spec, grid = setup
    Y = rng.normal(size=(3, grid.n_s + 1))
    U0, U1 = rng.normal(size=3), rng.normal(size=(3, grid.n_s + 1))
    out = step(Y, U0, U1, spec.mu, grid)
    for i in range(3):
        np.testing.assert_array_equal(out[i], step(Y[i], U0[i], U1[i], spec.mu, grid))


def test_output_path_examples(setup):
    spec, grid = setup
    assert not output_path(np.zeros((3, grid.n_s + 1)), spec, grid).any()
    np.testing.assert_allclose(output_path(np.full((3, grid.n_s + 1), 2.5), spec, grid), 2.5)
    lin = benchmark_spec(alpha=(0.0, 1.0))  # alpha(s) = s
    q = output_path(np.ones((2, grid.n_s + 1)), lin, grid)
    np.testing.assert_allclose(q, 0.5 * (1 - 1 / grid.n_s), rtol=1e-14)


def test_cost_zero_and_infeasible(setup):
    spec, grid = setup
    assert cost_functional(np.zeros(grid.n_s + 1), ControlPath.zeros(grid), spec, grid) == 0.0
    bspec = box_spec(0.5)
    u = ControlPath.zeros(grid)
    u.u1[:] = 0.5
    u.u0[:] = 10.0
    assert math.isfinite(cost_functional(np.ones(grid.n_s + 1), u, bspec, grid))
    u.u1[3, 2] = 0.6
    assert cost_functional(np.ones(grid.n_s + 1), u, bspec, grid) == math.inf


def test_cost_free_decay_matches_double_integral():
    spec = benchmark_spec()
    c = 0.6
    exact = -(1 / c - (1 - math.exp(-c)) / c**2)
    errs = []
    for n_s in (25, 50, 100):
        grid = make_grid(spec, n_s, 3.0)
        J = cost_functional(np.ones(n_s + 1), ControlPath.zeros(grid), spec, grid)
        errs.append(abs(J - exact))
    assert errs[-1] < 2 / 100
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("spec", [benchmark_spec(), capped_spec()], ids=["linear", "capped"])
def test_cost_convex_bow(spec, rng):
    grid = make_grid(spec, 10, 3.0)
    x = rng.uniform(0, 1, grid.n_s + 1)
    worst = -np.inf
    for _ in range(20):
        u, v = random_control(grid, rng), random_control(grid, rng)
        t = rng.uniform()
        bow = cost_functional(x, t * u + (1 - t) * v, spec, grid) - (
            t * cost_functional(x, u, spec, grid) + (1 - t) * cost_functional(x, v, spec, grid)
        )
        worst = max(worst, bow)
    assert worst <= 1e-10


def test_shape_errors(setup):
    spec, grid = setup
    with pytest.raises(ValueError):
        evolve_state(np.zeros(3), ControlPath.zeros(grid), spec, grid)
    with pytest.raises(ValueError):
        semigroup_apply(np.zeros(3), -1, 0.1, grid)
