import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import benchmark_spec
from vintage_pmp import (
    BoxQuadraticCost,
    CappedQuadraticRevenue,
    ControlPath,
    ModelSpec,
    QuadraticCost,
    QuadraticRevenue,
    make_grid,
    truncation_horizon,
    validate_model,
)


def test_valid_benchmark_has_no_violations():
    assert validate_model(benchmark_spec()) == []


def test_lambda_must_exceed_two_omega():
    spec = ModelSpec(mu=0.1, lam=0.0, sbar=1.0, revenue=benchmark_spec().revenue, cost=QuadraticCost(1, 1))
    assert validate_model(spec) == ["lambda must exceed 2*omega"]


def test_box_must_contain_origin():
    spec = benchmark_spec(cost=BoxQuadraticCost(1, 1, 1.0, 2.0, -1.0, 1.0))
    assert validate_model(spec) == ["h0*(0)=0 requires 0 in control box"]


def test_validation_catches_each_bad_field():
    msgs = validate_model(ModelSpec(mu=-1, lam=0.5, sbar=math.inf, revenue=CappedQuadraticRevenue(-1, 0),
                                    cost=QuadraticCost(0, 1), p=1.5))
    joined = " | ".join(msgs)
    for frag in ("mu", "sbar", "p must", "a > 0", "qcap", "gamma"):
        assert frag in joined


def test_quadratic_cost_with_p_above_two_is_flagged():
    assert any("coercive" in m for m in validate_model(benchmark_spec(p=3.0)))


def test_validate_model_is_idempotent():
    spec = benchmark_spec(p=3.0)
    assert validate_model(spec) == validate_model(spec)


@pytest.mark.parametrize(
    "sbar, n_s, T, ds, n_t, T_adj",
    [(1.0, 4, 2.0, 0.25, 8, 2.0), (1.0, 4, 2.1, 0.25, 8, 2.0), (2.0, 100, 10.0, 0.02, 500, 10.0)],
)
def test_make_grid_examples(sbar, n_s, T, ds, n_t, T_adj):
    spec = ModelSpec(mu=0.1, lam=0.5, sbar=sbar, revenue=benchmark_spec().revenue, cost=QuadraticCost(1, 1))
    g = make_grid(spec, n_s, T)
    assert g.ds == pytest.approx(ds) and g.n_t == n_t and g.T == pytest.approx(T_adj)
    assert g.dt == g.ds
    assert g.ages.shape == (n_s + 1,) and g.times.shape == (n_t + 1,)


def test_make_grid_rejects_bad_input():
    spec = benchmark_spec()
    with pytest.raises(ValueError):
        make_grid(spec, 1, 2.0)
    with pytest.raises(ValueError):
        make_grid(spec, 10, 0.0)


def test_cell_weights():
    g = make_grid(benchmark_spec(), 4, 1.0)
    np.testing.assert_array_equal(g.weights, [0.25, 0.25, 0.25, 0.25, 0.0])
    assert g.integrate(np.ones(5)) == pytest.approx(1.0)


def test_truncation_horizon_analytic():
    T = truncation_horizon(benchmark_spec(), 1e-6)
    assert T == pytest.approx(math.log(1 / (0.6e-6)) / 0.6, rel=1e-14)


def test_truncation_horizon_floor():
    spec = benchmark_spec()
    assert truncation_horizon(spec, 2.0) == pytest.approx(0.5)  # bound 1/0.6 < 2 already at t0
    assert truncation_horizon(spec, 2.0, t0=2.0, step=0.1) == pytest.approx(2.1)


def test_truncation_horizon_needs_q_bound_for_quadratic_revenue():
    spec = ModelSpec(mu=0.1, lam=0.5, sbar=1.0, revenue=QuadraticRevenue(1.0), cost=QuadraticCost(1, 1))
    with pytest.raises(ValueError, match="no a-priori tail bound"):
        truncation_horizon(spec, 1e-6)
    assert truncation_horizon(spec, 1e-6, q_bound=2.0) > 0


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-12, 0.5))
def test_truncation_horizon_monotone_in_tol(tol):
    spec = benchmark_spec()
    assert truncation_horizon(spec, tol / 10) >= truncation_horizon(spec, tol)


def test_capped_revenue_is_concave_c1():
    r = CappedQuadraticRevenue(2.0, 0.5)
    q = np.linspace(-1, 2, 3001)
    d = r.deriv(q)
    assert np.all(np.diff(d) <= 1e-15)
    assert r.deriv(0.0) == pytest.approx(2.0) and r.deriv(0.5) == pytest.approx(1.0)
    fd = np.gradient(r.value(q), q)
    np.testing.assert_allclose(fd[1:-1], d[1:-1], atol=2e-3)


def test_alpha_profile_interpolates():
    spec = benchmark_spec(alpha=(1.0, 0.0))
    g = make_grid(spec, 4, 1.0)
    np.testing.assert_allclose(spec.alpha_profile(g), [1, 0.75, 0.5, 0.25, 0])


def test_control_path_shapes_checked():
    g = make_grid(benchmark_spec(), 4, 1.0)
    with pytest.raises(ValueError):
        ControlPath(np.zeros(3), np.zeros((4, 5)))
    with pytest.raises(ValueError):
        ControlPath(np.zeros(3), np.zeros((3, 5))).check(g)
