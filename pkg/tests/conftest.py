import math

import numpy as np
import pytest

from vintage_pmp import (
    BoxQuadraticCost,
    CappedQuadraticRevenue,
    LinearRevenue,
    ModelSpec,
    QuadraticCost,
    make_grid,
    truncation_horizon,
)

MU, LAM, SBAR = 0.1, 0.5, 1.0
RATE = LAM + MU


def benchmark_spec(rho=1.0, cost=None, **kw):
    cost = cost if cost is not None else QuadraticCost(1.0, 1.0)
    return ModelSpec(mu=MU, lam=LAM, sbar=SBAR, revenue=LinearRevenue(rho), cost=cost, **kw)


def capped_spec(cost=None):
    cost = cost if cost is not None else QuadraticCost(1.0, 1.0)
    return ModelSpec(mu=MU, lam=LAM, sbar=SBAR, revenue=CappedQuadraticRevenue(1.0, 0.3),
                     cost=cost, alpha=(1.0, 0.8, 0.5))


def box_spec(u1max=0.5):
    return benchmark_spec(cost=BoxQuadraticCost(1.0, 1.0, 0.0, 10.0, 0.0, u1max))


def analytic_costate(s, rho=1.0):
    return -rho * (1.0 - np.exp(-RATE * (SBAR - np.asarray(s)))) / RATE


def bench_grid(spec, n_s, tail_tol=1e-8):
    return make_grid(spec, n_s, truncation_horizon(spec, tail_tol))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def bench20():
    spec = benchmark_spec()
    return spec, bench_grid(spec, 20)


@pytest.fixture
def small_grid():
    spec = benchmark_spec()
    return spec, make_grid(spec, 10, 3.0)


def pi0_exact():
    return -(1.0 - math.exp(-0.6)) / 0.6


ACCEPTANCE_LINES = []


def record_verdict(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
