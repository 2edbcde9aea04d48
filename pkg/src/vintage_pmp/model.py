"""Problem data for the vintage-capital investment problem.

Capital of age ``s`` in ``[0, sbar]`` at time ``tau`` evolves by

    y_tau + y_s + mu * y = u1,    y(tau, 0) = u0(tau),    y(t0, s) = x(s),

and the firm minimises the discounted cost

    J = int_{t0}^{T} exp(-lam*tau) * [ -R(Q(tau)) + c(u(tau)) ] dtau,
    Q(tau) = int_0^sbar alpha(s) y(tau, s) ds.

Age and time share one step (``dt == ds``) so transport along the
characteristics is an exact index shift.

Quadrature convention
---------------------
Every age integral uses the left-endpoint cell rule: node ``j < n_s`` stands
for the cell ``[s_j, s_{j+1})`` with weight ``ds`` and the node at ``sbar`` has
weight zero (capital reaching the maximal age is scrapped). This is the rule
under which the backward costate recursion is the exact transpose of the
forward state recursion while keeping ``pi(sbar) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

__all__ = [
    "LinearRevenue",
    "CappedQuadraticRevenue",
    "QuadraticRevenue",
    "QuadraticCost",
    "BoxQuadraticCost",
    "ModelSpec",
    "Grid",
    "ControlPath",
    "validate_model",
    "make_grid",
    "truncation_horizon",
]


# ---------------------------------------------------------------------------
# Revenue variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearRevenue:
    """R(Q) = rho * Q."""

    rho: float

    kind = "linear"

    def value(self, q):
        return self.rho * np.asarray(q, dtype=float)

    def deriv(self, q):
        return np.full_like(np.asarray(q, dtype=float), self.rho)

    def slope_bound(self, q_bound=None) -> float:
        return abs(self.rho)


@dataclass(frozen=True)
class CappedQuadraticRevenue:
    """Quadratic revenue on ``[0, qcap]`` with slope-matched linear tails.

    On ``[0, qcap]``: ``R(Q) = a*Q - a*Q**2 / (4*qcap)``, so ``R'(0) = a`` and
    ``R'(qcap) = a/2``. Beyond ``qcap`` the revenue continues linearly with
    slope ``a/2``; below zero it continues linearly with slope ``a``. The
    result is concave, C^1 and sublinear on the whole real line.
    """

    a: float
    qcap: float

    kind = "capped_quadratic"

    def value(self, q):
        q = np.asarray(q, dtype=float)
        a, qc = self.a, self.qcap
        inner = a * q - a * q * q / (4.0 * qc)
        r_cap = 0.75 * a * qc
        upper = r_cap + 0.5 * a * (q - qc)
        return np.where(q < 0.0, a * q, np.where(q > qc, upper, inner))

    def deriv(self, q):
        q = np.asarray(q, dtype=float)
        a, qc = self.a, self.qcap
        return np.where(q < 0.0, a, np.where(q > qc, 0.5 * a, a - a * q / (2.0 * qc)))

    def slope_bound(self, q_bound=None) -> float:
        return abs(self.a)


@dataclass(frozen=True)
class QuadraticRevenue:
    """R(Q) = rho*Q - a*Q**2 (concave, unbounded marginal revenue).

    ``q_bound`` is an optional a-priori bound on |Q| used only to size the
    truncation horizon.
    """

    a: float
    rho: float = 0.0
    q_bound: float | None = None

    kind = "quadratic"

    def value(self, q):
        q = np.asarray(q, dtype=float)
        return self.rho * q - self.a * q * q

    def deriv(self, q):
        q = np.asarray(q, dtype=float)
        return self.rho - 2.0 * self.a * q

    def slope_bound(self, q_bound=None) -> float:
        qb = q_bound if q_bound is not None else self.q_bound
        if qb is None:
            raise ValueError("no a-priori tail bound: quadratic revenue needs a Q bound")
        return abs(self.rho) + 2.0 * abs(self.a) * abs(qb)


Revenue = Union[LinearRevenue, CappedQuadraticRevenue, QuadraticRevenue]


# ---------------------------------------------------------------------------
# Investment cost variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticCost:
    """c0(u0) = gamma0*u0**2/2 and c1(s, v) = gamma1*v**2/2."""

    gamma0: float
    gamma1: float

    kind = "quadratic"

    @property
    def bounds(self):
        inf = math.inf
        return (-inf, inf), (-inf, inf)


@dataclass(frozen=True)
class BoxQuadraticCost:
    """Quadratic cost restricted to a box; +inf outside it."""

    gamma0: float
    gamma1: float
    u0min: float
    u0max: float
    u1min: float
    u1max: float

    kind = "box_quadratic"

    @property
    def bounds(self):
        return (self.u0min, self.u0max), (self.u1min, self.u1max)


Cost = Union[QuadraticCost, BoxQuadraticCost]


# ---------------------------------------------------------------------------
# Model and grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    """All parameters of one vintage-capital problem.

    ``alpha`` is either a constant output weight or a sequence of values on a
    uniform age grid over ``[0, sbar]`` (linearly interpolated onto the
    computational grid).
    """

    mu: float
    lam: float
    sbar: float
    revenue: Revenue
    cost: Cost
    alpha: Union[float, Sequence[float]] = 1.0
    p: float = 2.0
    omega: float = 0.0

    def __post_init__(self):
        if not np.isscalar(self.alpha):
            object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))

    def alpha_profile(self, grid: "Grid") -> np.ndarray:
        if np.isscalar(self.alpha):
            return np.full(grid.n_s + 1, float(self.alpha))
        vals = np.asarray(self.alpha, dtype=float)
        src = np.linspace(0.0, self.sbar, vals.size)
        return np.interp(grid.ages, src, vals)

    def alpha_sup(self) -> float:
        return float(np.max(np.abs(np.atleast_1d(np.asarray(self.alpha, dtype=float)))))


@dataclass(frozen=True)
class Grid:
    """Aligned age/time grid with ``dt == ds``."""

    n_s: int
    n_t: int
    t0: float
    T: float
    ds: float
    dt: float
    ages: np.ndarray = field(repr=False, compare=False)
    times: np.ndarray = field(repr=False, compare=False)

    @property
    def weights(self) -> np.ndarray:
        """Cell-rule quadrature weights on the age nodes."""
        w = np.full(self.n_s + 1, self.ds)
        w[-1] = 0.0
        return w

    def integrate(self, f) -> np.ndarray:
        """Age integral of ``f`` along its last axis."""
        f = np.asarray(f, dtype=float)
        return f[..., :-1].sum(axis=-1) * self.ds

    def inner(self, f, g) -> np.ndarray:
        return self.integrate(np.asarray(f) * np.asarray(g))

    def discount(self, lam: float) -> np.ndarray:
        """exp(-lam * t_k) at the n_t left endpoints."""
        return np.exp(-lam * self.times[:-1])


@dataclass
class ControlPath:
    """Boundary investment ``u0[k]`` and distributed investment ``u1[k, j]``.

    Step ``k`` holds the control on ``[t_k, t_{k+1})``.
    """

    u0: np.ndarray
    u1: np.ndarray

    def __post_init__(self):
        self.u0 = np.asarray(self.u0, dtype=float)
        self.u1 = np.asarray(self.u1, dtype=float)
        if self.u1.ndim != 2 or self.u0.shape != self.u1.shape[:1]:
            raise ValueError(f"inconsistent control shapes {self.u0.shape} and {self.u1.shape}")

    @classmethod
    def zeros(cls, grid: Grid) -> "ControlPath":
        return cls(np.zeros(grid.n_t), np.zeros((grid.n_t, grid.n_s + 1)))

    def copy(self) -> "ControlPath":
        return ControlPath(self.u0.copy(), self.u1.copy())

    def check(self, grid: Grid) -> None:
        if self.u0.shape != (grid.n_t,) or self.u1.shape != (grid.n_t, grid.n_s + 1):
            raise ValueError(
                f"control shape {self.u0.shape}/{self.u1.shape} does not match grid "
                f"(n_t={grid.n_t}, n_s={grid.n_s})"
            )

    def __add__(self, other: "ControlPath") -> "ControlPath":
        return ControlPath(self.u0 + other.u0, self.u1 + other.u1)

    def __sub__(self, other: "ControlPath") -> "ControlPath":
        return ControlPath(self.u0 - other.u0, self.u1 - other.u1)

    def __mul__(self, c: float) -> "ControlPath":
        return ControlPath(c * self.u0, c * self.u1)

    __rmul__ = __mul__


def validate_model(spec: ModelSpec) -> list[str]:
    """Return every violated standing assumption (empty list if none)."""
    problems = []
    if not spec.mu > 0:
        problems.append("mu must be positive")
    if not (math.isfinite(spec.sbar) and spec.sbar > 0):
        problems.append("sbar must be finite and positive")
    if not spec.p >= 2:
        problems.append("p must be at least 2")
    if spec.omega < 0:
        problems.append("omega must be nonnegative")
    if not spec.lam > 2 * spec.omega:
        problems.append("lambda must exceed 2*omega")
    alpha = np.atleast_1d(np.asarray(spec.alpha, dtype=float))
    if not np.all(np.isfinite(alpha)):
        problems.append("alpha must be finite on [0, sbar]")

    rev = spec.revenue
    if isinstance(rev, LinearRevenue):
        if rev.rho < 0:
            problems.append("linear revenue needs rho >= 0")
    elif isinstance(rev, CappedQuadraticRevenue):
        if not rev.a > 0:
            problems.append("capped quadratic revenue needs a > 0")
        if not rev.qcap > 0:
            problems.append("capped quadratic revenue needs qcap > 0")
    elif isinstance(rev, QuadraticRevenue):
        if not rev.a > 0:
            problems.append("quadratic revenue needs a > 0")
    else:
        problems.append(f"unknown revenue variant {type(rev).__name__}")

    cost = spec.cost
    if isinstance(cost, (QuadraticCost, BoxQuadraticCost)):
        if not (cost.gamma0 > 0 and cost.gamma1 > 0):
            problems.append("cost weights gamma0, gamma1 must be positive")
    else:
        problems.append(f"unknown cost variant {type(cost).__name__}")
    if isinstance(cost, BoxQuadraticCost):
        if cost.u0min > cost.u0max or cost.u1min > cost.u1max:
            problems.append("control box has lower bound above upper bound")
        elif not (cost.u0min <= 0 <= cost.u0max and cost.u1min <= 0 <= cost.u1max):
            problems.append("h0*(0)=0 requires 0 in control box")
    elif isinstance(cost, QuadraticCost) and spec.p != 2:
        # gamma*u**2/2 >= a|u|**p + b fails for p > 2
        problems.append("unconstrained quadratic cost is coercive only with p = 2")
    return problems


def make_grid(spec: ModelSpec, n_s: int, T: float, t0: float = 0.0) -> Grid:
    """Aligned grid with ``ds = dt = sbar/n_s``; ``T`` is rounded to a whole step."""
    if int(n_s) != n_s or n_s < 2:
        raise ValueError(f"n_s must be an integer >= 2, got {n_s}")
    if not T > t0:
        raise ValueError(f"horizon T={T} must exceed t0={t0}")
    n_s = int(n_s)
    ds = spec.sbar / n_s
    n_t = max(1, int(round((T - t0) / ds)))
    ages = np.arange(n_s + 1) * ds
    times = t0 + np.arange(n_t + 1) * ds
    return Grid(n_s=n_s, n_t=n_t, t0=t0, T=t0 + n_t * ds, ds=ds, dt=ds, ages=ages, times=times)


def truncation_horizon(
    spec: ModelSpec,
    tail_tol: float,
    t0: float = 0.0,
    step: float | None = None,
    q_bound: float | None = None,
) -> float:
    """Horizon ``T`` at which the a-priori costate tail bound drops below ``tail_tol``.

    The bound is ``rho_max * sup|alpha| * exp(-(lam+mu)(T-t0)) / (lam+mu)`` with
    ``rho_max`` bounding ``|R'|``. When the bound already holds at ``T = t0`` the
    horizon is floored at ``t0 + step`` (``step`` defaults to ``sbar/2``, the
    coarsest admissible grid step).
    """
    if not tail_tol > 0:
        raise ValueError("tail_tol must be positive")
    rate = spec.lam + spec.mu
    scale = spec.revenue.slope_bound(q_bound) * spec.alpha_sup() / rate
    floor = t0 + (spec.sbar / 2 if step is None else step)
    if scale <= tail_tol:
        return floor
    return max(floor, t0 + math.log(scale / tail_tol) / rate)
