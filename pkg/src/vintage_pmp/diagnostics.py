"""Scenario files, batch runs and result serialisation.

A scenario is a JSON document::

    {
      "model": {
        "mu": 0.1, "lambda": 0.5, "sbar": 1.0, "p": 2, "omega": 0,
        "alpha": 1.0,                      # constant or list on a uniform age grid
        "revenue": {"kind": "linear", "rho": 1.0},
        "cost": {"kind": "quadratic", "gamma0": 1.0, "gamma1": 1.0}
      },
      "initial": 0.0,                      # constant or list, like alpha
      "grid": {"n_s": 50, "t0": 0.0, "T": null, "tail_tol": 1e-8, "q_bound": null},
      "solver": {"theta": 0.5, "tol": 1e-8, "max_iter": 500,
                 "with_oracle": false, "oracle_tol": 1e-8, "oracle_max_iter": 200,
                 "with_gradient_check": false, "gradient_check_eps": 0.01,
                 "seed": 0}
    }

Revenue kinds: ``linear`` (rho), ``capped_quadratic`` (a, qcap),
``quadratic`` (a, rho, q_bound). Cost kinds: ``quadratic`` (gamma0, gamma1),
``box_quadratic`` (gamma0, gamma1, u0min, u0max, u1min, u1max).
When ``grid.T`` is null the horizon comes from :func:`truncation_horizon`.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .adjoint import solve_costate
from .dynamics import evolve_state, output_path
from .feedback import stationary_gradient_map
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
from .oracle import direct_optimize, value_gradient_check
from .sweep import extremality_certificate, fb_sweep, mp_residual

log = logging.getLogger(__name__)

__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_MODEL",
    "EXIT_SOLVER",
    "ConfigError",
    "discounted_lp_norm",
    "spec_from_dict",
    "spec_to_dict",
    "load_config",
    "ScenarioResult",
    "solve_scenario",
    "emit_results",
    "run_scenario",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_SOLVER = 4

OUTPUT_FIELDS = ("state", "costate", "control_u0", "control_u1", "output", "summary", "config")

SOLVER_DEFAULTS = {
    "theta": 0.5,
    "tol": 1e-8,
    "max_iter": 500,
    "with_oracle": False,
    "oracle_tol": 1e-8,
    "oracle_max_iter": 200,
    "with_gradient_check": False,
    "gradient_check_eps": 1e-2,
    "seed": 0,
}
GRID_DEFAULTS = {"n_s": 50, "t0": 0.0, "T": None, "tail_tol": 1e-8, "q_bound": None}


class ConfigError(ValueError):
    """Malformed or incomplete scenario file."""


def discounted_lp_norm(u: ControlPath, p: float, lam: float, grid: Grid) -> float:
    """``(sum_k exp(-lam*t_k) * (|u0[k]|^2 + |u1[k]|_{L2}^2)^(p/2) * dt)^(1/p)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    sq = u.u0**2 + grid.integrate(u.u1**2)
    return float(np.sum(grid.discount(lam) * sq ** (p / 2) * grid.dt) ** (1.0 / p))


# ---------------------------------------------------------------------------
# config <-> objects
# ---------------------------------------------------------------------------

_REVENUES = {
    "linear": (LinearRevenue, ("rho",), ()),
    "capped_quadratic": (CappedQuadraticRevenue, ("a", "qcap"), ()),
    "quadratic": (QuadraticRevenue, ("a",), ("rho", "q_bound")),
}
_COSTS = {
    "quadratic": (QuadraticCost, ("gamma0", "gamma1"), ()),
    "box_quadratic": (BoxQuadraticCost, ("gamma0", "gamma1", "u0min", "u0max", "u1min", "u1max"), ()),
}


def _number(d, key, where):
    try:
        val = d[key]
    except KeyError:
        raise ConfigError(f"{where}: missing key {key!r}") from None
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {val!r}")
    return float(val)


def _variant(d, table, where):
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError(f"{where}: expected an object with a 'kind'")
    try:
        cls, required, optional = table[d["kind"]]
    except KeyError:
        raise ConfigError(f"{where}: unknown kind {d['kind']!r}") from None
    kwargs = {k: _number(d, k, where) for k in required}
    for k in optional:
        if d.get(k) is not None:
            kwargs[k] = _number(d, k, where)
    unknown = set(d) - {"kind", *required, *optional}
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    return cls(**kwargs)


def _profile(val, where):
    if isinstance(val, bool):
        raise ConfigError(f"{where}: expected a number or list of numbers")
    if isinstance(val, (int, float)):
        return float(val)
    if isinstance(val, list) and len(val) >= 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in val
    ):
        return tuple(float(v) for v in val)
    raise ConfigError(f"{where}: expected a number or a list of at least two numbers")


def spec_from_dict(d: dict) -> ModelSpec:
    if not isinstance(d, dict):
        raise ConfigError("model: expected an object")
    return ModelSpec(
        mu=_number(d, "mu", "model"),
        lam=_number(d, "lambda", "model"),
        sbar=_number(d, "sbar", "model"),
        p=float(d.get("p", 2.0)),
        omega=float(d.get("omega", 0.0)),
        alpha=_profile(d.get("alpha", 1.0), "model.alpha"),
        revenue=_variant(d.get("revenue"), _REVENUES, "model.revenue"),
        cost=_variant(d.get("cost"), _COSTS, "model.cost"),
    )


def _variant_to_dict(obj) -> dict:
    out = {"kind": obj.kind}
    out.update({k: v for k, v in asdict(obj).items() if v is not None})
    return out


def spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "mu": spec.mu,
        "lambda": spec.lam,
        "sbar": spec.sbar,
        "p": spec.p,
        "omega": spec.omega,
        "alpha": spec.alpha if np.isscalar(spec.alpha) else list(spec.alpha),
        "revenue": _variant_to_dict(spec.revenue),
        "cost": _variant_to_dict(spec.cost),
    }


def load_config(path) -> dict:
    """Read a scenario file and fill defaults; raises :class:`ConfigError`."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "model" not in raw:
        raise ConfigError("scenario must be an object with a 'model' section")
    unknown = set(raw) - {"model", "initial", "grid", "solver"}
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    cfg = {
        "model": raw["model"],
        "initial": raw.get("initial", 0.0),
        "grid": {**GRID_DEFAULTS, **raw.get("grid", {})},
        "solver": {**SOLVER_DEFAULTS, **raw.get("solver", {})},
    }
    for section, known in (("grid", GRID_DEFAULTS), ("solver", SOLVER_DEFAULTS)):
        extra = set(cfg[section]) - set(known)
        if extra:
            raise ConfigError(f"{section}: unknown keys {sorted(extra)}")
    check_solver_settings(cfg["solver"])
    return cfg


def check_solver_settings(s: dict) -> None:
    try:
        theta, tol, max_iter = float(s["theta"]), float(s["tol"]), int(s["max_iter"])
        oracle_tol = float(s["oracle_tol"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"solver: {exc}") from exc
    if not 0 < theta <= 1:
        raise ConfigError("solver.theta must lie in (0, 1]")
    if not (tol > 0 and oracle_tol > 0):
        raise ConfigError("solver tolerances must be positive")
    if max_iter < 1:
        raise ConfigError("solver.max_iter must be at least 1")


# ---------------------------------------------------------------------------
# scenario execution
# ---------------------------------------------------------------------------


@dataclass
class ScenarioResult:
    spec: ModelSpec
    grid: Grid
    x: np.ndarray
    u: ControlPath
    y: np.ndarray
    pi: np.ndarray
    summary: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)


def _initial_profile(val, spec: ModelSpec, grid: Grid) -> np.ndarray:
    prof = _profile(val, "initial")
    if np.isscalar(prof):
        return np.full(grid.n_s + 1, prof)
    vals = np.asarray(prof)
    return np.interp(grid.ages, np.linspace(0.0, spec.sbar, vals.size), vals)


def _benchmark_errors(spec: ModelSpec, grid: Grid, u: ControlPath, pi) -> dict | None:
    """Errors against the closed-form stationary solution (linear revenue only)."""
    if not isinstance(spec.revenue, LinearRevenue) or not isinstance(spec.cost, QuadraticCost):
        return None
    if grid.T - grid.t0 < spec.sbar + grid.dt:
        return None
    exact = stationary_gradient_map(spec, grid)
    last = grid.n_t - grid.n_s  # pi is stationary for t_k <= T - sbar
    mask = np.abs(exact[:-1]) > 0
    if not mask.any():
        return {"costate_max_rel_err": 0.0, "control_max_rel_err": 0.0}
    cerr = np.abs(pi[: last + 1, :-1] - exact[:-1])[:, mask] / np.abs(exact[:-1][mask])
    u1_exact = -exact / spec.cost.gamma1
    u0_exact = -exact[0] / spec.cost.gamma0
    uerr1 = np.abs(u.u1[:last, :-1] - u1_exact[:-1])[:, mask] / np.abs(u1_exact[:-1][mask])
    uerr0 = np.abs(u.u0[:last] - u0_exact) / abs(u0_exact)
    return {
        "costate_max_rel_err": float(cerr.max()),
        "control_max_rel_err": float(max(uerr1.max(), uerr0.max())),
    }


def solve_scenario(cfg: dict) -> ScenarioResult:
    """Run the solvers configured in ``cfg`` (as returned by :func:`load_config`).

    Raises :class:`ConfigError` for malformed input and ``ValueError`` (with
    the list of violations) for a model that breaks the standing assumptions.
    """
    spec = spec_from_dict(cfg["model"])
    problems = validate_model(spec)
    if problems:
        raise ValueError("; ".join(problems))
    g, s = cfg["grid"], cfg["solver"]
    try:
        T = g["T"]
        if T is None:
            T = truncation_horizon(spec, float(g["tail_tol"]), t0=float(g["t0"]), q_bound=g["q_bound"])
        grid = make_grid(spec, g["n_s"], float(T), t0=float(g["t0"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grid: {exc}") from exc
    x = _initial_profile(cfg["initial"], spec, grid)

    u, y, pi, report = fb_sweep(x, spec, grid, theta=float(s["theta"]), tol=float(s["tol"]),
                                max_iter=int(s["max_iter"]))
    cert = extremality_certificate(x, u, y, pi, spec, grid, tol=float(s["tol"]))
    summary = {
        "J": report.final_cost,
        "sweep": {
            "iterations": report.iterations,
            "converged": report.converged,
            "residual_history": report.residual_history,
        },
        "mp_residual": cert.mp_residual,
        "certificate": asdict(cert),
        "grid": {"n_s": grid.n_s, "n_t": grid.n_t, "t0": grid.t0, "T": grid.T, "dt": grid.dt},
    }
    bench = _benchmark_errors(spec, grid, u, pi)
    if bench is not None:
        summary["benchmark"] = bench
    if s["with_oracle"]:
        res = direct_optimize(x, spec, grid, tol=float(s["oracle_tol"]), max_iter=int(s["oracle_max_iter"]))
        pi_direct = solve_costate(evolve_state(x, res.u, spec, grid), spec, grid)
        summary["oracle"] = {
            "J": res.J,
            "iterations": res.iterations,
            "converged": res.converged,
            "independent": res.independent,
            "rel_cost_gap": abs(res.J - report.final_cost) / max(1.0, abs(res.J)),
            "mp_residual": mp_residual(res.u, pi_direct, spec.cost, spec.lam, grid),
        }
    if s["with_gradient_check"]:
        rng = np.random.default_rng(int(s["seed"]))
        h = rng.standard_normal(grid.n_s + 1)
        chk = value_gradient_check(x, h, spec, grid, eps=float(s["gradient_check_eps"]),
                                   tol=float(s["oracle_tol"]))
        summary["gradient_check"] = asdict(chk)
    echo = {"model": spec_to_dict(spec), "initial": cfg["initial"], "grid": dict(g), "solver": dict(s)}
    return ScenarioResult(spec, grid, x, u, y, pi, summary, echo)


def _write_field_csv(path: Path, times, ages, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if ages is None:
            w.writerow(["time", "value"])
            for t, v in zip(times, values):
                w.writerow([repr(float(t)), repr(float(v))])
        else:
            w.writerow(["time", "age", "value"])
            for t, row in zip(times, values):
                for a, v in zip(ages, row):
                    w.writerow([repr(float(t)), repr(float(a)), repr(float(v))])


def emit_results(result: ScenarioResult, out_dir, fields=OUTPUT_FIELDS) -> list[str]:
    """Write the requested outputs into ``out_dir`` and return their paths.

    Arrays go to CSV with shortest round-trip float formatting; scalars and
    metadata go to ``summary.json``; ``config.json`` echoes the scenario.
    """
    unknown = set(fields) - set(OUTPUT_FIELDS)
    if unknown:
        raise ValueError(f"unknown output fields {sorted(unknown)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"{out} is not writable")
    grid = result.grid
    t_all, t_ctl = grid.times, grid.times[:-1]
    writers = {
        "state": lambda p: _write_field_csv(p, t_all, grid.ages, result.y),
        "costate": lambda p: _write_field_csv(p, t_all, grid.ages, result.pi),
        "control_u0": lambda p: _write_field_csv(p, t_ctl, None, result.u.u0),
        "control_u1": lambda p: _write_field_csv(p, t_ctl, grid.ages, result.u.u1),
        "output": lambda p: _write_field_csv(p, t_all, None, output_path(result.y, result.spec, grid)),
        "summary": lambda p: p.write_text(json.dumps(result.summary, indent=2, default=_jsonable)),
        "config": lambda p: p.write_text(json.dumps(result.config, indent=2, default=_jsonable)),
    }
    written = []
    for name in fields:
        path = out / (f"{name}.json" if name in ("summary", "config") else f"{name}.csv")
        writers[name](path)
        written.append(str(path))
    return written


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def run_scenario(config_path, out_dir="results", overrides: dict | None = None) -> int:
    """Load, solve and write one scenario; returns a process exit status."""
    try:
        cfg = load_config(config_path)
        for key, val in (overrides or {}).items():
            if val is not None:
                cfg["solver"][key] = val
        check_solver_settings(cfg["solver"])
        result = solve_scenario(cfg)
    except ConfigError as exc:
        log.error("invalid scenario: %s", exc)
        return EXIT_CONFIG
    except ValueError as exc:
        log.error("model assumptions violated: %s", exc)
        return EXIT_MODEL
    emit_results(result, out_dir)
    summary = result.summary
    log.info("J = %.12g after %d sweep iterations", summary["J"], summary["sweep"]["iterations"])
    if not summary["sweep"]["converged"]:
        log.error("forward-backward sweep did not converge")
        return EXIT_SOLVER
    if "oracle" in summary and not summary["oracle"]["converged"]:
        log.error("direct optimiser did not converge")
        return EXIT_SOLVER
    return EXIT_OK

