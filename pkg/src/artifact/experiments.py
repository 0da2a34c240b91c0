"""Limit solver, epsilon sweep, chemorepulsion cross-check and long-time studies."""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .diagnostics import compute_record
from .elliptic import gradient
from .model import (
    Grid,
    ModelParams,
    Monostable,
    ParameterError,
    SimState,
    SolverAbort,
)
from .stepper import (
    CoupledStepper,
    RunResult,
    StepperConfig,
    _check_state,
    coupled_factory,
    integrate,
    neumann_laplacian,
)
from .tridiag import TridiagonalLU, apply_tridiagonal, solve_tridiagonal

log = logging.getLogger(__name__)


def _require_monostable(p: ModelParams) -> None:
    if not isinstance(p.law, Monostable):
        raise ParameterError("this experiment is defined for the monostable law E(u) = 1 - u only")


# -- limit problem  u_t = (delta u + u^2/2)_xx + r u (1 - u) -----------------------------

def mobility_laplacian(u: np.ndarray, h: float, delta: float):
    """Bands of d/dx((delta + u) d/dx .) on the node control volumes, zero end fluxes.

    Face mobility is delta + (u_i + u_{i+1})/2; the half cells at the ends
    double the end rows, matching the ghost reflection of the linear case.
    """
    m = (delta + 0.5 * (u[:-1] + u[1:])) / h**2
    n = u.size
    diag = np.zeros(n)
    diag[:-1] -= m
    diag[1:] -= m
    upper = m.copy()
    lower = m.copy()
    diag[0] *= 2.0
    upper[0] *= 2.0
    diag[-1] *= 2.0
    lower[-1] *= 2.0
    return lower, diag, upper


class LimitStepper:
    """Lagged-mobility IMEX step for the epsilon -> 0 limit equation."""

    def __init__(self, grid: Grid, p: ModelParams, cfg: StepperConfig):
        _require_monostable(p)
        self.grid, self.p, self.cfg = grid, p, cfg

    def advance(self, u: np.ndarray, t: float) -> np.ndarray:
        dt, theta, p = self.cfg.dt, self.cfg.theta, self.p
        lower, diag, upper = mobility_laplacian(u, self.grid.h, p.delta)
        rhs = u.copy()
        if theta < 1.0:
            b = (1.0 - theta) * dt
            rhs = apply_tridiagonal(b * lower, 1.0 + b * diag, b * upper, u)
        if p.r:
            rhs += dt * p.r * u * (1.0 - u)
        a = theta * dt
        u_new = solve_tridiagonal(-a * lower, 1.0 - a * diag, -a * upper, rhs)
        _check_state(u_new, t + dt)
        return u_new


def step_limit(state: SimState, p: ModelParams, cfg: StepperConfig) -> SimState:
    u = LimitStepper(state.grid, p, cfg).advance(state.u, state.t)
    return SimState(state.t + cfg.dt, u, state.grid)


def run_limit(u0, grid: Grid, p: ModelParams, cfg: StepperConfig, t_final: float,
              sample_every: int = 1, diagnostics: bool = False, **kwargs) -> RunResult:
    """Integrate the limit equation; diagnostics use the limiting velocity phi = -u_x."""
    on_sample = None
    if diagnostics:
        on_sample = lambda s: compute_record(s, p, phi=-gradient(s.u, grid.h))  # noqa: E731

    def make_advance(dt):
        return LimitStepper(grid, p, replace(cfg, dt=dt)).advance

    return integrate(make_advance, u0, grid, cfg.dt, t_final, sample_every,
                     on_sample=on_sample, **kwargs)


# -- epsilon sweep -----------------------------------------------------------------------

@dataclass
class SweepResult:
    epsilon_list: list[float]
    errors: list[float]
    runtimes: list[float]
    limit_runtime: float = 0.0
    times: np.ndarray | None = field(default=None, repr=False)

    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("epsilon,error,runtime_seconds\n")
            for e, err, rt in zip(self.epsilon_list, self.errors, self.runtimes):
                fh.write(f"{e:.17g},{err:.17g},{rt:.6f}\n")

    def summary(self, threshold: float | None = None) -> dict:
        out = {
            "epsilon": list(self.epsilon_list),
            "error": list(self.errors),
            "strictly_decreasing": self.strictly_decreasing(),
        }
        if threshold is not None:
            out["threshold_err0"] = threshold
            out["below_threshold"] = bool(self.errors[-1] <= threshold)
            out["pass"] = out["strictly_decreasing"] and out["below_threshold"]
        return out

    def write_summary(self, path, threshold: float | None = None) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(threshold), fh, indent=2)
            fh.write("\n")


def _snapshot_matrix(result: RunResult) -> tuple[np.ndarray, np.ndarray]:
    return (np.array([s.t for s in result.snapshots]),
            np.array([s.u for s in result.snapshots]))


def l2_time_error(grid: Grid, times: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Trapezoidal approximation of int_0^T ||a(t) - b(t)||_2^2 dt."""
    sq = (a - b) ** 2 @ grid.weights
    return float(np.trapezoid(sq, times))


def _coupled_job(args):
    u0, n, p, cfg, T, sample_every = args
    grid = Grid(n)
    start = time.perf_counter()
    try:
        res = integrate(coupled_factory(grid, p, cfg), u0, grid, cfg.dt, T, sample_every)
    except SolverAbort as exc:
        raise SolverAbort(f"epsilon={p.epsilon:g}: {exc}") from exc
    return _snapshot_matrix(res), time.perf_counter() - start


def epsilon_sweep(u0, grid: Grid, p_base: ModelParams, cfg: StepperConfig, T: float,
                  epsilon_list, sample_every: int = 100, workers: int | None = None) -> SweepResult:
    """Compare the coupled solution for each eps with the limit solution on one grid and dt."""
    _require_monostable(p_base)
    eps = [float(e) for e in epsilon_list]
    if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ParameterError("epsilon_list must be positive and strictly decreasing")
    u0 = grid.check(u0, "u0")
    jobs = [(u0, grid.n, replace(p_base, epsilon=e), cfg, T, sample_every) for e in eps]

    start = time.perf_counter()
    limit = run_limit(u0, grid, p_base, cfg, T, sample_every)
    limit_runtime = time.perf_counter() - start
    times, u_lim = _snapshot_matrix(limit)

    workers = workers if workers is not None else min(len(jobs), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_coupled_job, jobs))
    else:
        outputs = [_coupled_job(job) for job in jobs]

    errors, runtimes = [], []
    for (t_eps, u_eps), rt in outputs:
        if not np.array_equal(t_eps, times):
            raise RuntimeError("snapshot schedules differ between runs")
        errors.append(l2_time_error(grid, times, u_eps, u_lim))
        runtimes.append(rt)
    return SweepResult(eps, errors, runtimes, limit_runtime, times)


# -- chemorepulsion ----------------------------------------------------------------------

class ChemorepulsionStepper(CoupledStepper):
    """u_t = delta u_xx + (u psi_x)_x,  -eps psi_xx + psi = u,  u_x = psi_x = 0 at the ends.

    Written as advection by phi = -psi_x, with psi_x differenced at the faces.
    """

    def __init__(self, grid: Grid, p: ModelParams, cfg: StepperConfig):
        super().__init__(grid, p, cfg, velocity_faces=self._face_velocity)
        lower, diag, upper = neumann_laplacian(grid.n, grid.h)
        e = p.epsilon
        self._neumann = TridiagonalLU(-e * lower, 1.0 - e * diag, -e * upper)

    def potential(self, u: np.ndarray) -> np.ndarray:
        return self._neumann.solve(u)

    def _face_velocity(self, u):
        return -np.diff(self.potential(u)) / self.grid.h


def _rep_params(delta: float, epsilon: float) -> ModelParams:
    return ModelParams(delta=delta, epsilon=epsilon, r=0.0, law=Monostable())


def chemorepulsion_crosscheck(u0, grid: Grid, delta: float, epsilon: float, cfg: StepperConfig,
                              T: float, sample_every: int = 100) -> float:
    """Max over snapshots of the L2 distance between the chemorepulsion and model trajectories."""
    p = _rep_params(delta, epsilon)
    u0 = grid.check(u0, "u0")
    rep = integrate(coupled_factory(grid, p, cfg, ChemorepulsionStepper), u0, grid, cfg.dt, T, sample_every)
    model = integrate(coupled_factory(grid, p, cfg), u0, grid, cfg.dt, T, sample_every)
    _, a = _snapshot_matrix(rep)
    _, b = _snapshot_matrix(model)
    return float(np.sqrt(((a - b) ** 2 @ grid.weights).max()))


# -- long-time behaviour -----------------------------------------------------------------

CLASSIFY_DISTANCE = 0.1


@dataclass
class SteadyStateResult:
    limit: float | None
    label: str
    distance: float
    converged: bool
    times: np.ndarray = field(repr=False)
    curve: np.ndarray = field(repr=False)
    run: RunResult = field(repr=False)


def steady_state_study(u0, grid: Grid, p: ModelParams, cfg: StepperConfig, T_max: float,
                       sample_every: int = 100) -> SteadyStateResult:
    """Run until the steady-state detector fires or T_max.

    r = 0: distance to the initial mean. r > 0: nearest of {0, 1}, "undecided"
    if the final distance is not below 0.1.
    """
    _require_monostable(p)
    u0 = grid.check(u0, "u0")
    res = integrate(coupled_factory(grid, p, cfg), u0, grid, cfg.dt, T_max,
                    sample_every, stop_at_steady=True)
    times = np.array([s.t for s in res.snapshots])
    U = np.array([s.u for s in res.snapshots])

    def dist(c):
        return np.sqrt(((U - c) ** 2) @ grid.weights)

    if p.r == 0:
        target = grid.mean(u0)
        curve = dist(target)
        label = "mean"
    else:
        d0, d1 = dist(0.0)[-1], dist(1.0)[-1]
        target = 0.0 if d0 <= d1 else 1.0
        curve = dist(target)
        label = str(int(target)) if curve[-1] < CLASSIFY_DISTANCE else "undecided"
        if label == "undecided":
            target = None
    if not res.steady:
        log.info("steady-state detector did not fire before T_max=%g", T_max)
    return SteadyStateResult(target, label, float(curve[-1]), res.steady, times, curve, res)
