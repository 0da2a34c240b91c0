"""IMEX finite-difference integrator for the coupled density/velocity system.

Conservative node-based scheme on the trapezoidal control volumes (half cells
at the ends): explicit upwind advection and explicit reaction, theta-implicit
diffusion with ghost-node reflection for the Neumann ends. One tridiagonal
solve (prefactored) per step for diffusion plus one for the velocity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .elliptic import compute_velocity
from .model import (
    POSITIVITY_TOL,
    Grid,
    ModelParams,
    ParameterError,
    SimState,
    SolverAbort,
    evaluate_E,
    validate_params,
)
from .tridiag import TridiagonalLU, apply_tridiagonal

log = logging.getLogger(__name__)

STEADY_TOL = 1e-10


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    theta: float = 1.0
    cfl_safety: float = 0.5
    limiter: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not 0.5 <= self.theta <= 1.0:
            raise ParameterError(f"theta must lie in [0.5, 1], got {self.theta}")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ParameterError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")


def neumann_laplacian(n: int, h: float):
    """Bands of the second-difference matrix with reflected ghost nodes u[-1]=u[1], u[n]=u[n-2]."""
    k = 1.0 / h**2
    diag = np.full(n, -2.0 * k)
    upper = np.full(n - 1, k)
    lower = np.full(n - 1, k)
    upper[0] = 2.0 * k
    lower[-1] = 2.0 * k
    return lower, diag, upper


def _minmod(a, b):
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def face_values(u: np.ndarray, vel_face: np.ndarray, limiter: bool = False) -> np.ndarray:
    """Upwind value of u at interior faces i+1/2 given the face velocity."""
    left, right = u[:-1], u[1:]
    if limiter:
        du = np.diff(u)
        slope = np.zeros_like(u)
        slope[1:-1] = _minmod(du[:-1], du[1:])
        left = left + 0.5 * slope[:-1]
        right = right - 0.5 * slope[1:]
    return np.where(vel_face >= 0.0, left, right)


def advective_divergence(u: np.ndarray, vel_face: np.ndarray, h: float, limiter: bool = False) -> np.ndarray:
    """Control-volume divergence of u*v with zero flux through both boundary faces.

    ``vel_face`` holds the velocity at the n-1 interior faces.
    """
    flux = np.zeros(u.size + 1)
    flux[1:-1] = face_values(u, vel_face, limiter) * vel_face
    div = (flux[1:] - flux[:-1]) / h
    div[0] *= 2.0
    div[-1] *= 2.0
    return div


def cfl_limit(vel_face: np.ndarray, h: float, safety: float) -> float:
    vmax = float(np.max(np.abs(vel_face), initial=0.0))
    return np.inf if vmax == 0.0 else safety * h / vmax


def _check_state(u: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(u)):
        raise SolverAbort("non-finite density", t)
    umin = float(u.min())
    if umin < -POSITIVITY_TOL:
        raise SolverAbort(f"density became negative: min(u) = {umin:.3e} < -{POSITIVITY_TOL:g}", t)


class CoupledStepper:
    """Caches the grid-dependent factorizations for repeated steps of one problem.

    ``velocity_faces`` maps the density to the velocity at the n-1 interior
    faces; by default it interpolates the elliptic velocity from the nodes.
    """

    def __init__(self, grid: Grid, p: ModelParams, cfg: StepperConfig,
                 velocity_faces: Callable[[np.ndarray], np.ndarray] | None = None):
        validate_params(p)
        self.grid, self.p, self.cfg = grid, p, cfg
        lower, diag, upper = neumann_laplacian(grid.n, grid.h)
        a = cfg.theta * cfg.dt * p.delta
        b = (1.0 - cfg.theta) * cfg.dt * p.delta
        self._implicit = TridiagonalLU(-a * lower, 1.0 - a * diag, -a * upper)
        self._explicit = (b * lower, 1.0 + b * diag, b * upper)
        self._velocity_faces = velocity_faces or self._interpolated_velocity

    def _interpolated_velocity(self, u):
        phi = compute_velocity(u, self.grid, self.p)
        return 0.5 * (phi[:-1] + phi[1:])

    def advance(self, u: np.ndarray, t: float) -> np.ndarray:
        """Return u at t + dt."""
        h, dt, p = self.grid.h, self.cfg.dt, self.p
        vel = self._velocity_faces(u)
        limit = cfl_limit(vel, h, self.cfg.cfl_safety)
        if dt > limit:
            raise SolverAbort(
                f"CFL violated: dt={dt:g} exceeds cfl_safety*h/max|phi| = "
                f"{self.cfg.cfl_safety:g}*{h:.6g}/{np.max(np.abs(vel)):.6g} = {limit:.6g}; lower dt",
                t,
            )
        rhs = apply_tridiagonal(*self._explicit, u) if self.cfg.theta < 1.0 else u.copy()
        rhs -= dt * advective_divergence(u, vel, h, self.cfg.limiter)
        if p.r != 0.0:
            rhs += dt * p.r * u * evaluate_E(p.law, u)
        u_new = self._implicit.solve(rhs)
        _check_state(u_new, t + dt)
        return u_new


def step(state: SimState, p: ModelParams, cfg: StepperConfig) -> SimState:
    """Advance one IMEX step. Builds factorizations on every call; use ``run`` for trajectories."""
    u = CoupledStepper(state.grid, p, cfg).advance(state.u, state.t)
    return SimState(state.t + cfg.dt, u, state.grid)


@dataclass
class RunResult:
    snapshots: list[SimState]
    records: list = field(default_factory=list)
    steady: bool = False
    steps: int = 0

    @property
    def final(self) -> SimState:
        return self.snapshots[-1]


def integrate(make_advance, u0: np.ndarray, grid: Grid, dt: float, t_final: float,
              sample_every: int = 1, snapshot_every: int | None = None,
              on_sample: Callable[[SimState], object] | None = None,
              stop_at_steady: bool = False, snapshot_times=None) -> RunResult:
    """Generic driver shared by every solver: repeated steps with sampling.

    ``make_advance(dt)`` returns a function ``advance(u, t) -> u_next``. When
    t_final is not a multiple of dt the last step is shortened to land on it.

    ``on_sample`` is called on the initial state and every ``sample_every``
    steps (and on the final state); its return values are collected as records.
    Snapshots are kept every ``snapshot_every`` steps (default: every sample),
    or, when ``snapshot_times`` is given, at the steps nearest those times.
    The steady-state detector compares u against its value one time unit earlier.
    """
    if not t_final > 0:
        raise ParameterError(f"t_final must be positive, got {t_final}")
    if sample_every < 1:
        raise ParameterError("sample_every must be >= 1")
    snapshot_every = snapshot_every or sample_every
    nsteps = int(round(t_final / dt))
    remainder = t_final - nsteps * dt
    if abs(remainder) <= 1e-9 * max(1.0, t_final):
        remainder = 0.0
    elif remainder < 0:
        nsteps -= 1
        remainder += dt
    if remainder:
        nsteps += 1
    advance = make_advance(dt)
    snap_steps = None
    if snapshot_times is not None:
        snap_steps = {min(nsteps, int(round(t / dt))) for t in snapshot_times if 0 < t <= t_final}
    steps_per_unit = max(1, int(round(1.0 / dt)))

    u = np.array(grid.check(u0, "u0"), dtype=float)
    _check_state(u, 0.0)
    state = SimState(0.0, u, grid)
    result = RunResult(snapshots=[state])
    if on_sample is not None:
        result.records.append(on_sample(state))
    u_ref = u.copy()
    k = 0
    for k in range(1, nsteps + 1):
        t_prev = (k - 1) * dt
        last = k == nsteps
        if last and remainder:
            advance = make_advance(remainder)
        try:
            u = advance(u, t_prev)
        except SolverAbort as exc:
            if exc.t is None:
                raise SolverAbort(str(exc), t_prev) from exc
            raise
        t = t_final if last else k * dt
        steady = False
        if stop_at_steady and k % steps_per_unit == 0:
            steady = np.sqrt(grid.integrate((u - u_ref) ** 2)) <= STEADY_TOL
            u_ref = u.copy()
        sample = k % sample_every == 0 or last or steady
        if snap_steps is None:
            snap = sample and (k % snapshot_every == 0 or last or steady)
        else:
            snap = k in snap_steps or last or steady
        if sample or snap:
            state = SimState(t, u, grid)
            if sample and on_sample is not None:
                result.records.append(on_sample(state))
            if snap:
                result.snapshots.append(state)
        if steady:
            log.info("steady state detected at t=%g", t)
            result.steady = True
            break
    result.steps = k
    return result


def coupled_factory(grid: Grid, p: ModelParams, cfg: StepperConfig, cls=None):
    cls = cls or CoupledStepper
    return lambda dt: cls(grid, p, replace(cfg, dt=dt)).advance


def run(u0: np.ndarray, grid: Grid, p: ModelParams, cfg: StepperConfig, t_final: float,
        sample_every: int = 1, snapshot_every: int | None = None,
        stop_at_steady: bool = False, diagnostics: bool = True, snapshot_times=None) -> RunResult:
    """Integrate the coupled system to ``t_final`` recording diagnostics every ``sample_every`` steps."""
    from .diagnostics import compute_record

    on_sample = (lambda s: compute_record(s, p)) if diagnostics else None
    return integrate(coupled_factory(grid, p, cfg), u0, grid, cfg.dt, t_final, sample_every,
                     snapshot_every, on_sample, stop_at_steady, snapshot_times)
