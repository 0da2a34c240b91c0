"""Monitored functionals: mass, energy, entropy (Liapunov) and its dissipation."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .elliptic import compute_velocity, gradient
from .model import POSITIVITY_TOL, ModelParams, ParameterError, SimState, xlogx

CSV_HEADER = ("t", "mass", "l1", "l2sq", "liapunov", "dissipation", "grad_sqrt_sq",
              "phi_l2sq", "phi_h1sq", "min_u", "max_u", "grad_u_l2sq")


@dataclass(frozen=True)
class DiagRecord:
    t: float
    mass: float
    l1: float
    l2sq: float
    liapunov: float
    dissipation: float
    grad_sqrt_sq: float
    phi_l2sq: float
    phi_h1sq: float
    min_u: float
    max_u: float
    grad_u_l2sq: float

    def csv_row(self) -> str:
        return ",".join(format(v, ".17g") for v in astuple(self))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def liapunov(u: np.ndarray, grid) -> float:
    return grid.integrate(xlogx(u) - u + 1.0)


def compute_record(state: SimState, p: ModelParams, phi: np.ndarray | None = None) -> DiagRecord:
    """Evaluate every functional at one state (trapezoidal quadrature, central differences).

    The dissipation uses the monostable form
    4 delta |d sqrt(u)|^2 + eps |d phi|^2 + |phi|^2 - r int u log u (1 - u).
    """
    grid, u = state.grid, state.u
    umin = float(u.min())
    if umin < -POSITIVITY_TOL:
        raise ParameterError(f"state has min(u) = {umin:.3e} below -{POSITIVITY_TOL:g}")
    if phi is None:
        phi = compute_velocity(u, grid, p)
    h = grid.h
    integ = grid.integrate

    grad_sqrt_sq = integ(gradient(np.sqrt(np.maximum(u, 0.0)), h) ** 2)
    phi_l2sq = integ(phi**2)
    phi_h1sq = p.epsilon * integ(gradient(phi, h) ** 2) + phi_l2sq
    reaction = -p.r * integ(xlogx(u) * (1.0 - u)) if p.r else 0.0
    l1 = integ(np.abs(u))
    return DiagRecord(
        t=float(state.t),
        mass=0.5 * integ(u),
        l1=l1,
        l2sq=integ(u**2),
        liapunov=liapunov(u, grid),
        dissipation=4.0 * p.delta * grad_sqrt_sq + phi_h1sq + reaction,
        grad_sqrt_sq=grad_sqrt_sq,
        phi_l2sq=phi_l2sq,
        phi_h1sq=phi_h1sq,
        min_u=umin,
        max_u=float(u.max()),
        grad_u_l2sq=integ(gradient(u, h) ** 2),
    )


def check_liapunov_monotone(series, slack: float = 1e-8) -> int | None:
    """Index k of the first record with L(t_k) > L(t_{k-1}) + slack, or None."""
    for k in range(1, len(series)):
        if series[k].liapunov > series[k - 1].liapunov + slack:
            return k
    return None


def dissipation_budget(u0_record: DiagRecord) -> float:
    """1 + ||u0||_2^2 + 2/e + 2<u0>: bound on the time-integrated dissipation."""
    return 1.0 + u0_record.l2sq + 2.0 / math.e + 2.0 * u0_record.mass


def integrated_dissipation(series) -> float:
    t = np.array([rec.t for rec in series])
    d = np.array([rec.dissipation for rec in series])
    return float(np.trapezoid(d, t)) if len(series) > 1 else 0.0


def check_dissipation_budget(series, u0_record: DiagRecord, slack: float = 1e-6) -> float | None:
    """Excess of the trapezoidal time integral of D over the budget, or None if within it."""
    excess = integrated_dissipation(series) - dissipation_budget(u0_record)
    return excess if excess > slack else None


def check_mass_law(series, p: ModelParams, tol_conserved: float = 1e-10,
                   tol_bounded: float = 1e-6) -> tuple[int, float] | None:
    """First (index, deviation) breaking the mean-value law, or None.

    r = 0: the mean is conserved. r > 0: the mean never exceeds max(1, <u0>).
    """
    if not series:
        return None
    m0 = series[0].mass
    for k, rec in enumerate(series):
        if p.r == 0:
            dev = abs(rec.mass - m0)
            if dev > tol_conserved:
                return k, dev
        else:
            dev = rec.mass - max(1.0, m0)
            if dev > tol_bounded:
                return k, dev
    return None


def write_csv(series, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for rec in series:
            fh.write(rec.csv_row() + "\n")


def read_csv(path) -> list[DiagRecord]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected diag header {header}")
        return [DiagRecord(*map(float, line.split(","))) for line in fh if line.strip()]


class TimeDerivativeEnergy:
    """Accumulates sum_k dt * ||(u^{k+1} - u^k)/dt||_2^2 when called on every step."""

    def __init__(self):
        self.prev = None
        self.times: list[float] = []
        self.cumulative: list[float] = []

    def __call__(self, state: SimState) -> float:
        total = self.cumulative[-1] if self.cumulative else 0.0
        if self.prev is not None:
            t0, u0 = self.prev
            dt = state.t - t0
            total += state.grid.integrate((state.u - u0) ** 2) / dt
        self.prev = (state.t, state.u.copy())
        self.times.append(state.t)
        self.cumulative.append(total)
        return total

    def between(self, t0: float, t1: float) -> float:
        t = np.array(self.times)
        c = np.array(self.cumulative)
        return float(np.interp(t1, t, c) - np.interp(t0, t, c))
