"""Screened elliptic velocity equation  -eps * phi'' + phi = f  on (-1, 1), phi(+-1) = 0."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import Grid, ModelParams, ParameterError, evaluate_E
from .tridiag import TridiagonalLU


@dataclass(frozen=True)
class EllipticProblem:
    epsilon: float
    f: np.ndarray
    grid: Grid

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.grid.n < 3:
            raise ParameterError("elliptic solve needs at least 3 nodes")
        object.__setattr__(self, "f", self.grid.check(self.f, "f"))


@lru_cache(maxsize=64)
def _dirichlet_factor(n: int, epsilon: float) -> TridiagonalLU:
    h = 2.0 / (n - 1)
    m = n - 2
    k = epsilon / h**2
    off = np.full(m - 1, -k)
    return TridiagonalLU(off, np.full(m, 1.0 + 2.0 * k), off)


def solve_dirichlet(grid: Grid, epsilon: float, f: np.ndarray) -> np.ndarray:
    """Central-difference solve; the interior rows only see f at interior nodes."""
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n,):
        raise ParameterError(f"f has length {f.size}, grid has {grid.n} nodes")
    phi = np.zeros(grid.n)
    phi[1:-1] = _dirichlet_factor(grid.n, float(epsilon)).solve(f[1:-1])
    return phi


def solve_elliptic(prob: EllipticProblem) -> np.ndarray:
    return solve_dirichlet(prob.grid, prob.epsilon, prob.f)


def gradient(values: np.ndarray, h: float) -> np.ndarray:
    """Central differences inside, second-order one-sided stencils at the ends."""
    return np.gradient(values, h, edge_order=2)


def velocity_forcing(u: np.ndarray, grid: Grid, p: ModelParams) -> np.ndarray:
    return gradient(evaluate_E(p.law, u), grid.h)


def compute_velocity(u: np.ndarray, grid: Grid, p: ModelParams) -> np.ndarray:
    """Dispersal velocity phi solving -eps phi'' + phi = d/dx E(u)."""
    u = grid.check(u, "u")
    return solve_dirichlet(grid, p.epsilon, velocity_forcing(u, grid, p))


def w22_norm(phi: np.ndarray, grid: Grid) -> float:
    """Discrete W^{2,2} norm: L2 norms of phi, its first and its second differences, summed."""
    h = grid.h
    d1 = gradient(phi, h)
    d2 = (phi[:-2] - 2.0 * phi[1:-1] + phi[2:]) / h**2
    l2 = np.sqrt(grid.integrate(phi**2))
    l2_d1 = np.sqrt(grid.integrate(d1**2))
    l2_d2 = np.sqrt(h * np.sum(d2**2))
    return float(l2 + l2_d1 + l2_d2)


def probe_regularity_constant(epsilon_list, f: np.ndarray, grid: Grid) -> list[tuple[float, float]]:
    """Table of (eps, eps * ||phi||_{W22} / ||f||_2) for phi solving the screened problem."""
    f = grid.check(f, "f")
    f_norm = np.sqrt(grid.integrate(f**2))
    table = []
    for eps in epsilon_list:
        phi = solve_dirichlet(grid, eps, f)
        ratio = 0.0 if f_norm == 0.0 else eps * w22_norm(phi, grid) / f_norm
        table.append((float(eps), float(ratio)))
    return table
