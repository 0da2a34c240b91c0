"""Domain types for the 1D clustering model: grid, reproduction laws, parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

POSITIVITY_TOL = 1e-10


class ParameterError(ValueError):
    """Raised when model or solver parameters violate their constraints."""


class SolverAbort(RuntimeError):
    """Raised when a time integrator has to stop (negativity, CFL, non-finite values)."""

    def __init__(self, message: str, t: float | None = None):
        if t is not None:
            message = f"{message} (t={t:.17g})"
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class Grid:
    """Uniform node-centred mesh of (-1, 1), endpoints included."""

    n: int
    x: np.ndarray = field(init=False, repr=False, compare=False)
    h: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ParameterError(f"grid needs n >= 3 nodes, got {self.n}")
        x = np.linspace(-1.0, 1.0, self.n)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "h", 2.0 / (self.n - 1))

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights."""
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ values)

    def mean(self, values: np.ndarray) -> float:
        return 0.5 * self.integrate(values)

    def check(self, values: np.ndarray, name: str = "field") -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n,):
            raise ParameterError(f"{name} has shape {values.shape}, grid expects ({self.n},)")
        if not np.all(np.isfinite(values)):
            raise ParameterError(f"{name} contains non-finite values")
        return values


@dataclass(frozen=True)
class Bistable:
    a: float

    def E(self, u):
        return (1.0 - u) * (u - self.a)

    def dE(self, u):
        return -2.0 * u + (self.a + 1.0)

    def d2E(self, u):
        return np.full_like(np.asarray(u, dtype=float), -2.0)


@dataclass(frozen=True)
class Monostable:
    def E(self, u):
        return 1.0 - u

    def dE(self, u):
        return np.full_like(np.asarray(u, dtype=float), -1.0)

    def d2E(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))


@dataclass(frozen=True)
class Custom:
    """User-supplied reproduction law; callables must be vectorised over numpy arrays."""

    E_fn: Callable[[np.ndarray], np.ndarray]
    dE_fn: Callable[[np.ndarray], np.ndarray]
    d2E_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def E(self, u):
        return self.E_fn(u)

    def dE(self, u):
        return self.dE_fn(u)

    def d2E(self, u):
        if self.d2E_fn is None:
            raise NotImplementedError("custom law has no second derivative")
        return self.d2E_fn(u)


ReproductionLaw = Bistable | Monostable | Custom


def evaluate_E(law: ReproductionLaw, u: np.ndarray) -> np.ndarray:
    return np.asarray(law.E(np.asarray(u, dtype=float)), dtype=float)


def evaluate_E_prime(law: ReproductionLaw, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.broadcast_to(np.asarray(law.dE(u), dtype=float), u.shape).copy()


def evaluate_E_tilde(law: ReproductionLaw, u: np.ndarray) -> np.ndarray:
    """Reaction term z * E(z)."""
    u = np.asarray(u, dtype=float)
    return u * evaluate_E(law, u)


@dataclass(frozen=True)
class ModelParams:
    delta: float
    epsilon: float
    r: float
    law: ReproductionLaw

    def __post_init__(self):
        validate_params(self)


def validate_params(p: ModelParams) -> None:
    """Raise ParameterError naming the first violated constraint."""
    for name in ("delta", "epsilon", "r"):
        v = getattr(p, name)
        if not np.isfinite(v):
            raise ParameterError(f"{name} must be finite, got {v}")
    if not p.delta > 0:
        raise ParameterError(f"delta must be positive, got {p.delta}")
    if not p.epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {p.epsilon}")
    if not p.r >= 0:
        raise ParameterError(f"r must be nonnegative, got {p.r}")
    law = p.law
    if isinstance(law, Bistable):
        if not 0.0 < law.a < 1.0:
            raise ParameterError(f"a must lie in (0,1), got {law.a}")
    elif not isinstance(law, (Monostable, Custom)):
        raise ParameterError(f"unknown reproduction law {law!r}")


@dataclass(frozen=True)
class SimState:
    t: float
    u: np.ndarray
    grid: Grid

    def __post_init__(self):
        if not np.isfinite(self.t) or self.t < 0:
            raise ParameterError(f"time must be finite and >= 0, got {self.t}")
        u = self.grid.check(self.u, "u")
        object.__setattr__(self, "u", u)


def xlogx(u: np.ndarray) -> np.ndarray:
    """u log u with the limit value 0 at u = 0 (and for tiny round-off negatives)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 1e-300
    out[pos] = u[pos] * np.log(u[pos])
    return out
