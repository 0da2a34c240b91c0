"""Mild (Duhamel) solutions through the exact Neumann heat semigroup.

Fields on the node grid are expanded in the cosine modes cos(k pi (x+1)/2),
k = 0..n-1, which interpolate the nodes exactly (a type-I DCT). The heat
semigroup damps mode k by exp(-delta (k pi/2)^2 tau). Fluxes vanishing at both
ends are expanded in the matching sine modes so their derivative lands back in
the cosine basis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft

from .elliptic import compute_velocity
from .model import Grid, ModelParams, ParameterError, evaluate_E_tilde

log = logging.getLogger(__name__)


def wavenumbers(n: int) -> np.ndarray:
    return np.arange(n) * (np.pi / 2.0)


@dataclass(frozen=True)
class CosineSpectrum:
    """Amplitudes c_k with v(x_j) = sum_k c_k cos(k pi (x_j + 1)/2)."""

    coefficients: np.ndarray
    grid: Grid

    @classmethod
    def from_field(cls, v: np.ndarray, grid: Grid) -> "CosineSpectrum":
        return cls(_dct_amplitudes(np.asarray(v, dtype=float)), grid)

    def to_field(self) -> np.ndarray:
        return _idct_amplitudes(self.coefficients)


def _dct_amplitudes(v: np.ndarray) -> np.ndarray:
    n = v.shape[-1]
    c = fft.dct(v, type=1, axis=-1) / (n - 1)
    c[..., 0] *= 0.5
    c[..., -1] *= 0.5
    return c


def _idct_amplitudes(c: np.ndarray) -> np.ndarray:
    n = c.shape[-1]
    y = np.array(c, dtype=float, copy=True)
    y[..., 0] *= 2.0
    y[..., -1] *= 2.0
    return fft.idct(y * (n - 1), type=1, axis=-1)


def heat_semigroup_apply(v: np.ndarray, tau: float, delta: float) -> np.ndarray:
    """Exact solution at time tau of w_t = delta w_xx, w_x(+-1) = 0, w(0) = v."""
    if tau < 0:
        raise ParameterError(f"tau must be >= 0, got {tau}")
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    v = np.asarray(v, dtype=float)
    if tau == 0:
        return v.copy()
    c = _dct_amplitudes(v)
    c *= np.exp(-delta * wavenumbers(v.size) ** 2 * tau)
    return _idct_amplitudes(c)


def flux_derivative_spectrum(g: np.ndarray) -> np.ndarray:
    """Cosine amplitudes of dg/dx for a nodal flux with g(+-1) = 0."""
    n = g.size
    b = fft.dst(g[1:-1], type=1) / (n - 1)
    c = np.zeros(n)
    c[1:-1] = b * wavenumbers(n)[1:-1]
    return c


def spectral_derivative(v: np.ndarray) -> np.ndarray:
    """d/dx of the cosine interpolant, evaluated at the nodes."""
    n = v.size
    c = _dct_amplitudes(np.asarray(v, dtype=float))
    b = -c[1:-1] * wavenumbers(n)[1:-1]
    out = np.zeros(n)
    out[1:-1] = fft.idst(b * (n - 1), type=1)
    return out


def w12_norm(v: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.integrate(v**2 + spectral_derivative(v) ** 2)))


def forcing_spectrum(u: np.ndarray, grid: Grid, p: ModelParams) -> np.ndarray:
    """Cosine amplitudes of -d/dx(u phi_u) + r u E(u)."""
    phi = compute_velocity(u, grid, p)
    c = -flux_derivative_spectrum(u * phi)
    if p.r:
        c += p.r * _dct_amplitudes(evaluate_E_tilde(p.law, u))
    return c


def lambda_map(u_traj: np.ndarray, u0: np.ndarray, grid: Grid, p: ModelParams, T: float) -> np.ndarray:
    """Apply the Duhamel map to a trajectory sampled at M equispaced times on [0, T].

    ``u_traj`` has shape (M, n). Row j of the result is
    S(t_j) u0 + int_0^{t_j} S(t_j - s) F(u(s)) ds with the s-integral done by
    the trapezoidal rule on the sample times.
    """
    u_traj = np.asarray(u_traj, dtype=float)
    M = u_traj.shape[0]
    if M < 2:
        raise ParameterError("need at least 2 time samples")
    if not T > 0:
        raise ParameterError(f"T must be positive, got {T}")
    times = np.linspace(0.0, T, M)
    ds = times[1] - times[0]
    lam = p.delta * wavenumbers(grid.n) ** 2
    forcing = np.array([forcing_spectrum(u, grid, p) for u in u_traj])
    c0 = _dct_amplitudes(np.asarray(u0, dtype=float))

    out = np.empty_like(forcing)
    for j, t in enumerate(times):
        acc = np.exp(-lam * t) * c0
        if j > 0:
            w = np.full(j + 1, ds)
            w[0] = w[-1] = 0.5 * ds
            decay = np.exp(-np.outer(t - times[: j + 1], lam))
            acc = acc + np.einsum("m,mk,mk->k", w, decay, forcing[: j + 1])
        out[j] = acc
    return _idct_amplitudes(out)


@dataclass
class PicardResult:
    trajectory: np.ndarray
    times: np.ndarray
    iterations: int
    residual: float
    ratio: float
    converged: bool

    @property
    def contracting(self) -> bool:
        return np.isfinite(self.ratio) and self.ratio < 1.0

    @property
    def final(self) -> np.ndarray:
        return self.trajectory[-1]


def sup_w12_distance(a: np.ndarray, b: np.ndarray, grid: Grid) -> float:
    return max(w12_norm(x - y, grid) for x, y in zip(a, b))


def picard_iterate(u0: np.ndarray, grid: Grid, p: ModelParams, T: float, M: int = 8,
                   tol: float = 1e-10, max_iter: int = 50) -> PicardResult:
    """Fixed-point iteration u <- Lambda(u) from the time-constant guess u(t) = u0.

    The reported ratio is the last residual over the previous one; a ratio of at
    least 1 means the map is not contracting for this T (T too large for the data).
    """
    if not T > 0 or M < 2 or not tol > 0:
        raise ParameterError("picard_iterate needs T > 0, M >= 2, tol > 0")
    u0 = grid.check(u0, "u0")
    traj = np.tile(u0, (M, 1))
    residuals: list[float] = []
    converged = False
    k = 0
    for k in range(1, max_iter + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            new = lambda_map(traj, u0, grid, p, T)
            res = sup_w12_distance(new, traj, grid) if np.all(np.isfinite(new)) else np.inf
        residuals.append(res)
        traj = new
        if res <= tol:
            converged = True
            break
        if not np.isfinite(res) or (len(residuals) > 2 and res >= residuals[-2]):
            break
    if len(residuals) >= 2 and residuals[-2] > 0:
        ratio = residuals[-1] / residuals[-2]
    else:
        ratio = 0.0 if residuals[-1] <= tol else np.inf
    if not np.isfinite(ratio) or ratio >= 1.0:
        log.warning("Picard map not contracting for T=%g: ratio %.3g", T, ratio)
    return PicardResult(traj, np.linspace(0.0, T, M), k, residuals[-1], float(ratio), converged)
