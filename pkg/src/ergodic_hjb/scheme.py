"""Monotone finite-difference discretisation of the discounted system.

    R(i, j) = alpha v + G(p-, p+) + (Theta v)(i, j) - f(i, j)

with one-sided periodic differences ``p-``, ``p+`` and a numerical
Hamiltonian ``G``:

``"godunov"`` (default)
    ``max(F(max(p-, 0)), F(min(p+, 0)))``, the Godunov flux of a convex F
    minimised at ``p = 0``. It vanishes whenever v has a local minimum, so
    the discrete problem keeps the ergodic constant 0 exactly.
``"lax-friedrichs"``
    ``F((p- + p+)/2) - sigma/2 (p+ - p-)``. Monotone and uniform across
    models, but its dissipation at the minima of v adds an O(sigma*dx)
    shift to the discrete ergodic constant, so ``alpha*v`` stalls at that
    shift instead of tending to 0.

The explicit update ``S(v) = v - tau R(v)`` is monotone when ``sigma``
bounds ``|dF/dp|`` on the slopes present and ``tau (alpha + 2 sigma/dx + k1)
<= safety``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, check_same_grid
from .kernel import KernelModel, theta_values
from .model import HJBModel

SCHEMES = ("godunov", "lax-friedrichs")


@dataclass(frozen=True)
class SchemeParams:
    sigma: float
    tau: float
    safety: float = 0.9
    scheme: str = "godunov"

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if not 0 < self.safety < 1:
            raise ValueError("safety must lie in (0, 1)")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")


def dissipation(model: HJBModel, n_probe: int = 8, spacing: float = 1e-4) -> float:
    """1.1 times the largest sampled |dF/dp| over ``|p| <= 2*slope_bound``.

    The derivative is a difference quotient on a probe of the given spacing,
    taken at ``n_probe**2`` (x, xi) sample points.
    """
    R = 2 * model.slope_bound
    p = np.arange(-R, R + spacing / 2, spacing)
    s = (np.arange(n_probe) + 0.5) / n_probe
    best = 0.0
    for x in s:
        for xi in s:
            Fp = model.F(x, p, xi)
            best = max(best, float(np.max(np.abs(np.diff(Fp)) / spacing)))
    return 1.1 * best


def make_params(model: HJBModel, kernel: KernelModel, alpha: float, safety: float = 0.9,
                sigma: float | None = None, scheme: str = "godunov") -> SchemeParams:
    """Scheme parameters with the largest pseudo-time step the CFL rule allows."""
    if sigma is None:
        sigma = dissipation(model)
    tau = safety / (alpha + 2 * sigma / model.grid.dx + kernel.k1)
    return SchemeParams(sigma, tau, safety, scheme)


def one_sided(v: np.ndarray, dx: float) -> tuple[np.ndarray, np.ndarray]:
    return (v - np.roll(v, 1, axis=0)) / dx, (np.roll(v, -1, axis=0) - v) / dx


def numerical_hamiltonian(model: HJBModel, pm, pp, sigma: float, scheme: str = "godunov"):
    X, XI = model.grid.mesh()
    if scheme == "godunov":
        return np.maximum(model.F(X, np.maximum(pm, 0.0), XI), model.F(X, np.minimum(pp, 0.0), XI))
    if scheme == "lax-friedrichs":
        return model.F(X, 0.5 * (pm + pp), XI) - 0.5 * sigma * (pp - pm)
    raise ValueError(f"unknown scheme {scheme!r}")


def residual_values(model: HJBModel, kernel: KernelModel, alpha: float, v: np.ndarray,
                    sigma: float, f: np.ndarray | None = None,
                    scheme: str = "godunov") -> np.ndarray:
    """Array form of :func:`discrete_residual`; `f` overrides the model cost."""
    pm, pp = one_sided(v, model.grid.dx)
    f = model.f.values if f is None else f
    return alpha * v + numerical_hamiltonian(model, pm, pp, sigma, scheme) \
        + theta_values(kernel, v) - f


def discrete_residual(model: HJBModel, kernel: KernelModel, alpha: float, v: Field,
                      params: SchemeParams) -> Field:
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    check_same_grid(model.f, v)
    if kernel.grid != v.grid:
        raise ValueError("grid mismatch between field and kernel")
    return Field(v.grid, residual_values(model, kernel, alpha, v.values, params.sigma,
                                         scheme=params.scheme))


def update_step(model: HJBModel, kernel: KernelModel, alpha: float, v: Field,
                params: SchemeParams) -> Field:
    """One explicit step ``S(v) = v - tau R(v)``."""
    R = discrete_residual(model, kernel, alpha, v, params)
    return Field(v.grid, v.values - params.tau * R.values)


def linearization(model: HJBModel, v: np.ndarray, sigma: float, scheme: str = "godunov"):
    """Spatial part of the Jacobian plus a correction for the solver's right-hand side.

    Returns ``(lower, upper, correction)``: the derivatives of the numerical
    Hamiltonian with respect to ``v_{i-1}`` and ``v_{i+1}`` (both <= 0; the
    diagonal derivative is ``-(lower + upper)``), and an additive change to
    the residual. The correction is nonzero only for Lax-Friedrichs, where
    dF/dp is clipped to ``[-sigma, sigma]`` and F continued linearly beyond
    the clip so that every Jacobian stays an M-matrix.
    """
    grid = model.grid
    dx = grid.dx
    X, XI = grid.mesh()
    pm, pp = one_sided(v, dx)
    correction = np.zeros_like(v)
    if scheme == "godunov":
        left = model.F(X, np.maximum(pm, 0.0), XI)
        right = model.F(X, np.minimum(pp, 0.0), XI)
        use_left = left >= right
        a = np.where(use_left, model.dF_dp(X, np.maximum(pm, 0.0), XI), 0.0)
        b = np.where(use_left, 0.0, -model.dF_dp(X, np.minimum(pp, 0.0), XI))
        return -a / dx, -b / dx, correction
    pbar = 0.5 * (pm + pp)
    dF = model.dF_dp(X, pbar, XI)
    over = np.abs(dF) > sigma
    if np.any(over):
        pc = _clip_point(model, X[over], XI[over], pbar[over], sigma)
        extended = model.F(X[over], pc, XI[over]) + sigma * np.abs(pbar[over] - pc)
        correction[over] = extended - model.F(X[over], pbar[over], XI[over])
        dF = np.clip(dF, -sigma, sigma)
    return (-dF - sigma) / (2 * dx), (dF - sigma) / (2 * dx), correction


def _clip_point(model, X, XI, p, sigma):
    """Slope between 0 and p where |dF/dp| reaches sigma (bisection)."""
    lo = np.zeros_like(p)
    hi = p.copy()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        over = np.abs(model.dF_dp(X, mid, XI)) > sigma
        hi = np.where(over, mid, hi)
        lo = np.where(over, lo, mid)
    return 0.5 * (lo + hi)
