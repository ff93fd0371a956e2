"""Discrete coupling kernel, the coupling operator and its Perron weight.

The kernel is sampled at component-node pairs, ``K[j, l] = k(xi_j, xi_l)``.
All integrals over the component interval use the midpoint rule with weight
``dxi``. The Perron weight ``gamma`` is the positive fixed point of the
discrete adjoint operator

    (A* g)[l] = sum_j K[j, l] / kbar[j] * g[j] * dxi,

so the weighted conservation identity holds to rounding error for the
discrete operator itself.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Field, Grid

KERNELS = ("constant", "affine-eta", "sin-product", "two-band")

DEFAULT_TWO_BAND = ((2.0, 0.5), (1.0, 1.5))


class KernelBoundError(ValueError):
    pass


class PerronError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class KernelModel:
    grid: Grid
    K: np.ndarray = field(repr=False)
    k0: float
    k1: float
    kbar: np.ndarray = field(repr=False)
    name: str = "custom"
    params: dict = field(default_factory=dict)
    gamma: np.ndarray | None = field(default=None, repr=False)
    rayleigh: float | None = None
    iterations: int | None = None


def _kernel_function(name: str, params: dict):
    """Return ``(k(xi, eta), k0, k1)`` for a catalog entry."""
    if name == "constant":
        c = float(params.get("c", 1.0))
        return (lambda s, t: np.full(np.broadcast(s, t).shape, c)), c, c
    if name == "affine-eta":
        return (lambda s, t: 0.5 + t + 0.0 * s), 0.5, 1.5
    if name == "sin-product":
        a = float(params.get("a", 0.5))
        return (lambda s, t: 1.0 + a * np.sin(2 * np.pi * s) * np.sin(2 * np.pi * t)), \
            1.0 - abs(a), 1.0 + abs(a)
    if name == "two-band":
        B = np.asarray(params.get("values", DEFAULT_TWO_BAND), dtype=float)
        if B.shape != (2, 2):
            raise ValueError("two-band 'values' must be a 2x2 table")

        def k(s, t):
            return B[(np.asarray(s) >= 0.5).astype(int), (np.asarray(t) >= 0.5).astype(int)]
        return k, float(B.min()), float(B.max())
    raise ValueError(f"unknown kernel {name!r}; expected one of {KERNELS}")


def discretize_kernel(name: str, grid: Grid, **params) -> KernelModel:
    """Sample a catalog kernel on the component nodes of `grid`.

    ``k0``/``k1`` default to the catalog bounds and may be overridden in
    `params`; every sampled value must lie in ``[k0, k1]`` with ``k0 > 0``.
    """
    k, k0, k1 = _kernel_function(name, params)
    k0 = float(params.get("k0", k0))
    k1 = float(params.get("k1", k1))
    xi = grid.xi
    K = np.array(k(xi[:, None], xi[None, :]), dtype=float)
    if k0 <= 0 or k1 < k0:
        raise KernelBoundError(f"kernel bound violated: need 0 < k0 <= k1, got k0={k0}, k1={k1}")
    if K.min() < k0 or K.max() > k1:
        raise KernelBoundError(
            f"kernel bound violated: sampled range [{K.min()}, {K.max()}] not in [{k0}, {k1}]")
    K.flags.writeable = False
    kbar = _row_totals(K, grid.dxi)
    kbar.flags.writeable = False
    return KernelModel(grid, K, k0, k1, kbar, name=name, params=dict(params))


def _row_totals(K, dxi):
    out = np.zeros(K.shape[0])
    for l in range(K.shape[1]):
        out += K[:, l] * dxi
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ERGODIC_HJB_THREADS", "1")))
    except ValueError:
        return 1


def _theta_rows(K, kbar, dxi, v):
    # fixed summation order l = 0..n_xi-1 keeps results independent of chunking
    acc = np.zeros_like(v)
    for l in range(K.shape[1]):
        acc += K[:, l][None, :] * v[:, l][:, None] * dxi
    return kbar[None, :] * v - acc


def theta_values(kernel: KernelModel, v: np.ndarray) -> np.ndarray:
    """Coupling operator on a raw ``(nx, n_xi)`` array (or one ``(n_xi,)`` row)."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        return _theta_rows(kernel.K, kernel.kbar, kernel.grid.dxi, v[None, :])[0]
    workers = _threads()
    if workers == 1 or v.shape[0] < 2 * workers:
        return _theta_rows(kernel.K, kernel.kbar, kernel.grid.dxi, v)
    chunks = np.array_split(np.arange(v.shape[0]), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda idx: _theta_rows(kernel.K, kernel.kbar, kernel.grid.dxi, v[idx]),
                         chunks)
        return np.concatenate(list(parts), axis=0)


def apply_theta(kernel: KernelModel, field: Field) -> Field:
    """``(Theta v)(i, j) = kbar[j] v(i, j) - sum_l K[j, l] v(i, l) dxi``."""
    if field.grid != kernel.grid:
        raise ValueError("grid mismatch between field and kernel")
    return Field(field.grid, theta_values(kernel, field.values))


def adjoint_matrix(kernel: KernelModel) -> np.ndarray:
    """Matrix of the discrete adjoint: ``A[l, j] = K[j, l] / kbar[j] * dxi``."""
    return (kernel.K / kernel.kbar[:, None]).T * kernel.grid.dxi


def perron_gamma(kernel: KernelModel, tol: float = 1e-12, max_iter: int = 100_000) -> KernelModel:
    """Power iteration for the Perron weight of the discrete adjoint operator.

    Each iterate is rescaled to unit discrete L1 norm; iteration stops when
    successive iterates differ by at most `tol` in sup norm. The weight is
    one more application of the adjoint to the fixed point, normalised so
    that ``sum(gamma) * dxi == 1``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = adjoint_matrix(kernel)
    dxi = kernel.grid.dxi
    g = np.ones(kernel.grid.n_xi)
    g /= g.sum() * dxi
    diff = np.inf
    for it in range(1, max_iter + 1):
        h = A @ g
        h /= h.sum() * dxi
        diff = np.max(np.abs(h - g))
        g = h
        if diff <= tol:
            break
    else:
        raise PerronError(f"power iteration did not converge in {max_iter} steps "
                          f"(last difference {diff:.3e})", residual=diff)
    Ag = A @ g
    rayleigh = float(g @ Ag / (g @ g))
    gamma = Ag / (Ag.sum() * dxi)
    if np.any(gamma <= 0):
        raise PerronError("nonpositive Perron weight entry (positivity violated)")
    gamma.flags.writeable = False
    return replace(kernel, gamma=gamma, rayleigh=rayleigh, iterations=it)


def weighted_identity_residual(kernel: KernelModel, f) -> float:
    """``|sum_j gamma[j] / kbar[j] * (Theta f)[j] * dxi|`` for a per-node profile f."""
    if kernel.gamma is None:
        raise ValueError("gamma unset; run perron_gamma first")
    f = np.asarray(f, dtype=float)
    tf = theta_values(kernel, f)
    return float(abs(np.sum(kernel.gamma / kernel.kbar * tf) * kernel.grid.dxi))


def kernel_report(kernel: KernelModel, n_random: int = 1000, seed: int = 42) -> dict:
    """Summary used by the ``kernel-check`` command."""
    if kernel.gamma is None:
        kernel = perron_gamma(kernel)
    rng = np.random.default_rng(seed)
    res = max(weighted_identity_residual(kernel, rng.uniform(-1, 1, kernel.grid.n_xi))
              for _ in range(n_random))
    return {
        "k0": kernel.k0,
        "k1": kernel.k1,
        "kbar_min": float(kernel.kbar.min()),
        "kbar_max": float(kernel.kbar.max()),
        "gamma_min": float(kernel.gamma.min()),
        "gamma_max": float(kernel.gamma.max()),
        "rayleigh": kernel.rayleigh,
        "identity_residual_max": res,
        "iterations": kernel.iterations,
    }
