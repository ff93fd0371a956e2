"""Brute-force references used to cross-check the kernel, solver and sweep.

Each oracle rebuilds what it needs from raw grid samples (kernel matrix,
cost values) and shares no numerical routine with the code it checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid
from .kernel import KernelModel
from .model import HJBModel, uniqueness_sets

MAX_DENSE = 1024


@dataclass(frozen=True)
class OracleResult:
    name: str
    values: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"oracle {self.name} produced non-finite values")


def _dense_theta(kernel: KernelModel) -> np.ndarray:
    K = np.asarray(kernel.K, dtype=float)
    h = 1.0 / K.shape[0]
    return np.diag(K.sum(axis=1) * h) - K * h


def gamma_dense(kernel: KernelModel) -> OracleResult:
    """Perron vector of the discrete adjoint from a full eigendecomposition."""
    n = kernel.K.shape[0]
    if n > MAX_DENSE:
        raise ValueError(f"dense oracle limited to n_xi <= {MAX_DENSE}")
    h = 1.0 / n
    K = np.asarray(kernel.K, dtype=float)
    row = K.sum(axis=1) * h
    adj = (K / row[:, None]).T * h
    w, V = np.linalg.eig(adj)
    k = int(np.argmax(w.real))
    g = np.abs(V[:, k].real)
    g = g / (g.sum() * h)
    return OracleResult("gamma_dense", g, {"eigenvalue": float(w[k].real), "n_xi": n})


def linear_system_solve(kernel: KernelModel, alpha: float, f_xi) -> OracleResult:
    """Solve ``(alpha I + Theta) v = f`` on one x-slice by dense LU with partial pivoting."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    n = kernel.K.shape[0]
    if n > MAX_DENSE:
        raise ValueError(f"dense oracle limited to n_xi <= {MAX_DENSE}")
    A = alpha * np.eye(n) + _dense_theta(kernel)
    v = np.linalg.solve(A, np.asarray(f_xi, dtype=float))
    return OracleResult("linear_system_solve", v, {"alpha": alpha, "n_xi": n})


def mane_potential(model: HJBModel, a_node: int | None = None) -> OracleResult:
    """Minimal action of ``sqrt(f)`` along the circle from the single zero of f.

    Edge weights use the trapezoid rule ``(sqrt f_k + sqrt f_{k+1}) / 2 * dx``;
    the value at each node is the shorter of the two circular paths.
    """
    f = np.asarray(model.f.values, dtype=float)
    if np.ptp(f, axis=1).max() > 0:
        raise ValueError("mane_potential needs a xi-independent cost")
    if a_node is None:
        A = uniqueness_sets(model).A_nodes
        if len(A) != 1:
            raise ValueError(f"zero set must be a single node, got {len(A)}")
        a_node = A[0]
    return OracleResult("mane_potential", _circle_distance(model.grid, f[:, 0], a_node),
                        {"a_node": a_node, "nx": model.grid.nx})


def _circle_distance(grid: Grid, f: np.ndarray, a_node: int) -> np.ndarray:
    s = np.sqrt(np.roll(f, -a_node))
    edge = 0.5 * (s + np.roll(s, -1)) * grid.dx
    forward = np.concatenate([[0.0], np.cumsum(edge[:-1])])
    backward = edge.sum() - forward
    backward[0] = 0.0
    return np.roll(np.minimum(forward, backward), a_node)


def cross_check_suite() -> list[dict]:
    """Run every oracle cross-check at small sizes; one row per check."""
    from .grid import make_grid
    from .kernel import KERNELS, discretize_kernel, perron_gamma
    from .model import instantiate_model, linear_model
    from .solver import solve_discounted

    rows = []
    for n_xi in (16, 64, 128):
        grid = make_grid(4, n_xi)
        for name in KERNELS:
            kernel = perron_gamma(discretize_kernel(name, grid))
            diff = float(np.max(np.abs(kernel.gamma - gamma_dense(kernel).values)))
            rows.append({"check": f"gamma {name} n_xi={n_xi}", "value": diff,
                         "tolerance": 1e-9, "passed": diff <= 1e-9})
    grid = make_grid(8, 64)
    kernel = discretize_kernel("affine-eta", grid)
    profile = np.cos(2 * np.pi * grid.xi) + grid.xi
    for alpha in (1.0, 0.1):
        model = linear_model(grid, np.broadcast_to(profile, grid.shape))
        v, _ = solve_discounted(model, kernel, alpha, tol=1e-12)
        ref = linear_system_solve(kernel, alpha, profile).values
        diff = float(np.max(np.abs(v.values - ref[None, :])))
        rows.append({"check": f"linear mode alpha={alpha}", "value": diff,
                     "tolerance": 1e-9, "passed": diff <= 1e-9})
    grid = make_grid(512, 2)
    model = instantiate_model("scalar-reduction", grid)
    mp = mane_potential(model).values
    x = grid.x
    exact = np.minimum((1 - np.cos(np.pi * x)) / np.pi, (1 + np.cos(np.pi * x)) / np.pi)
    diff = float(np.max(np.abs(mp - exact)))
    rows.append({"check": "mane potential closed form nx=512", "value": diff,
                 "tolerance": 2e-3, "passed": diff <= 2e-3})
    return rows
