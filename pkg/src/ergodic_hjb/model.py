"""Catalog of Hamiltonians ``H = F - f`` and checks of their structural assumptions.

Every catalog entry uses a convex, coercive ``F(x, p, xi) = |p|**m`` with
``F(x, 0, xi) = 0`` and a nonnegative cost ``f`` whose zero set in x is
placed on the grid node ``x = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import Field, Grid

MODELS = ("quad-eikonal", "scalar-reduction", "zero-cost", "power-m")


@dataclass(frozen=True)
class HJBModel:
    name: str
    F: Callable = field(repr=False)
    f: Field = field(repr=False)
    C1: float
    C2: float
    m: float
    slope_bound: float
    dF: Callable | None = field(default=None, repr=False)
    params: dict = field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return self.f.grid

    @property
    def sup_f(self) -> float:
        return float(np.max(np.abs(self.f.values)))

    def dF_dp(self, x, p, xi):
        if self.dF is not None:
            return self.dF(x, p, xi)
        h = 1e-6
        return (self.F(x, p + h, xi) - self.F(x, p - h, xi)) / (2 * h)


@dataclass(frozen=True)
class IndexSets:
    A_nodes: list
    Z_nodes: list


def power_F(m: float):
    def F(x, p, xi):
        return np.abs(p) ** m

    def dF(x, p, xi):
        return m * np.abs(p) ** (m - 1) * np.sign(p)
    return F, dF


def _g_profile(kind: str):
    if kind == "continuous":
        return lambda xi: 1.0 + 0.5 * np.sin(2 * np.pi * xi)
    if kind == "measurable":
        return lambda xi: np.where(xi < 0.5, 1.0, 2.0)
    raise ValueError(f"unknown g profile {kind!r}; expected 'continuous' or 'measurable'")


def slope_bound_for(sup_f: float, C1: float, C2: float, m: float) -> float:
    return ((sup_f + C2) / C1) ** (1.0 / m) + 1.0


def instantiate_model(name: str, grid: Grid, **params) -> HJBModel:
    """Build a catalog model with its cost sampled on `grid`.

    Parameters
    ----------
    name : str
        One of ``quad-eikonal``, ``scalar-reduction``, ``zero-cost``, ``power-m``.
    params
        ``g`` ('continuous' or 'measurable') for the eikonal-type costs and
        ``m`` for ``power-m``.
    """
    m = 2.0
    X, XI = grid.mesh()
    if name == "quad-eikonal":
        g = _g_profile(params.get("g", "continuous"))
        f = (1 - np.cos(2 * np.pi * X)) * g(XI)
    elif name == "scalar-reduction":
        f = np.sin(np.pi * X) ** 2
    elif name == "zero-cost":
        f = np.zeros(grid.shape)
    elif name == "power-m":
        m = float(params.get("m", 3.0))
        if not m > 1:
            raise ValueError(f"(A1) requires m > 1, got m = {m}")
        if m > 4:
            raise ValueError(f"power-m supports m in (1, 4], got m = {m}")
        g = _g_profile(params.get("g", "continuous"))
        f = (1 - np.cos(2 * np.pi * X)) * g(XI)
    else:
        raise ValueError(f"unknown model {name!r}; expected one of {MODELS}")
    F, dF = power_F(m)
    C1, C2 = 1.0, 0.0
    fv = Field(grid, f)
    model = HJBModel(name, F, fv, C1, C2, m,
                     slope_bound_for(float(np.max(f)), C1, C2, m), dF, dict(params))
    _construction_checks(model)
    return model


def linear_model(grid: Grid, f) -> HJBModel:
    """Internal test mode with ``F == 0``: the system reduces to the coupling alone."""
    def F(x, p, xi):
        return np.zeros(np.broadcast(x, p, xi).shape)
    fv = f if isinstance(f, Field) else Field(grid, np.broadcast_to(f, grid.shape))
    return HJBModel("linear", F, fv, 1.0, 0.0, 2.0,
                    slope_bound_for(float(np.max(np.abs(fv.values))), 1.0, 0.0, 2.0), F)


def _construction_checks(model: HJBModel, n_samples: int = 200):
    f = model.f.values
    if f.min() < 0:
        raise ValueError("(A2) violated: cost f takes negative values")
    if not np.any(np.all(f == 0, axis=1)):
        raise ValueError("(A2) violated: f has no common zero in x")
    X, XI = model.grid.mesh()
    if np.any(model.F(X, 0.0, XI) != 0):
        raise ValueError("(A4) violated: F(x, 0, xi) != 0")
    p = np.linspace(-2 * model.slope_bound, 2 * model.slope_bound, n_samples)
    Fp = model.F(0.0, p, 0.5)
    if np.any(Fp < 0):
        raise ValueError("(A4) violated: F takes negative values")
    if np.any(Fp < model.C1 * np.abs(p) ** model.m - model.C2 - 1e-12):
        raise ValueError("(A1) violated: coercivity bound fails")


def validate_assumptions(model: HJBModel, n_samples: int = 1000, seed: int = 42) -> dict:
    """Sample-based check of the structural assumptions (A1)-(A5).

    Returns a report ``{"A1": {...}, ..., "A5": {...}}``; each entry has a
    ``passed`` flag (``None`` for A5, whose moduli are only estimated) and a
    ``witness`` describing the first failing sample, if any.
    """
    rng = np.random.default_rng(seed)
    grid = model.grid
    R = 2 * model.slope_bound
    x = rng.uniform(0, 1, n_samples)
    xi = rng.uniform(0, 1, n_samples)
    p = rng.uniform(-R, R, n_samples)
    q = rng.uniform(-R, R, n_samples)
    report = {}

    Fp = model.F(x, p, xi)
    margin = Fp - (model.C1 * np.abs(p) ** model.m - model.C2)
    report["A1"] = _entry(margin >= -1e-12 * (1 + np.abs(Fp)), lambda k: {
        "x": x[k], "p": p[k], "xi": xi[k]}, min_margin=float(margin.min()))

    f = model.f.values
    neg = np.argwhere(f < 0)
    A = [int(i) for i in np.flatnonzero(np.all(f == 0, axis=1))]
    ok = len(neg) == 0 and len(A) > 0
    witness = None
    if len(neg):
        i, j = neg[0]
        witness = {"node": [int(i), int(j)], "f": float(f[i, j])}
    elif not A:
        witness = {"reason": "no x node with f(x, xi) = 0 for all xi"}
    report["A2"] = {"passed": bool(ok), "witness": witness, "A_nodes": A}

    mid = model.F(x, 0.5 * (p + q), xi)
    avg = 0.5 * (model.F(x, p, xi) + model.F(x, q, xi))
    report["A3"] = _entry(mid <= avg + 1e-12 * (1 + np.abs(avg)), lambda k: {
        "x": x[k], "p": p[k], "q": q[k], "xi": xi[k]})

    F0 = model.F(x, 0.0 * p, xi)
    X, XI = grid.mesh()
    F0_grid = model.F(X, 0.0 * X, XI)
    good = (F0 == 0) & (Fp >= 0)
    entry = _entry(good, lambda k: {"x": x[k], "p": p[k], "xi": xi[k]})
    if np.any(F0_grid != 0):
        i, j = np.argwhere(F0_grid != 0)[0]
        entry = {"passed": False, "witness": {"node": [int(i), int(j)]}}
    report["A4"] = entry

    dfx = np.abs(np.roll(f, -1, axis=0) - f) / grid.dx
    y = (x + rng.uniform(-1e-3, 1e-3, n_samples)) % 1.0
    dFx = np.abs(model.F(y, p, xi) - Fp) / np.maximum(np.abs(y - x), 1e-15)
    report["A5"] = {"passed": None, "witness": None,
                    "f_x_quotient_max": float(dfx.max()),
                    "F_x_quotient_max": float(dFx.max())}
    return report


def _entry(ok: np.ndarray, describe, **extra) -> dict:
    ok = np.asarray(ok, dtype=bool)
    witness = None
    if not ok.all():
        k = int(np.flatnonzero(~ok)[0])
        witness = {key: float(val) for key, val in describe(k).items()}
    return {"passed": bool(ok.all()), "witness": witness, **extra}


def uniqueness_sets(model: HJBModel, tol_zero: float = 0.0) -> IndexSets:
    """Grid versions of the zero set of f in x and of the uniqueness set.

    On the grid every component node carries positive weight, so "f = 0 for
    a.e. xi" coincides with "f = 0 at every xi node".
    """
    if tol_zero < 0:
        raise ValueError("tol_zero must be nonnegative")
    zero = model.f.values <= tol_zero
    A = [int(i) for i in np.flatnonzero(np.all(zero, axis=1))]
    Z = [(i, int(j)) for i in A for j in range(model.grid.n_xi) if zero[i, j]]
    return IndexSets(A, Z)
