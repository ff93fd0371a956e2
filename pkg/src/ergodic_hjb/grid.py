"""Product grid on the circle times the unit component interval.

Spatial nodes sit at cell left edges ``x_i = i*dx`` (periodic), component
nodes at cell centres ``xi_j = (j + 1/2)*dxi`` with uniform midpoint weight.
Field values are stored as ``(nx, n_xi)`` arrays, i-major.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    nx: int
    n_xi: int

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.n_xi) != self.n_xi:
            raise ValueError("grid sizes must be integers")
        if self.nx < 4 or self.n_xi < 2:
            raise ValueError(
                f"grid too coarse: need nx >= 4 and n_xi >= 2, got ({self.nx}, {self.n_xi})")

    @property
    def dx(self) -> float:
        return 1.0 / self.nx

    @property
    def dxi(self) -> float:
        return 1.0 / self.n_xi

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) / self.nx

    @property
    def xi(self) -> np.ndarray:
        return (np.arange(self.n_xi) + 0.5) / self.n_xi

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.n_xi)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, XI)`` arrays of shape ``(nx, n_xi)``."""
        return np.meshgrid(self.x, self.xi, indexing="ij")


def make_grid(nx: int, n_xi: int) -> Grid:
    return Grid(int(nx), int(n_xi))


@dataclass(frozen=True)
class Field:
    """Real values sampled on every node of a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ValueError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "Field":
        """Sample ``func(X, XI)`` (vectorised) on the grid."""
        X, XI = grid.mesh()
        return cls(grid, np.broadcast_to(func(X, XI), grid.shape))


def _values(v) -> np.ndarray:
    return v.values if isinstance(v, Field) else np.asarray(v, dtype=float)


def check_same_grid(*fields: Field) -> Grid:
    grids = {f.grid for f in fields}
    if len(grids) != 1:
        raise ValueError("grid mismatch")
    return grids.pop()


def diff_minus(field: Field, at: tuple[int, int] | None = None):
    """Backward difference ``(v_i - v_{i-1}) / dx`` with periodic wraparound.

    Returns the whole ``(nx, n_xi)`` array when `at` is None, otherwise the
    scalar at node ``at = (i, j)``.
    """
    v, dx = field.values, field.grid.dx
    if at is None:
        return (v - np.roll(v, 1, axis=0)) / dx
    i, j = _check_index(field.grid, at)
    return (v[i, j] - v[(i - 1) % field.grid.nx, j]) / dx


def diff_plus(field: Field, at: tuple[int, int] | None = None):
    """Forward difference ``(v_{i+1} - v_i) / dx`` with periodic wraparound."""
    v, dx = field.values, field.grid.dx
    if at is None:
        return (np.roll(v, -1, axis=0) - v) / dx
    i, j = _check_index(field.grid, at)
    return (v[(i + 1) % field.grid.nx, j] - v[i, j]) / dx


def _check_index(grid: Grid, at) -> tuple[int, int]:
    i, j = at
    if not (0 <= i < grid.nx and 0 <= j < grid.n_xi):
        raise IndexError(f"node {at} outside grid {grid.shape}")
    return int(i), int(j)


def sup_norm(field) -> float:
    v = _values(field)
    return float(np.max(np.abs(v))) if v.size else 0.0


def lipschitz_x(field: Field) -> float:
    """Largest one-sided slope in x over all nodes."""
    return float(np.max(np.abs(diff_plus(field))))


def field_to_csv(field: Field) -> str:
    """CSV dump with header ``x,xi,value``, i-major, 17 significant digits."""
    grid = field.grid
    buf = io.StringIO()
    buf.write("x,xi,value\n")
    x, xi, v = grid.x, grid.xi, field.values
    for i in range(grid.nx):
        xs = format(float(x[i]), ".17g")
        for j in range(grid.n_xi):
            buf.write(f"{xs},{format(float(xi[j]), '.17g')},{format(float(v[i, j]), '.17g')}\n")
    return buf.getvalue()


def field_from_csv(text: str) -> Field:
    """Inverse of :func:`field_to_csv`."""
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != "x,xi,value":
        raise ValueError("missing 'x,xi,value' header")
    rows = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]])
    nx = len(np.unique(rows[:, 0]))
    n_xi = len(np.unique(rows[:, 1]))
    grid = make_grid(nx, n_xi)
    return Field(grid, rows[:, 2].reshape(nx, n_xi))
