"""Uniform grids, discrete differential operators, and quadrature.

1D intervals (0, L) and tensor-product rectangles (0, Lx) x (0, Ly) only.
Fields are nodal; gradients live on cells.  Integrals use the midpoint
(cell-average) rule: int f ~ h * sum of per-cell values.  The forward
difference per cell is exact on affine fields, and the midpoint rule is
exact on affine integrands, which keeps the flux-form solvers conservative
to roundoff.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on (0, L): nodes x_i = i*h, i = 0..n_cells."""

    length: float
    n_cells: int

    def __post_init__(self):
        if not (self.length > 0):
            raise ContractError(f"length must be positive, got {self.length}")
        if self.n_cells < 4:
            raise ContractError(f"n_cells must be >= 4, got {self.n_cells}")

    @property
    def ndim(self):
        return 1

    @property
    def h(self):
        return self.length / self.n_cells

    @property
    def n_nodes(self):
        return self.n_cells + 1

    @property
    def nodes(self):
        return np.linspace(0.0, self.length, self.n_cells + 1)

    @property
    def cell_midpoints(self):
        return (np.arange(self.n_cells) + 0.5) * self.h

    def midpoint_index(self):
        """Node index of L/2; requires an even cell count."""
        if self.n_cells % 2:
            raise ContractError("L/2 is a node only for even n_cells")
        return self.n_cells // 2


@dataclass(frozen=True)
class Grid2D:
    """Tensor-product grid on (0, Lx) x (0, Ly)."""

    lengths: tuple
    cells: tuple

    def __post_init__(self):
        lx, ly = self.lengths
        nx, ny = self.cells
        if not (lx > 0 and ly > 0):
            raise ContractError(f"side lengths must be positive, got {self.lengths}")
        if nx < 4 or ny < 4:
            raise ContractError(f"cell counts must be >= 4, got {self.cells}")

    @property
    def ndim(self):
        return 2

    @property
    def h(self):
        return (self.lengths[0] / self.cells[0], self.lengths[1] / self.cells[1])

    @property
    def n_nodes(self):
        return (self.cells[0] + 1) * (self.cells[1] + 1)

    @property
    def node_shape(self):
        return (self.cells[0] + 1, self.cells[1] + 1)

    @property
    def nodes_x(self):
        return np.linspace(0.0, self.lengths[0], self.cells[0] + 1)

    @property
    def nodes_y(self):
        return np.linspace(0.0, self.lengths[1], self.cells[1] + 1)

    def node_mesh(self):
        return np.meshgrid(self.nodes_x, self.nodes_y, indexing="ij")

    def cell_midpoint_mesh(self):
        hx, hy = self.h
        xm = (np.arange(self.cells[0]) + 0.5) * hx
        ym = (np.arange(self.cells[1]) + 0.5) * hy
        return np.meshgrid(xm, ym, indexing="ij")

    @property
    def cell_area(self):
        hx, hy = self.h
        return hx * hy


@dataclass(frozen=True)
class NodalField:
    """One real value per grid node (u, v, phi, psi, G, w as sampled)."""

    grid: object
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        expected = (self.grid.n_nodes,) if self.grid.ndim == 1 else self.grid.node_shape
        if vals.shape != expected:
            raise ContractError(
                f"field shape {vals.shape} does not match grid nodes {expected}"
            )
        if not np.all(np.isfinite(vals)):
            raise ContractError("field contains non-finite values")


def _check_same_grid(f, grid):
    if f.grid is not grid and f.grid != grid:
        raise ContractError("field is defined on a different grid")


def cell_gradient(f: NodalField):
    """Per-cell gradient.

    1D: forward difference (f_{i+1} - f_i)/h, shape (n_cells,).
    2D: per-cell average of the two edge differences per axis (the gradient
    of the bilinear interpolant at the cell centroid), shape (nx, ny, 2).
    Exact for affine fields.
    """
    g = f.grid
    vals = f.values
    if g.ndim == 1:
        return np.diff(vals) / g.h
    hx, hy = g.h
    gx = 0.5 * ((vals[1:, :-1] - vals[:-1, :-1]) + (vals[1:, 1:] - vals[:-1, 1:])) / hx
    gy = 0.5 * ((vals[:-1, 1:] - vals[:-1, :-1]) + (vals[1:, 1:] - vals[1:, :-1])) / hy
    return np.stack([gx, gy], axis=-1)


def cell_average(f: NodalField):
    """Arithmetic mean of the cell's node values (2 in 1D, 4 in 2D)."""
    vals = f.values
    if f.grid.ndim == 1:
        return 0.5 * (vals[:-1] + vals[1:])
    return 0.25 * (vals[:-1, :-1] + vals[1:, :-1] + vals[:-1, 1:] + vals[1:, 1:])


def integrate_cells(grid, cell_values):
    """Midpoint-rule integral of a per-cell quantity."""
    cell_values = np.asarray(cell_values)
    if grid.ndim == 1:
        return grid.h * float(np.sum(cell_values))
    return grid.cell_area * float(np.sum(cell_values))


def nodal_gradient_1d(grid: Grid1D, values):
    """Second-order nodal derivative: central interior, one-sided ends."""
    h = grid.h
    g = np.empty_like(values)
    g[1:-1] = (values[2:] - values[:-2]) / (2 * h)
    g[0] = (-3 * values[0] + 4 * values[1] - values[2]) / (2 * h)
    g[-1] = (3 * values[-1] - 4 * values[-2] + values[-3]) / (2 * h)
    return g


def nodal_gradient_2d(grid: Grid2D, values):
    """Second-order nodal gradient on a tensor grid, shape (nx+1, ny+1, 2)."""
    hx, hy = grid.h
    gx = np.empty_like(values)
    gx[1:-1, :] = (values[2:, :] - values[:-2, :]) / (2 * hx)
    gx[0, :] = (-3 * values[0, :] + 4 * values[1, :] - values[2, :]) / (2 * hx)
    gx[-1, :] = (3 * values[-1, :] - 4 * values[-2, :] + values[-3, :]) / (2 * hx)
    gy = np.empty_like(values)
    gy[:, 1:-1] = (values[:, 2:] - values[:, :-2]) / (2 * hy)
    gy[:, 0] = (-3 * values[:, 0] + 4 * values[:, 1] - values[:, 2]) / (2 * hy)
    gy[:, -1] = (3 * values[:, -1] - 4 * values[:, -2] + values[:, -3]) / (2 * hy)
    return np.stack([gx, gy], axis=-1)
