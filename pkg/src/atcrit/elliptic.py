"""The two linear solves behind alternating minimization.

Both solves are the exact minimizers of the discrete (midpoint-quadrature)
energy in their own variable, so each one decreases the reported energy
monotonically and the criticality residuals are the gradients of the same
discrete functional:

  u given v:  flux-form scheme with the coefficient frozen at cell
              midpoints, a_k = eta + vbar_k^2.  In 1D the per-cell flux
              a_k u'_k comes out equal in every cell up to elimination
              roundoff (the scheme is a conservation law).

  v given u:  Galerkin form of  -eps v'' + (1/(4 eps) + |grad u|^2) v
              = 1/(4 eps)  with |grad u|^2 sampled per cell.  The system is
              SPD; on grids resolving the bulk spike (all assembled
              off-diagonal entries <= 0) it is an M-matrix and the output
              satisfies 0 < v <= 1 exactly.

2D systems use the per-axis edge-difference quadrature of the gradient
terms (the centroid-gradient form has hourglass modes), assembled sparse
and solved by Jacobi-preconditioned conjugate gradients warm-started from
the current iterate.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import solve_banded

from .errors import ContractError, SolverError
from .mesh import NodalField


@dataclass(frozen=True)
class LinearSolveConfig:
    """Controls for the iterative (2D) solver; 1D solves are direct."""

    tolerance: float = 1e-12
    max_iterations: int = 50000

    def __post_init__(self):
        if not (0 < self.tolerance < 1):
            raise ContractError("tolerance must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ContractError("max_iterations must be >= 1")


DEFAULT_SOLVE = LinearSolveConfig()


# ---------------------------------------------------------------------------
# discrete energy gradients (shared with criticality / variations)
# ---------------------------------------------------------------------------

def bulk_coefficient(v_values, eta):
    """Per-cell eta + vbar^2 from nodal v (1D)."""
    vbar = 0.5 * (v_values[:-1] + v_values[1:])
    return eta + vbar * vbar


def grad_energy_u_1d(grid, u_values, v_values, eta):
    """d/du of the discrete energy at every node: 2(F_{i-1} - F_i)."""
    a = bulk_coefficient(v_values, eta)
    flux = a * np.diff(u_values) / grid.h
    g = np.zeros_like(u_values)
    g[:-1] -= 2.0 * flux
    g[1:] += 2.0 * flux
    return g

def grad_energy_v_1d(grid, u_values, v_values, eps):
    """d/dv of the discrete energy at every node (eta drops out)."""
    h = grid.h
    s = (np.diff(u_values) / h) ** 2
    vbar = 0.5 * (v_values[:-1] + v_values[1:])
    vp = np.diff(v_values) / h
    g = np.zeros_like(v_values)
    contrib = h * vbar * s - h * (1.0 - vbar) / (4.0 * eps)
    g[:-1] += contrib
    g[1:] += contrib
    g[:-1] -= 2.0 * eps * vp
    g[1:] += 2.0 * eps * vp
    return g


def _v_system_1d(grid, u_values, eps):
    """Hessian diagonals of the discrete energy in v: (diag, off)."""
    h = grid.h
    n = grid.n_cells
    s = (np.diff(u_values) / h) ** 2
    w = 0.5 * h * s + 2.0 * eps / h + h / (8.0 * eps)
    diag = np.zeros(n + 1)
    diag[:-1] += w
    diag[1:] += w
    off = 0.5 * h * s - 2.0 * eps / h + h / (8.0 * eps)
    return diag, off


def _solve_tridiag_newton(diag, off, grad, v_values, lo_idx, hi_idx):
    """One exact Newton step on the quadratic v-energy for unknowns
    lo_idx..hi_idx inclusive (the energy is quadratic, so this lands on
    the exact minimizer)."""
    idx = np.arange(lo_idx, hi_idx + 1)
    m = len(idx)
    ab = np.zeros((3, m))
    ab[1, :] = diag[idx]
    if m > 1:
        ab[0, 1:] = off[idx[:-1]]
        ab[2, :-1] = off[idx[:-1]]
    delta = solve_banded((1, 1), ab, -grad[idx])
    out = v_values.copy()
    out[idx] += delta
    return out


def solve_v_1d(grid, u_values, eps, left_value=1.0, right=("dirichlet", 1.0),
               v_init=None):
    """Exact minimizer of the discrete energy in v for fixed u.

    right = ("dirichlet", value) pins v(L); ("natural", None) leaves the
    last node free (zero-flux condition of the half-domain construction).
    """
    n = grid.n_cells
    v = np.ones(n + 1) if v_init is None else v_init.copy()
    v[0] = left_value
    kind, val = right
    if kind == "dirichlet":
        v[-1] = val
        hi = n - 1
    elif kind == "natural":
        hi = n
    else:
        raise ContractError(f"unknown right boundary kind {kind!r}")
    # the assembled diagonal already gives the last node its single-cell
    # weight, which is exactly the natural (zero-flux) closure
    diag, off = _v_system_1d(grid, u_values, eps)
    grad = grad_energy_v_1d(grid, u_values, v, eps)
    return _solve_tridiag_newton(diag, off, grad, v, 1, hi)


def solve_u_1d(grid, v_values, eta, g0, gL):
    """Direct tridiagonal elimination of the flux-form system."""
    a = bulk_coefficient(v_values, eta)
    if not np.all(np.isfinite(a)):
        raise ContractError("non-finite coefficient in the u-system")
    n = grid.n_cells
    m = n - 1
    ab = np.zeros((3, m))
    ab[1, :] = -(a[:-1] + a[1:])
    ab[0, 1:] = a[1:-1]
    ab[2, :-1] = a[1:-1]
    rhs = np.zeros(m)
    rhs[0] -= a[0] * g0
    rhs[-1] -= a[-1] * gL
    interior = solve_banded((1, 1), ab, rhs)
    return np.concatenate([[g0], interior, [gL]])


# ---------------------------------------------------------------------------
# 2D assembly (edge-difference quadrature; SPD, no hourglass modes)
# ---------------------------------------------------------------------------

def _edge_weights(coef_cells, grid):
    """Per-edge diffusion weights: each edge collects half the coefficient
    of each adjacent cell, scaled by (transverse h)/(axis h)."""
    nx, ny = grid.cells
    hx, hy = grid.h
    cpad_y = np.zeros((nx, ny + 2))
    cpad_y[:, 1:-1] = coef_cells
    wx = (hy / (2.0 * hx)) * (cpad_y[:, :-1] + cpad_y[:, 1:])      # (nx, ny+1)
    cpad_x = np.zeros((nx + 2, ny))
    cpad_x[1:-1, :] = coef_cells
    wy = (hx / (2.0 * hy)) * (cpad_x[:-1, :] + cpad_x[1:, :])      # (nx+1, ny)
    return wx, wy


def _assemble_diffusion(coef_cells, grid):
    """Quadratic-form matrix K with u^T K u = sum_edges w_e (du_e)^2."""
    nx, ny = grid.cells
    ny1 = ny + 1
    wx, wy = _edge_weights(coef_cells, grid)
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny + 1), indexing="ij")
    a = (ii * ny1 + jj).ravel()
    b = ((ii + 1) * ny1 + jj).ravel()
    w = wx.ravel()
    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny), indexing="ij")
    c = (ii * ny1 + jj).ravel()
    d = (ii * ny1 + jj + 1).ravel()
    w2 = wy.ravel()
    rows = np.concatenate([a, b, a, b, c, d, c, d])
    cols = np.concatenate([a, b, b, a, c, d, d, c])
    vals = np.concatenate([w, w, -w, -w, w2, w2, -w2, -w2])
    ntot = (nx + 1) * ny1
    return sp.csr_matrix((vals, (rows, cols)), shape=(ntot, ntot))


def edge_gradsq_cells(grid, u_values):
    """Per-cell average of squared edge differences, per axis summed."""
    hx, hy = grid.h
    dx = (u_values[1:, :] - u_values[:-1, :]) / hx       # (nx, ny+1)
    dy = (u_values[:, 1:] - u_values[:, :-1]) / hy       # (nx+1, ny)
    sx = 0.5 * (dx[:, :-1] ** 2 + dx[:, 1:] ** 2)
    sy = 0.5 * (dy[:-1, :] ** 2 + dy[1:, :] ** 2)
    return sx + sy


def _interior_mask(grid):
    nx, ny = grid.cells
    m = np.zeros((nx + 1, ny + 1), bool)
    m[1:-1, 1:-1] = True
    return m.ravel()


def _cg(A, rhs, x0, config):
    M = sp.diags(1.0 / A.diagonal())
    x, info = spla.cg(A, rhs, x0=x0, M=M, rtol=config.tolerance, atol=0.0,
                      maxiter=config.max_iterations)
    if info > 0:
        res = float(np.linalg.norm(A @ x - rhs) / max(np.linalg.norm(rhs), 1e-300))
        raise SolverError(
            f"conjugate gradients did not reach rtol={config.tolerance} "
            f"in {config.max_iterations} iterations", residual=res)
    return x

def solve_u_2d(grid, v_values, eta, g_values, u_init=None, config=DEFAULT_SOLVE):
    vbar = 0.25 * (v_values[:-1, :-1] + v_values[1:, :-1]
                   + v_values[:-1, 1:] + v_values[1:, 1:])
    coef = eta + vbar * vbar
    if not np.all(np.isfinite(coef)):
        raise ContractError("non-finite coefficient in the u-system")
    K = _assemble_diffusion(coef, grid)
    mask = _interior_mask(grid)
    ub = g_values.ravel().copy()
    rhs = -(K[mask][:, ~mask] @ ub[~mask])
    x0 = (g_values if u_init is None else u_init).ravel()[mask]
    x = _cg(K[mask][:, mask], rhs, x0, config)
    out = ub
    out[mask] = x
    return out.reshape(grid.node_shape)


def _v_system_2d(grid, u_values, eps):
    """SPD matrix H and rhs b with grad_v E = H v - b (edge quadrature for
    the eps-gradient term, cell-average coupling for the rest)."""
    nx, ny = grid.cells
    ny1 = ny + 1
    area = grid.cell_area
    s = edge_gradsq_cells(grid, u_values)
    K = _assemble_diffusion(2.0 * eps * np.ones((nx, ny)), grid)
    wcell = area * (s + 1.0 / (4.0 * eps)) / 8.0           # ones(4x4) weight
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    base = (ii * ny1 + jj).ravel()
    corners = np.stack([base, base + ny1, base + 1, base + ny1 + 1], axis=1)
    w = wcell.ravel()
    rows = np.repeat(corners, 4, axis=1).ravel()
    cols = np.tile(corners, (1, 4)).ravel()
    vals = np.repeat(w, 16)
    ntot = (nx + 1) * ny1
    H = K + sp.csr_matrix((vals, (rows, cols)), shape=(ntot, ntot))
    b = np.zeros(ntot)
    np.add.at(b, corners.ravel(), area / (8.0 * eps))
    return H, b


def solve_v_2d(grid, u_values, eps, v_init=None, config=DEFAULT_SOLVE):
    H, b = _v_system_2d(grid, u_values, eps)
    mask = _interior_mask(grid)
    vb = np.ones(grid.n_nodes)
    rhs = b[mask] - (H[mask][:, ~mask] @ vb[~mask])
    x0 = (np.ones(grid.n_nodes) if v_init is None else v_init.ravel())[mask]
    x = _cg(H[mask][:, mask], rhs, x0, config)
    out = vb
    out[mask] = x
    return out.reshape(grid.node_shape)


def grad_energy_v_2d(grid, u_values, v_values, eps):
    H, b = _v_system_2d(grid, u_values, eps)
    return (H @ v_values.ravel() - b).reshape(grid.node_shape)


def grad_energy_u_2d(grid, u_values, v_values, eta):
    vbar = 0.25 * (v_values[:-1, :-1] + v_values[1:, :-1]
                   + v_values[:-1, 1:] + v_values[1:, 1:])
    K = _assemble_diffusion(eta + vbar * vbar, grid)
    return (2.0 * (K @ u_values.ravel())).reshape(grid.node_shape)


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def solve_u_given_v(grid, v: NodalField, g, eta, config=DEFAULT_SOLVE,
                    u_init=None) -> NodalField:
    """Solve -div((eta + v^2) grad u) = 0 with Dirichlet data g.

    1D: g = (g(0), g(L)), direct elimination.  2D: g is a NodalField whose
    boundary ring is the trace; preconditioned CG to config.tolerance.
    """
    if grid.ndim == 1:
        g0, gL = g
        return NodalField(grid, solve_u_1d(grid, v.values, eta, g0, gL))
    init = None if u_init is None else u_init.values
    return NodalField(grid, solve_u_2d(grid, v.values, eta, g.values,
                                       u_init=init, config=config))


def solve_v_given_u(grid, u: NodalField, eps, config=DEFAULT_SOLVE,
                    v_init=None) -> NodalField:
    """Solve -eps lap v + (1/(4 eps) + |grad u|^2) v = 1/(4 eps), v = 1 on
    the boundary: the exact minimizer of the discrete energy in v."""
    if grid.ndim == 1:
        return NodalField(grid, solve_v_1d(grid, u.values, eps))
    init = None if v_init is None else v_init.values
    return NodalField(grid, solve_v_2d(grid, u.values, eps, v_init=init,
                                       config=config))
