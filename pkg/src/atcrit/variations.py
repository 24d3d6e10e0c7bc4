"""First and second outer/inner variations of the phase-field energy, the
flow-based finite-difference counterparts, and the 1D specializations of
the sharp-interface (Mumford-Shah) variation formulas.

Outer variations are the exact t-derivatives of the discrete energy along
(u + t phi, v + t psi), so they match central differences of at_energy to
quadrature-free accuracy.  Inner variations deform the state along the flow
of a tangential field X while restoring the boundary data through an
extension G:

    u_t = u o Phi_{-t} - G o Phi_{-t} + G,    v_t = v o Phi_{-t}.

The closed forms evaluate the stress-tensor integrals with the module's
cell quadrature; inner_via_flow builds (u_t, v_t) by interpolation and
differences the energy in t.  At a critical point the first inner variation
reduces to boundary terms (zero for compactly supported X), and as
eps -> 0 along a jump family the second inner variation picks up the extra
term |DX : (nu x nu)|^2 on the jump set over the sharp-interface value.
"""

from dataclasses import dataclass

import numpy as np

from .energy import PhaseFieldState, PiecewiseAffine1D, at_energy
from .errors import ContractError, SolverError
from .fields import ExtensionSpec, VectorFieldSpec
from .mesh import NodalField, cell_average, cell_gradient, integrate_cells

FLOW_TIME_CAP = 0.25
FLOW_SUBSTEPS = 8
FD_STEP_FIRST = 1e-3   # times domain diameter
FD_STEP_SECOND = 3e-3


@dataclass(frozen=True)
class Direction:
    """An admissible outer-variation direction (phi, psi), zero on the boundary."""

    phi: NodalField
    psi: NodalField

    def __post_init__(self):
        for f in (self.phi, self.psi):
            vals = f.values
            if f.grid.ndim == 1:
                bvals = [vals[0], vals[-1]]
            else:
                bvals = [np.max(np.abs(vals[0, :])), np.max(np.abs(vals[-1, :])),
                         np.max(np.abs(vals[:, 0])), np.max(np.abs(vals[:, -1]))]
            if max(abs(b) for b in bvals) != 0.0:
                raise ContractError("direction fields must vanish on the boundary")


def _dot(a, b):
    return a * b if a.ndim == b.ndim == 1 else np.sum(a * b, axis=-1)


def outer_first(state: PhaseFieldState, direction: Direction) -> float:
    """d/dt at t=0 of at_energy(u + t phi, v + t psi): exact for the
    discrete quadrature, 2 int [(eta+v^2) grad u . grad phi
    + eps grad v . grad psi + |grad u|^2 v psi + (v-1) psi / (4 eps)]."""
    grid = state.grid
    eps, eta = state.epsilon, state.eta
    gu = cell_gradient(state.u)
    gv = cell_gradient(state.v)
    gphi = cell_gradient(direction.phi)
    gpsi = cell_gradient(direction.psi)
    vbar = cell_average(state.v)
    psibar = cell_average(direction.psi)
    gu2 = _dot(gu, gu)
    integrand = ((eta + vbar**2) * _dot(gu, gphi) + eps * _dot(gv, gpsi)
                 + vbar * psibar * gu2 + (vbar - 1.0) * psibar / (4 * eps))
    return 2.0 * integrate_cells(grid, integrand)


def outer_second(state: PhaseFieldState, direction: Direction) -> float:
    """d2/dt2 at t=0 of the energy along (u + t phi, v + t psi):
    2 int [(eta+v^2)|grad phi|^2 + 4 v psi grad u . grad phi
    + eps |grad psi|^2 + |grad u|^2 psi^2 + psi^2/(4 eps)]."""
    grid = state.grid
    eps, eta = state.epsilon, state.eta
    gu = cell_gradient(state.u)
    gphi = cell_gradient(direction.phi)
    gpsi = cell_gradient(direction.psi)
    vbar = cell_average(state.v)
    psibar = cell_average(direction.psi)
    integrand = ((eta + vbar**2) * _dot(gphi, gphi)
                 + 4.0 * vbar * psibar * _dot(gu, gphi)
                 + eps * _dot(gpsi, gpsi)
                 + _dot(gu, gu) * psibar**2 + psibar**2 / (4 * eps))
    return 2.0 * integrate_cells(grid, integrand)


# ---------------------------------------------------------------------------
# flow machinery
# ---------------------------------------------------------------------------

def flow_integrate(X: VectorFieldSpec, t, points, substeps=FLOW_SUBSTEPS,
                   time_cap=FLOW_TIME_CAP):
    """Fourth-order Runge-Kutta integration of dPhi/dt = X(Phi) with fixed
    substeps; satisfies the group property Phi_{t+s} ~ Phi_t o Phi_s within
    integrator accuracy."""
    if abs(t) > time_cap:
        raise ContractError(f"|t| = {abs(t)} exceeds the flow time cap {time_cap}")
    pts = np.asarray(points, dtype=float).copy()
    if t == 0.0:
        return pts
    dt = t / substeps

    if X.dim == 1:
        def rhs(p):
            return np.asarray(X.X(p))
    else:
        def rhs(p):
            return np.asarray(X.X(p[..., 0], p[..., 1]))

    for _ in range(substeps):
        k1 = rhs(pts)
        k2 = rhs(pts + 0.5 * dt * k1)
        k3 = rhs(pts + 0.5 * dt * k2)
        k4 = rhs(pts + dt * k3)
        pts = pts + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return pts


def _interp_1d(grid, values, query):
    """Four-point Lagrange interpolation on the uniform grid; the two
    boundary cells fall back to quadratic so the stencil stays inside."""
    h = grid.h
    n = grid.n_cells
    s = np.asarray(query) / h
    cell = np.clip(np.floor(s).astype(int), 0, n - 1)
    out = np.empty_like(np.asarray(query, float))

    inner = (cell >= 1) & (cell <= n - 2)
    i = cell[inner]
    t = s[inner] - i
    fm1, f0, f1, f2 = values[i - 1], values[i], values[i + 1], values[i + 2]
    out[inner] = (-t * (t - 1) * (t - 2) / 6 * fm1
                  + (t + 1) * (t - 1) * (t - 2) / 2 * f0
                  - (t + 1) * t * (t - 2) / 2 * f1
                  + (t + 1) * t * (t - 1) / 6 * f2)

    left = cell == 0
    t = s[left]
    out[left] = ((t - 1) * (t - 2) / 2 * values[0] - t * (t - 2) * values[1]
                 + t * (t - 1) / 2 * values[2])
    right = cell == n - 1
    t = s[right] - (n - 2)
    out[right] = ((t - 1) * (t - 2) / 2 * values[n - 2] - t * (t - 2) * values[n - 1]
                  + t * (t - 1) / 2 * values[n])
    return out


def _compose(state, X, G: ExtensionSpec, t):
    """(u_t, v_t) on the grid nodes via flow + interpolation."""
    grid = state.grid
    if grid.ndim == 1:
        nodes = grid.nodes
        src = flow_integrate(X, -t, nodes)
        tol = 1e-12 * grid.length
        if src.min() < -tol or src.max() > grid.length + tol:
            raise SolverError("flow left the domain: tangency violated numerically")
        src = np.clip(src, 0.0, grid.length)
        u_t = (_interp_1d(grid, state.u.values, src)
               - np.asarray(G.G(src)) + np.asarray(G.G(nodes)))
        v_t = _interp_1d(grid, state.v.values, src)
        return u_t, v_t
    from scipy.interpolate import RegularGridInterpolator
    xs, ys = grid.nodes_x, grid.nodes_y
    XN, YN = grid.node_mesh()
    pts = np.stack([XN, YN], axis=-1)
    src = flow_integrate(X, -t, pts)
    tol = 1e-12 * max(grid.lengths)
    if (src[..., 0].min() < -tol or src[..., 0].max() > grid.lengths[0] + tol
            or src[..., 1].min() < -tol or src[..., 1].max() > grid.lengths[1] + tol):
        raise SolverError("flow left the domain: tangency violated numerically")
    src[..., 0] = np.clip(src[..., 0], 0.0, grid.lengths[0])
    src[..., 1] = np.clip(src[..., 1], 0.0, grid.lengths[1])
    ui = RegularGridInterpolator((xs, ys), state.u.values, method="cubic")
    vi = RegularGridInterpolator((xs, ys), state.v.values, method="cubic")
    flat = src.reshape(-1, 2)
    u_t = (ui(flat).reshape(XN.shape) - np.asarray(G.G(src[..., 0], src[..., 1]))
           + np.asarray(G.G(XN, YN)))
    v_t = vi(flat).reshape(XN.shape)
    return u_t, v_t


def _energy_along_flow(state, X, G, t):
    """AT(u_t, v_t); skips the state's boundary revalidation since the flow
    only preserves the trace up to integrator roundoff."""
    u_t, v_t = _compose(state, X, G, t)
    grid = state.grid
    probe = object.__new__(PhaseFieldState)
    object.__setattr__(probe, "grid", grid)
    object.__setattr__(probe, "u", NodalField(grid, u_t))
    object.__setattr__(probe, "v", NodalField(grid, v_t))
    object.__setattr__(probe, "epsilon", state.epsilon)
    object.__setattr__(probe, "eta", state.eta)
    object.__setattr__(probe, "g", state.g)
    return at_energy(probe).total


def inner_via_flow(state: PhaseFieldState, X: VectorFieldSpec, G: ExtensionSpec,
                   order=1, fd_step=None, substeps=FLOW_SUBSTEPS) -> float:
    """Flow-based derivative of t -> AT(u_t, v_t) at t = 0.

    order 1: central difference, default step 1e-3 * diam;
    order 2: five-point stencil, default step 3e-3 * diam.
    """
    grid = state.grid
    diam = grid.length if grid.ndim == 1 else max(grid.lengths)
    if order == 1:
        t = FD_STEP_FIRST * diam if fd_step is None else fd_step
        Ep = _energy_along_flow(state, X, G, t)
        Em = _energy_along_flow(state, X, G, -t)
        return (Ep - Em) / (2 * t)
    if order == 2:
        t = FD_STEP_SECOND * diam if fd_step is None else fd_step
        E0 = at_energy(state).total
        Ep = _energy_along_flow(state, X, G, t)
        Em = _energy_along_flow(state, X, G, -t)
        Ep2 = _energy_along_flow(state, X, G, 2 * t)
        Em2 = _energy_along_flow(state, X, G, -2 * t)
        return (-Ep2 + 16 * Ep - 30 * E0 + 16 * Em - Em2) / (12 * t * t)
    raise ContractError("order must be 1 or 2")


# ---------------------------------------------------------------------------
# closed-form inner variations
# ---------------------------------------------------------------------------

def _cell_eval(grid, fn):
    if grid.ndim == 1:
        return np.asarray(fn(grid.cell_midpoints))
    XM, YM = grid.cell_midpoint_mesh()
    return np.asarray(fn(XM, YM))


def inner_first_closed(state: PhaseFieldState, X: VectorFieldSpec,
                       G: ExtensionSpec) -> float:
    """Closed-form first inner variation:

    int (eta+v^2)[|grad u|^2 Id - 2 grad u x grad u] : DX
    + int [(eps|grad v|^2 + (1-v)^2/(4 eps)) Id - 2 eps grad v x grad v] : DX
    + 2 int (eta+v^2) grad u . grad(X . grad G).
    """
    grid = state.grid
    eps, eta = state.epsilon, state.eta
    gu = cell_gradient(state.u)
    gv = cell_gradient(state.v)
    vbar = cell_average(state.v)
    co = eta + vbar**2
    pot = (1 - vbar) ** 2 / (4 * eps)

    if grid.ndim == 1:
        xm = grid.cell_midpoints
        DX = np.asarray(X.DX(xm))
        Xv = np.asarray(X.X(xm))
        Hp = DX * np.asarray(G.dG(xm)) + Xv * np.asarray(G.d2G(xm))
        integrand = (-co * gu**2 + pot - eps * gv**2) * DX + 2 * co * gu * Hp
        return integrate_cells(grid, integrand)

    XM, YM = grid.cell_midpoint_mesh()
    DX = np.asarray(X.DX(XM, YM))
    Xv = np.asarray(X.X(XM, YM))
    dG = np.asarray(G.dG(XM, YM))
    d2G = np.asarray(G.d2G(XM, YM))
    gradH = (np.einsum("...ji,...j->...i", DX, dG)
             + np.einsum("...ij,...j->...i", d2G, Xv))
    trDX = np.trace(DX, axis1=-2, axis2=-1)
    gu2 = _dot(gu, gu)
    gv2 = _dot(gv, gv)
    uu_DX = np.einsum("...i,...j,...ij->...", gu, gu, DX)
    vv_DX = np.einsum("...i,...j,...ij->...", gv, gv, DX)
    integrand = (co * (gu2 * trDX - 2 * uu_DX)
                 + (eps * gv2 + pot) * trDX - 2 * eps * vv_DX
                 + 2 * co * _dot(gu, gradH))
    return integrate_cells(grid, integrand)


def _second_inner_pieces_1d(grid, X, G):
    xm = grid.cell_midpoints
    Xv = np.asarray(X.X(xm))
    DX = np.asarray(X.DX(xm))
    D2X = np.asarray(X.D2X(xm))
    dG = np.asarray(G.dG(xm))
    d2G = np.asarray(G.d2G(xm))
    d3G = np.asarray(G.d3G(xm))
    Yp = D2X * Xv + DX**2
    Hp = DX * dG + Xv * d2G                      # (X G')'
    # (X . grad H)' with H = X G':
    # W = X H'; W' = X' H' + X H''; H'' = X'' G' + 2 X' G'' + X G'''
    Hpp = D2X * dG + 2 * DX * d2G + Xv * d3G
    Wp = DX * Hp + Xv * Hpp
    return Xv, DX, Yp, Hp, Wp


def inner_second_closed(state: PhaseFieldState, X: VectorFieldSpec,
                        G: ExtensionSpec) -> float:
    """Closed-form second inner variation (all terms, including those in
    Y = (DX) X).  In 1D the combination (div X)^2 - tr((DX)^2) vanishes
    identically and the formula reduces to eight stress/coupling terms."""
    grid = state.grid
    eps, eta = state.epsilon, state.eta
    gu = cell_gradient(state.u)
    gv = cell_gradient(state.v)
    vbar = cell_average(state.v)
    co = eta + vbar**2
    pot = (1 - vbar) ** 2 / (4 * eps)

    if grid.ndim == 1:
        Xv, DX, Yp, Hp, Wp = _second_inner_pieces_1d(grid, X, G)
        t_bulk = -co * gu**2 * Yp + 2 * co * gu**2 * DX**2
        t_coupling = (-4 * co * gu * Hp * DX + 2 * co * gu * Wp
                      + 2 * co * Hp**2)
        t_surface = (pot - eps * gv**2) * Yp + 2 * eps * gv**2 * DX**2
        return integrate_cells(grid, t_bulk + t_coupling + t_surface)

    XM, YM = grid.cell_midpoint_mesh()
    Xv = np.asarray(X.X(XM, YM))
    DX = np.asarray(X.DX(XM, YM))
    D2X = np.asarray(X.D2X(XM, YM))
    DY = (np.einsum("...ijk,...j->...ik", D2X, Xv)
          + np.einsum("...ij,...jk->...ik", DX, DX))
    dG = np.asarray(G.dG(XM, YM))
    d2G = np.asarray(G.d2G(XM, YM))
    d3G = np.asarray(G.d3G(XM, YM))
    gradH = (np.einsum("...ji,...j->...i", DX, dG)
             + np.einsum("...ij,...j->...i", d2G, Xv))
    # D2H[i,j] = d_i d_j (X . grad G)
    D2H = (np.einsum("...kji,...k->...ij", D2X, dG)
           + np.einsum("...kj,...ik->...ij", DX, d2G)
           + np.einsum("...ki,...jk->...ij", DX, d2G)
           + np.einsum("...ijk,...k->...ij", d3G, Xv))
    gradW = (np.einsum("...ji,...j->...i", DX, gradH)
             + np.einsum("...ij,...j->...i", D2H, Xv))

    trDX = np.trace(DX, axis1=-2, axis2=-1)
    trDY = np.trace(DY, axis1=-2, axis2=-1)
    DX2 = np.einsum("...ij,...jk->...ik", DX, DX)
    trDX2 = np.trace(DX2, axis1=-2, axis2=-1)
    gu2 = _dot(gu, gu)
    gv2 = _dot(gv, gv)
    surf = eps * gv2 + pot

    uu_DY = np.einsum("...i,...j,...ij->...", gu, gu, DY)
    vv_DY = np.einsum("...i,...j,...ij->...", gv, gv, DY)
    uu_DX = np.einsum("...i,...j,...ij->...", gu, gu, DX)
    vv_DX = np.einsum("...i,...j,...ij->...", gv, gv, DX)
    uu_DX2 = np.einsum("...i,...j,...ij->...", gu, gu, DX2)
    vv_DX2 = np.einsum("...i,...j,...ij->...", gv, gv, DX2)
    DXTu = np.einsum("...ij,...i->...j", DX, gu)
    DXTv = np.einsum("...ij,...i->...j", DX, gv)
    uH_sym = np.einsum("...i,...j,...ij->...", gu, gradH, DX + np.swapaxes(DX, -1, -2))

    integrand = (
        co * (gu2 * trDY - 2 * uu_DY)
        + 4 * co * (_dot(gu, gradH) * trDX - uH_sym)
        + 2 * co * _dot(gu, gradW)
        + 2 * co * _dot(gradH, gradH)
        + surf * trDY - 2 * eps * vv_DY
        + co * (gu2 * (trDX**2 - trDX2) - 4 * uu_DX * trDX
                + 4 * uu_DX2 + 2 * _dot(DXTu, DXTu))
        + surf * (trDX**2 - trDX2)
        - 4 * eps * vv_DX * trDX + 4 * eps * vv_DX2
        + 2 * eps * _dot(DXTv, DXTv)
    )
    return integrate_cells(grid, integrand)


# ---------------------------------------------------------------------------
# Mumford-Shah variations in 1D
# ---------------------------------------------------------------------------

def _check_tangential_1d(X, length):
    vals = np.abs(np.asarray(X.X(np.array([0.0, length]))))
    if float(np.max(vals)) > 1e-12:
        raise ContractError("X must vanish at the interval endpoints")


def ms_inner_first_1d(limit: PiecewiseAffine1D, X: VectorFieldSpec,
                      G: ExtensionSpec) -> float:
    """First inner variation of MS at a piecewise-affine u:

        int (-|u'|^2) X' dx + 2 int u' (X . G')' dx,

    evaluated exactly per affine piece (the integrands are exact
    derivatives there); the jump-set term vanishes in 1D because the
    tangential projector on a point is zero.
    """
    _check_tangential_1d(X, limit.length)
    total = 0.0
    for a, b, slope in limit.gradient_pieces():
        pts = np.array([a, b])
        Xv = np.asarray(X.X(pts))
        dGv = np.asarray(G.dG(pts))
        dX = Xv[1] - Xv[0]
        dXG = Xv[1] * dGv[1] - Xv[0] * dGv[0]
        total += -slope**2 * dX + 2 * slope * dXG
    return float(total)


def _simpson(fn, a, b, m=1024):
    """Composite Simpson with m (even) intervals."""
    xs = np.linspace(a, b, m + 1)
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (b - a) / (3 * m) * float(np.sum(w * fn(xs)))


def ms_second_inner_limit_1d(limit: PiecewiseAffine1D, X: VectorFieldSpec,
                             G: ExtensionSpec) -> float:
    """Predicted eps -> 0 limit of the second inner variation along a
    family converging to `limit`: the 1D sharp-interface second variation
    plus the extra jump term sum |X'(p)|^2 over the jump set (in 1D the
    normal direction is 1, so DX : (nu x nu) = X').

    The sharp-interface part per affine piece [a, b] with slope m:

        -m^2 [Y]_a^b + 2 m^2 int X'^2 + 2 m [X (X G')']_a^b
        - 4 m int (X G')' X' + 2 int ((X G')')^2 ;

    point jumps contribute nothing to it (tangential terms vanish).
    """
    _check_tangential_1d(X, limit.length)

    def Hp(x):
        return (np.asarray(X.DX(x)) * np.asarray(G.dG(x))
                + np.asarray(X.X(x)) * np.asarray(G.d2G(x)))

    total = 0.0
    for a, b, slope in limit.gradient_pieces():
        pts = np.array([a, b])
        Xv = np.asarray(X.X(pts))
        DXv = np.asarray(X.DX(pts))
        Y = DXv * Xv
        dY = Y[1] - Y[0]
        XHp = Xv * Hp(pts)
        dXHp = XHp[1] - XHp[0]
        int_dx2 = _simpson(lambda x: np.asarray(X.DX(x)) ** 2, a, b)
        int_hx = _simpson(lambda x: Hp(x) * np.asarray(X.DX(x)), a, b)
        int_h2 = _simpson(lambda x: Hp(x) ** 2, a, b)
        total += (-slope**2 * dY + 2 * slope**2 * int_dx2
                  + 2 * slope * dXHp - 4 * slope * int_hx + 2 * int_h2)

    for p in limit.jump_set():
        total += float(np.asarray(X.DX(np.array([p])))[0] ** 2)
    return float(total)
