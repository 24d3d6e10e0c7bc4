"""Alternating minimization to critical points, and the constrained
half-domain construction of the jump branch with symmetric reflection.

Each half-step is the exact minimizer of the discrete energy in its own
variable, so the energy trace is non-increasing to roundoff.  Branch
targeting is by initialization: v = 1 seeds the affine branch; a deep
notch (or the boundary-layer profile used by the half-domain construction)
seeds the jump branch.  Plain descent cannot reach the jump branch once it
stops being a local minimizer, so jump sweeps go through the constrained
construction: minimize on (0, L/2) with u(L/2) = a/2 and the natural
(zero-flux) condition on v at L/2, then check the constraint v(L/2) <= alpha
stayed inactive, and extend by even reflection with

    u(x) = int_0^x c / (eta + v^2),   c = a / int_0^L dx / (eta + v^2).
"""

from dataclasses import dataclass, field

import numpy as np

from .criticality import residuals
from .elliptic import (
    LinearSolveConfig,
    bulk_coefficient,
    grad_energy_v_1d,
    solve_u_1d,
    solve_u_given_v,
    solve_v_1d,
    solve_v_given_u,
)
from .energy import EnergyBreakdown, PhaseFieldState, at_energy, phi
from .errors import AlphaConditionError, ConfigError, ContractError
from .mesh import Grid1D, NodalField

CRITICAL = "critical"
STALLED = "stalled"
MAX_ITER = "max-iter"


@dataclass(frozen=True)
class AltMinConfig:
    max_iterations: int = 500
    energy_tol: float = 1e-11        # relative energy decrease per iteration
    residual_tol: float = 1e-8       # criticality residual (mesh-weighted l2;
                                     # the direct-solve roundoff floor is
                                     # ~2e-9 on the finest desk-scale grids)
    v_init: object = "uniform-one"   # "uniform-one" | ("notch", c, w, depth) | ("explicit", arr)
    solve: LinearSolveConfig = field(default_factory=LinearSolveConfig)

    def __post_init__(self):
        if self.energy_tol <= 0 or self.residual_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if isinstance(self.v_init, tuple) and self.v_init[0] == "notch":
            depth = self.v_init[3]
            if not (0 <= depth < 1):
                raise ConfigError("notch depth must lie in [0, 1)")


@dataclass(frozen=True)
class AltMinTrace:
    """Per-iteration energies (entry 0 is the initial state)."""

    energies: list
    iterations: int
    termination: str
    final_residuals: tuple

    @property
    def totals(self):
        return np.array([e.total for e in self.energies])


def initial_state(grid, a, eps, eta, cfg: AltMinConfig = AltMinConfig()):
    """Build the starting state for a branch run: v from the config's
    profile selector, u the affine interpolant of the boundary data."""
    v = initial_v(grid, cfg.v_init)
    u = a * grid.nodes / grid.length
    return PhaseFieldState(grid, NodalField(grid, u), NodalField(grid, v),
                           eps, eta, (0.0, a))


def initial_v(grid, v_init):
    """Build the starting v profile from the config selector."""
    if v_init == "uniform-one":
        shape = (grid.n_nodes,) if grid.ndim == 1 else grid.node_shape
        return np.ones(shape)
    if isinstance(v_init, tuple) and v_init[0] == "notch":
        _, center, width, depth = v_init
        if grid.ndim != 1:
            raise ConfigError("notch initialization is 1D only")
        if not (0 <= depth < 1):
            raise ConfigError("notch depth must lie in [0, 1)")
        x = grid.nodes
        v = 1.0 - depth * np.clip(1.0 - np.abs(x - center) / width, 0.0, None)
        v[0] = v[-1] = 1.0
        return v
    if isinstance(v_init, tuple) and v_init[0] == "explicit":
        return np.asarray(v_init[1], dtype=float).copy()
    raise ConfigError(f"unknown v_init selector {v_init!r}")


def alternate_minimize(initial: PhaseFieldState, cfg: AltMinConfig = AltMinConfig()):
    """Alternate exact solves (u given v, then v given u) until the energy
    stalls and the criticality residual is below tolerance ("critical"),
    or report why not ("stalled" / "max-iter")."""
    state = initial
    grid = state.grid
    energies = [at_energy(state)]
    termination = MAX_ITER
    iterations = cfg.max_iterations
    res = residuals(state)
    prev_res = np.inf
    for k in range(cfg.max_iterations):
        u = solve_u_given_v(grid, state.v, state.g, state.eta,
                            config=cfg.solve, u_init=state.u)
        state = state.with_fields(u_values=u.values)
        v = solve_v_given_u(grid, state.u, state.epsilon,
                            config=cfg.solve, v_init=state.v)
        state = state.with_fields(v_values=v.values)
        energies.append(at_energy(state))
        dE = energies[-2].total - energies[-1].total
        stalled = abs(dE) <= cfg.energy_tol * max(1.0, abs(energies[-1].total))
        res = residuals(state)
        if stalled and max(res) <= cfg.residual_tol:
            iterations = k + 1
            termination = CRITICAL
            break
        # past the energy stall the residual still contracts geometrically
        # at zero visible energy cost; stop only once it stagnates too
        if stalled and max(res) >= 0.8 * prev_res:
            iterations = k + 1
            termination = STALLED
            break
        prev_res = max(res)
    trace = AltMinTrace(energies=energies, iterations=iterations,
                        termination=termination, final_residuals=res)
    return state, trace


# ---------------------------------------------------------------------------
# constrained half-domain construction (jump branch)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfDomainResult:
    state: PhaseFieldState          # on (0, L/2); natural v-condition at L/2
    flux_constant: float
    constraint_active: bool
    trace: AltMinTrace


def check_alpha_condition(a, L, alpha):
    """Admissibility a^2/L - 2 Phi(alpha) > 0 of the constraint level."""
    margin = a * a / L - 2.0 * phi(alpha)
    if margin <= 0:
        raise ConfigError(
            f"alpha = {alpha} inadmissible: a^2/L - 2 Phi(alpha) = {margin:.6g} <= 0")
    return margin


def _half_breakdown(grid, u, v, eps, eta):
    h = grid.h
    co = bulk_coefficient(v, eta)
    up = np.diff(u) / h
    vp = np.diff(v) / h
    vbar = 0.5 * (v[:-1] + v[1:])
    bulk = h * float(np.sum(co * up**2))
    grad = h * float(np.sum(eps * vp**2))
    pot = h * float(np.sum((1 - vbar) ** 2 / (4 * eps)))
    mm = h * float(np.sum((1 - vbar) * np.abs(vp)))
    equip = h * float(np.sum(np.abs(eps * vp**2 - (1 - vbar) ** 2 / (4 * eps))))
    return EnergyBreakdown(bulk, grad, pot, bulk + grad + pot, mm, equip)


def _half_residual_norm(grid, u, v, eps, eta, clamped):
    h = grid.h
    from .elliptic import grad_energy_u_1d
    gu = grad_energy_u_1d(grid, u, v, eta)[1:-1]
    gv_full = grad_energy_v_1d(grid, u, v, eps)
    gv = gv_full[1:-1] if clamped else gv_full[1:]
    ru = gu / (2 * h)
    rv = gv / (2 * h)
    return float(np.sqrt(np.sum(h * ru**2) + np.sum(h * rv**2)))


def _half_altmin(grid, eps, eta, a, v0, right_bc, cfg):
    u = np.linspace(0.0, a / 2, grid.n_nodes)
    v = v0.copy()
    energies = [_half_breakdown(grid, u, v, eps, eta)]
    termination = MAX_ITER
    iterations = cfg.max_iterations
    clamped = right_bc[0] == "dirichlet"
    res = np.inf
    prev_res = np.inf
    for k in range(cfg.max_iterations):
        u = solve_u_1d(grid, v, eta, 0.0, a / 2)
        v = solve_v_1d(grid, u, eps, right=right_bc, v_init=v)
        energies.append(_half_breakdown(grid, u, v, eps, eta))
        dE = energies[-2].total - energies[-1].total
        stalled = abs(dE) <= cfg.energy_tol * max(1.0, abs(energies[-1].total))
        res = _half_residual_norm(grid, u, v, eps, eta, clamped)
        if stalled and res <= cfg.residual_tol:
            iterations = k + 1
            termination = CRITICAL
            break
        if stalled and res >= 0.8 * prev_res:
            iterations = k + 1
            termination = STALLED
            break
        prev_res = res
    return u, v, energies, iterations, termination, res


def constrained_jump_construct(grid: Grid1D, a, L, eps, eta, alpha,
                               cfg: AltMinConfig = AltMinConfig(),
                               on_active="raise") -> HalfDomainResult:
    """Minimize the energy on (0, L/2) with u(0) = 0, u(L/2) = a/2,
    v(0) = 1 and the natural condition on v at L/2, under the constraint
    v(L/2) <= alpha.

    The unconstrained problem is solved first; if v(L/2) <= alpha the
    constraint is inactive and the result is an unconstrained critical
    point with zero discrete v-flux at L/2.  Otherwise the construction
    re-solves with v(L/2) = alpha pinned (the constrained minimizer) and
    either raises AlphaConditionError (on_active="raise", the asymptotic
    regime of the construction has not been reached: eps too large or
    alpha mis-chosen) or returns the clamped state flagged
    constraint_active (on_active="clamp").
    """
    if grid.length != L:
        raise ContractError("grid length must equal L")
    if grid.n_cells % 2:
        raise ContractError("n_cells must be even so that L/2 is a node")
    check_alpha_condition(a, L, alpha)
    half = Grid1D(L / 2, grid.n_cells // 2)
    x = half.nodes
    v0 = 1.0 - np.exp(-(L / 2 - x) / (2 * eps))
    u, v, energies, iterations, termination, res = _half_altmin(
        half, eps, eta, a, v0, ("natural", None), cfg)
    # a non-converged unconstrained phase means the iterate is drifting out
    # of the jump basin (the constraint is what holds it); clamp in that
    # case too rather than returning a non-critical state as if inactive
    active = bool(v[-1] > alpha or termination != CRITICAL)
    if active:
        v0c = 1.0 - (1.0 - alpha) * np.exp(-(L / 2 - x) / (2 * eps))
        u, v, energies, iterations, termination, res = _half_altmin(
            half, eps, eta, a, v0c, ("dirichlet", alpha), cfg)
    co = bulk_coefficient(v, eta)
    flux = co * np.diff(u) / half.h
    c = float(np.mean(flux))
    state = PhaseFieldState(half, NodalField(half, u), NodalField(half, v),
                            eps, eta, (0.0, a / 2), natural_v_right=True)
    trace = AltMinTrace(energies=energies, iterations=iterations,
                        termination=termination, final_residuals=(res, res))
    result = HalfDomainResult(state=state, flux_constant=c,
                              constraint_active=active, trace=trace)
    if active and on_active == "raise":
        raise AlphaConditionError(
            f"alpha-condition violated numerically: v(L/2) = {v[-1]:.6g} > "
            f"alpha = {alpha} at convergence (eps = {eps} too large or alpha "
            f"mis-chosen)", state=result, flux=c)
    return result


MIDPOINT_FLUX_TOL = 1e-7


def reflect_and_extend(half: PhaseFieldState, a,
                       allow_constrained=False) -> PhaseFieldState:
    """Extend a half-domain state to (0, L) by even reflection of v about
    L/2 and the flux-form rebuild of u.

    Preconditions: the half state carries the natural v-condition at L/2
    with its discrete zero-flux residual below tolerance (unless
    allow_constrained, for clamped diagnostics states).  The output
    satisfies both discrete equations on (0, L) away from the clamp and
    u(L/2) = a/2 exactly.
    """
    hgrid = half.grid
    if hgrid.ndim != 1:
        raise ContractError("reflection is a 1D construction")
    eps, eta = half.epsilon, half.eta
    uh, vh = half.u.values, half.v.values
    if not allow_constrained:
        gv = grad_energy_v_1d(hgrid, uh, vh, eps)
        flux_res = abs(gv[-1]) / (2 * hgrid.h)
        if flux_res > MIDPOINT_FLUX_TOL:
            raise ContractError(
                f"nonzero discrete v-flux at the midpoint: residual "
                f"{flux_res:.3e} > {MIDPOINT_FLUX_TOL:.0e}; reflection refused")
    full = Grid1D(2 * hgrid.length, 2 * hgrid.n_cells)
    v = np.concatenate([vh, vh[-2::-1]])
    co = bulk_coefficient(v, eta)
    weights = full.h / co
    c = a / float(np.sum(weights))
    u = np.concatenate([[0.0], np.cumsum(c * weights)])
    u[-1] = a  # exact boundary value (cumsum roundoff)
    return PhaseFieldState(full, NodalField(full, u), NodalField(full, v),
                           eps, eta, (0.0, a))
