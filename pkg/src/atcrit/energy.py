"""The phase-field energy, its breakdown, and the 1D Mumford-Shah limits.

All quadrature is midpoint: v-dependent coefficients are evaluated from the
cell average v-bar, gradients are the per-cell constants from mesh.cell_gradient,
and integrals are h * sum (cell values).  With this convention the total is
exactly bulk + grad_surface + potential_surface, and per cell

    |w'| = (1 - v-bar)|v'|     with  w = Phi(v),  Phi(t) = t - t^2/2,

holds algebraically, not just in the limit.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .mesh import NodalField, cell_average, cell_gradient, integrate_cells

BOUNDARY_MATCH_TOL = 1e-9
MISMATCH_TOL = 1e-12


def phi(t):
    """Phi(t) = t - t^2/2; Phi(0) = 0, Phi(1) = 1/2."""
    t = np.asarray(t, dtype=float)
    out = t - 0.5 * t * t
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PhaseFieldState:
    """The pair (u, v) with parameters (eps, eta) and boundary data g.

    1D: g = (g(0), g(L)); the reference normalization is g(0) = 0,
    g(L) = a > 0.  2D: g is a NodalField whose boundary ring carries the
    trace.  Invariants: u = g and v = 1 on boundary nodes, eps > 0,
    0 < eta <= eps.
    """

    grid: object
    u: NodalField
    v: NodalField
    epsilon: float
    eta: float
    g: object
    natural_v_right: bool = False  # half-domain states: v free at the right end

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ContractError(f"epsilon must be positive, got {self.epsilon}")
        # eta = 0 is admitted for energy evaluation; the solves need eta > 0
        if not (0 <= self.eta <= self.epsilon):
            raise ContractError(
                f"eta must satisfy 0 <= eta <= eps, got eta={self.eta}, eps={self.epsilon}"
            )
        uv, vv = self.u.values, self.v.values
        if self.grid.ndim == 1:
            g0, gL = self.g
            if abs(uv[0] - g0) > BOUNDARY_MATCH_TOL or abs(uv[-1] - gL) > BOUNDARY_MATCH_TOL:
                raise ContractError("u does not match g on the boundary nodes")
            if abs(vv[0] - 1.0) > BOUNDARY_MATCH_TOL:
                raise ContractError("v must equal 1 on the boundary nodes")
            if not self.natural_v_right and abs(vv[-1] - 1.0) > BOUNDARY_MATCH_TOL:
                raise ContractError("v must equal 1 on the boundary nodes")
        else:
            gv = self.g.values
            for sl in (np.s_[0, :], np.s_[-1, :], np.s_[:, 0], np.s_[:, -1]):
                if np.max(np.abs(uv[sl] - gv[sl])) > BOUNDARY_MATCH_TOL:
                    raise ContractError("u does not match g on the boundary nodes")
                if np.max(np.abs(vv[sl] - 1.0)) > BOUNDARY_MATCH_TOL:
                    raise ContractError("v must equal 1 on the boundary nodes")

    def with_fields(self, u_values=None, v_values=None):
        u = self.u if u_values is None else NodalField(self.grid, u_values)
        v = self.v if v_values is None else NodalField(self.grid, v_values)
        return PhaseFieldState(self.grid, u, v, self.epsilon, self.eta, self.g,
                               self.natural_v_right)


@dataclass(frozen=True)
class EnergyBreakdown:
    """AT energy split plus equipartition diagnostics.

    total = bulk + grad_surface + potential_surface exactly;
    |grad_surface - potential_surface| <= equipartition_residual;
    modica_mortola <= grad_surface + potential_surface (Young, per cell).
    """

    bulk: float
    grad_surface: float
    potential_surface: float
    total: float
    modica_mortola: float
    equipartition_residual: float

    def as_dict(self):
        return {
            "bulk": self.bulk,
            "grad_surface": self.grad_surface,
            "potential_surface": self.potential_surface,
            "total": self.total,
            "modica_mortola": self.modica_mortola,
            "equipartition_residual": self.equipartition_residual,
        }


def _grad_sq(g):
    return g * g if g.ndim == 1 else np.sum(g * g, axis=-1)


def at_energy(state: PhaseFieldState) -> EnergyBreakdown:
    """Midpoint-quadrature evaluation of every EnergyBreakdown field."""
    grid = state.grid
    eps, eta = state.epsilon, state.eta
    vbar = cell_average(state.v)
    gu2 = _grad_sq(cell_gradient(state.u))
    gv = cell_gradient(state.v)
    gv2 = _grad_sq(gv)
    gv_abs = np.abs(gv) if gv.ndim == 1 else np.sqrt(gv2)

    bulk = integrate_cells(grid, (eta + vbar**2) * gu2)
    grad_surface = integrate_cells(grid, eps * gv2)
    potential = integrate_cells(grid, (1.0 - vbar) ** 2 / (4.0 * eps))
    mm = integrate_cells(grid, (1.0 - vbar) * gv_abs)
    equip = integrate_cells(grid, np.abs(eps * gv2 - (1.0 - vbar) ** 2 / (4.0 * eps)))
    return EnergyBreakdown(
        bulk=bulk,
        grad_surface=grad_surface,
        potential_surface=potential,
        total=bulk + grad_surface + potential,
        modica_mortola=mm,
        equipartition_residual=equip,
    )


def w_field(state: PhaseFieldState) -> NodalField:
    """w = Phi(v) pointwise; its gradient mass concentrates on the jump set."""
    return NodalField(state.grid, phi(state.v.values))


@dataclass(frozen=True)
class PiecewiseAffine1D:
    """A piecewise-affine candidate limit u_* on (0, L).

    jump_locations are the interior jumps; the effective jump set
    J-hat also contains each boundary point where the one-sided trace
    misses the Dirichlet value by more than 1e-12.
    """

    length: float
    g: tuple
    value_at_0: float = 0.0
    jump_locations: tuple = ()
    jump_sizes: tuple = ()
    slopes: tuple = (0.0,)

    def __post_init__(self):
        locs = tuple(float(t) for t in self.jump_locations)
        if any(not (0.0 < t < self.length) for t in locs):
            raise ContractError("interior jump locations must lie in (0, L)")
        if list(locs) != sorted(set(locs)):
            raise ContractError("jump locations must be strictly increasing")
        if len(self.jump_sizes) != len(locs):
            raise ContractError("one jump size per jump location")
        if len(self.slopes) != len(locs) + 1:
            raise ContractError("need len(jumps)+1 slopes")

    @property
    def breakpoints(self):
        return (0.0,) + tuple(self.jump_locations) + (self.length,)

    def trace_at_0(self):
        return self.value_at_0

    def trace_at_L(self):
        val = self.value_at_0
        bp = self.breakpoints
        for k, s in enumerate(self.slopes):
            val += s * (bp[k + 1] - bp[k])
            if k < len(self.jump_sizes):
                val += self.jump_sizes[k]
        return val

    @property
    def mismatch_at_0(self):
        return abs(self.trace_at_0() - self.g[0]) > MISMATCH_TOL

    @property
    def mismatch_at_L(self):
        return abs(self.trace_at_L() - self.g[1]) > MISMATCH_TOL

    def jump_set(self):
        """J-hat: interior jumps plus mismatched boundary points."""
        pts = list(self.jump_locations)
        if self.mismatch_at_0:
            pts.insert(0, 0.0)
        if self.mismatch_at_L:
            pts.append(self.length)
        return tuple(pts)

    def gradient_pieces(self):
        """(piece_start, piece_end, slope) triples."""
        bp = self.breakpoints
        return tuple(
            (bp[k], bp[k + 1], self.slopes[k]) for k in range(len(self.slopes))
        )


def affine_limit(a, L) -> PiecewiseAffine1D:
    """u_aff(x) = a x / L, no jumps."""
    return PiecewiseAffine1D(length=L, g=(0.0, a), value_at_0=0.0, slopes=(a / L,))


def jump_limit(a, L) -> PiecewiseAffine1D:
    """u_jump = a * 1_{[L/2, L]}: one interior jump at L/2."""
    return PiecewiseAffine1D(
        length=L,
        g=(0.0, a),
        value_at_0=0.0,
        jump_locations=(L / 2,),
        jump_sizes=(a,),
        slopes=(0.0, 0.0),
    )


def ms_energy_1d(limit: PiecewiseAffine1D) -> float:
    """MS(u) = int |u'|^2 + #(J-hat)."""
    bulk = sum(s * s * (b - a) for a, b, s in limit.gradient_pieces())
    return bulk + len(limit.jump_set())


def ms_min_value(a, L) -> float:
    """min over SBV^2(0, L) of MS = min(a^2/L, 1)."""
    if not (a > 0 and L > 0):
        raise ContractError("a and L must be positive")
    return min(a * a / L, 1.0)
