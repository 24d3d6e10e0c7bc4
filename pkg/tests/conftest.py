import numpy as np
import pytest

import atcrit as ac
from atcrit.altmin import AltMinConfig
from atcrit.continuation import SweepConfig, VariationProbe

A_REF, L_REF = 1.0, 2.0
EPS_LIST_REF = [0.08, 0.04, 0.02, 0.01]
N_REF = 8192  # keeps the v-system an M-matrix down to eps = 0.01


def make_state(grid, u_values, v_values, eps, eta, g=None):
    g = (float(u_values[0]), float(u_values[-1])) if g is None else g
    return ac.PhaseFieldState(grid, ac.NodalField(grid, u_values),
                              ac.NodalField(grid, v_values), eps, eta, g)


def raw_state(grid, u_values, v_values, eps, eta, g):
    """Probe state bypassing boundary validation (for counter-examples)."""
    st = object.__new__(ac.PhaseFieldState)
    object.__setattr__(st, "grid", grid)
    object.__setattr__(st, "u", ac.NodalField(grid, np.asarray(u_values, float)))
    object.__setattr__(st, "v", ac.NodalField(grid, np.asarray(v_values, float)))
    object.__setattr__(st, "epsilon", eps)
    object.__setattr__(st, "eta", eta)
    object.__setattr__(st, "g", g)
    object.__setattr__(st, "natural_v_right", False)
    return st


def solve_affine(n, eps, a=A_REF, L=L_REF, eta=None):
    eta = eps * eps if eta is None else eta
    grid = ac.Grid1D(L, n)
    state0 = make_state(grid, a * grid.nodes / L, np.ones(n + 1), eps, eta,
                        (0.0, a))
    return ac.alternate_minimize(state0)


def solve_jump(n, eps, a=A_REF, L=L_REF, alpha=0.2, eta=None):
    eta = eps * eps if eta is None else eta
    grid = ac.Grid1D(L, n)
    half = ac.constrained_jump_construct(grid, a, L, eps, eta, alpha,
                                         on_active="clamp")
    state = ac.reflect_and_extend(half.state, a,
                                  allow_constrained=half.constraint_active)
    return state, half


@pytest.fixture(scope="session")
def affine_state_005():
    """Converged affine-branch state at eps = 0.05, fine grid."""
    state, trace = solve_affine(2048, 0.05)
    assert trace.termination == "critical"
    return state


@pytest.fixture(scope="session")
def affine_sweep():
    cfg = SweepConfig(n_cells=N_REF,
                      variations=VariationProbe(slope=0.7, width_over_eps=6.0,
                                                extension_name="affine"))
    return ac.sweep("affine", EPS_LIST_REF, A_REF, L_REF, cfg)


@pytest.fixture(scope="session")
def jump_sweep():
    cfg = SweepConfig(n_cells=N_REF,
                      variations=VariationProbe(slope=0.7, width_over_eps=6.0,
                                                extension_name="affine"))
    return ac.sweep("jump", EPS_LIST_REF, A_REF, L_REF, cfg)


def solve_2d(n, eps=0.1, eta=0.01):
    grid = ac.Grid2D((1.0, 1.0), (n, n))
    XN, _ = grid.node_mesh()
    g = ac.NodalField(grid, XN.copy())
    state0 = ac.PhaseFieldState(grid, ac.NodalField(grid, XN.copy()),
                                ac.NodalField(grid, np.ones(grid.node_shape)),
                                eps, eta, g)
    cfg = AltMinConfig(residual_tol=1e-6)
    return ac.alternate_minimize(state0, cfg)


@pytest.fixture(scope="session")
def state_2d_64():
    state, trace = solve_2d(64)
    return state, trace


@pytest.fixture(scope="session")
def state_2d_128():
    state, trace = solve_2d(128)
    return state, trace
