import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import atcrit as ac
from atcrit.elliptic import grad_energy_u_1d
from atcrit.errors import ContractError
from atcrit.mesh import cell_average, cell_gradient, integrate_cells


def field_1d(fn, L=2.0, n=8):
    grid = ac.Grid1D(L, n)
    return grid, ac.NodalField(grid, fn(grid.nodes))


def test_grid1d_invariants():
    grid = ac.Grid1D(2.0, 8)
    assert grid.h * grid.n_cells == grid.length
    x = grid.nodes
    assert x[0] == 0.0 and x[-1] == grid.length
    assert np.all(np.diff(x) > 0)
    with pytest.raises(ContractError):
        ac.Grid1D(2.0, 3)
    with pytest.raises(ContractError):
        ac.Grid1D(-1.0, 8)


def test_midpoint_index_needs_even_cells():
    assert ac.Grid1D(2.0, 8).midpoint_index() == 4
    with pytest.raises(ContractError):
        ac.Grid1D(2.0, 9).midpoint_index()


def test_cell_gradient_affine_exact():
    grid, f = field_1d(lambda x: x, L=2.0, n=8)
    assert np.allclose(cell_gradient(f), 1.0, rtol=0, atol=1e-14)


def test_cell_gradient_constant_zero():
    grid, f = field_1d(lambda x: 3.0 + 0 * x)
    assert np.all(cell_gradient(f) == 0.0)


def test_cell_gradient_quadratic_first_cell():
    # f = x^2 on L=1, n=4: (0.0625 - 0) / 0.25 = 0.25
    grid, f = field_1d(lambda x: x**2, L=1.0, n=4)
    assert cell_gradient(f)[0] == pytest.approx(0.25, abs=1e-15)


def test_cell_average_examples():
    grid, f = field_1d(lambda x: 0 * x + 7.0)
    assert np.all(cell_average(f) == 7.0)
    grid, f = field_1d(lambda x: x)
    x = grid.nodes
    assert np.allclose(cell_average(f), 0.5 * (x[:-1] + x[1:]), atol=1e-15)


def test_midpoint_rule_exact_on_affine():
    grid, f = field_1d(lambda x: x, L=1.0, n=4)
    assert integrate_cells(grid, cell_average(f)) == pytest.approx(0.5, abs=1e-15)


def test_field_shape_and_finiteness_contracts():
    grid = ac.Grid1D(1.0, 4)
    with pytest.raises(ContractError):
        ac.NodalField(grid, np.ones(4))
    with pytest.raises(ContractError):
        ac.NodalField(grid, np.array([0, 1, np.inf, 2, 3.0]))


@settings(max_examples=25, deadline=None)
@given(slope=st.floats(-10, 10), offset=st.floats(-5, 5))
def test_affine_exactness_property(slope, offset):
    grid = ac.Grid1D(1.5, 12)
    f = ac.NodalField(grid, slope * grid.nodes + offset)
    assert np.allclose(cell_gradient(f), slope, atol=1e-12 * (1 + abs(slope)))


def test_discrete_integration_by_parts():
    """sum_cells f' g' h equals the elliptic module's bilinear form (unit
    coefficient: eta = 1, v = 0)."""
    rng = np.random.default_rng(7)
    grid = ac.Grid1D(2.0, 64)
    f = rng.normal(size=65)
    g = rng.normal(size=65)
    g[0] = g[-1] = 0.0
    fp = np.diff(f) / grid.h
    gp = np.diff(g) / grid.h
    lhs = grid.h * np.sum(fp * gp)
    gu = grad_energy_u_1d(grid, f, np.zeros(65), eta=1.0)
    rhs = 0.5 * np.dot(g, gu)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_cell_gradient_2d_affine_exact():
    grid = ac.Grid2D((1.0, 2.0), (5, 7))
    X, Y = grid.node_mesh()
    f = ac.NodalField(grid, 2.0 * X - 0.5 * Y + 1.0)
    g = cell_gradient(f)
    assert np.allclose(g[..., 0], 2.0, atol=1e-13)
    assert np.allclose(g[..., 1], -0.5, atol=1e-13)


def test_cell_average_2d():
    grid = ac.Grid2D((1.0, 1.0), (4, 4))
    X, Y = grid.node_mesh()
    f = ac.NodalField(grid, X + Y)
    XM, YM = grid.cell_midpoint_mesh()
    assert np.allclose(cell_average(f), XM + YM, atol=1e-14)
