"""Critical points of the Ambrosio-Tortorelli phase-field functional.

Numerical library and CLI for computing critical points of

    AT_eps(u, v) = int (eta + v^2)|grad u|^2
                 + int eps|grad v|^2 + (1 - v)^2 / (4 eps)

with Dirichlet data on both fields (u = g, v = 1 on the boundary), and for
checking their eps -> 0 behavior against the Mumford-Shah limit: flux and
discrepancy conservation, branch selection (affine vs jump), energy
convergence, equipartition, Dirac concentration of the surface energy, and
closed-form first/second outer/inner variations.
"""

from .mesh import Grid1D, Grid2D, NodalField
from .energy import (
    EnergyBreakdown,
    PhaseFieldState,
    PiecewiseAffine1D,
    at_energy,
    ms_energy_1d,
    ms_min_value,
    phi,
    w_field,
)
from .elliptic import LinearSolveConfig, solve_u_given_v, solve_v_given_u
from .altmin import (
    AltMinConfig,
    AltMinTrace,
    alternate_minimize,
    constrained_jump_construct,
    reflect_and_extend,
)
from .criticality import (
    CriticalityReport,
    classify_branch,
    criticality_report,
    discrepancy,
    flux_constant,
    noether_residual,
    residuals,
    symmetry_monotonicity_check,
)
from .fields import ExtensionSpec, VectorFieldSpec, extension, vector_field
from .variations import (
    Direction,
    flow_integrate,
    inner_first_closed,
    inner_second_closed,
    inner_via_flow,
    ms_inner_first_1d,
    ms_second_inner_limit_1d,
    outer_first,
    outer_second,
)
from .measures import (
    far_field_report,
    mass_in_window,
    surface_densities,
    varifold_moment_2d,
)
from .continuation import (
    ExtrapolationFit,
    SweepRecord,
    SweepResult,
    extrapolate,
    limit_checks,
    sweep,
)
from .errors import ConfigError, ContractError, SolverError

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
