"""Serialization: state CSV (two blocks), JSON summaries, gnuplot-ready
.dat files.  All floating-point output uses 17 significant digits so a
written state reloads bit-identically."""

import json

import numpy as np

from .criticality import criticality_report
from .energy import PhaseFieldState, at_energy
from .errors import ConfigError
from .measures import surface_densities
from .mesh import Grid1D, NodalField

FMT = "%.17g"


def _fmt(x):
    return FMT % float(x)


def write_state_csv(path, state: PhaseFieldState):
    """Two blocks: per-node (x, u, v) at nodes, per-cell diagnostics at
    cell midpoints."""
    if state.grid.ndim != 1:
        raise ConfigError("state CSV is defined for 1D states")
    grid = state.grid
    from .criticality import discrepancy, flux_constant

    _, _, flux = flux_constant(state)
    _, _, disc = discrepancy(state)
    dens_grad, dens_pot, dens_w = surface_densities(state)
    lines = [
        "# atcrit state v1",
        f"# L={_fmt(grid.length)} n={grid.n_cells} eps={_fmt(state.epsilon)} "
        f"eta={_fmt(state.eta)} g0={_fmt(state.g[0])} gL={_fmt(state.g[1])}",
        "# block: nodes",
        "x,u,v",
    ]
    for x, u, v in zip(grid.nodes, state.u.values, state.v.values):
        lines.append(f"{_fmt(x)},{_fmt(u)},{_fmt(v)}")
    lines.append("# block: cells")
    lines.append("x,flux,discrepancy,eps_gradsq_density,potential_density,w_density")
    for row in zip(grid.cell_midpoints, flux, disc, dens_grad, dens_pot, dens_w):
        lines.append(",".join(_fmt(t) for t in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_state_csv(path) -> PhaseFieldState:
    """Rebuild the state from the per-node block; diagnostics recompute
    bit-identically from the reloaded nodal values."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != "# atcrit state v1":
        raise ConfigError(f"{path}: not an atcrit state file")
    meta = {}
    for tok in lines[1].lstrip("# ").split():
        k, val = tok.split("=")
        meta[k] = val
    n = int(meta["n"])
    try:
        i0 = lines.index("# block: nodes")
    except ValueError:
        raise ConfigError(f"{path}: missing node block") from None
    rows = lines[i0 + 2: i0 + 2 + n + 1]
    data = np.array([[float(t) for t in r.split(",")] for r in rows])
    grid = Grid1D(float(meta["L"]), n)
    return PhaseFieldState(
        grid,
        NodalField(grid, data[:, 1]),
        NodalField(grid, data[:, 2]),
        float(meta["eps"]),
        float(meta["eta"]),
        (float(meta["g0"]), float(meta["gL"])),
    )


def check_report(state: PhaseFieldState, cstar=1.0):
    """The full criticality + measures report as a JSON-ready dict."""
    report = criticality_report(state, cstar=cstar)
    bd = at_energy(state)
    from .measures import dirac_concentration, far_field_report

    frac, concentrated = dirac_concentration(state)
    out = {"energy": bd.as_dict(), "criticality": report.as_dict()}
    out["measures"] = {
        "dirac_mass_fraction": frac,
        "dirac_concentrated": concentrated,
        "far_field_quarter": far_field_report(state, 0.25),
    }
    return out


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def write_dat(path, columns, header):
    """Whitespace-separated plot data with a comment header line."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    with open(path, "w") as fh:
        fh.write(f"# {header}\n")
        for row in zip(*cols):
            fh.write(" ".join(_fmt(t) for t in row) + "\n")
