"""Command-line entry point.

Subcommands:
  solve       one state (affine or jump seeded), CSV + JSON + figures
  sweep       eps -> 0 continuation from a config file
  variations  closed-form vs flow-based variation values on a state
  check       criticality + measures report for a saved state

Exit codes: 0 success, 1 check failure, 2 config error, 3 solver error.
"""

import argparse
import os
import sys

import numpy as np

from .altmin import (
    AltMinConfig,
    alternate_minimize,
    constrained_jump_construct,
    initial_state,
    reflect_and_extend,
)
from .config import load_sweep_config
from .continuation import sweep as run_sweep
from .energy import at_energy
from .errors import ConfigError, ContractError, SolverError
from .fields import extension, vector_field
from .mesh import Grid1D, NodalField
from .stateio import check_report, load_state_csv, write_json, write_state_csv
from .variations import (
    Direction,
    inner_first_closed,
    inner_second_closed,
    inner_via_flow,
    outer_first,
    outer_second,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _parse_params(text):
    if not text:
        return {}
    out = {}
    for tok in text.split(","):
        k, v = tok.split("=")
        try:
            out[k.strip()] = float(v)
        except ValueError:
            out[k.strip()] = v.strip()
    return out


def _solve_one(args):
    grid = Grid1D(args.L, args.n)
    eta = args.eps**2 if args.eta is None else args.eta
    cfg = AltMinConfig(max_iterations=args.max_iterations)
    if args.branch == "affine":
        state0 = initial_state(grid, args.a, args.eps, eta, cfg)
        state, trace = alternate_minimize(state0, cfg)
        return state, trace.termination, False
    half = constrained_jump_construct(grid, args.a, args.L, args.eps, eta,
                                      args.alpha, cfg=cfg, on_active="clamp")
    state = reflect_and_extend(half.state, args.a,
                               allow_constrained=half.constraint_active)
    return state, half.trace.termination, half.constraint_active


def cmd_solve(args):
    os.makedirs(args.out, exist_ok=True)
    state, termination, active = _solve_one(args)
    prefix = os.path.join(args.out, args.prefix)
    write_state_csv(prefix + "_state.csv", state)
    payload = check_report(state, cstar=args.cstar)
    payload["termination"] = termination
    payload["constraint_active"] = active
    write_json(prefix + "_report.json", payload)
    if not args.no_plots:
        from .plots import render_state
        render_state(state, prefix + "_state.png", prefix + "_state.dat")
    print(f"wrote {prefix}_state.csv ({termination})")
    return EXIT_OK


def cmd_sweep(args):
    branch, eps_list, a, L, cfg, out = load_sweep_config(args.config)
    result = run_sweep(branch, eps_list, a, L, cfg)
    os.makedirs(out["dir"], exist_ok=True)
    prefix = os.path.join(out["dir"], out["prefix"])
    summary = result.summary()
    write_json(prefix + "_summary.json", summary)
    _write_sweep_csv(prefix + "_records.csv", result)
    for state, rec in zip(result.states, result.records):
        write_state_csv(prefix + f"_state_eps{rec.eps:g}.csv", state)
    if out["plots"]:
        from .plots import render_sweep
        render_sweep(result, prefix + "_sweep.png", prefix + "_sweep.dat")
    failed = [k for k, ok in result.checks.items()
              if k != "values" and not ok]
    print(f"wrote {prefix}_summary.json; "
          + ("all limit checks passed" if not failed
             else f"failed checks: {failed}"))
    return EXIT_OK if not failed else EXIT_CHECK_FAILED


def _write_sweep_csv(path, result):
    cols = ["eps", "eta", "total", "bulk", "grad_surface", "potential_surface",
            "equipartition_residual", "flux_mean", "flux_dev",
            "discrepancy_mean", "discrepancy_dev", "v_mid", "v_min", "branch",
            "symmetry_dev", "mass_window", "far_field", "constraint_active"]
    lines = [",".join(cols)]
    for r in result.records:
        s = r.summary()
        lines.append(",".join(str(s[c]) for c in cols))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_variations(args):
    if args.state:
        state = load_state_csv(args.state)
    else:
        state, _, _ = _solve_one(args)
    L = state.grid.length
    xp = _parse_params(args.x_params)
    xp.setdefault("length", L)
    X = vector_field(args.x, **xp)
    gp = _parse_params(args.g_params)
    if args.g in ("affine", "quadratic", "boundary_ramp"):
        gp.setdefault("length", L)
        gp.setdefault("g0", state.g[0])
        gp.setdefault("gL", state.g[1])
    G = extension(args.g, **gp)

    i1c = inner_first_closed(state, X, G)
    i1f = inner_via_flow(state, X, G, order=1)
    i2c = inner_second_closed(state, X, G)
    i2f = inner_via_flow(state, X, G, order=2)

    # outer variations against a canonical smooth direction, checked by
    # central differences of the energy
    x = state.grid.nodes
    phi_dir = np.sin(2 * np.pi * x / L) * np.sin(np.pi * x / L)
    psi_dir = np.sin(np.pi * x / L) ** 2
    phi_dir[0] = phi_dir[-1] = psi_dir[0] = psi_dir[-1] = 0.0
    direction = Direction(NodalField(state.grid, phi_dir),
                          NodalField(state.grid, psi_dir))
    o1 = outer_first(state, direction)
    o2 = outer_second(state, direction)
    t = 1e-5
    up = state.with_fields(u_values=state.u.values + t * phi_dir,
                           v_values=state.v.values + t * psi_dir)
    dn = state.with_fields(u_values=state.u.values - t * phi_dir,
                           v_values=state.v.values - t * psi_dir)
    e0, ep, em = (at_energy(s).total for s in (state, up, dn))
    payload = {
        "inner_first_closed": i1c,
        "inner_first_flow": i1f,
        "inner_first_abs_diff": abs(i1c - i1f),
        "inner_second_closed": i2c,
        "inner_second_flow": i2f,
        "inner_second_abs_diff": abs(i2c - i2f),
        "outer_first": o1,
        "outer_first_fd": (ep - em) / (2 * t),
        "outer_second": o2,
        "outer_second_fd": (ep - 2 * e0 + em) / t**2,
        "x_field": args.x,
        "extension": args.g,
    }
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, args.prefix + "_variations.json")
    write_json(path, payload)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_check(args):
    state = load_state_csv(args.state)
    payload = check_report(state, cstar=args.cstar)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, args.prefix + "_check.json")
    write_json(path, payload)
    if not args.no_plots:
        from .plots import render_state
        render_state(state, os.path.join(args.out, args.prefix + "_check.png"),
                     os.path.join(args.out, args.prefix + "_check.dat"))
    print(f"wrote {path}")
    return EXIT_OK


def _add_solve_flags(p, need_out=True):
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--L", type=float, default=2.0)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--eta", type=float, default=None,
                   help="default: eta-rule eps^2")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--branch", choices=("affine", "jump"), default="affine")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--cstar", type=float, default=1.0)
    p.add_argument("--max-iterations", type=int, default=500)
    if need_out:
        p.add_argument("--out", default="out")
        p.add_argument("--prefix", default="atcrit")
        p.add_argument("--no-plots", action="store_true")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="atcrit",
        description="Critical points of the Ambrosio-Tortorelli functional "
                    "and their eps -> 0 diagnostics")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one state and write reports")
    _add_solve_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="run a continuation from a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("variations", help="variation values on a state")
    p.add_argument("--state", default=None, help="saved state CSV")
    _add_solve_flags(p, need_out=False)
    p.add_argument("--x", default="poly_bump", help="catalogue field id")
    p.add_argument("--x-params", default="", help="k=v,k=v field parameters")
    p.add_argument("--g", default="affine", help="catalogue extension id")
    p.add_argument("--g-params", default="", help="k=v,k=v extension parameters")
    p.add_argument("--out", default="out")
    p.add_argument("--prefix", default="atcrit")
    p.set_defaults(func=cmd_variations)

    p = sub.add_parser("check", help="criticality + measures report")
    p.add_argument("--state", required=True)
    p.add_argument("--cstar", type=float, default=1.0)
    p.add_argument("--out", default="out")
    p.add_argument("--prefix", default="atcrit")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ContractError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
