"""Figure rendering for the report paths.

Every figure is also mirrored as a gnuplot-ready .dat file next to the
image, so downstream tooling can re-render without matplotlib.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .criticality import discrepancy, flux_constant
from .measures import surface_densities
from .stateio import write_dat


def render_state(state, png_path, dat_path=None, title=None):
    """Profiles (u, v) plus the per-cell conservation and density panels."""
    grid = state.grid
    x = grid.nodes
    xm = grid.cell_midpoints
    _, _, flux = flux_constant(state)
    _, _, disc = discrepancy(state)
    dens_grad, dens_pot, dens_w = surface_densities(state)

    fig, axs = plt.subplots(2, 2, figsize=(9, 6), constrained_layout=True)
    axs[0, 0].plot(x, state.u.values, label="u")
    axs[0, 0].plot(x, state.v.values, label="v")
    axs[0, 0].set_xlabel("x")
    axs[0, 0].legend(frameon=False)
    axs[0, 0].set_title(title or f"eps={state.epsilon:g}, eta={state.eta:g}")

    axs[0, 1].plot(xm, dens_grad, label=r"$\varepsilon|v'|^2$")
    axs[0, 1].plot(xm, dens_pot, label=r"$(1-v)^2/4\varepsilon$", ls="--")
    axs[0, 1].plot(xm, dens_w, label=r"$|w'|$", ls=":")
    axs[0, 1].set_xlabel("x")
    axs[0, 1].set_title("surface densities")
    axs[0, 1].legend(frameon=False)

    axs[1, 0].plot(xm, flux)
    axs[1, 0].set_xlabel("x")
    axs[1, 0].set_title(r"flux $(\eta+v^2)u'$")

    axs[1, 1].plot(xm, disc)
    axs[1, 1].set_xlabel("x")
    axs[1, 1].set_title("discrepancy")
    fig.savefig(png_path, dpi=140)
    plt.close(fig)

    if dat_path is not None:
        write_dat(dat_path,
                  [xm, flux, disc, dens_grad, dens_pot, dens_w],
                  "x flux discrepancy eps_gradsq_density potential_density w_density")


def render_sweep(result, png_path, dat_path=None):
    """Convergence panels along the sweep (energies, flux, v_mid, mass)."""
    eps = np.array([r.eps for r in result.records])
    total = np.array([r.energy.total for r in result.records])
    c = np.array([r.report.flux_mean for r in result.records])
    vmid = np.array([r.report.v_mid for r in result.records])
    mass = np.array([r.mass_window for r in result.records])
    equip = np.array([r.equip for r in result.records])

    fig, axs = plt.subplots(2, 2, figsize=(9, 6), constrained_layout=True)
    axs[0, 0].plot(eps, total, "o-")
    if "at_limit" in result.limits:
        axs[0, 0].axhline(result.limits["at_limit"].limit, color="k", lw=0.8,
                          ls="--", label="extrapolated")
        axs[0, 0].legend(frameon=False)
    axs[0, 0].set_xlabel("eps")
    axs[0, 0].set_title("total energy")

    axs[0, 1].plot(eps, c, "o-")
    axs[0, 1].set_xlabel("eps")
    axs[0, 1].set_title("flux constant c")

    axs[1, 0].semilogy(eps, np.maximum(vmid, 1e-16), "o-", label="v(L/2)")
    axs[1, 0].semilogy(eps, np.sqrt(eps), "k--", lw=0.8, label=r"$\sqrt{\varepsilon}$")
    axs[1, 0].set_xlabel("eps")
    axs[1, 0].legend(frameon=False)
    axs[1, 0].set_title("midpoint value")

    axs[1, 1].plot(eps, mass, "o-", label="mass near L/2")
    axs[1, 1].plot(eps, equip, "s-", label="equipartition residual")
    axs[1, 1].set_xlabel("eps")
    axs[1, 1].legend(frameon=False)
    fig.suptitle(f"{result.branch} branch, a={result.a:g}, L={result.L:g}")
    fig.savefig(png_path, dpi=140)
    plt.close(fig)

    if dat_path is not None:
        write_dat(dat_path, [eps, total, c, vmid, mass, equip],
                  "eps total c v_mid mass_window equip_residual")
