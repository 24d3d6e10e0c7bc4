"""Flat key = value experiment configs with one section per subcommand.

Unknown keys are rejected; every physical parameter is explicit except the
documented defaults (eta-rule eps2, Cstar = 1, solver tolerances)."""

import configparser

from .altmin import AltMinConfig
from .continuation import SweepConfig, VariationProbe
from .errors import ConfigError

_SWEEP_KEYS = {
    "branch", "a", "l", "n", "eps_list", "eta_rule", "alpha", "cstar",
    "window_factor", "far_field_half_width", "max_iterations", "energy_tol",
    "residual_tol", "variations", "variation_slope", "variation_width_over_eps",
    "variation_extension",
}
_OUTPUT_KEYS = {"dir", "prefix", "plots"}


def _parse_floats(text):
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse float list from {text!r}") from exc


def load_sweep_config(path):
    """Returns (branch, eps_list, a, L, SweepConfig, output options)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if "sweep" not in parser:
        raise ConfigError("config needs a [sweep] section")
    sw = parser["sweep"]
    unknown = set(sw.keys()) - _SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown [sweep] keys: {sorted(unknown)}")
    for key in ("branch", "a", "l", "n", "eps_list"):
        if key not in sw:
            raise ConfigError(f"[sweep] is missing required key {key!r}")

    branch = sw["branch"].strip()
    a = float(sw["a"])
    L = float(sw["l"])
    n = int(sw["n"])
    eps_list = _parse_floats(sw["eps_list"])
    eta_rule = sw.get("eta_rule", "eps2").strip()
    if eta_rule != "eps2":
        eta_rule = float(eta_rule)

    altmin = AltMinConfig(
        max_iterations=int(sw.get("max_iterations", "500")),
        energy_tol=float(sw.get("energy_tol", "1e-11")),
        residual_tol=float(sw.get("residual_tol", "1e-9")),
    )
    probe = None
    if sw.get("variations", "no").strip().lower() in ("yes", "true", "1", "on"):
        probe = VariationProbe(
            slope=float(sw.get("variation_slope", "0.7")),
            width_over_eps=float(sw.get("variation_width_over_eps", "6.0")),
            extension_name=sw.get("variation_extension", "affine").strip(),
        )
    cfg = SweepConfig(
        n_cells=n,
        eta_rule=eta_rule,
        alpha=float(sw.get("alpha", "0.2")),
        cstar=float(sw.get("cstar", "1.0")),
        window_factor=float(sw.get("window_factor", "10.0")),
        far_field_half_width=float(sw.get("far_field_half_width", "0.25")),
        altmin=altmin,
        variations=probe,
    )

    out = {"dir": ".", "prefix": "sweep", "plots": True}
    if "output" in parser:
        sec = parser["output"]
        unknown = set(sec.keys()) - _OUTPUT_KEYS
        if unknown:
            raise ConfigError(f"unknown [output] keys: {sorted(unknown)}")
        out["dir"] = sec.get("dir", ".")
        out["prefix"] = sec.get("prefix", "sweep")
        out["plots"] = sec.get("plots", "yes").strip().lower() in (
            "yes", "true", "1", "on")
    extra = set(parser.sections()) - {"sweep", "output"}
    if extra:
        raise ConfigError(f"unknown config sections: {sorted(extra)}")
    return branch, eps_list, a, L, cfg, out
