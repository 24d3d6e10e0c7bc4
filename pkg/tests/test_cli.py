import json
import os

import numpy as np
import pytest

import atcrit as ac
from atcrit.cli import main
from atcrit.stateio import load_state_csv, write_state_csv
from conftest import solve_affine


def test_solve_happy_path(tmp_path):
    out = tmp_path / "run"
    code = main(["solve", "--a", "1", "--L", "2", "--eps", "0.05",
                 "--n", "512", "--out", str(out), "--prefix", "demo"])
    assert code == 0
    assert (out / "demo_state.csv").exists()
    assert (out / "demo_report.json").exists()
    assert (out / "demo_state.png").exists()
    assert (out / "demo_state.dat").exists()
    payload = json.loads((out / "demo_report.json").read_text())
    assert payload["criticality"]["branch"] == "affine"
    assert payload["termination"] == "critical"


def test_state_roundtrip_bit_identical(tmp_path):
    state, _ = solve_affine(512, 0.05)
    path = tmp_path / "state.csv"
    write_state_csv(path, state)
    loaded = load_state_csv(path)
    assert np.array_equal(loaded.u.values, state.u.values)
    assert np.array_equal(loaded.v.values, state.v.values)
    assert loaded.epsilon == state.epsilon and loaded.eta == state.eta
    r1 = ac.criticality_report(state)
    r2 = ac.criticality_report(loaded)
    assert r1.flux_mean == r2.flux_mean
    assert r1.discrepancy_mean == r2.discrepancy_mean
    assert r1.v_mid == r2.v_mid


def _write_cfg(path, body):
    path.write_text(body)
    return str(path)


def test_sweep_underresolved_exit_2(tmp_path, capsys):
    cfg = _write_cfg(tmp_path / "bad.cfg", """
[sweep]
branch = affine
a = 1.0
l = 2.0
n = 64
eps_list = 0.08, 0.01
""")
    code = main(["sweep", cfg])
    assert code == 2
    err = capsys.readouterr().err
    assert "eps/8" in err


def test_sweep_unknown_keys_exit_2(tmp_path, capsys):
    cfg = _write_cfg(tmp_path / "bad.cfg", """
[sweep]
branch = affine
a = 1.0
l = 2.0
n = 640
eps_list = 0.08, 0.06, 0.05
frobnicate = 7
""")
    code = main(["sweep", cfg])
    assert code == 2
    assert "frobnicate" in capsys.readouterr().err


def test_sweep_happy_path_and_schema(tmp_path):
    cfg = _write_cfg(tmp_path / "ok.cfg", f"""
[sweep]
branch = affine
a = 1.0
l = 2.0
n = 2048
eps_list = 0.04, 0.02, 0.01

[output]
dir = {tmp_path / 'out'}
prefix = aff
""")
    code = main(["sweep", cfg])
    assert code == 0
    summary = json.loads((tmp_path / "out" / "aff_summary.json").read_text())
    assert (tmp_path / "out" / "aff_records.csv").exists()
    assert (tmp_path / "out" / "aff_sweep.png").exists()
    assert (tmp_path / "out" / "aff_sweep.dat").exists()
    assert (tmp_path / "out" / "aff_state_eps0.01.csv").exists()

    # every summary field name is documented in the schema file
    schema = json.loads(open(
        os.path.join(os.path.dirname(__file__), "..", "docs", "schema.json")
    ).read())
    doc = schema["sweep_summary"]
    for key in summary:
        assert key in doc or key in ("records", "limits", "checks")
    for key in summary["records"][0]:
        assert key in doc["records"], key
    for key in summary["limits"]:
        assert key in doc["limits"], key
    for key in summary["checks"]:
        assert key in doc["checks"], key


def test_check_subcommand(tmp_path):
    state, _ = solve_affine(512, 0.05)
    path = tmp_path / "state.csv"
    write_state_csv(path, state)
    code = main(["check", "--state", str(path), "--out", str(tmp_path),
                 "--prefix", "chk", "--no-plots"])
    assert code == 0
    payload = json.loads((tmp_path / "chk_check.json").read_text())
    assert payload["criticality"]["branch"] == "affine"
    assert payload["measures"]["far_field_quarter"] >= 0


def test_variations_subcommand(tmp_path):
    code = main(["variations", "--a", "1", "--L", "2", "--eps", "0.05",
                 "--n", "1024", "--x", "poly_bump",
                 "--x-params", "amplitude=0.7", "--g", "affine",
                 "--out", str(tmp_path), "--prefix", "var"])
    assert code == 0
    payload = json.loads((tmp_path / "var_variations.json").read_text())
    assert payload["inner_first_abs_diff"] <= 1e-5
    assert payload["inner_second_abs_diff"] <= 1e-4
    assert payload["outer_first"] == pytest.approx(payload["outer_first_fd"],
                                                   abs=1e-7)


def test_missing_config_file_exit_2(capsys):
    assert main(["sweep", "/nonexistent/nope.cfg"]) == 2
