import numpy as np
import pytest

import atcrit as ac
from atcrit.continuation import LimitTolerances, SweepConfig, limit_checks
from atcrit.errors import ConfigError


def test_extrapolate_constant_sequence():
    fit = ac.extrapolate([(0.1, 3.0), (0.05, 3.0), (0.025, 3.0)])
    assert fit.limit == pytest.approx(3.0, abs=1e-14)
    assert fit.residual <= 1e-14


def test_extrapolate_sqrt_model():
    eps = [0.08, 0.04, 0.02, 0.01]
    pairs = [(e, 1.0 + np.sqrt(e)) for e in eps]
    fit = ac.extrapolate(pairs)
    assert fit.limit == pytest.approx(1.0, abs=1e-10)
    assert fit.exponent == 0.5


def test_extrapolate_linear_model():
    eps = [0.08, 0.04, 0.02]
    fit = ac.extrapolate([(e, 2.0 - 3.0 * e) for e in eps])
    assert fit.limit == pytest.approx(2.0, abs=1e-12)
    assert fit.exponent == 1.0


def test_extrapolate_needs_three_pairs():
    with pytest.raises(ConfigError):
        ac.extrapolate([(0.1, 1.0), (0.05, 2.0)])


def test_sweep_validates_resolution():
    cfg = SweepConfig(n_cells=64)  # h = 2/64 = 0.03 > 0.01/8
    with pytest.raises(ConfigError) as err:
        ac.sweep("affine", [0.08, 0.01], 1.0, 2.0, cfg)
    assert "eps/8" in str(err.value)


def test_sweep_rejects_increasing_eps():
    cfg = SweepConfig(n_cells=2048)
    with pytest.raises(ConfigError):
        ac.sweep("affine", [0.04, 0.08], 1.0, 2.0, cfg)


def test_sweep_rejects_unknown_branch():
    cfg = SweepConfig(n_cells=2048)
    with pytest.raises(ConfigError):
        ac.sweep("spiral", [0.08], 1.0, 2.0, cfg)


def test_single_eps_sweep_degenerate():
    cfg = SweepConfig(n_cells=640)
    res = ac.sweep("affine", [0.05], 1.0, 2.0, cfg)
    assert len(res.records) == 1
    assert res.limits == {} and res.checks == {}


def test_sweep_deterministic():
    cfg = SweepConfig(n_cells=640)
    eps = [0.08, 0.06, 0.05]
    r1 = ac.sweep("affine", eps, 1.0, 2.0, cfg)
    r2 = ac.sweep("affine", eps, 1.0, 2.0, cfg)
    for a, b in zip(r1.records, r2.records):
        assert a.energy.total == b.energy.total
        assert a.report.flux_mean == b.report.flux_mean
        assert a.config_hash == b.config_hash
    assert r1.limits["c0"].limit == r2.limits["c0"].limit


def test_records_carry_config_hash():
    cfg = SweepConfig(n_cells=640)
    res = ac.sweep("affine", [0.08, 0.06, 0.05], 1.0, 2.0, cfg)
    hashes = {r.config_hash for r in res.records}
    assert len(hashes) == 1
    cfg2 = SweepConfig(n_cells=640, cstar=2.0)
    res2 = ac.sweep("affine", [0.08, 0.06, 0.05], 1.0, 2.0, cfg2)
    assert res2.records[0].config_hash != res.records[0].config_hash


def test_limit_checks_synthetic_failure():
    # c0 = 0.3 is in neither branch set for a = 1, L = 2
    cfg = SweepConfig(n_cells=640)
    res = ac.sweep("affine", [0.08, 0.06, 0.05], 1.0, 2.0, cfg)
    fake_limits = dict(res.limits)
    fake_limits["c0"] = ac.ExtrapolationFit(limit=0.3, residual=0.0, exponent=1.0)
    fake = ac.SweepResult(branch=res.branch, a=res.a, L=res.L,
                          records=res.records, limits=fake_limits,
                          checks={}, states=res.states)
    checks = limit_checks(fake, LimitTolerances())
    assert not checks["c0_in_branch_set"]
    assert checks["values"]["c0"] == 0.3


def test_affine_mini_sweep_checks_pass():
    cfg = SweepConfig(n_cells=2048)
    res = ac.sweep("affine", [0.04, 0.02, 0.01], 1.0, 2.0, cfg)
    assert res.checks["c0_in_branch_set"]
    assert res.checks["d0_plus_c0sq_zero"]
    assert res.checks["at_limit_matches_ms"]
    for rec in res.records:
        assert rec.report.branch == "affine"
        assert not rec.constraint_active
