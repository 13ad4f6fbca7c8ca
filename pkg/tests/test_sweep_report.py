import csv
import dataclasses
import math
import os

import numpy as np
import pytest

from misodof.channel import DopplerConfig
from misodof.cli import main
from misodof.config import SimConfig, load_config
from misodof.dof import fit_all
from misodof.errors import ConfigError
from misodof.report import DOF_COLUMNS, SAMPLE_COLUMNS, emit_report, format_float
from misodof.sweep import hybrid_plan, run_block, run_sweep, work_items

SMALL = SimConfig(alphas=(0.0, 0.5), p_grid_db=(30.0, 40.0, 50.0), trials=300, block_size=128)


def _read(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_samples_are_well_formed():
    samples = run_sweep(SMALL)
    assert len(samples) == 2 * 3 * 4
    for s in samples:
        assert s.trials == 300 and s.rate1 >= 0 and s.rate2 >= 0
        for f in (s.e_delta, s.e_mc, s.e_mimo):
            assert math.isnan(f) or 0 <= f <= 1
        if s.scheme != "hybrid":
            assert math.isnan(s.kappa)


def test_blocks_cover_trials():
    items = work_items(SMALL)
    per_point = [n for key, n in items if key[:3] == (0, 0, 0)]
    assert per_point == [128, 128, 44]
    assert len({k for k, _ in items}) == len(items)


def test_block_is_pure():
    a = run_block(SMALL, (1, 2, 3, 1), 50)
    b = run_block(SMALL, (1, 2, 3, 1), 50)
    for k in a:
        np.testing.assert_array_equal(a[k], b[k])


def test_validation_before_trials():
    with pytest.raises(ConfigError):
        run_sweep(dataclasses.replace(SMALL, schemes=()))


def test_hybrid_kappa_tracks_formula_at_alpha_zero():
    cfg = dataclasses.replace(SMALL, alphas=(0.0,), p_grid_db=tuple(range(30, 61, 5)))
    for d in cfg.p_grid_db:
        plan = hybrid_plan(10 ** (d / 10), 0.0, cfg)
        assert plan.kappa == pytest.approx(plan.kappa_formula, rel=0.10)


def test_hybrid_matches_zf_at_alpha_one():
    cfg = SimConfig(alphas=(1.0,), p_grid_db=(40.0, 50.0, 60.0), trials=5000, schemes=("zf", "hybrid"))
    s = run_sweep(cfg)
    for zf, hy in zip(s[0::2], s[1::2]):
        assert hy.rate1 == pytest.approx(zf.rate1, rel=0.05)
        assert hy.rate2 == pytest.approx(zf.rate2, rel=0.05)


def test_range_errors_fall_with_power():
    cfg = SimConfig(alphas=(0.5,), p_grid_db=(30.0, 45.0, 60.0), trials=20_000, schemes=("hybrid",))
    e = [s.e_delta for s in run_sweep(cfg)]
    assert e[0] > e[1] > e[2]


def test_doppler_sweep_runs():
    cfg = SimConfig(doppler=DopplerConfig(f=0.1), p_grid_db=(30.0, 40.0), trials=200,
                    schemes=("zf", "hybrid"))
    s = run_sweep(cfg)
    assert all(x.alpha == pytest.approx(0.8) for x in s)
    assert all(x.rate > 0 for x in s)


def test_report_files(tmp_path):
    samples = run_sweep(SMALL)
    est = fit_all(samples)
    paths = emit_report(samples, est, SMALL, out=str(tmp_path), plots=True)
    assert {os.path.basename(p) for p in paths} == {
        "samples.csv", "dof_vs_alpha.csv", "dof_estimates.csv", "run_config.txt", "rates.png",
        "dof_vs_alpha.png"}
    raw = (tmp_path / "samples.csv").read_bytes()
    assert raw.count(b"\r\n") == len(samples) + 1
    rows = _read(tmp_path / "samples.csv")
    assert tuple(rows[0]) == SAMPLE_COLUMNS
    dof = _read(tmp_path / "dof_vs_alpha.csv")
    assert tuple(dof[0]) == DOF_COLUMNS
    assert [r[2] for r in dof[1:]] == [format_float(2 / 3), "0.75"]
    assert all(r[1] for r in dof[1:])
    assert load_config(tmp_path / "run_config.txt") == SMALL


def test_empty_samples_rejected(tmp_path):
    with pytest.raises(ConfigError):
        emit_report([], [], SMALL, out=str(tmp_path))


def test_float_format():
    assert format_float(2 / 3) == "0.666666667"
    assert format_float(123456789012.0) == "1.23456789e+11"
    assert format_float(float("nan")) == ""


def test_cli_theory(tmp_path, capsys):
    assert main(["theory", "--alpha", "0,0.25,0.5,0.75,1", "--out", str(tmp_path)]) == 0
    rows = _read(tmp_path / "dof_vs_alpha.csv")
    assert [round(float(r[2]), 3) for r in rows[1:]] == [0.667, 0.7, 0.75, 0.833, 1.0]
    assert [r[1] for r in rows[1:]] == [""] * 5


def test_cli_sweep_and_replay(tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    cfg = tmp_path / "run.cfg"
    cfg.write_text("trials = 200\nschemes = zf,hybrid\nalpha = 0.9\npgrid = 30:10:50\nseed = 5\n")
    assert main(["sweep", "--config", str(cfg), "--alpha", "0.5", "--out", str(out1), "--no-plots"]) == 0
    assert load_config(out1 / "run_config.txt").alphas == (0.5,)
    assert main(["sweep", "--config", str(out1 / "run_config.txt"), "--out", str(out2), "--no-plots"]) == 0
    for name in ("samples.csv", "dof_vs_alpha.csv", "dof_estimates.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_cli_errors(tmp_path, capsys):
    assert main(["sweep", "--schemes", "bogus", "--out", str(tmp_path)]) == 2
    assert "unknown schemes" in capsys.readouterr().err
    assert main(["sweep", "--doppler", "15,2e9,1e-3,3e8", "--out", str(tmp_path)]) == 2


def test_cli_validate(capsys):
    assert main(["validate", "--seed", "3"]) == 0
    assert capsys.readouterr().out.count("PASS") == 6
