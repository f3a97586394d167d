import json

import numpy as np
import pytest

from esn_denoise import experiment
from esn_denoise.esn import EsnConfig
from esn_denoise.experiment import SweepConfig, repetition_seed, run_cell, run_sweep


def tiny(**kw):
    base = dict(alpha_values=(-0.5, 0.0, 0.7), repetitions=2,
                esn=EsnConfig(n_reservoir=20, transient=20, train_len=400),
                eval_len=3000, master_seed=9)
    base.update(kw)
    return SweepConfig(**base)


def test_default_grid():
    grid = experiment.default_alpha_grid()
    assert len(grid) == 39 and grid[0] == -0.95 and grid[-1] == 0.95 and 0.0 in grid


def test_config_json_round_trip(tmp_path):
    cfg = tiny()
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert SweepConfig.from_json(path) == cfg


def test_unknown_keys_rejected():
    with pytest.raises(ValueError):
        SweepConfig.from_dict({"alpha_values": [0.1], "colour": "red"})
    with pytest.raises(ValueError):
        SweepConfig.from_dict({"esn": {"n_reservoir": 10, "train_len": 10, "oops": 1}})


def test_invalid_values():
    with pytest.raises(ValueError):
        tiny(alpha_values=(1.0,))
    with pytest.raises(ValueError):
        tiny(repetitions=0)


def test_quick_profile():
    q = SweepConfig().quick()
    assert q.esn.n_reservoir == 100 and q.esn.train_len == 5000 and q.eval_len == 10**5


def test_seed_depends_only_on_cell():
    s = repetition_seed(3, 0.25, 1)
    assert s == repetition_seed(3, 0.25, 1)
    assert s != repetition_seed(3, 0.25, 2)
    assert s != repetition_seed(4, 0.25, 1)
    assert s != repetition_seed(3, 0.3, 1)


def test_adding_alphas_keeps_existing_cells():
    small = run_cell(0.7, tiny())
    again = run_cell(0.7, tiny(alpha_values=(0.1, 0.7, 0.9)))
    assert [r.gain_db for r in small] == [r.gain_db for r in again]


def test_run_cell_reports():
    reports = run_cell(0.7, tiny())
    assert [(r.method, r.rep) for r in reports] == [("esn", 0), ("wiener", 0), ("esn", 1), ("wiener", 1)]
    for r in reports:
        assert r.gain_db == r.snr_out_db - r.snr_in_db
        assert r.repetitions == 2 and r.gain_std_db >= 0
        assert r.eval_len == 3000
    esn_gains = [r.gain_db for r in reports if r.method == "esn"]
    assert reports[0].gain_mean_db == pytest.approx(np.mean(esn_gains))


def test_stage_failure_names_the_stage(monkeypatch):
    def boom(*a, **k):
        raise np.linalg.LinAlgError("bad")
    monkeypatch.setattr(experiment.wiener, "fit", boom)
    with pytest.raises(experiment.StageError, match="rep=0 stage=wiener"):
        run_cell(0.7, tiny())


def test_sweep_outputs_and_determinism(tmp_path):
    cfg = tiny()
    res = run_sweep(cfg, tmp_path / "a")
    run_sweep(cfg, tmp_path / "b")
    a = (tmp_path / "a" / "gains.csv").read_bytes()
    assert a == (tmp_path / "b" / "gains.csv").read_bytes()
    assert (tmp_path / "a" / "summary.csv").read_bytes() == (tmp_path / "b" / "summary.csv").read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["config"]["master_seed"] == 9
    assert len(manifest["cells"]) == 3
    assert (tmp_path / "a" / "plot.gp").exists()

    rows = [line.split(",") for line in a.decode().splitlines() if not line.startswith("#")]
    assert rows[0] == ["alpha", "snr_in_db", "method", "rep", "snr_out_db", "gain_db", "seed"]
    assert len(rows) == 1 + 3 * 2 * 2
    # summary recomputes from the per-repetition rows
    for srow in res.summary:
        gains = [float(r[5]) for r in rows[1:] if float(r[0]) == srow["alpha"] and r[2] == srow["method"]]
        mean, std = experiment.metrics.aggregate(gains)
        assert srow["gain_mean_db"] == mean and srow["gain_std_db"] == std


def test_sweep_resumes_from_checkpoints(tmp_path, monkeypatch):
    cfg = tiny()
    run_sweep(cfg, tmp_path)
    first = (tmp_path / "gains.csv").read_bytes()

    def fail(*a, **k):
        raise AssertionError("cell should have been loaded from its checkpoint")
    monkeypatch.setattr(experiment, "run_cell", fail)
    run_sweep(cfg, tmp_path)
    assert (tmp_path / "gains.csv").read_bytes() == first


def test_changed_config_invalidates_checkpoints(tmp_path):
    run_sweep(tiny(), tmp_path)
    first = (tmp_path / "gains.csv").read_text()
    run_sweep(tiny(master_seed=10), tmp_path)
    assert (tmp_path / "gains.csv").read_text() != first
