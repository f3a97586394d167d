"""Processing gain versus map parameter: ESN against the FIR Wiener baseline."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__, chaos, esn, metrics, noise, wiener

log = logging.getLogger(__name__)

QUICK_PROFILE = {"n_reservoir": 100, "train_len": 5000}
QUICK_EVAL_LEN = 10**5


def default_alpha_grid() -> tuple[float, ...]:
    return tuple(round(-0.95 + 0.05 * i, 10) for i in range(39))


@dataclass(frozen=True)
class SweepConfig:
    alpha_values: tuple = field(default_factory=default_alpha_grid)
    snr_in_db: float = 2.0
    repetitions: int = 5
    esn: esn.EsnConfig = field(default_factory=esn.EsnConfig)
    wiener_taps: int = 10
    eval_len: int = 10**6 - 25000
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha_values", tuple(float(a) for a in self.alpha_values))
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.alpha_values:
            raise ValueError("alpha_values is empty")
        for a in self.alpha_values:
            if not -1.0 < a < 1.0:
                raise ValueError(f"alpha={a} outside (-1, 1)")
        if self.eval_len < 1 or self.wiener_taps < 1:
            raise ValueError("eval_len and wiener_taps must be positive")

    @property
    def record_len(self) -> int:
        return self.esn.transient + self.esn.train_len + self.eval_len

    def quick(self) -> "SweepConfig":
        return replace(self, esn=self.esn.with_params(**QUICK_PROFILE), eval_len=QUICK_EVAL_LEN)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha_values"] = list(self.alpha_values)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
        data = dict(data)
        if "esn" in data:
            data["esn"] = esn.EsnConfig.from_dict(data["esn"])
        if "alpha_values" in data:
            data["alpha_values"] = tuple(data["alpha_values"])
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _alpha_key(alpha: float) -> int:
    return int(round((alpha + 1.0) * 1e9))


def repetition_seed(master_seed: int, alpha: float, rep: int) -> int:
    """Seed for one (alpha, repetition) cell; independent of the rest of the grid."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(_alpha_key(alpha), rep))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def derived_seeds(rep_seed: int) -> dict:
    d0_seq, noise_seq, esn_seq = np.random.SeedSequence(rep_seed).spawn(3)
    return {
        "d0": float(np.random.default_rng(d0_seq).uniform(-0.99, 0.99)),
        "noise": int(noise_seq.generate_state(1, np.uint64)[0] >> np.uint64(1)),
        "esn": int(esn_seq.generate_state(1, np.uint64)[0] >> np.uint64(1)),
    }


class StageError(RuntimeError):
    pass


def run_repetition(alpha: float, config: SweepConfig, rep: int) -> list[metrics.GainReport]:
    """One training/test scenario: both methods on identical data and windows."""
    rep_seed = repetition_seed(config.master_seed, alpha, rep)
    seeds = derived_seeds(rep_seed)
    ell, L = config.esn.transient, config.esn.train_len
    split, total = ell + L, config.record_len
    stage = "orbit"
    try:
        orbit = chaos.generate_orbit(chaos.MapParams(alpha, seeds["d0"]), total)
        stage = "noise"
        sig = noise.corrupt(orbit.samples, noise.NoiseSpec(config.snr_in_db, seeds["noise"]))
        stage = "esn"
        trained = esn.fit(config.esn.with_params(seed=seeds["esn"]), sig.u[:split], sig.d[:split])
        y_esn = esn.run(trained, sig.u[split:total])[:, 0]
        stage = "wiener"
        filt = wiener.fit(sig.u[ell:split], sig.d[ell:split], config.wiener_taps)
        y_wf = wiener.apply(filt, sig.u)[split:total]
    except Exception as exc:
        raise StageError(f"alpha={alpha} rep={rep} stage={stage}: {exc}") from exc

    d_eval = sig.d[split:total]
    reports = []
    for method, y in (("esn", y_esn), ("wiener", y_wf)):
        snr_db = metrics.to_db(metrics.snr_out(y, d_eval))
        reports.append(metrics.GainReport(
            alpha=alpha,
            snr_in_db=config.snr_in_db,
            snr_out_db=snr_db,
            gain_db=snr_db - config.snr_in_db,
            method=method,
            rep=rep,
            seed=rep_seed,
            eval_len=config.eval_len,
            snr_out_ref_db=metrics.to_db(metrics.snr_out_ref(y, d_eval)),
        ))
    return reports


def run_cell(alpha: float, config: SweepConfig) -> list[metrics.GainReport]:
    reports = []
    for rep in range(config.repetitions):
        reports.extend(run_repetition(alpha, config, rep))
    metrics.fill_aggregates(reports)
    return reports


def _timed_cell(args):
    alpha, config = args
    t0 = time.perf_counter()
    reports = run_cell(alpha, config)
    return alpha, reports, time.perf_counter() - t0


def _fingerprint(config: SweepConfig) -> str:
    cfg = config.to_dict()
    cfg.pop("alpha_values")
    return json.dumps(cfg, sort_keys=True)


def _cell_path(out_dir: Path, alpha: float) -> Path:
    return out_dir / "cells" / f"cell_{_alpha_key(alpha):010d}.json"


def _save_cell(path: Path, config: SweepConfig, reports, seconds: float) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    payload = {"fingerprint": _fingerprint(config), "seconds": seconds,
               "reports": [asdict(r) for r in reports]}
    tmp.write_text(json.dumps(payload))
    os.replace(tmp, path)


def _load_cell(path: Path, config: SweepConfig):
    if not path.exists():
        return None
    payload = json.loads(path.read_text())
    if payload.get("fingerprint") != _fingerprint(config):
        return None
    return [metrics.GainReport(**r) for r in payload["reports"]], payload["seconds"]


def summarize(reports) -> list[dict]:
    rows = []
    seen = []
    for r in reports:
        if (r.alpha, r.method) not in seen:
            seen.append((r.alpha, r.method))
    for alpha, method in seen:
        group = [r for r in reports if r.alpha == alpha and r.method == method]
        mean, std = metrics.aggregate(r.gain_db for r in group)
        snr_mean, _ = metrics.aggregate(r.snr_out_db for r in group)
        rows.append({"alpha": alpha, "method": method, "repetitions": len(group),
                     "gain_mean_db": mean, "gain_std_db": std, "snr_out_mean_db": snr_mean})
    return rows


def gains_csv_text(config: SweepConfig, reports) -> str:
    buf = io.StringIO()
    buf.write(f"# esn_denoise {__version__} numpy {np.__version__}\n")
    buf.write(f"# rng {noise.RNG_ALGORITHM}\n")
    for key, value in config.to_dict().items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(metrics.CSV_FIELDS)
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def summary_csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["alpha", "method", "repetitions", "gain_mean_db", "gain_std_db", "snr_out_mean_db"]
    writer.writerow(cols)
    for row in rows:
        writer.writerow([metrics.format_float(row[c]) if isinstance(row[c], float) else row[c]
                         for c in cols])
    return buf.getvalue()


GNUPLOT_TEMPLATE = """\
set datafile separator ','
set xlabel 'alpha'
set ylabel 'processing gain [dB]'
set key top center
plot '< grep ",esn," summary.csv' using 1:4:5 with yerrorlines title 'ESN', \\
     '< grep ",wiener," summary.csv' using 1:4:5 with yerrorlines title 'Wiener'
"""


@dataclass
class SweepResult:
    reports: list
    summary: list
    out_dir: Path


def run_sweep(config: SweepConfig, out_dir, workers: int = 1) -> SweepResult:
    """Run every alpha cell, checkpointing each one under ``out_dir/cells``.

    Re-running with the same config resumes from completed cells. Writes
    ``gains.csv``, ``summary.csv``, ``manifest.json`` and ``plot.gp``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    done: dict[float, tuple] = {}
    for alpha in config.alpha_values:
        cached = _load_cell(_cell_path(out_dir, alpha), config)
        if cached is not None:
            done[alpha] = cached
    todo = [a for a in config.alpha_values if a not in done]
    log.info("sweep: %d cells cached, %d to run", len(done), len(todo))

    def record(alpha, reports, seconds):
        _save_cell(_cell_path(out_dir, alpha), config, reports, seconds)
        done[alpha] = (reports, seconds)
        log.info("alpha=%+.3f done in %.1fs", alpha, seconds)

    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for alpha, reports, seconds in pool.map(_timed_cell, [(a, config) for a in todo]):
                record(alpha, reports, seconds)
    else:
        for alpha in todo:
            record(*_timed_cell((alpha, config)))

    reports = [r for a in config.alpha_values for r in done[a][0]]
    reports.sort(key=lambda r: (config.alpha_values.index(r.alpha), r.method, r.rep))
    rows = summarize(reports)
    (out_dir / "gains.csv").write_text(gains_csv_text(config, reports))
    (out_dir / "summary.csv").write_text(summary_csv_text(rows))
    (out_dir / "plot.gp").write_text(GNUPLOT_TEMPLATE)
    manifest = {
        "config": config.to_dict(),
        "rng": noise.RNG_ALGORITHM,
        "versions": {"esn_denoise": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
        "cells": [
            {"alpha": a, "seconds": done[a][1],
             "repetition_seeds": [repetition_seed(config.master_seed, a, k)
                                  for k in range(config.repetitions)],
             "derived_seeds": [derived_seeds(repetition_seed(config.master_seed, a, k))
                               for k in range(config.repetitions)]}
            for a in config.alpha_values
        ],
        "workers": workers,
        "wall_seconds": time.time() - started,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return SweepResult(reports, rows, out_dir)
