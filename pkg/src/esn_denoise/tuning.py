"""Cyclic coordinate-descent search over (leakage, spectral radius, p, q).

Each scan sweeps one coordinate over its full grid while the other three are
held fixed, and moves to the value with the highest processing gain. Scans
cycle a -> lambda -> p -> q until a whole cycle leaves every value unchanged.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import chaos, esn, metrics, noise

COORDINATES = ("a", "lambda", "p", "q")

# Gains closer than this are treated as ties.
TIE_TOL_DB = 1e-9


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    n = int(round((stop - start) / step))
    return tuple(float(round(start + i * step, 10)) for i in range(n + 1))


@dataclass(frozen=True)
class TuneGrid:
    a_grid: tuple = _grid(0.0, 1.0, 0.05)
    lambda_grid: tuple = _grid(0.05, 1.0, 0.05)
    p_grid: tuple = _grid(0.0, 10.0, 0.5)
    q_grid: tuple = _grid(0.5, 10.0, 0.5)
    # The leakage start value only matters when 'a' is not scanned first.
    initial: tuple = (1.0, 0.05, 0.0, 0.5)

    def values(self, coord: str) -> tuple:
        return {"a": self.a_grid, "lambda": self.lambda_grid,
                "p": self.p_grid, "q": self.q_grid}[coord]


@dataclass
class TuneScenario:
    """Fixed data and weight draw shared by every cell of one tuning run."""

    alpha: float = 0.1
    snr_in_db: float = 2.0
    seed: int = 0
    n_reservoir: int = 500
    transient: int = 200
    train_len: int = 25000
    eval_len: int = 10**6 - 25000

    def __post_init__(self):
        self._cache: dict[tuple, float] = {}

    @cached_property
    def seeds(self) -> dict:
        ss = np.random.SeedSequence(self.seed)
        d0_seq, noise_seq, esn_seq = ss.spawn(3)
        d0 = float(np.random.default_rng(d0_seq).uniform(-0.99, 0.99))
        return {
            "d0": d0,
            "noise": int(noise_seq.generate_state(1, np.uint64)[0] >> np.uint64(1)),
            "esn": int(esn_seq.generate_state(1, np.uint64)[0] >> np.uint64(1)),
        }

    @cached_property
    def signal(self) -> noise.CorruptedSignal:
        total = self.transient + self.train_len + self.eval_len
        orbit = chaos.generate_orbit(chaos.MapParams(self.alpha, self.seeds["d0"]), total)
        return noise.corrupt(orbit.samples, noise.NoiseSpec(self.snr_in_db, self.seeds["noise"]))

    def config(self, a: float, lam: float, p: float, q: float) -> esn.EsnConfig:
        return esn.EsnConfig(
            n_reservoir=self.n_reservoir,
            leakage=a,
            spectral_radius=lam,
            bias_scale=p,
            input_scale=q,
            transient=self.transient,
            train_len=self.train_len,
            seed=self.seeds["esn"],
        )


def evaluate_cell(a: float, lam: float, p: float, q: float, scenario: TuneScenario) -> float:
    """Processing gain (dB) of a freshly trained network on the scenario data.

    Untrainable cells (e.g. ``a == 0``) score ``-inf``. Results are memoized
    on the scenario.
    """
    key = (float(a), float(lam), float(p), float(q))
    if key in scenario._cache:
        return scenario._cache[key]
    config = scenario.config(*key)
    sig = scenario.signal
    split = config.transient + config.train_len
    try:
        trained = esn.fit(config, sig.u[:split], sig.d[:split])
    except esn.UntrainableError:
        gain = -math.inf
    else:
        y = esn.run(trained, sig.u[split:])[:, 0]
        ratio = metrics.snr_out(y, sig.d[split:])
        gain = metrics.to_db(ratio) - scenario.snr_in_db
    scenario._cache[key] = gain
    return gain


@dataclass(frozen=True)
class Evaluation:
    cycle: int
    scan: int
    coordinate: str
    a: float
    lam: float
    p: float
    q: float
    gain_db: float


@dataclass(frozen=True)
class Iteration:
    cycle: int
    a: float
    lam: float
    p: float
    q: float
    gain_db: float
    changed: bool


@dataclass
class TuneTrace:
    evaluations: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    scan_gains: list = field(default_factory=list)  # best gain after each scan
    converged: bool = False

    @property
    def cycles(self) -> int:
        return len(self.iterations)

    @property
    def scans(self) -> int:
        return len(self.scan_gains)


@dataclass
class TuneResult:
    a: float
    lam: float
    p: float
    q: float
    gain_db: float
    trace: TuneTrace

    @property
    def params(self) -> tuple:
        return (self.a, self.lam, self.p, self.q)


def _pick(values: Sequence[float], gains: Sequence[float], incumbent: float) -> float:
    best = max(gains)
    ties = [v for v, g in zip(values, gains) if g == best or abs(g - best) <= TIE_TOL_DB]
    if incumbent in ties:
        return incumbent
    return min(ties)


def coordinate_descent(
    grid: TuneGrid = TuneGrid(),
    scenario: TuneScenario | None = None,
    order: Sequence[str] = COORDINATES,
    max_cycles: int = 50,
    objective: Callable[[float, float, float, float], float] | None = None,
) -> TuneResult:
    """Run the cyclic search.

    ``objective(a, lam, p, q)`` defaults to :func:`evaluate_cell` on
    ``scenario``. Stops after a cycle with no change, or at ``max_cycles``
    with ``trace.converged`` false.
    """
    if sorted(order) != sorted(COORDINATES):
        raise ValueError(f"order must be a permutation of {COORDINATES}")
    if objective is None:
        if scenario is None:
            scenario = TuneScenario()
        objective = lambda a, lam, p, q: evaluate_cell(a, lam, p, q, scenario)  # noqa: E731

    cache: dict[tuple, float] = {}

    def score(point: dict) -> float:
        key = tuple(point[c] for c in COORDINATES)
        if key not in cache:
            cache[key] = objective(*key)
        return cache[key]

    current = dict(zip(COORDINATES, grid.initial))
    trace = TuneTrace()
    scan = 0
    for cycle in range(1, max_cycles + 1):
        changed = False
        for coord in order:
            values = grid.values(coord)
            gains = []
            for v in values:
                point = dict(current, **{coord: v})
                g = score(point)
                gains.append(g)
                trace.evaluations.append(
                    Evaluation(cycle, scan, coord, point["a"], point["lambda"], point["p"], point["q"], g)
                )
            chosen = _pick(values, gains, current[coord])
            if chosen != current[coord]:
                changed = True
                current[coord] = chosen
            trace.scan_gains.append(score(current))
            scan += 1
        gain = score(current)
        trace.iterations.append(
            Iteration(cycle, current["a"], current["lambda"], current["p"], current["q"], gain, changed)
        )
        if not changed:
            trace.converged = True
            break
    return TuneResult(current["a"], current["lambda"], current["p"], current["q"],
                      score(current), trace)


def write_trace_csv(result: TuneResult, path) -> None:
    """One row per evaluation, one per completed cycle, and a final summary row."""
    fmt = metrics.format_float
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "cycle", "scan", "coordinate", "a", "lambda", "p", "q", "gain_db"])
        for e in result.trace.evaluations:
            writer.writerow(["eval", e.cycle, e.scan, e.coordinate,
                             fmt(e.a), fmt(e.lam), fmt(e.p), fmt(e.q), fmt(e.gain_db)])
        for it in result.trace.iterations:
            writer.writerow(["cycle", it.cycle, "", "", fmt(it.a), fmt(it.lam),
                             fmt(it.p), fmt(it.q), fmt(it.gain_db)])
        writer.writerow(["summary", result.trace.cycles, result.trace.scans,
                         "converged" if result.trace.converged else "not-converged",
                         fmt(result.a), fmt(result.lam), fmt(result.p), fmt(result.q),
                         fmt(result.gain_db)])
