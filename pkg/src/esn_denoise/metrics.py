"""Output SNR, processing gain and repetition statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CSV_FIELDS = ("alpha", "snr_in_db", "method", "rep", "snr_out_db", "gain_db", "seed")


def _window(y, d, start: int, end: int | None):
    y = np.asarray(y, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    end = min(len(y), len(d)) if end is None else end
    if not 0 <= start < end:
        raise ValueError(f"empty evaluation window [{start}, {end})")
    if end > len(y) or end > len(d):
        raise ValueError(f"window end {end} exceeds signal length")
    return y[start:end], d[start:end]


def snr_out(y, d, start: int = 0, end: int | None = None) -> float:
    """Linear output SNR: sum y^2 / sum (d - y)^2 over the half-open window [start, end).

    The numerator is the power of the estimate ``y``. Returns ``math.inf``
    when the estimate is exact.
    """
    y, d = _window(y, d, start, end)
    err = float(np.sum((d - y) ** 2))
    num = float(np.sum(y * y))
    return math.inf if err == 0.0 else num / err


def snr_out_ref(y, d, start: int = 0, end: int | None = None) -> float:
    """Like :func:`snr_out` but with the clean-signal power as numerator."""
    y, d = _window(y, d, start, end)
    err = float(np.sum((d - y) ** 2))
    num = float(np.sum(d * d))
    return math.inf if err == 0.0 else num / err


def to_db(ratio: float) -> float:
    if ratio == math.inf:
        return math.inf
    if ratio <= 0.0:
        return -math.inf
    return 10.0 * math.log10(ratio)


def gain_db(snr_out_linear: float, snr_in_db: float) -> float:
    if not snr_out_linear > 0.0:
        raise ValueError(f"output SNR must be positive, got {snr_out_linear}")
    return to_db(snr_out_linear) - snr_in_db


def aggregate(gains) -> tuple[float, float]:
    """Sample mean and sample standard deviation (n - 1 denominator).

    A single value has standard deviation 0.
    """
    g = np.asarray(list(gains), dtype=float)
    if g.size == 0:
        raise ValueError("aggregate of no values")
    mean = float(np.mean(g))
    std = float(np.std(g, ddof=1)) if g.size > 1 else 0.0
    return mean, std


@dataclass
class GainReport:
    alpha: float
    snr_in_db: float
    snr_out_db: float
    gain_db: float
    method: str = "esn"
    rep: int = 0
    seed: int = 0
    repetitions: int = 1
    gain_mean_db: float = math.nan
    gain_std_db: float = math.nan
    eval_len: int = 0
    snr_out_ref_db: float = math.nan

    def csv_row(self) -> list[str]:
        return [
            format_float(self.alpha),
            format_float(self.snr_in_db),
            self.method,
            str(self.rep),
            format_float(self.snr_out_db),
            format_float(self.gain_db),
            str(self.seed),
        ]


def format_float(x: float) -> str:
    """Shortest round-trip text for a float; infinities spelled ``inf``/``-inf``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def fill_aggregates(reports: list[GainReport]) -> None:
    """Set repetition statistics on each report from its (alpha, method) group."""
    groups: dict[tuple[float, str], list[GainReport]] = {}
    for rep in reports:
        groups.setdefault((rep.alpha, rep.method), []).append(rep)
    for group in groups.values():
        mean, std = aggregate(r.gain_db for r in group)
        for r in group:
            r.repetitions = len(group)
            r.gain_mean_db = mean
            r.gain_std_db = std
