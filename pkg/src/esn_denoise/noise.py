"""Additive white Gaussian noise at a prescribed input SNR."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Recorded in experiment manifests alongside the seeds.
RNG_ALGORITHM = "numpy.random.Generator(PCG64).standard_normal"


@dataclass(frozen=True)
class NoiseSpec:
    snr_in_db: float
    seed: int = 0

    def __post_init__(self):
        if math.isnan(self.snr_in_db) or self.snr_in_db == -math.inf:
            raise ValueError(f"snr_in_db must be finite or +inf, got {self.snr_in_db}")


@dataclass(frozen=True)
class CorruptedSignal:
    u: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    realized_snr_db: float


def mean_power(x) -> float:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("mean_power of an empty signal")
    return float(np.mean(x * x))


def noise_variance(signal_power: float, snr_in_db: float) -> float:
    return signal_power / 10.0 ** (snr_in_db / 10.0)


def corrupt(d, spec: NoiseSpec) -> CorruptedSignal:
    """Return ``u = d + w`` with ``w`` i.i.d. N(0, sigma^2).

    sigma^2 is set from the measured power of this particular ``d`` so the
    realized SNR tracks the requested one. ``snr_in_db = inf`` disables noise.
    """
    d = np.asarray(d, dtype=float)
    p_d = mean_power(d)
    if spec.snr_in_db == math.inf:
        w = np.zeros_like(d)
        return CorruptedSignal(d.copy(), d, w, math.inf)
    sigma = math.sqrt(noise_variance(p_d, spec.snr_in_db))
    w = sigma * np.random.default_rng(spec.seed).standard_normal(d.shape)
    p_w = mean_power(w)
    realized = 10.0 * math.log10(p_d / p_w) if p_w > 0 else math.inf
    return CorruptedSignal(d + w, d, w, realized)
