"""Causal FIR Wiener filter estimated from time-average correlations."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class WienerFilter:
    taps: np.ndarray
    autocorr: np.ndarray = field(repr=False)
    crosscorr: np.ndarray = field(repr=False)
    delay: int = 0

    @property
    def n_taps(self) -> int:
        return len(self.taps)


def estimate_correlations(u, d, max_lag: int, delay: int = 0):
    """Biased (1/M) estimates of r_u(k) and r_du(k) for k = 0..max_lag-1.

    r_du(k) correlates ``d(n - delay)`` with ``u(n - k)``.
    """
    u = np.asarray(u, dtype=float)
    d = np.asarray(d, dtype=float)
    if u.shape != d.shape or u.ndim != 1:
        raise ValueError("u and d must be 1-D and of equal length")
    M = len(u)
    if max_lag < 1:
        raise ValueError("max_lag must be positive")
    if M < 10 * max_lag:
        raise ValueError(f"record of {M} samples is too short for {max_lag} lags")
    if delay < 0 or delay >= max_lag:
        raise ValueError(f"delay must lie in [0, {max_lag - 1}]")
    r_u = np.array([u[k:] @ u[: M - k] for k in range(max_lag)]) / M
    # d(n - delay) u(n - k) summed over n, i.e. lag (k - delay) between them.
    r_du = np.empty(max_lag)
    for k in range(max_lag):
        lag = k - delay
        if lag >= 0:
            r_du[k] = d[lag:] @ u[: M - lag]
        else:
            r_du[k] = d[: M + lag] @ u[-lag:]
    return r_u, r_du / M


def design(autocorr, crosscorr, delay: int = 0) -> WienerFilter:
    """Solve the Toeplitz normal equations R h = p by Cholesky."""
    autocorr = np.asarray(autocorr, dtype=float)
    crosscorr = np.asarray(crosscorr, dtype=float)
    if autocorr.shape != crosscorr.shape or autocorr.ndim != 1:
        raise ValueError("autocorr and crosscorr must be 1-D of equal length")
    R = scipy.linalg.toeplitz(autocorr)
    try:
        factor = scipy.linalg.cho_factor(R)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "autocorrelation matrix is not positive definite; use a longer estimation record"
        ) from exc
    taps = scipy.linalg.cho_solve(factor, crosscorr)
    return WienerFilter(taps, autocorr, crosscorr, delay)


def fit(u, d, n_taps: int = 10, delay: int = 0) -> WienerFilter:
    return design(*estimate_correlations(u, d, n_taps, delay), delay=delay)


def apply(filt: WienerFilter, u) -> np.ndarray:
    """Filter ``u`` so that output sample n estimates d(n).

    With a nonzero delay the causal output is advanced by ``delay`` samples;
    the last ``delay`` outputs then see zero padding past the record end.
    """
    u = np.asarray(u, dtype=float)
    full = np.convolve(np.concatenate([u, np.zeros(filt.delay)]), filt.taps)
    return full[filt.delay:filt.delay + len(u)]


def residual_norm(filt: WienerFilter) -> float:
    R = scipy.linalg.toeplitz(filt.autocorr)
    return float(np.linalg.norm(R @ filt.taps - filt.crosscorr))
