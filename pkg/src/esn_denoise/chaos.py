"""Skew tent map orbits and their power spectral density."""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

# Interior points nearest the open interval's endpoints.
LOWER = -1.0 + 2.0**-52
UPPER = 1.0 - 2.0**-52

# Per-step dither amplitude used for the alpha == 0 map (a few ulps at |d| ~ 0.5).
DITHER_AMPLITUDE = 2.0**-50


class DomainError(ValueError):
    """Raised when a map parameter or state lies outside (-1, 1)."""


def _check_open(name: str, value: float) -> None:
    if not (-1.0 < value < 1.0):
        raise DomainError(f"{name}={value!r} must lie in the open interval (-1, 1)")


@dataclass(frozen=True)
class MapParams:
    alpha: float
    d0: float

    def __post_init__(self):
        _check_open("alpha", self.alpha)
        _check_open("d0", self.d0)


@dataclass(frozen=True)
class Orbit:
    samples: np.ndarray = field(repr=False)
    params: MapParams

    def __len__(self) -> int:
        return len(self.samples)


def map_step(d: float, alpha: float) -> float:
    """One iteration of the skew tent map.

    The branch boundary ``d == alpha`` belongs to the right (descending) branch.
    """
    _check_open("d", d)
    _check_open("alpha", alpha)
    if d < alpha:
        return (1.0 - alpha) / (1.0 + alpha) + 2.0 * d / (1.0 + alpha)
    return (1.0 + alpha) / (1.0 - alpha) - 2.0 * d / (1.0 - alpha)


def needs_dither(alpha: float) -> bool:
    """True when both branch slopes are powers of two.

    Only ``alpha == 0`` qualifies. The map is then exact doubling in binary
    floating point and every float orbit collapses onto the fixed point -1
    within about 53 steps.
    """
    return alpha == 0.0


def _dither_seed(params: MapParams) -> int:
    (bits,) = struct.unpack("<Q", struct.pack("<d", params.d0))
    return bits


def generate_orbit(params: MapParams, length: int, dither: bool | None = None) -> Orbit:
    """Iterate the map ``length - 1`` times starting from ``params.d0``.

    Iterates that land on or outside the closed boundary are clamped to the
    nearest interior point at distance 2**-52. When ``dither`` is true (the
    default for the degenerate ``alpha == 0`` map) each iterate is perturbed
    by a uniform draw of amplitude ``DITHER_AMPLITUDE``; the draw sequence is
    seeded from the bit pattern of ``d0`` so orbits stay reproducible.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    alpha = params.alpha
    if dither is None:
        dither = needs_dither(alpha)

    # Same operation order as map_step, so undithered orbits match it bit for bit.
    c0 = (1.0 - alpha) / (1.0 + alpha)
    c2 = (1.0 + alpha) / (1.0 - alpha)
    lo = 1.0 + alpha
    hi = 1.0 - alpha

    if dither:
        jitter = np.random.default_rng(_dither_seed(params)).uniform(
            -DITHER_AMPLITUDE, DITHER_AMPLITUDE, length
        ).tolist()
    else:
        jitter = None

    x = params.d0
    values = [0.0] * length
    for n in range(length):
        values[n] = x
        if x < alpha:
            x = c0 + 2.0 * x / lo
        else:
            x = c2 - 2.0 * x / hi
        if jitter is not None:
            x += jitter[n]
        if x <= -1.0:
            x = LOWER
        elif x >= 1.0:
            x = UPPER
    return Orbit(np.array(values), params)


def analytic_psd(alpha: float, omega):
    """Closed-form PSD of skew tent map orbits at angular frequency ``omega``.

    Normalized so that its mean over [-pi, pi] is the orbit variance 1/3.
    Accepts scalar or array ``omega``.
    """
    _check_open("alpha", alpha)
    omega = np.asarray(omega, dtype=float)
    value = (1.0 - alpha**2) / (3.0 * (1.0 + alpha**2 - 2.0 * alpha * np.cos(omega)))
    return value if value.ndim else float(value)


def estimate_psd(samples, segment_length: int, bin_average: int = 1):
    """Averaged periodogram over non-overlapping rectangular segments.

    The sample mean is removed first, so the mean of the returned powers over
    frequency equals the sample variance of the segments used. Frequencies are
    returned in ascending order on [-pi, pi). With ``bin_average > 1`` groups
    of adjacent bins are averaged (both frequency and power).

    Returns
    -------
    omega, power : ndarray
    """
    x = np.asarray(samples.samples if isinstance(samples, Orbit) else samples, dtype=float)
    if segment_length < 1:
        raise ValueError("segment_length must be positive")
    if len(x) < 4 * segment_length:
        raise ValueError(
            f"orbit of length {len(x)} is shorter than 4 x segment_length={segment_length}"
        )
    if segment_length % bin_average:
        raise ValueError("bin_average must divide segment_length")
    n_seg = len(x) // segment_length
    segs = (x - x.mean())[: n_seg * segment_length].reshape(n_seg, segment_length)
    power = np.mean(np.abs(np.fft.fft(segs, axis=1)) ** 2, axis=0) / segment_length
    omega = 2.0 * np.pi * np.fft.fftfreq(segment_length)
    omega = np.fft.fftshift(omega)
    power = np.fft.fftshift(power)
    if bin_average > 1:
        omega = omega.reshape(-1, bin_average).mean(axis=1)
        power = power.reshape(-1, bin_average).mean(axis=1)
    return omega, power


def fixed_point(alpha: float) -> float:
    """Nonzero fixed point of the map, on the descending branch."""
    _check_open("alpha", alpha)
    return (1.0 + alpha) / (3.0 - alpha)


def invariant_variance() -> float:
    """Variance of the uniform invariant density on (-1, 1)."""
    return 1.0 / 3.0


__all__ = [
    "DomainError",
    "MapParams",
    "Orbit",
    "map_step",
    "generate_orbit",
    "analytic_psd",
    "estimate_psd",
    "fixed_point",
    "needs_dither",
    "invariant_variance",
]
