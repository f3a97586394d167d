"""Leaky-integrator echo state network with a pseudoinverse readout.

Weights are drawn as unit-interval uniforms once per seed and then scaled by
``bias_scale`` (p), ``input_scale`` (q) and ``spectral_radius`` (lambda), so
two configs that differ only in those scales share the same underlying draw.
"""
from __future__ import annotations

import functools
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

MODEL_MAGIC = "ESN-DENOISE-MODEL"
MODEL_VERSION = 1

# Steps per block when precomputing input drive and buffering states.
_CHUNK = 4096

# Trajectories whose largest entry falls below this are treated as dead.
DEAD_RESERVOIR_TOL = 1e-12


class UntrainableError(RuntimeError):
    """The reservoir trajectory carries no information (e.g. leakage 0)."""


@dataclass(frozen=True)
class EsnConfig:
    n_reservoir: int = 500
    n_inputs: int = 1
    n_outputs: int = 1
    leakage: float = 0.80
    spectral_radius: float = 0.75
    bias_scale: float = 1.50
    input_scale: float = 1.00
    transient: int = 200
    train_len: int = 25000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.leakage <= 1.0:
            raise ValueError(f"leakage must lie in [0, 1], got {self.leakage}")
        if not self.spectral_radius > 0.0:
            raise ValueError(f"spectral_radius must be positive, got {self.spectral_radius}")
        if self.bias_scale < 0 or self.input_scale < 0:
            raise ValueError("bias_scale and input_scale must be non-negative")
        if self.n_reservoir < 1 or self.n_inputs < 1 or self.n_outputs < 1:
            raise ValueError("layer sizes must be positive")
        if self.transient < 0:
            raise ValueError("transient must be non-negative")
        if self.train_len < self.n_reservoir:
            raise ValueError(
                f"train_len={self.train_len} must be >= n_reservoir={self.n_reservoir}"
            )

    def with_params(self, **changes) -> "EsnConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EsnConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown EsnConfig keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class EsnWeights:
    w_in: np.ndarray = field(repr=False)  # N x (N_u + 1), column 0 is the bias
    w: np.ndarray = field(repr=False)     # N x N


@dataclass(frozen=True)
class EsnState:
    r: np.ndarray
    clock: int = 0

    @classmethod
    def zeros(cls, n: int) -> "EsnState":
        return cls(np.zeros(n), 0)


@dataclass
class TrainedEsn:
    """A fitted network. ``state`` advances as :func:`run` consumes input."""

    config: EsnConfig
    weights: EsnWeights
    w_out: np.ndarray
    state: EsnState


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus of a square matrix (dense eigen-solver).

    ``numpy.linalg.LinAlgError`` from a non-converging solver propagates.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


@functools.lru_cache(maxsize=4)
def _base_draws(seed: int, n: int, n_inputs: int):
    rng = np.random.default_rng(seed)
    bias = rng.uniform(-1.0, 1.0, n)
    inputs = rng.uniform(-1.0, 1.0, (n, n_inputs))
    for _ in range(2):
        aux = rng.uniform(-1.0, 1.0, (n, n))
        rho = spectral_radius(aux)
        if rho > 0.0:
            break
    else:
        raise RuntimeError("internal matrix draw has zero spectral radius twice in a row")
    unit = aux / rho
    for a in (bias, inputs, unit):
        a.flags.writeable = False
    return bias, inputs, unit


def init_weights(config: EsnConfig) -> EsnWeights:
    """Draw the input and internal matrices for ``config``.

    Column 0 of ``w_in`` is uniform on [-p, p], the remaining columns uniform
    on [-q, q]. ``w`` is a uniform [-1, 1] matrix rescaled to spectral radius
    lambda.
    """
    bias, inputs, unit = _base_draws(config.seed, config.n_reservoir, config.n_inputs)
    w_in = np.column_stack([config.bias_scale * bias, config.input_scale * inputs])
    w = config.spectral_radius * unit
    return EsnWeights(w_in, w)


def _as_inputs(u, n_inputs: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.ndim != 2 or u.shape[1] != n_inputs:
        raise ValueError(f"input has shape {u.shape}, expected (steps, {n_inputs})")
    return u


def _preactivation(w_in: np.ndarray, u: np.ndarray) -> np.ndarray:
    # Rows of u are time steps; result rows are W_in [1, u(n)]^T.
    return u @ w_in[:, 1:].T + w_in[:, 0]


def update_state(state: EsnState, weights: EsnWeights, u, a: float) -> EsnState:
    r = np.asarray(state.r, dtype=float)
    n = weights.w.shape[0]
    if r.shape != (n,):
        raise ValueError(f"state has shape {r.shape}, expected ({n},)")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (weights.w_in.shape[1] - 1,):
        raise ValueError(f"input has shape {u.shape}, expected ({weights.w_in.shape[1] - 1},)")
    pre = _preactivation(weights.w_in, u[None, :])[0]
    r_next = (1.0 - a) * r + a * np.tanh(pre + weights.w @ r)
    return EsnState(r_next, state.clock + 1)


def _drive(weights: EsnWeights, a: float, u: np.ndarray, r: np.ndarray, sink=None):
    """Advance the reservoir over every row of ``u``.

    ``sink(start, states)`` receives consecutive blocks of post-update state
    vectors (rows). Returns the final state vector.
    """
    w_in, w = weights.w_in, weights.w
    keep = 1.0 - a
    r = np.array(r, dtype=float)
    buf = np.empty((min(_CHUNK, max(len(u), 1)), w.shape[0]))
    tanh = np.tanh
    for start in range(0, len(u), _CHUNK):
        drive = _preactivation(w_in, u[start:start + _CHUNK])
        for k in range(len(drive)):
            r = keep * r + a * tanh(drive[k] + w @ r)
            buf[k] = r
        if sink is not None:
            sink(start, buf[: len(drive)])
    return r


def collect_trajectory(weights: EsnWeights, config: EsnConfig, u, return_state: bool = False):
    """Trajectory matrix T (N x L) of states after the transient.

    Starts from the zero state, discards ``config.transient`` updates and keeps
    the next ``config.train_len`` states as columns. Column j is the state
    after consuming input row ``transient + j``.
    """
    u = _as_inputs(u, config.n_inputs)
    ell, L = config.transient, config.train_len
    if len(u) < ell + L:
        raise ValueError(f"need at least {ell + L} input samples, got {len(u)}")
    n = config.n_reservoir
    traj = np.empty((L, n))

    def sink(start, states):
        lo, hi = start, start + len(states)
        keep_lo, keep_hi = max(lo, ell), min(hi, ell + L)
        if keep_lo < keep_hi:
            traj[keep_lo - ell:keep_hi - ell] = states[keep_lo - lo:keep_hi - lo]

    r = _drive(weights, config.leakage, u[: ell + L], np.zeros(n), sink)
    T = traj.T
    if return_state:
        return T, EsnState(r, ell + L)
    return T


def train_readout(trajectory, desired) -> np.ndarray:
    """Minimum-norm least-squares readout ``D T^+`` via an SVD of T.

    Singular values below ``max(N, L) * eps * sigma_max`` count as zero.
    """
    T = np.asarray(trajectory, dtype=float)
    D = np.atleast_2d(np.asarray(desired, dtype=float))
    if T.ndim != 2:
        raise ValueError("trajectory must be a matrix")
    if D.shape[1] != T.shape[1]:
        raise ValueError(f"desired has {D.shape[1]} columns, trajectory {T.shape[1]}")
    if not np.max(np.abs(T), initial=0.0) >= DEAD_RESERVOIR_TOL:
        raise UntrainableError(
            "trajectory is numerically zero; leakage 0 or a dead reservoir cannot be trained"
        )
    u, s, vt = np.linalg.svd(T, full_matrices=False)
    cutoff = max(T.shape) * np.finfo(float).eps * s[0]
    inv = np.zeros_like(s)
    inv[s > cutoff] = 1.0 / s[s > cutoff]
    return ((D @ vt.T) * inv) @ u.T


def fit(config: EsnConfig, u, d, weights: EsnWeights | None = None) -> TrainedEsn:
    """Build and train a network on inputs ``u`` and clean targets ``d``.

    The target for the state produced by input ``u[n]`` is ``d[n]``.
    """
    if weights is None:
        weights = init_weights(config)
    T, state = collect_trajectory(weights, config, u, return_state=True)
    d = np.asarray(d, dtype=float)
    if d.ndim == 1:
        d = d[:, None]
    ell, L = config.transient, config.train_len
    if len(d) < ell + L or d.shape[1] != config.n_outputs:
        raise ValueError(f"desired has shape {d.shape}, need ({ell + L}+, {config.n_outputs})")
    w_out = train_readout(T, d[ell:ell + L].T)
    return TrainedEsn(config, weights, w_out, state)


def run(trained: TrainedEsn, u) -> np.ndarray:
    """Drive the network from its current state and return outputs (steps x N_d)."""
    u = _as_inputs(u, trained.config.n_inputs)
    y = np.empty((len(u), trained.w_out.shape[0]))
    w_out_t = trained.w_out.T

    def sink(start, states):
        y[start:start + len(states)] = states @ w_out_t

    r = _drive(trained.weights, trained.config.leakage, u, trained.state.r, sink)
    trained.state = EsnState(r, trained.state.clock + len(u))
    return y


def reset(trained: TrainedEsn) -> None:
    trained.state = EsnState.zeros(trained.config.n_reservoir)


def save_model(trained: TrainedEsn, path) -> None:
    path = Path(path)
    with open(path, "wb") as fh:
        np.savez(
            fh,
            magic=np.array(MODEL_MAGIC),
            version=np.array(MODEL_VERSION),
            config=np.array(json.dumps(trained.config.to_dict(), sort_keys=True)),
            w_in=trained.weights.w_in,
            w=trained.weights.w,
            w_out=trained.w_out,
            state_r=trained.state.r,
            state_clock=np.array(trained.state.clock),
        )


def load_model(path) -> TrainedEsn:
    with np.load(Path(path), allow_pickle=False) as z:
        if "magic" not in z.files or str(z["magic"]) != MODEL_MAGIC:
            raise ValueError(f"{path} is not an ESN model file")
        version = int(z["version"])
        if version != MODEL_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        config = EsnConfig.from_dict(json.loads(str(z["config"])))
        weights = EsnWeights(z["w_in"].copy(), z["w"].copy())
        state = EsnState(z["state_r"].copy(), int(z["state_clock"]))
        return TrainedEsn(config, weights, z["w_out"].copy(), state)
