"""Plain-text signal files: one sample per line, 17 significant digits."""
from __future__ import annotations

import numpy as np


def write_signal(path, x) -> None:
    np.savetxt(path, np.asarray(x, dtype=float).ravel(), fmt="%.17g")


def read_signal(path) -> np.ndarray:
    x = np.loadtxt(path, dtype=float, ndmin=1)
    if x.ndim != 1:
        raise ValueError(f"{path}: expected one sample per line")
    return x
