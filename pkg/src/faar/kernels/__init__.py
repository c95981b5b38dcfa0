"""Feature kernel backends.

The compiled Cython kernel is preferred when the extension built; the
numpy kernel is the always-available fallback and the reference for
backend-parity tests. Spectral band magnitude stays in numpy (rfft) for
both backends.
"""

from __future__ import annotations

import numpy as np

from . import numpy_backend

try:
    from . import _cyfeat as _compiled
except ImportError:  # extension not built
    _compiled = None

HAS_COMPILED = _compiled is not None
DEFAULT_BACKEND = "cython" if HAS_COMPILED else "numpy"


def timedomain_features(wins: np.ndarray, backend: str | None = None) -> np.ndarray:
    """rms, max_grad, zcr, kurt per row of ``wins`` [rows x samples]."""
    b = backend or DEFAULT_BACKEND
    if b == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel unavailable")
        return _compiled.timedomain_features(np.ascontiguousarray(wins, dtype=np.float64))
    if b == "numpy":
        return numpy_backend.timedomain_features(wins)
    raise ValueError(f"unknown backend {b!r}")


def band_magnitudes(wins: np.ndarray, fs: float, lo: float, hi: float) -> np.ndarray:
    """Mean one-sided |DFT| over bins with lo <= f <= hi, per row.

    Rows are mean-removed before the transform (rectangular window, no
    zero padding). Returns 0 for rows when no bin falls in band.
    """
    wins = np.asarray(wins, dtype=np.float64)
    n = wins.shape[-1]
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    in_band = (freqs >= lo) & (freqs <= hi)
    if not in_band.any():
        return np.zeros(wins.shape[0], dtype=np.float64)
    centered = wins - wins.mean(axis=-1, keepdims=True)
    spec = np.abs(np.fft.rfft(centered, axis=-1))
    return spec[:, in_band].mean(axis=-1)
