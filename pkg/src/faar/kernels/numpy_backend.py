"""Vectorized numpy implementation of the time-domain feature kernel."""

from __future__ import annotations

import numpy as np

FLAT_M2_REL = 1e-30  # m2 below this fraction of the mean square means a flat window


def timedomain_features(wins: np.ndarray) -> np.ndarray:
    """Compute rms, max_grad, zcr, kurt for each row of ``wins``.

    wins: [rows x samples] float64, samples >= 4.
    Returns [rows x 4]. Flat rows (zero variance) get kurt = +inf.
    """
    wins = np.ascontiguousarray(wins, dtype=np.float64)
    n = wins.shape[1]

    ms = np.mean(wins * wins, axis=1)
    rms = np.sqrt(ms)

    max_grad = np.max(np.abs(np.diff(wins, axis=1)), axis=1)

    # zero-crossing with sign inheritance: a zero sample adopts the previous
    # nonzero sign; leading zeros adopt the first nonzero sign.
    s = np.sign(wins)
    nz = s != 0
    idx = np.where(nz, np.arange(n)[None, :], -1)
    last = np.maximum.accumulate(idx, axis=1)
    rows = np.arange(wins.shape[0])[:, None]
    filled = np.where(last >= 0, s[rows, np.maximum(last, 0)], 0.0)
    # leading zeros: inherit the first nonzero sign of the row
    first_nz = np.where(nz.any(axis=1), np.argmax(nz, axis=1), 0)
    first_sign = s[np.arange(wins.shape[0]), first_nz]
    filled = np.where(last >= 0, filled, first_sign[:, None])
    crossings = np.sum(filled[:, 1:] != filled[:, :-1], axis=1)
    zcr = crossings / (n - 1)

    mean = np.mean(wins, axis=1, keepdims=True)
    d = wins - mean
    m2 = np.mean(d * d, axis=1)
    m4 = np.mean(d**4, axis=1)
    flat = m2 <= FLAT_M2_REL * ms
    with np.errstate(divide="ignore", invalid="ignore"):
        kurt = np.where(flat, np.inf, m4 / np.where(flat, 1.0, m2**2))

    return np.stack([rms, max_grad, zcr, kurt], axis=1)
