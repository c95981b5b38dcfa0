"""The five per-window artifact descriptors and epoch feature extraction.

Feature order everywhere: band_mag, rms, max_grad, zcr, kurt. Scalar
entry points operate on a single window; `extract_features` runs the
batched kernel over every (epoch, channel, window) cell.
"""

from __future__ import annotations

import numpy as np

from .errors import BandOutOfRange, TooShort, WindowTooShort, ZeroVariance
from .kernels import band_magnitudes, timedomain_features
from .kernels.numpy_backend import FLAT_M2_REL
from .model import EpochTensor, WindowGrid

DEFAULT_BAND = (8.0, 32.0)
DEFAULT_WINDOW_S = 1.0
FLAT_KURT_SENTINEL = np.inf


def band_magnitude(x, fs: float, lo: float = DEFAULT_BAND[0], hi: float = DEFAULT_BAND[1]) -> float:
    """Mean in-band one-sided |DFT| magnitude of the mean-removed window."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise TooShort("band_magnitude needs >= 2 samples")
    if not (0 < lo < hi <= fs / 2):
        raise BandOutOfRange(f"band [{lo}, {hi}] invalid for fs={fs}")
    return float(band_magnitudes(x[None, :], fs, lo, hi)[0])


def rms(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.size < 1:
        raise TooShort("rms needs >= 1 sample")
    return float(np.sqrt(np.mean(x * x)))


def max_gradient(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise TooShort("max_gradient needs >= 2 samples")
    return float(np.max(np.abs(np.diff(x))))


def zero_crossing_rate(x) -> float:
    """Sign changes per sample; zeros inherit the previous nonzero sign."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise TooShort("zero_crossing_rate needs >= 2 samples")
    return float(timedomain_features(x[None, :], backend="numpy")[0, 2])


def kurtosis(x) -> float:
    """Pearson kurtosis m4/m2^2 with biased central moments."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 4:
        raise TooShort("kurtosis needs >= 4 samples")
    ms = float(np.mean(x * x))
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    if m2 <= FLAT_M2_REL * ms:
        raise ZeroVariance("flat window: variance is (numerically) zero")
    return float(np.mean(d**4) / m2**2)


def window_count(n_samples: int, fs: float, window_len_s: float) -> int:
    return int(n_samples // int(round(window_len_s * fs)))


def windowed_feature_grid(
    data: np.ndarray,
    fs: float,
    window_len_s: float,
    lo: float = DEFAULT_BAND[0],
    hi: float = DEFAULT_BAND[1],
    backend: str | None = None,
) -> np.ndarray:
    """Feature grid [windows x channels x 5] for one [channels x samples] array.

    Consecutive non-overlapping windows; the trailing partial window is
    dropped. Flat windows record kurt = +inf (the flat-channel sentinel).
    """
    data = np.asarray(data, dtype=np.float64)
    wlen = int(round(window_len_s * fs))
    if wlen < 4:
        raise WindowTooShort(f"window of {wlen} samples: need >= 4")
    n_ch, n_samp = data.shape
    n_win = n_samp // wlen
    if n_win < 1:
        raise WindowTooShort("data shorter than one window")
    # [channels, windows, wlen] -> rows ordered (window, channel)
    trimmed = data[:, : n_win * wlen].reshape(n_ch, n_win, wlen)
    rows = np.ascontiguousarray(trimmed.transpose(1, 0, 2)).reshape(n_win * n_ch, wlen)
    td = timedomain_features(rows, backend=backend)
    bm = band_magnitudes(rows, fs, lo, hi)
    grid = np.concatenate([bm[:, None], td], axis=1)
    return grid.reshape(n_win, n_ch, 5)


def extract_features(
    e: EpochTensor,
    window_len_s: float = DEFAULT_WINDOW_S,
    lo: float = DEFAULT_BAND[0],
    hi: float = DEFAULT_BAND[1],
    backend: str | None = None,
) -> list[WindowGrid]:
    """Per-epoch WindowGrid list, chronological window order."""
    wlen = int(round(window_len_s * e.fs))
    if wlen < 4:
        raise WindowTooShort(f"window of {wlen} samples: need >= 4")
    if e.n_samples < wlen:
        raise WindowTooShort("epoch shorter than one window")
    n_win = e.n_samples // wlen
    n_ep, n_ch = e.n_epochs, e.n_channels
    trimmed = e.data[:, :, : n_win * wlen].reshape(n_ep, n_ch, n_win, wlen)
    rows = np.ascontiguousarray(trimmed.transpose(0, 2, 1, 3)).reshape(-1, wlen)
    td = timedomain_features(rows, backend=backend)
    bm = band_magnitudes(rows, fs=e.fs, lo=lo, hi=hi)
    grids = np.concatenate([bm[:, None], td], axis=1).reshape(n_ep, n_win, n_ch, 5)
    return [WindowGrid(values=grids[i], window_len_s=window_len_s) for i in range(n_ep)]
