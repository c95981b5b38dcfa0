"""Self-calibrated clean reference: selection, fitting, online updates.

The reference is estimated from the recording itself: RMS values over
short windows are z-scored per channel, clean windows are picked with a
truncated-Gaussian inlier criterion, and per-channel/per-feature feature
statistics over those windows become the normalization model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm

from .errors import ReferenceUnavailable, TooFewWindows, WindowTooShort
from .features import DEFAULT_WINDOW_S, windowed_feature_grid
from .model import FEATURE_NAMES, Recording

TRUNC_Q = 0.8
Z_MAX = 3.0
MAX_BAD_FRAC = 0.1


@dataclass(frozen=True)
class ReferenceModel:
    """Per-channel, per-feature location/scale of the clean reference."""

    mean: np.ndarray  # [channels x features]
    std: np.ndarray  # [channels x features], floored > 0
    n_windows: int
    window_len_s: float
    forgetting: float = 1.0
    channel_names: tuple[str, ...] = ()
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        for name in ("mean", "std"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def n_channels(self) -> int:
        return self.mean.shape[0]

    def to_json(self) -> str:
        return json.dumps(
            {
                "channels": list(self.channel_names)
                or [f"ch{i}" for i in range(self.n_channels)],
                "features": list(self.feature_names),
                "mean": self.mean.tolist(),
                "std": self.std.tolist(),
                "n_windows": self.n_windows,
                "window_len_s": self.window_len_s,
                "lambda": self.forgetting,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ReferenceModel":
        d = json.loads(text)
        return cls(
            mean=np.array(d["mean"], dtype=np.float64),
            std=np.array(d["std"], dtype=np.float64),
            n_windows=int(d["n_windows"]),
            window_len_s=float(d["window_len_s"]),
            forgetting=float(d.get("lambda", 1.0)),
            channel_names=tuple(d.get("channels", ())),
            feature_names=tuple(d.get("features", FEATURE_NAMES)),
        )


@dataclass(frozen=True)
class CleanWindowSelection:
    selected: np.ndarray  # sorted window indices
    rms_z: np.ndarray  # [windows x channels]
    bad_channel_frac: np.ndarray  # [windows]


def rms_grid(r: Recording, window_len_s: float = DEFAULT_WINDOW_S) -> np.ndarray:
    """RMS per consecutive non-overlapping window per channel, [windows x channels]."""
    wlen = int(round(window_len_s * r.fs))
    if wlen < 1 or r.n_samples < wlen:
        raise WindowTooShort("recording shorter than one window")
    n_win = r.n_samples // wlen
    trimmed = r.data[:, : n_win * wlen].reshape(r.n_channels, n_win, wlen)
    return np.sqrt(np.mean(trimmed * trimmed, axis=2)).T


def standardize_per_channel(grid: np.ndarray) -> np.ndarray:
    """z-score each channel's column across windows (population std)."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.shape[0] < 2:
        raise TooFewWindows("need >= 2 windows to standardize")
    mu = grid.mean(axis=0)
    sd = grid.std(axis=0)
    z = np.zeros_like(grid)
    ok = sd > 0
    z[:, ok] = (grid[:, ok] - mu[ok]) / sd[ok]
    return z


def _truncated_gauss_fit(z_col: np.ndarray, trunc_q: float) -> tuple[float, float]:
    """Location/scale from the central trunc_q mass, variance-corrected.

    For a normal truncated symmetrically to retain mass q, the truncated
    variance is sigma^2 * (1 - 2 a phi(a) / q) with a = Phi^-1(0.5 + q/2);
    dividing the sample std of the retained mass by that factor recovers
    the untruncated scale.
    """
    lo_q = (1.0 - trunc_q) / 2.0
    lo, hi = np.quantile(z_col, [lo_q, 1.0 - lo_q])
    core = z_col[(z_col >= lo) & (z_col <= hi)]
    if core.size < 2:
        core = z_col
    mu = float(core.mean())
    sd = float(core.std())
    a = norm.ppf(0.5 + trunc_q / 2.0)
    shrink = 1.0 - 2.0 * a * norm.pdf(a) / trunc_q
    sd_corrected = sd / np.sqrt(shrink)
    return mu, max(sd_corrected, 1e-12)


def min_reference_windows(n_windows: int) -> int:
    return max(10, int(np.ceil(0.10 * n_windows)))


def _select(zgrid, trunc_q, z_max, max_bad_frac) -> tuple[np.ndarray, np.ndarray]:
    n_win, n_ch = zgrid.shape
    bad = np.zeros_like(zgrid, dtype=bool)
    for c in range(n_ch):
        mu, sd = _truncated_gauss_fit(zgrid[:, c], trunc_q)
        bad[:, c] = np.abs(zgrid[:, c] - mu) / sd > z_max
    n_bad = bad.sum(axis=1)
    allowed = max(1.0, max_bad_frac * n_ch)
    selected = np.flatnonzero(n_bad <= allowed)
    return selected, n_bad / n_ch


def select_clean_windows(
    zgrid: np.ndarray,
    trunc_q: float = TRUNC_Q,
    z_max: float = Z_MAX,
    max_bad_frac: float = MAX_BAD_FRAC,
) -> CleanWindowSelection:
    """Pick reference windows via the truncated-Gaussian inlier criterion.

    Relaxation ladder when fewer than min_reference_windows survive:
    z_max -> 4, then max_bad_frac -> 0.2, then the lowest-|z|-row-sum
    windows are taken directly.
    """
    zgrid = np.asarray(zgrid, dtype=np.float64)
    n_win = zgrid.shape[0]
    need = min_reference_windows(n_win)
    if n_win < need:
        raise ReferenceUnavailable(
            f"only {n_win} candidate windows, need >= {need}"
        )
    for zm, mbf in ((z_max, max_bad_frac), (4.0, max_bad_frac), (4.0, 0.2)):
        selected, bad_frac = _select(zgrid, trunc_q, zm, mbf)
        if selected.size >= need:
            return CleanWindowSelection(selected, zgrid, bad_frac)
    # last rung: smallest |z| row sums
    order = np.argsort(np.abs(zgrid).sum(axis=1), kind="stable")
    selected = np.sort(order[:need])
    _, bad_frac = _select(zgrid, trunc_q, 4.0, 0.2)
    return CleanWindowSelection(selected, zgrid, bad_frac)


def std_floor(std: np.ndarray) -> np.ndarray:
    """Per-feature floor: max(1e-6, 1e-3 x median std across channels)."""
    med = np.median(std, axis=0)
    return np.maximum(1e-6, 1e-3 * med)


def fit_reference(
    feature_grid: np.ndarray,
    selected: np.ndarray,
    window_len_s: float = DEFAULT_WINDOW_S,
    forgetting: float = 1.0,
    channel_names: tuple[str, ...] = (),
) -> ReferenceModel:
    """Mean/std per channel and feature over the selected windows.

    feature_grid: [windows x channels x features]; population moments;
    std floored.
    """
    selected = np.asarray(selected, dtype=int)
    if selected.size == 0:
        raise ReferenceUnavailable("empty clean-window selection")
    sel = np.asarray(feature_grid, dtype=np.float64)[selected]
    finite = np.isfinite(sel)
    # flat-channel sentinel (inf kurt) must not poison the reference moments
    safe = np.where(finite, sel, 0.0)
    cnt = np.maximum(finite.sum(axis=0), 1)
    mean = safe.sum(axis=0) / cnt
    var = (np.where(finite, (sel - mean) ** 2, 0.0)).sum(axis=0) / cnt
    std = np.sqrt(var)
    std = np.maximum(std, std_floor(std)[None, :])
    return ReferenceModel(
        mean=mean,
        std=std,
        n_windows=int(selected.size),
        window_len_s=window_len_s,
        forgetting=forgetting,
        channel_names=channel_names,
    )


def calibrate(
    r: Recording,
    window_len_s: float = DEFAULT_WINDOW_S,
    trunc_q: float = TRUNC_Q,
    z_max: float = Z_MAX,
    max_bad_frac: float = MAX_BAD_FRAC,
    forgetting: float = 1.0,
    backend: str | None = None,
) -> tuple[ReferenceModel, CleanWindowSelection]:
    """Full offline self-calibration on a continuous recording."""
    grid = rms_grid(r, window_len_s)
    z = standardize_per_channel(grid)
    sel = select_clean_windows(z, trunc_q, z_max, max_bad_frac)
    feats = windowed_feature_grid(r.data, r.fs, window_len_s, backend=backend)
    model = fit_reference(
        feats, sel.selected, window_len_s, forgetting, r.channel_names
    )
    return model, sel


def calibrate_from_windows(
    window_features: np.ndarray,
    window_len_s: float = DEFAULT_WINDOW_S,
    trunc_q: float = TRUNC_Q,
    z_max: float = Z_MAX,
    max_bad_frac: float = MAX_BAD_FRAC,
    forgetting: float = 1.0,
    channel_names: tuple[str, ...] = (),
) -> tuple[ReferenceModel, CleanWindowSelection]:
    """Self-calibration when only epoched data exists.

    window_features: [windows x channels x features] pooled across epochs;
    the RMS feature column drives the clean-window selection.
    """
    rms_col = np.asarray(window_features, dtype=np.float64)[:, :, 1]
    z = standardize_per_channel(rms_col)
    sel = select_clean_windows(z, trunc_q, z_max, max_bad_frac)
    model = fit_reference(
        window_features, sel.selected, window_len_s, forgetting, channel_names
    )
    return model, sel


def update_reference(
    m: ReferenceModel, window_features: np.ndarray, lam: float | None = None
) -> ReferenceModel:
    """Exponentially-forgetting moment update with one clean window.

    Caller guarantees the window passed the cleanliness test (severity 0
    everywhere under the current model).
    """
    lam = m.forgetting if lam is None else lam
    x = np.asarray(window_features, dtype=np.float64)
    if lam >= 1.0:
        return replace(m, n_windows=m.n_windows + 1)
    ex2 = m.std**2 + m.mean**2
    mean = lam * m.mean + (1.0 - lam) * x
    ex2 = lam * ex2 + (1.0 - lam) * x * x
    floor = std_floor(m.std)
    var = np.maximum(ex2 - mean**2, (floor[None, :]) ** 2)
    return replace(m, mean=mean, std=np.sqrt(var), n_windows=m.n_windows + 1)
