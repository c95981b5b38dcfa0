"""Core domain types: recordings, epoch batches, rejection decisions.

All types are frozen value objects; arrays are stored as float64 for
cancellation-safe downstream statistics even when files carry float32.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyInput, NonFinite, ShapeMismatch


def _as_f64(a) -> np.ndarray:
    out = np.asarray(a, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Recording:
    """Continuous multichannel EEG, microvolts, [channels x samples]."""

    data: np.ndarray
    fs: float
    channel_names: tuple[str, ...] = ()
    subject_id: str = ""
    session_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "data", _as_f64(self.data))
        if self.data.ndim != 2:
            raise ShapeMismatch(f"recording data must be 2-D, got {self.data.ndim}-D")
        if self.fs <= 0:
            raise ShapeMismatch(f"fs must be positive, got {self.fs}")
        if self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise EmptyInput("recording needs at least 1 channel and 1 sample")
        if not np.isfinite(self.data).all():
            raise NonFinite("recording contains NaN/Inf")
        if not self.channel_names:
            object.__setattr__(
                self,
                "channel_names",
                tuple(f"ch{i}" for i in range(self.data.shape[0])),
            )
        elif len(self.channel_names) != self.data.shape[0]:
            raise ShapeMismatch("channel_names length != channel count")
        else:
            object.__setattr__(self, "channel_names", tuple(self.channel_names))

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.fs


@dataclass(frozen=True)
class EpochTensor:
    """A batch of fixed-length epochs, microvolts, [epochs x channels x samples]."""

    data: np.ndarray
    fs: float
    channel_names: tuple[str, ...] = ()
    labels: Optional[np.ndarray] = None
    epoch_ids: tuple[str, ...] = ()
    subject_ids: Optional[tuple[str, ...]] = None
    session_ids: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "data", _as_f64(self.data))
        if self.data.ndim != 3:
            raise ShapeMismatch(f"epoch data must be 3-D, got {self.data.ndim}-D")
        if self.fs <= 0:
            raise ShapeMismatch(f"fs must be positive, got {self.fs}")
        n = self.data.shape[0]
        if n == 0 or self.data.shape[1] == 0 or self.data.shape[2] == 0:
            raise EmptyInput("epoch tensor needs at least 1 epoch, channel, sample")
        if self.labels is not None and len(np.asarray(self.labels)) != n:
            raise ShapeMismatch("labels length != epoch count")
        if not self.epoch_ids:
            object.__setattr__(self, "epoch_ids", tuple(f"e{i:06d}" for i in range(n)))
        else:
            object.__setattr__(self, "epoch_ids", tuple(str(e) for e in self.epoch_ids))
        if self.labels is not None:
            lab = np.asarray(self.labels)
            lab.flags.writeable = False
            object.__setattr__(self, "labels", lab)
        if not self.channel_names:
            object.__setattr__(
                self,
                "channel_names",
                tuple(f"ch{i}" for i in range(self.data.shape[1])),
            )
        else:
            object.__setattr__(self, "channel_names", tuple(self.channel_names))
        for tag in ("subject_ids", "session_ids"):
            v = getattr(self, tag)
            if v is not None:
                object.__setattr__(self, tag, tuple(str(s) for s in v))

    @property
    def n_epochs(self) -> int:
        return self.data.shape[0]

    @property
    def n_channels(self) -> int:
        return self.data.shape[1]

    @property
    def n_samples(self) -> int:
        return self.data.shape[2]

    def subset(self, idx: Sequence[int]) -> "EpochTensor":
        idx = np.asarray(idx, dtype=int)
        return EpochTensor(
            data=self.data[idx],
            fs=self.fs,
            channel_names=self.channel_names,
            labels=None if self.labels is None else self.labels[idx],
            epoch_ids=tuple(self.epoch_ids[i] for i in idx),
            subject_ids=None
            if self.subject_ids is None
            else tuple(self.subject_ids[i] for i in idx),
            session_ids=None
            if self.session_ids is None
            else tuple(self.session_ids[i] for i in idx),
        )


FEATURE_NAMES = ("band_mag", "rms", "max_grad", "zcr", "kurt")


@dataclass(frozen=True)
class WindowGrid:
    """Per-window, per-channel feature values, [windows x channels x features]."""

    values: np.ndarray
    window_len_s: float
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if v.ndim != 3:
            raise ShapeMismatch("window grid must be 3-D")
        if v.shape[0] < 1:
            raise EmptyInput("window grid needs at least 1 window")
        if v.shape[2] != len(self.feature_names):
            raise ShapeMismatch("feature axis does not match feature_names")


@dataclass(frozen=True)
class RejectionDecision:
    """Keep/reject verdict for one epoch."""

    epoch_id: str
    sqi: float
    rejected: bool
    threshold: float
    method: str = "FAAR"  # FAAR | P2P | IFOREST | external tag

    def to_json_dict(self) -> dict:
        thr = self.threshold
        return {
            "epoch_id": self.epoch_id,
            "sqi": self.sqi,
            "threshold": "inf" if np.isinf(thr) else thr,
            "rejected": bool(self.rejected),
            "method": self.method,
        }


def validate_epochs(e: EpochTensor) -> EpochTensor:
    """Check batch invariants; returns the input unchanged when valid."""
    if e.n_epochs == 0:
        raise EmptyInput("0-epoch tensor")
    if not np.isfinite(e.data).all():
        raise NonFinite("epoch tensor contains NaN/Inf")
    if len(set(e.epoch_ids)) != e.n_epochs:
        raise ShapeMismatch("epoch_ids are not unique")
    if e.labels is not None and len(e.labels) != e.n_epochs:
        raise ShapeMismatch("labels length != epoch count")
    return e
