"""Online FAAR: windowed frame protocol, warm-up calibration, rolling
reference updates, sliding-buffer threshold, per-epoch decisions."""

from __future__ import annotations

import json
import struct
from collections import deque
from typing import BinaryIO, Iterator, Optional

import numpy as np

from .errors import HeaderMismatch, TruncatedPayload
from .kernels import band_magnitudes, timedomain_features
from .knee import DEFAULT_SENSITIVITY, select_threshold
from .model import RejectionDecision
from .reference import ReferenceModel, calibrate_from_windows, update_reference
from .sqi import severity_grid

DEFAULT_BUFFER = 50
DEFAULT_LAMBDA = 0.999
DEFAULT_WARMUP_S = 10.0


def write_handshake(fh: BinaryIO, fs, channels, window_len_s, epoch_len_s) -> None:
    line = json.dumps(
        {
            "fs": fs,
            "channels": channels,
            "window_len_s": window_len_s,
            "epoch_len_s": epoch_len_s,
        }
    )
    fh.write(line.encode("utf-8") + b"\n")


def read_handshake(fh: BinaryIO) -> dict:
    raw = bytearray()
    while True:
        b = fh.read(1)
        if not b:
            raise TruncatedPayload("stream ended before handshake")
        if b == b"\n":
            break
        raw += b
    try:
        hs = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise HeaderMismatch(f"bad handshake: {exc}") from exc
    for key in ("fs", "channels", "window_len_s", "epoch_len_s"):
        if key not in hs:
            raise HeaderMismatch(f"handshake missing {key!r}")
    return hs


def write_frame(fh: BinaryIO, window: np.ndarray) -> None:
    payload = np.asarray(window, dtype="<f4").tobytes(order="C")
    fh.write(struct.pack("<I", len(payload)))
    fh.write(payload)


def read_frames(fh: BinaryIO, channels: int) -> Iterator[np.ndarray]:
    while True:
        head = fh.read(4)
        if not head:
            return
        if len(head) < 4:
            raise TruncatedPayload("truncated frame length")
        (flen,) = struct.unpack("<I", head)
        payload = fh.read(flen)
        if len(payload) < flen:
            raise TruncatedPayload("truncated frame payload")
        samples = flen // 4 // channels
        yield np.frombuffer(payload, dtype="<f4").reshape(channels, samples).astype(
            np.float64
        )


class StreamEngine:
    """Single-writer scoring state fed one window at a time.

    Warm-up windows seed the reference via the offline calibration path;
    afterwards each completed epoch yields one RejectionDecision whose
    threshold is recomputed over the sliding SQI buffer. Clean windows
    (severity 0 everywhere) update the reference with forgetting factor
    ``lam``; lam = 1 freezes the statistics.
    """

    def __init__(
        self,
        fs: float,
        n_channels: int,
        window_len_s: float = 1.0,
        epoch_len_s: float = 4.0,
        warmup_s: float = DEFAULT_WARMUP_S,
        lam: float = DEFAULT_LAMBDA,
        buffer: int = DEFAULT_BUFFER,
        sensitivity: float = DEFAULT_SENSITIVITY,
        band: tuple = (8.0, 32.0),
        model: Optional[ReferenceModel] = None,
    ):
        self.fs = fs
        self.n_channels = n_channels
        self.window_len_s = window_len_s
        self.windows_per_epoch = max(1, int(round(epoch_len_s / window_len_s)))
        self.warmup_windows = int(np.ceil(warmup_s / window_len_s)) if model is None else 0
        self.lam = lam
        self.sensitivity = sensitivity
        self.band = band
        self.model = model
        self._warmup_feats: list[np.ndarray] = []
        self._epoch_feats: list[np.ndarray] = []
        self.sqi_buffer: deque = deque(maxlen=buffer)
        self.last_threshold = float("inf")
        self.n_epochs_done = 0

    def _window_features(self, window: np.ndarray) -> np.ndarray:
        rows = np.ascontiguousarray(window, dtype=np.float64)
        td = timedomain_features(rows)
        bm = band_magnitudes(rows, self.fs, *self.band)
        return np.concatenate([bm[:, None], td], axis=1)  # [channels x 5]

    def push_window(self, window: np.ndarray) -> Optional[RejectionDecision]:
        feats = self._window_features(window)
        if self.model is None:
            self._warmup_feats.append(feats)
            if len(self._warmup_feats) >= self.warmup_windows:
                pooled = np.stack(self._warmup_feats)
                self.model, _ = calibrate_from_windows(
                    pooled, self.window_len_s, forgetting=self.lam
                )
                self._warmup_feats.clear()
            return None

        z = (feats - self.model.mean) / self.model.std
        sev = severity_grid(z)
        if self.lam < 1.0 and not sev.any():
            self.model = update_reference(self.model, feats, self.lam)

        self._epoch_feats.append((feats, sev))
        if len(self._epoch_feats) < self.windows_per_epoch:
            return None

        cells = np.stack([s for _, s in self._epoch_feats])  # [w x ch x 5]
        self._epoch_feats.clear()
        sqi = float(cells.max(axis=2).mean())
        self.sqi_buffer.append(sqi)
        if len(self.sqi_buffer) >= 5:
            self.last_threshold = select_threshold(
                list(self.sqi_buffer), S=self.sensitivity
            )
        else:
            self.last_threshold = float("inf")
        decision = RejectionDecision(
            epoch_id=f"e{self.n_epochs_done:06d}",
            sqi=sqi,
            rejected=bool(sqi > self.last_threshold),
            threshold=self.last_threshold,
            method="FAAR",
        )
        self.n_epochs_done += 1
        return decision


def run_stream(
    stdin: BinaryIO,
    stdout,
    warmup_s: float = DEFAULT_WARMUP_S,
    lam: float = DEFAULT_LAMBDA,
    buffer: int = DEFAULT_BUFFER,
    sensitivity: float = DEFAULT_SENSITIVITY,
    model: Optional[ReferenceModel] = None,
) -> int:
    """Read handshake + frames from ``stdin``; write one decision JSON line
    per completed epoch to ``stdout``. Returns the number of decisions."""
    hs = read_handshake(stdin)
    engine = StreamEngine(
        fs=float(hs["fs"]),
        n_channels=int(hs["channels"]),
        window_len_s=float(hs["window_len_s"]),
        epoch_len_s=float(hs["epoch_len_s"]),
        warmup_s=warmup_s,
        lam=lam,
        buffer=buffer,
        sensitivity=sensitivity,
        model=model,
    )
    n = 0
    for window in read_frames(stdin, engine.n_channels):
        decision = engine.push_window(window)
        if decision is not None:
            stdout.write(json.dumps(decision.to_json_dict()) + "\n")
            stdout.flush()
            n += 1
    return n
