"""Minimal FaarFile epoch writer.

Implements the published interchange layout so this package needs no
dependency on the engine itself:

    magic "FAAR" | version u16 LE | header_len u32 LE | UTF-8 JSON header
    | row-major little-endian float32 payload

The header follows the "epochs" schema: kind, shape, fs, channel_names,
dtype ("f32"), epoch_ids, and optionally labels / subject_ids /
session_ids.
"""

from __future__ import annotations

import json
import struct
from typing import Optional, Sequence

import numpy as np

MAGIC = b"FAAR"
VERSION = 1


def write_epochs(
    path,
    data: np.ndarray,
    fs: float,
    *,
    channel_names: Sequence[str] = (),
    labels: Optional[Sequence] = None,
    epoch_ids: Optional[Sequence[str]] = None,
    subject_id: Optional[str] = None,
    session_id: Optional[str] = None,
) -> None:
    """Write an (epochs, channels, samples) float array as a FaarFile."""
    arr = np.ascontiguousarray(data, dtype="<f4")
    if arr.ndim != 3:
        raise ValueError(f"epoch payload must be 3-D, got shape {arr.shape}")
    n = arr.shape[0]
    if epoch_ids is None:
        epoch_ids = [f"e{i:06d}" for i in range(n)]
    header = {
        "kind": "epochs",
        "shape": list(arr.shape),
        "fs": float(fs),
        "channel_names": list(channel_names),
        "dtype": "f32",
        "epoch_ids": list(epoch_ids),
    }
    if labels is not None:
        header["labels"] = [
            int(x) if isinstance(x, (int, np.integer)) else str(x) for x in labels
        ]
    if subject_id is not None:
        header["subject_ids"] = [str(subject_id)] * n
    if session_id is not None:
        header["session_ids"] = [str(session_id)] * n
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(arr.tobytes(order="C"))
