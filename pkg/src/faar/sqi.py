"""Ordinal severity mapping and epoch-level Signal Quality Index."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ModelMismatch
from .features import DEFAULT_WINDOW_S, extract_features
from .model import EpochTensor, WindowGrid, validate_epochs
from .reference import ReferenceModel

SEVERITY_CUTS = (2.0, 4.0, 6.0)  # |z| bands -> severity 0..3, closed below


def severity(z: float) -> int:
    """|z| <= 2 -> 0; <= 4 -> 1; <= 6 -> 2; beyond (or non-finite) -> 3."""
    if not np.isfinite(z):
        return 3
    a = abs(z)
    if a <= SEVERITY_CUTS[0]:
        return 0
    if a <= SEVERITY_CUTS[1]:
        return 1
    if a <= SEVERITY_CUTS[2]:
        return 2
    return 3


def severity_grid(z: np.ndarray) -> np.ndarray:
    """Vectorized severity; non-finite z (flat-channel sentinel) maps to 3."""
    a = np.abs(np.asarray(z, dtype=np.float64))
    sev = np.digitize(a, SEVERITY_CUTS, right=True)
    sev[~np.isfinite(a)] = 3
    return sev.astype(np.int8)


@dataclass(frozen=True)
class SqiReport:
    epoch_id: str
    sqi: float
    severity: np.ndarray  # [windows x channels x features] in {0..3}
    worst_channel: int

    def to_json_dict(self) -> dict:
        return {
            "epoch_id": self.epoch_id,
            "sqi": self.sqi,
            "worst_channel": self.worst_channel,
        }


def epoch_sqi(grid: WindowGrid, m: ReferenceModel, epoch_id: str = "") -> SqiReport:
    """Aggregate reference-normalized severities into the epoch SQI.

    Per (window, channel) cell the score is the max severity across
    features; the SQI is the mean of those cell scores.
    """
    v = grid.values
    if v.shape[1] != m.mean.shape[0] or v.shape[2] != m.mean.shape[1]:
        raise ModelMismatch(
            f"grid {v.shape[1:]} vs model {m.mean.shape} channel/feature mismatch"
        )
    with np.errstate(invalid="ignore"):
        z = (v - m.mean[None]) / m.std[None]
    sev = severity_grid(z)
    cell = sev.max(axis=2)  # [windows x channels]
    sqi = float(cell.mean())
    worst = int(np.argmax(cell.mean(axis=0)))
    return SqiReport(epoch_id=epoch_id, sqi=sqi, severity=sev, worst_channel=worst)


def score_epochs(
    e: EpochTensor,
    m: ReferenceModel,
    window_len_s: float = DEFAULT_WINDOW_S,
    backend: str | None = None,
) -> list[SqiReport]:
    """SQI report per epoch, order-preserving."""
    validate_epochs(e)
    grids = extract_features(e, window_len_s, backend=backend)
    return [
        epoch_sqi(g, m, epoch_id=e.epoch_ids[i]) for i, g in enumerate(grids)
    ]


def write_sqi_jsonl(reports, path, rejected=None):
    with open(path, "w") as fh:
        for i, rep in enumerate(reports):
            d = rep.to_json_dict()
            if rejected is not None:
                d["rejected"] = bool(rejected[i])
            fh.write(json.dumps(d) + "\n")
