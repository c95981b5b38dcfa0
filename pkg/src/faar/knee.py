"""Knee detection on the sorted SQI curve and rejection decisions.

The detector follows the Kneedle procedure for a convex decreasing
curve: min-max normalize, orient so knees become maxima of the
difference curve y_d = 1 - (y_n + x_n), then keep the first local
maximum whose prominence survives the sensitivity test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotSorted, TooFewEpochs, TooFewPoints
from .model import RejectionDecision

DEFAULT_SENSITIVITY = 1.0


@dataclass(frozen=True)
class KneeResult:
    found: bool
    knee_index: int
    knee_value: float
    sensitivity: float


def difference_curve(y: np.ndarray) -> np.ndarray:
    """Normalized difference curve for a convex decreasing input."""
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    x_n = np.arange(n) / (n - 1)
    span = y[0] - y[-1]
    if span <= 0:
        return np.zeros(n)
    y_n = (y - y[-1]) / span
    return 1.0 - (y_n + x_n)


def kneedle(y, S: float = DEFAULT_SENSITIVITY) -> KneeResult:
    """Knee of a convex, decreasing curve.

    The knee is the peak of the normalized difference curve, accepted
    only when it rises at least S mean steps above the straight-line
    baseline (a line has a flat difference curve and therefore no knee).
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    if n < 5:
        raise TooFewPoints(f"kneedle needs >= 5 points, got {n}")
    if np.any(np.diff(y) > 0):
        raise NotSorted("curve must be non-increasing")
    yd = difference_curve(y)
    peak = float(yd.max())
    # significance: a real knee bends the normalized curve far off the
    # straight-line diagonal; smooth decays and lines stay below S/2
    if peak <= S * 0.5:
        return KneeResult(False, -1, float("nan"), S)
    # earliest point indistinguishable from the peak (within half an
    # S-scaled mean step): on plateaued difference curves this stays on
    # the steep side of the transition
    knee = int(np.argmax(yd >= peak - 0.5 * S / (n - 1)))
    return KneeResult(True, knee, float(y[knee]), S)


def select_threshold(sqis, S: float = DEFAULT_SENSITIVITY) -> float:
    """Rejection threshold = SQI value at the knee of the sorted-descending
    SQI curve; +inf (reject nothing) when no knee is found."""
    sqis = np.asarray(sqis, dtype=np.float64)
    if sqis.size < 5:
        raise TooFewEpochs(f"threshold selection needs >= 5 epochs, got {sqis.size}")
    curve = np.sort(sqis)[::-1]
    result = kneedle(curve, S=S)
    return float(result.knee_value) if result.found else float("inf")


def reject(reports, threshold: float, method: str = "FAAR") -> list[RejectionDecision]:
    """Strict-inequality rejection: sqi > threshold; ties retained."""
    return [
        RejectionDecision(
            epoch_id=r.epoch_id,
            sqi=float(r.sqi),
            rejected=bool(r.sqi > threshold),
            threshold=float(threshold),
            method=method,
        )
        for r in reports
    ]
