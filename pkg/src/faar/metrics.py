"""Reported metrics: BA, F1, precision, ECE, win rate, inter-subject
dispersion, rejection rate, real-time factor, and study summaries."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import EmptyInput, SubjectMismatch, TooFewSubjects

ECE_FLOOR = 1e-6  # applied when reporting 1/ECE


def balanced_accuracy(y_true, y_pred) -> float:
    """Mean of per-class recalls."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.size == 0:
        raise EmptyInput("no samples")
    recalls = []
    for cls in np.unique(y_true):
        mask = y_true == cls
        recalls.append(np.mean(y_pred[mask] == cls))
    return float(np.mean(recalls))


def f1_precision(y_true, y_pred, positive_class) -> tuple[float, float]:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.size == 0:
        raise EmptyInput("no samples")
    tp = np.sum((y_pred == positive_class) & (y_true == positive_class))
    fp = np.sum((y_pred == positive_class) & (y_true != positive_class))
    fn = np.sum((y_pred != positive_class) & (y_true == positive_class))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return float(f1), float(precision)


def ece(y_true, proba, positive_class=None, n_bins: int = 10) -> float:
    """Expected calibration error over equal-width confidence bins on [0.5, 1].

    ``proba`` is P(positive class); confidence is max(p, 1-p) and the
    implied prediction is the argmax class.
    """
    y_true = np.asarray(y_true)
    proba = np.asarray(proba, dtype=np.float64)
    if y_true.size == 0:
        raise EmptyInput("no samples")
    classes = np.unique(y_true)
    if positive_class is None:
        positive_class = classes[-1]
    pred_pos = proba > 0.5
    conf = np.where(pred_pos, proba, 1.0 - proba)
    correct = np.where(pred_pos, y_true == positive_class, y_true != positive_class)
    edges = np.linspace(0.5, 1.0, n_bins + 1)
    total = 0.0
    n = y_true.size
    for b in range(n_bins):
        lo, hi = edges[b], edges[b + 1]
        mask = (conf >= lo) & (conf <= hi if b == n_bins - 1 else conf < hi)
        if not mask.any():
            continue
        acc = float(np.mean(correct[mask]))
        avg_conf = float(np.mean(conf[mask]))
        total += mask.sum() / n * abs(acc - avg_conf)
    return float(total)


def win_rate(per_subject_ba_method: dict, per_subject_ba_baseline: dict) -> float:
    """Fraction of subjects strictly improved vs the baseline."""
    if set(per_subject_ba_method) != set(per_subject_ba_baseline):
        raise SubjectMismatch("subject sets differ")
    if not per_subject_ba_method:
        raise EmptyInput("no subjects")
    wins = sum(
        per_subject_ba_method[s] > per_subject_ba_baseline[s]
        for s in per_subject_ba_method
    )
    return wins / len(per_subject_ba_method)


def inter_subject_std(per_subject_ba) -> float:
    """Population standard deviation across subject-level BAs."""
    vals = np.asarray(list(per_subject_ba), dtype=np.float64)
    if vals.size < 2:
        raise TooFewSubjects("need >= 2 subjects")
    return float(vals.std())


def real_time_factor(wall_seconds: float, eeg_seconds: float) -> float:
    if eeg_seconds <= 0:
        raise EmptyInput("eeg_seconds must be positive")
    return wall_seconds / eeg_seconds


@dataclass
class FoldMetrics:
    fold_id: str
    subject_id: str
    balanced_accuracy: Optional[float]
    f1: Optional[float]
    precision: Optional[float]
    ece: Optional[float]
    rejection_rate: float
    n_train: int
    n_test: int
    n_rejected_train: int
    n_rejected_test: int
    flagged: bool = False


def fold_metrics(fold_result, positive_class=None) -> FoldMetrics:
    """Metrics for one decoded CV fold (null metrics when flagged)."""
    fr = fold_result
    total = fr.n_train + fr.n_test
    rej = fr.n_rejected_train + fr.n_rejected_test
    rate = rej / total if total else 0.0
    if fr.flagged or fr.y_true is None:
        return FoldMetrics(
            fold_id=fr.fold_id,
            subject_id=fr.subject_id,
            balanced_accuracy=None,
            f1=None,
            precision=None,
            ece=None,
            rejection_rate=rate,
            n_train=fr.n_train,
            n_test=fr.n_test,
            n_rejected_train=fr.n_rejected_train,
            n_rejected_test=fr.n_rejected_test,
            flagged=True,
        )
    if positive_class is None:
        positive_class = np.unique(fr.y_true)[-1]
    f1, prec = f1_precision(fr.y_true, fr.y_pred, positive_class)
    return FoldMetrics(
        fold_id=fr.fold_id,
        subject_id=fr.subject_id,
        balanced_accuracy=balanced_accuracy(fr.y_true, fr.y_pred),
        f1=f1,
        precision=prec,
        ece=ece(fr.y_true, fr.proba, positive_class),
        rejection_rate=rate,
        n_train=fr.n_train,
        n_test=fr.n_test,
        n_rejected_train=fr.n_rejected_train,
        n_rejected_test=fr.n_rejected_test,
    )


def per_subject_ba(folds: list[FoldMetrics]) -> dict:
    """Mean BA across each subject's non-flagged folds."""
    acc: dict[str, list[float]] = {}
    for fm in folds:
        if fm.balanced_accuracy is None:
            continue
        acc.setdefault(fm.subject_id, []).append(fm.balanced_accuracy)
    return {s: float(np.mean(v)) for s, v in acc.items()}


@dataclass
class StudySummary:
    method: str
    mean_ba: float
    mean_f1: float
    mean_precision: float
    mean_ece: float
    mean_rejection_rate: float
    inter_subject_std_ba: Optional[float]
    win_rate_vs_baseline: Optional[float]
    real_time_factor: Optional[float]
    n_folds: int
    n_flagged: int

    def to_json_dict(self) -> dict:
        return asdict(self)


def summarize(
    method: str,
    folds: list[FoldMetrics],
    baseline_folds: Optional[list[FoldMetrics]] = None,
    rtf: Optional[float] = None,
) -> StudySummary:
    ok = [f for f in folds if f.balanced_accuracy is not None]
    subj = per_subject_ba(folds)
    wr = None
    if baseline_folds is not None:
        base_subj = per_subject_ba(baseline_folds)
        common = set(subj) & set(base_subj)
        if common:
            wr = win_rate(
                {s: subj[s] for s in common}, {s: base_subj[s] for s in common}
            )
    return StudySummary(
        method=method,
        mean_ba=float(np.mean([f.balanced_accuracy for f in ok])) if ok else float("nan"),
        mean_f1=float(np.mean([f.f1 for f in ok])) if ok else float("nan"),
        mean_precision=float(np.mean([f.precision for f in ok])) if ok else float("nan"),
        mean_ece=float(np.mean([f.ece for f in ok])) if ok else float("nan"),
        mean_rejection_rate=float(np.mean([f.rejection_rate for f in folds])),
        inter_subject_std_ba=inter_subject_std(subj.values()) if len(subj) >= 2 else None,
        win_rate_vs_baseline=wr,
        real_time_factor=rtf,
        n_folds=len(folds),
        n_flagged=sum(f.flagged for f in folds),
    )


def write_subject_csv(path, rows: list[FoldMetrics], method: str):
    """Per-subject, per-method CSV export (the data behind the figures)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "method",
                "subject_id",
                "fold_id",
                "balanced_accuracy",
                "f1",
                "precision",
                "ece",
                "inv_ece",
                "rejection_rate",
            ]
        )
        for fm in rows:
            inv_ece = (
                None if fm.ece is None else 1.0 / max(fm.ece, ECE_FLOOR)
            )
            w.writerow(
                [
                    method,
                    fm.subject_id,
                    fm.fold_id,
                    fm.balanced_accuracy,
                    fm.f1,
                    fm.precision,
                    fm.ece,
                    inv_ece,
                    fm.rejection_rate,
                ]
            )
