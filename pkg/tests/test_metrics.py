"""Evaluation metric hand cases and properties."""

import numpy as np
import pytest

from faar.errors import EmptyInput, SubjectMismatch, TooFewSubjects
from faar.metrics import (
    FoldMetrics,
    balanced_accuracy,
    ece,
    f1_precision,
    inter_subject_std,
    real_time_factor,
    summarize,
    win_rate,
    write_subject_csv,
)


# --- balanced accuracy --------------------------------------------------------

def test_ba_perfect_and_degenerate():
    assert balanced_accuracy([0, 1, 0, 1], [0, 1, 0, 1]) == 1.0
    assert balanced_accuracy([0, 0, 1, 1], [0, 0, 0, 0]) == 0.5


def test_ba_hand_case():
    assert balanced_accuracy([0, 0, 0, 1], [0, 0, 1, 1]) == pytest.approx(5 / 6)


def test_ba_relabel_and_duplication_invariance(rng):
    y = rng.integers(0, 2, size=50)
    p = rng.integers(0, 2, size=50)
    base = balanced_accuracy(y, p)
    assert balanced_accuracy(1 - y, 1 - p) == pytest.approx(base)
    assert balanced_accuracy(np.tile(y, 3), np.tile(p, 3)) == pytest.approx(base)


def test_ba_empty():
    with pytest.raises(EmptyInput):
        balanced_accuracy([], [])


# --- f1 / precision -----------------------------------------------------------

def test_f1_precision_perfect():
    f1, prec = f1_precision([0, 1, 1], [0, 1, 1], positive_class=1)
    assert (f1, prec) == (1.0, 1.0)


def test_f1_precision_no_predicted_positives():
    f1, prec = f1_precision([1, 1, 0], [0, 0, 0], positive_class=1)
    assert (f1, prec) == (0.0, 0.0)


def test_f1_precision_hand_case():
    # TP=2, FP=1, FN=1
    y_true = [1, 1, 0, 1, 0]
    y_pred = [1, 1, 1, 0, 0]
    f1, prec = f1_precision(y_true, y_pred, positive_class=1)
    assert prec == pytest.approx(2 / 3)
    assert f1 == pytest.approx(2 / 3)


# --- ECE ------------------------------------------------------------------------

def test_ece_confident_correct_zero():
    assert ece([1, 1, 1], [1.0, 1.0, 1.0]) == 0.0


def test_ece_single_sample():
    assert ece([1], [0.8]) == pytest.approx(0.2)


def test_ece_four_sample_hand_case():
    # confidences {0.9 correct, 0.9 correct, 0.6 wrong, 0.6 correct}
    # -> (2/4)|1-0.9| + (2/4)|0.5-0.6| = 0.1
    y = [1, 1, 0, 1]
    p = [0.9, 0.9, 0.6, 0.6]
    assert ece(y, p) == pytest.approx(0.1)


def test_ece_bounds(rng):
    y = rng.integers(0, 2, size=100)
    p = rng.uniform(size=100)
    v = ece(y, p)
    assert 0.0 <= v <= 1.0


def test_ece_empty():
    with pytest.raises(EmptyInput):
        ece([], [])


# --- win rate ---------------------------------------------------------------------

def test_win_rate_identity_zero():
    m = {"a": 0.7, "b": 0.8}
    assert win_rate(m, m) == 0.0


def test_win_rate_uniform_improvement():
    base = {"a": 0.7, "b": 0.8}
    meth = {k: v + 0.01 for k, v in base.items()}
    assert win_rate(meth, base) == 1.0


def test_win_rate_mixed():
    base = {"a": 0.5, "b": 0.6, "c": 0.7, "d": 0.8}
    meth = {"a": 0.6, "b": 0.7, "c": 0.7, "d": 0.75}
    assert win_rate(meth, base) == 0.5


def test_win_rate_subject_mismatch():
    with pytest.raises(SubjectMismatch):
        win_rate({"a": 0.5}, {"b": 0.5})


# --- inter-subject std ---------------------------------------------------------------

def test_inter_subject_std_cases(rng):
    assert inter_subject_std([0.7, 0.7, 0.7]) == pytest.approx(0.0, abs=1e-12)
    assert inter_subject_std([0.4, 0.6]) == pytest.approx(0.1)
    x = rng.uniform(size=9)
    assert inter_subject_std(x) == pytest.approx(float(np.std(x)), abs=1e-12)
    with pytest.raises(TooFewSubjects):
        inter_subject_std([0.5])


# --- real-time factor ------------------------------------------------------------------

def test_real_time_factor():
    assert real_time_factor(0.5, 10.0) == 0.05
    assert real_time_factor(3.0, 3.0) == 1.0


# --- summary / CSV -----------------------------------------------------------------------

def _fold(fid, subj, ba, flagged=False):
    return FoldMetrics(
        fold_id=fid,
        subject_id=subj,
        balanced_accuracy=None if flagged else ba,
        f1=None if flagged else ba,
        precision=None if flagged else ba,
        ece=None if flagged else 0.05,
        rejection_rate=0.1,
        n_train=90,
        n_test=10,
        n_rejected_train=9,
        n_rejected_test=1,
        flagged=flagged,
    )


def test_summarize_means_and_win_rate():
    folds = [_fold("f1", "a", 0.8), _fold("f2", "a", 0.9), _fold("f3", "b", 0.6)]
    base = [_fold("f1", "a", 0.7), _fold("f2", "a", 0.7), _fold("f3", "b", 0.7)]
    s = summarize("FAAR", folds, baseline_folds=base, rtf=0.02)
    assert s.mean_ba == pytest.approx(np.mean([0.8, 0.9, 0.6]))
    # per-subject mean first: a -> 0.85 vs 0.7 (win), b -> 0.6 vs 0.7 (loss)
    assert s.win_rate_vs_baseline == pytest.approx(0.5)
    assert s.inter_subject_std_ba == pytest.approx(np.std([0.85, 0.6]))
    assert s.real_time_factor == 0.02
    assert s.n_folds == 3 and s.n_flagged == 0


def test_summarize_skips_flagged():
    folds = [_fold("f1", "a", 0.8), _fold("f2", "b", 0.0, flagged=True)]
    s = summarize("FAAR", folds)
    assert s.mean_ba == pytest.approx(0.8)
    assert s.n_flagged == 1


def test_write_subject_csv(tmp_path):
    import csv

    folds = [_fold("f1", "a", 0.8), _fold("f2", "b", 0.6)]
    path = tmp_path / "subjects.csv"
    write_subject_csv(path, folds, method="FAAR")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert rows[0]["method"] == "FAAR"
    assert float(rows[0]["balanced_accuracy"]) == 0.8
