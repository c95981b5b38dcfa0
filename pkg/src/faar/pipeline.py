"""End-to-end FAAR rejection on epoch corpora and fold rejectors for CV."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .baselines import (
    IFOREST_PSI,
    IFOREST_SCORE_THRESHOLD,
    IFOREST_TREES,
    epoch_feature_matrix,
    iforest_fit,
    iforest_scores,
    p2p_reject,
)
from .features import DEFAULT_WINDOW_S, extract_features
from .knee import DEFAULT_SENSITIVITY, reject, select_threshold
from .model import EpochTensor, RejectionDecision
from .reference import ReferenceModel, calibrate_from_windows
from .sqi import epoch_sqi, score_epochs


def pooled_window_features(e: EpochTensor, window_len_s: float = DEFAULT_WINDOW_S):
    """Window-feature grid pooled across epochs, plus per-epoch grids."""
    grids = extract_features(e, window_len_s)
    pooled = np.concatenate([g.values for g in grids], axis=0)
    return pooled, grids


def faar_calibrate_epochs(
    e: EpochTensor, window_len_s: float = DEFAULT_WINDOW_S
) -> ReferenceModel:
    """Self-calibrate a reference from an epoched corpus (windows pooled)."""
    pooled, _ = pooled_window_features(e, window_len_s)
    model, _ = calibrate_from_windows(
        pooled, window_len_s, channel_names=e.channel_names
    )
    return model


def faar_reject(
    e: EpochTensor,
    model: Optional[ReferenceModel] = None,
    threshold: Optional[float] = None,
    window_len_s: float = DEFAULT_WINDOW_S,
    sensitivity: float = DEFAULT_SENSITIVITY,
) -> tuple[list[RejectionDecision], ReferenceModel, float]:
    """Score and reject a batch; calibrates from the batch itself unless a
    model/threshold learned elsewhere is supplied."""
    if model is None:
        model = faar_calibrate_epochs(e, window_len_s)
    reports = score_epochs(e, model, window_len_s)
    if threshold is None:
        threshold = select_threshold([r.sqi for r in reports], S=sensitivity)
    return reject(reports, threshold), model, threshold


# ---------------------------------------------------------------------------
# fold rejectors: callable (train, test) -> (reject_mask_train, reject_mask_test)

Rejector = Callable[[EpochTensor, EpochTensor], tuple[np.ndarray, np.ndarray]]


def _mask(decisions) -> np.ndarray:
    return np.array([d.rejected for d in decisions], dtype=bool)


def make_faar_rejector(
    window_len_s: float = DEFAULT_WINDOW_S, sensitivity: float = DEFAULT_SENSITIVITY
) -> Rejector:
    """Reference and threshold are learned on the training fold only."""

    def rejector(train: EpochTensor, test: EpochTensor):
        dec_train, model, thr = faar_reject(
            train, window_len_s=window_len_s, sensitivity=sensitivity
        )
        dec_test, _, _ = faar_reject(
            test, model=model, threshold=thr, window_len_s=window_len_s
        )
        return _mask(dec_train), _mask(dec_test)

    return rejector


def make_p2p_rejector(threshold_uv: float) -> Rejector:
    def rejector(train, test):
        return _mask(p2p_reject(train, threshold_uv)), _mask(
            p2p_reject(test, threshold_uv)
        )

    return rejector


def make_iforest_rejector(
    n_trees: int = IFOREST_TREES,
    psi: int = IFOREST_PSI,
    score_threshold: float = IFOREST_SCORE_THRESHOLD,
    seed: int = 0,
    window_len_s: float = DEFAULT_WINDOW_S,
) -> Rejector:
    """Forest fit on the training fold's feature vectors only."""

    def rejector(train, test):
        Xtr = epoch_feature_matrix(train, window_len_s)
        Xte = epoch_feature_matrix(test, window_len_s)
        forest = iforest_fit(Xtr, n_trees=n_trees, psi=min(psi, Xtr.shape[0]), seed=seed)
        return (
            iforest_scores(forest, Xtr) > score_threshold,
            iforest_scores(forest, Xte) > score_threshold,
        )

    return rejector


def make_external_rejector(decisions) -> Rejector:
    """Apply pre-computed decisions (e.g. third-party rejectors) by epoch_id."""
    rejected = {d.epoch_id: d.rejected for d in decisions}

    def rejector(train, test):
        return (
            np.array([rejected.get(eid, False) for eid in train.epoch_ids], dtype=bool),
            np.array([rejected.get(eid, False) for eid in test.epoch_ids], dtype=bool),
        )

    return rejector
