"""Fixed downstream decoder: 8-32 Hz band-pass, shrunk covariance,
tangent-space projection at the Riemannian mean, logistic regression,
and leave-one-group-out cross-validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh
from scipy.signal import butter, sosfiltfilt

from .errors import (
    BandOutOfRange,
    InsufficientFolds,
    NonFinite,
    NotSpd,
    SingleClass,
)
from .model import EpochTensor, Recording

MI_BAND = (8.0, 32.0)
SHRINKAGE = 0.1
EIG_FLOOR = 1e-10


def bandpass(r: Recording, lo: float = MI_BAND[0], hi: float = MI_BAND[1]) -> Recording:
    """Zero-phase 4th-order Butterworth band-pass, per channel."""
    if hi >= r.fs / 2 or lo <= 0 or lo >= hi:
        raise BandOutOfRange(f"band [{lo}, {hi}] invalid for fs={r.fs}")
    sos = butter(4, [lo, hi], btype="bandpass", fs=r.fs, output="sos")
    data = r.data - r.data.mean(axis=1, keepdims=True)
    out = sosfiltfilt(sos, data, axis=1)
    return Recording(
        data=out,
        fs=r.fs,
        channel_names=r.channel_names,
        subject_id=r.subject_id,
        session_id=r.session_id,
    )


def bandpass_epochs(e: EpochTensor, lo: float = MI_BAND[0], hi: float = MI_BAND[1]) -> EpochTensor:
    if hi >= e.fs / 2 or lo <= 0 or lo >= hi:
        raise BandOutOfRange(f"band [{lo}, {hi}] invalid for fs={e.fs}")
    sos = butter(4, [lo, hi], btype="bandpass", fs=e.fs, output="sos")
    data = e.data - e.data.mean(axis=2, keepdims=True)
    out = sosfiltfilt(sos, data, axis=2)
    return EpochTensor(
        data=out,
        fs=e.fs,
        channel_names=e.channel_names,
        labels=e.labels,
        epoch_ids=e.epoch_ids,
        subject_ids=e.subject_ids,
        session_ids=e.session_ids,
    )


def covariance(epoch: np.ndarray, shrinkage: float = SHRINKAGE) -> np.ndarray:
    """Row-mean-centered sample covariance shrunk toward a scaled identity."""
    X = np.asarray(epoch, dtype=np.float64)
    if not np.isfinite(X).all():
        raise NonFinite("epoch contains NaN/Inf")
    c, t = X.shape
    Xc = X - X.mean(axis=1, keepdims=True)
    C = Xc @ Xc.T / (t - 1)
    C = (1.0 - shrinkage) * C + shrinkage * (np.trace(C) / c) * np.eye(c)
    return 0.5 * (C + C.T)


def _eig_spd(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = eigh(C)
    if w.min() <= 0:
        raise NotSpd(f"matrix has eigenvalue {w.min():.3e} <= 0")
    return np.maximum(w, EIG_FLOOR), v


def _matfun(C: np.ndarray, fn) -> np.ndarray:
    w, v = _eig_spd(C)
    return (v * fn(w)) @ v.T


def logm_spd(C: np.ndarray) -> np.ndarray:
    return _matfun(C, np.log)


def expm_sym(S: np.ndarray) -> np.ndarray:
    w, v = eigh(0.5 * (S + S.T))
    return (v * np.exp(w)) @ v.T


def sqrtm_spd(C: np.ndarray) -> np.ndarray:
    return _matfun(C, np.sqrt)


def invsqrtm_spd(C: np.ndarray) -> np.ndarray:
    return _matfun(C, lambda w: 1.0 / np.sqrt(w))


def riemannian_mean(
    mats, tol: float = 1e-9, max_iter: int = 100
) -> tuple[np.ndarray, bool]:
    """Affine-invariant Frechet mean via the fixed-point iteration.

    Returns (mean, converged); the last iterate is returned even when the
    iteration hit max_iter.
    """
    mats = [np.asarray(m, dtype=np.float64) for m in mats]
    M = sum(mats) / len(mats)
    for _ in range(max_iter):
        M12 = sqrtm_spd(M)
        iM12 = invsqrtm_spd(M)
        logs = np.mean([logm_spd(iM12 @ C @ iM12) for C in mats], axis=0)
        norm = np.linalg.norm(logs, "fro")
        M = M12 @ expm_sym(logs) @ M12
        M = 0.5 * (M + M.T)
        if norm < tol:
            return M, True
    return M, False


def tangent_project(C: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Upper-triangle vectorization of log(M^-1/2 C M^-1/2), off-diagonals
    scaled by sqrt(2) so the Euclidean norm matches the geodesic distance."""
    iM12 = invsqrtm_spd(np.asarray(M, dtype=np.float64))
    S = logm_spd(iM12 @ np.asarray(C, dtype=np.float64) @ iM12)
    c = S.shape[0]
    iu = np.triu_indices(c)
    scale = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    return S[iu] * scale


def geodesic_distance(C: np.ndarray, M: np.ndarray) -> float:
    """Affine-invariant distance via generalized eigenvalues of (C, M)."""
    w = eigh(C, M, eigvals_only=True)
    return float(np.sqrt(np.sum(np.log(w) ** 2)))


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    l2: float
    classes: tuple


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logreg_loss_grad(w, b, X, y01, l2):
    z = X @ w + b
    p = _sigmoid(z)
    # mean log-loss, numerically safe
    eps = 1e-15
    loss = -np.mean(y01 * np.log(p + eps) + (1 - y01) * np.log(1 - p + eps))
    loss += 0.5 * l2 * np.dot(w, w)
    r = p - y01
    gw = X.T @ r / len(y01) + l2 * w
    gb = float(np.mean(r))
    return loss, gw, gb


def logreg_fit(
    X: np.ndarray,
    y,
    l2: float = 1e-2,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> LogisticModel:
    """Full-batch gradient descent with backtracking line search."""
    X = np.asarray(X, dtype=np.float64)
    classes = tuple(sorted(set(np.asarray(y).tolist())))
    if len(classes) != 2:
        raise SingleClass(f"need exactly 2 classes, got {classes}")
    y01 = (np.asarray(y) == classes[1]).astype(np.float64)
    w = np.zeros(X.shape[1])
    b = 0.0
    step = 1.0
    loss, gw, gb = logreg_loss_grad(w, b, X, y01, l2)
    for _ in range(max_iter):
        gnorm = max(np.abs(gw).max(), abs(gb))
        if gnorm < tol:
            break
        # backtracking: halve until the Armijo condition holds
        g2 = np.dot(gw, gw) + gb * gb
        step = min(step * 2.0, 1e6)
        while True:
            w_new = w - step * gw
            b_new = b - step * gb
            loss_new, gw_new, gb_new = logreg_loss_grad(w_new, b_new, X, y01, l2)
            if loss_new <= loss - 1e-4 * step * g2 or step < 1e-12:
                break
            step *= 0.5
        w, b, loss, gw, gb = w_new, b_new, loss_new, gw_new, gb_new
    return LogisticModel(weights=w, bias=float(b), l2=l2, classes=classes)


def predict_proba(m: LogisticModel, X: np.ndarray) -> np.ndarray:
    """P(class = classes[1]) per row."""
    return _sigmoid(np.asarray(X, dtype=np.float64) @ m.weights + m.bias)


def predict(m: LogisticModel, X: np.ndarray):
    p = predict_proba(m, X)
    return np.where(p > 0.5, m.classes[1], m.classes[0])


@dataclass
class DecoderConfig:
    shrinkage: float = SHRINKAGE
    l2: float = 1e-2
    band: tuple = MI_BAND
    apply_bandpass: bool = True


@dataclass
class FoldResult:
    fold_id: str
    subject_id: str
    y_true: Optional[np.ndarray]
    y_pred: Optional[np.ndarray]
    proba: Optional[np.ndarray]
    n_train: int
    n_test: int
    n_rejected_train: int
    n_rejected_test: int
    flagged: bool = False


def fit_decoder(train: EpochTensor, cfg: DecoderConfig):
    covs = [covariance(train.data[i], cfg.shrinkage) for i in range(train.n_epochs)]
    M, _ = riemannian_mean(covs)
    Xt = np.array([tangent_project(C, M) for C in covs])
    model = logreg_fit(Xt, train.labels, l2=cfg.l2)
    return M, model


def apply_decoder(test: EpochTensor, M, model, cfg: DecoderConfig):
    covs = [covariance(test.data[i], cfg.shrinkage) for i in range(test.n_epochs)]
    Xt = np.array([tangent_project(C, M) for C in covs])
    return predict(model, Xt), predict_proba(model, Xt)


def crossval(
    e: EpochTensor,
    rejector: Optional[Callable[[EpochTensor, EpochTensor], tuple[np.ndarray, np.ndarray]]],
    scheme: str = "cross_session",
    cfg: DecoderConfig | None = None,
) -> list[FoldResult]:
    """Leave-one-group-out CV; the rejector is fit on training data only
    and returns boolean reject masks for (train, test)."""
    cfg = cfg or DecoderConfig()
    if scheme == "cross_session":
        groups = e.session_ids
    elif scheme == "cross_subject":
        groups = e.subject_ids
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if groups is None:
        raise InsufficientFolds(f"{scheme} requires group tags")
    uniq = sorted(set(groups))
    if len(uniq) < 2:
        raise InsufficientFolds(f"{scheme} needs >= 2 groups, got {len(uniq)}")
    garr = np.asarray(groups)
    # the rejector sees raw epochs (matching online deployment); only the
    # decoder consumes the band-passed signal
    filtered = bandpass_epochs(e, *cfg.band) if cfg.apply_bandpass else e
    results = []
    for held in uniq:
        test_idx = np.flatnonzero(garr == held)
        train_idx = np.flatnonzero(garr != held)
        train = e.subset(train_idx)
        test = e.subset(test_idx)
        subj = test.subject_ids[0] if test.subject_ids else ""
        if rejector is None:
            rej_train = np.zeros(train.n_epochs, dtype=bool)
            rej_test = np.zeros(test.n_epochs, dtype=bool)
        else:
            rej_train, rej_test = rejector(train, test)
        keep_train = np.flatnonzero(~rej_train)
        keep_test = np.flatnonzero(~rej_test)
        base = dict(
            fold_id=str(held),
            subject_id=str(subj),
            n_train=train.n_epochs,
            n_test=test.n_epochs,
            n_rejected_train=int(rej_train.sum()),
            n_rejected_test=int(rej_test.sum()),
        )
        ftrain = filtered.subset(train_idx)
        ftest = filtered.subset(test_idx)
        tr = ftrain.subset(keep_train) if keep_train.size else None
        te = ftest.subset(keep_test) if keep_test.size else None
        if tr is None or te is None or len(set(tr.labels.tolist())) < 2:
            results.append(
                FoldResult(y_true=None, y_pred=None, proba=None, flagged=True, **base)
            )
            continue
        M, model = fit_decoder(tr, cfg)
        y_pred, proba = apply_decoder(te, M, model, cfg)
        results.append(
            FoldResult(y_true=np.asarray(te.labels), y_pred=y_pred, proba=proba, **base)
        )
    return results
