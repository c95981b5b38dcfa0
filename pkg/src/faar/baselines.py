"""Reference rejection baselines: fixed peak-to-peak and Isolation Forest."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from .errors import DegenerateFeatures
from .features import DEFAULT_WINDOW_S, extract_features
from .model import EpochTensor, RejectionDecision

IFOREST_TREES = 100
IFOREST_PSI = 256
IFOREST_SCORE_THRESHOLD = 0.5


def p2p_reject(e: EpochTensor, threshold_uv: float) -> list[RejectionDecision]:
    """Reject when any channel's peak-to-peak amplitude exceeds the threshold."""
    p2p = (e.data.max(axis=2) - e.data.min(axis=2)).max(axis=1)
    return [
        RejectionDecision(
            epoch_id=e.epoch_ids[i],
            sqi=float(p2p[i]),
            rejected=bool(p2p[i] > threshold_uv),
            threshold=float(threshold_uv),
            method="P2P",
        )
        for i in range(e.n_epochs)
    ]


def harmonic(n) -> np.ndarray:
    """H(n) = digamma(n+1) + gamma (exact for integers, to float precision)."""
    return digamma(np.asarray(n, dtype=np.float64) + 1.0) + np.euler_gamma


def average_path_length(n) -> np.ndarray:
    """c(n): expected external path length of a BST with n points."""
    n = np.asarray(n, dtype=np.float64)
    out = np.zeros_like(n)
    big = n > 1
    nb = n[big]
    out[big] = 2.0 * harmonic(nb - 1.0) - 2.0 * (nb - 1.0) / nb
    return out


@dataclass
class _Node:
    feature: int = -1
    split: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    size: int = 0
    depth: int = 0


@dataclass(frozen=True)
class IForest:
    n_trees: int
    subsample: int
    trees: tuple
    max_depth: int
    seed: int
    n_features: int


def _grow(X, idx, depth, max_depth, rng) -> _Node:
    node = _Node(size=idx.size, depth=depth)
    if depth >= max_depth or idx.size <= 1:
        return node
    sub = X[idx]
    # avoid degenerate splits: only features with spread are candidates
    lo = sub.min(axis=0)
    hi = sub.max(axis=0)
    candidates = np.flatnonzero(hi > lo)
    if candidates.size == 0:
        return node
    f = int(rng.choice(candidates))
    split = float(rng.uniform(lo[f], hi[f]))
    mask = sub[:, f] < split
    node.feature = f
    node.split = split
    node.left = _grow(X, idx[mask], depth + 1, max_depth, rng)
    node.right = _grow(X, idx[~mask], depth + 1, max_depth, rng)
    return node


def iforest_fit(
    X: np.ndarray,
    n_trees: int = IFOREST_TREES,
    psi: int = IFOREST_PSI,
    seed: int = 0,
) -> IForest:
    """Grow an isolation forest; each tree sees a psi-subsample."""
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if n < 2:
        raise DegenerateFeatures("need >= 2 points")
    if np.all(X == X[0]):
        raise DegenerateFeatures("all rows identical")
    psi = min(psi, n)
    max_depth = int(np.ceil(np.log2(psi)))
    rng = np.random.Generator(np.random.Philox(key=seed))
    trees = []
    for _ in range(n_trees):
        idx = rng.choice(n, size=psi, replace=False)
        trees.append(_grow(X, idx, 0, max_depth, rng))
    return IForest(
        n_trees=n_trees,
        subsample=psi,
        trees=tuple(trees),
        max_depth=max_depth,
        seed=seed,
        n_features=d,
    )


def _path_length(node: _Node, x: np.ndarray) -> float:
    depth = 0
    while node.feature >= 0:
        node = node.left if x[node.feature] < node.split else node.right
        depth += 1
    return depth + float(average_path_length(np.array([node.size]))[0])


def iforest_score(f: IForest, x: np.ndarray) -> float:
    """Anomaly score s(x) = 2^(-E[h(x)] / c(psi)), in (0, 1)."""
    x = np.asarray(x, dtype=np.float64)
    mean_h = np.mean([_path_length(t, x) for t in f.trees])
    c = float(average_path_length(np.array([f.subsample]))[0])
    return float(2.0 ** (-mean_h / max(c, 1e-12)))


def iforest_scores(f: IForest, X: np.ndarray) -> np.ndarray:
    return np.array([iforest_score(f, row) for row in np.asarray(X, dtype=np.float64)])


def epoch_feature_matrix(
    e: EpochTensor, window_len_s: float = DEFAULT_WINDOW_S
) -> np.ndarray:
    """Per-epoch flattened per-channel mean FeatureVector, [epochs x 5*channels]."""
    grids = extract_features(e, window_len_s)
    rows = []
    for g in grids:
        v = g.values  # [windows x channels x 5]
        finite = np.isfinite(v)
        safe = np.where(finite, v, 0.0)
        cnt = np.maximum(finite.sum(axis=0), 1)
        rows.append((safe.sum(axis=0) / cnt).ravel())
    return np.asarray(rows)


def iforest_reject(
    e: EpochTensor,
    n_trees: int = IFOREST_TREES,
    psi: int = IFOREST_PSI,
    score_threshold: float = IFOREST_SCORE_THRESHOLD,
    seed: int = 0,
    window_len_s: float = DEFAULT_WINDOW_S,
    forest: IForest | None = None,
) -> list[RejectionDecision]:
    """Fit (or reuse) a forest on the epochs' feature vectors and reject
    epochs scoring above the anomaly threshold."""
    X = epoch_feature_matrix(e, window_len_s)
    if forest is None:
        forest = iforest_fit(X, n_trees=n_trees, psi=min(psi, X.shape[0]), seed=seed)
    scores = iforest_scores(forest, X)
    return [
        RejectionDecision(
            epoch_id=e.epoch_ids[i],
            sqi=float(scores[i]),
            rejected=bool(scores[i] > score_threshold),
            threshold=float(score_threshold),
            method="IFOREST",
        )
        for i in range(e.n_epochs)
    ]
