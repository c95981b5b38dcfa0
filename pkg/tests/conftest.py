"""Shared corpus builders for the decoding and rejection tests."""

import numpy as np
import pytest

from faar.model import EpochTensor
from faar.synth import SynthConfig, contaminated_corpus, gen_two_class


def build_two_session_corpus(
    seed,
    n=200,
    n_channels=8,
    gain_ratio=2.0,
    contamination=0.0,
    scale=10.0,
    n_affected=4,
    shuffle_contaminated_labels=True,
    subject="s0",
):
    """Two-class, two-session corpus; contaminated epochs optionally carry
    shuffled labels (the harmful-artifact construction)."""
    cfg = SynthConfig(n_channels=n_channels, fs=250, epoch_s=4, n_epochs=n, seed=seed)
    e = gen_two_class(cfg, {0: 1.0, 1: gain_ratio})
    lab = np.array(e.labels, dtype=int)
    if contamination > 0:
        e, art_labels = contaminated_corpus(
            cfg, contamination, scale=scale, n_affected=n_affected, base=e
        )
        if shuffle_contaminated_labels:
            rng = np.random.default_rng(seed + 1000)
            for al in art_labels:
                lab[al.epoch_id] = rng.integers(0, 2)
    sessions = tuple("A" if i < n // 2 else "B" for i in range(n))
    return EpochTensor(
        data=e.data,
        fs=e.fs,
        labels=lab,
        session_ids=sessions,
        subject_ids=tuple(subject for _ in range(n)),
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def two_session_corpus():
    return build_two_session_corpus
