"""Real-time-factor benchmark of the scoring path, per kernel backend."""

from __future__ import annotations

import json
import time

import numpy as np

from .kernels import DEFAULT_BACKEND, HAS_COMPILED
from .knee import select_threshold
from .pipeline import faar_calibrate_epochs
from .sqi import score_epochs
from .synth import SynthConfig, gen_clean


def bench_scoring(
    n_channels: int = 64,
    fs: float = 250.0,
    duration_s: float = 120.0,
    epoch_s: float = 4.0,
    window_len_s: float = 1.0,
    seed: int = 0,
) -> dict:
    """Time calibration + scoring + thresholding on a synthetic stream.

    Returns per-backend wall time and real-time factor (wall seconds per
    second of EEG); RTF < 1 is real-time capable.
    """
    n_epochs = int(duration_s / epoch_s)
    cfg = SynthConfig(
        n_channels=n_channels, fs=fs, epoch_s=epoch_s, n_epochs=n_epochs, seed=seed
    )
    e = gen_clean(cfg)
    eeg_seconds = n_epochs * epoch_s
    backends = ["numpy"] + (["cython"] if HAS_COMPILED else [])
    results = {}
    for backend in backends:
        t0 = time.perf_counter()
        model = faar_calibrate_epochs(e, window_len_s)
        reports = score_epochs(e, model, window_len_s, backend=backend)
        select_threshold([r.sqi for r in reports])
        wall = time.perf_counter() - t0
        results[backend] = {
            "wall_s": wall,
            "eeg_s": eeg_seconds,
            "rtf": wall / eeg_seconds,
        }
    return {
        "n_channels": n_channels,
        "fs": fs,
        "duration_s": eeg_seconds,
        "default_backend": DEFAULT_BACKEND,
        "backends": results,
    }


def format_report(report: dict) -> str:
    return json.dumps(report, indent=2)
