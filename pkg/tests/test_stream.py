"""Streaming protocol and offline/online equivalence."""

import io
import json
import math

import numpy as np
import pytest

from faar.errors import HeaderMismatch, TruncatedPayload
from faar.knee import reject, select_threshold
from faar.pipeline import faar_calibrate_epochs
from faar.sqi import score_epochs
from faar.stream import (
    StreamEngine,
    read_frames,
    read_handshake,
    run_stream,
    write_frame,
    write_handshake,
)
from faar.synth import ArtifactLabel, SynthConfig, gen_clean, inject


def _planted_corpus(seed=0, n_epochs=30):
    cfg = SynthConfig(n_channels=8, fs=250.0, epoch_s=4.0, n_epochs=n_epochs, seed=seed)
    e = gen_clean(cfg)
    planted = (n_epochs // 4, n_epochs // 2, (3 * n_epochs) // 4)
    labels = [
        ArtifactLabel(epoch_id=i, kind="EMG", affected_channels=(0, 1, 2, 3), scale=8.0)
        for i in planted
    ]
    return inject(e, labels, seed=1)


def _windows(e):
    """Yield 1-s windows in stream order."""
    wlen = int(e.fs)
    for i in range(e.n_epochs):
        for w in range(e.n_samples // wlen):
            yield e.data[i, :, w * wlen : (w + 1) * wlen]


# --- protocol plumbing -------------------------------------------------------

def test_handshake_roundtrip():
    buf = io.BytesIO()
    write_handshake(buf, fs=250.0, channels=8, window_len_s=1.0, epoch_len_s=4.0)
    buf.seek(0)
    hs = read_handshake(buf)
    assert hs == {"fs": 250.0, "channels": 8, "window_len_s": 1.0, "epoch_len_s": 4.0}


def test_handshake_errors():
    with pytest.raises(TruncatedPayload):
        read_handshake(io.BytesIO(b""))
    with pytest.raises(HeaderMismatch):
        read_handshake(io.BytesIO(b"not json\n"))
    with pytest.raises(HeaderMismatch):
        read_handshake(io.BytesIO(b'{"fs": 250}\n'))


def test_frame_roundtrip(rng):
    buf = io.BytesIO()
    wins = [rng.normal(size=(4, 250)).astype(np.float32) for _ in range(3)]
    for w in wins:
        write_frame(buf, w)
    buf.seek(0)
    back = list(read_frames(buf, channels=4))
    assert len(back) == 3
    for a, b in zip(wins, back):
        np.testing.assert_array_equal(a.astype(np.float64), b)


def test_frame_truncation():
    buf = io.BytesIO()
    write_frame(buf, np.zeros((2, 10), dtype=np.float32))
    raw = buf.getvalue()
    with pytest.raises(TruncatedPayload):
        list(read_frames(io.BytesIO(raw[:-3]), channels=2))
    with pytest.raises(TruncatedPayload):
        list(read_frames(io.BytesIO(raw + b"\x01\x02"), channels=2))


# --- offline/online equivalence ------------------------------------------------

def test_stream_matches_offline_with_shared_model():
    e = _planted_corpus(seed=3)
    model = faar_calibrate_epochs(e)
    offline_reports = score_epochs(e, model)
    offline_sqis = [r.sqi for r in offline_reports]
    offline_thr = select_threshold(offline_sqis)
    offline_decs = reject(offline_reports, offline_thr)

    engine = StreamEngine(
        fs=e.fs,
        n_channels=e.n_channels,
        window_len_s=1.0,
        epoch_len_s=4.0,
        lam=1.0,
        buffer=e.n_epochs,  # buffer covers the full batch
        model=model,
    )
    stream_decs = [d for d in map(engine.push_window, _windows(e)) if d is not None]

    assert len(stream_decs) == e.n_epochs
    # SQIs bit-exact against the offline scorer
    for sd, sqi in zip(stream_decs, offline_sqis):
        assert sd.sqi == sqi
    # once the buffer covers the batch, the threshold equals the offline one
    assert engine.last_threshold == offline_thr
    # re-applying the final threshold reproduces the offline decisions
    for od, sd in zip(offline_decs, stream_decs):
        assert od.rejected == (sd.sqi > engine.last_threshold)


def test_stream_prefix_threshold_consistency():
    # each per-epoch decision equals an offline reject() over the SQIs seen
    # so far (the sliding-buffer contract)
    e = _planted_corpus(seed=4, n_epochs=20)
    model = faar_calibrate_epochs(e)
    engine = StreamEngine(
        fs=e.fs, n_channels=e.n_channels, lam=1.0, buffer=100, model=model
    )
    seen = []
    for d in map(engine.push_window, _windows(e)):
        if d is None:
            continue
        seen.append(d.sqi)
        want_thr = select_threshold(seen) if len(seen) >= 5 else math.inf
        assert d.threshold == want_thr
        assert d.rejected == (d.sqi > want_thr)


def test_stream_warmup_emits_after_buffer():
    e = _planted_corpus(seed=5, n_epochs=15)
    engine = StreamEngine(
        fs=e.fs, n_channels=e.n_channels, warmup_s=12.0, lam=0.999, buffer=50
    )
    decisions = [d for d in map(engine.push_window, _windows(e)) if d is not None]
    # 12 warm-up windows consumed, 48 remain -> 12 full epochs
    assert len(decisions) == 12
    assert engine.model is not None
    assert all(np.isfinite(d.sqi) for d in decisions)


def test_run_stream_end_to_end():
    e = _planted_corpus(seed=6, n_epochs=15)
    pipe = io.BytesIO()
    write_handshake(pipe, fs=e.fs, channels=e.n_channels, window_len_s=1.0, epoch_len_s=4.0)
    for w in _windows(e):
        write_frame(pipe, w)
    pipe.seek(0)
    out = io.StringIO()
    n = run_stream(pipe, out, warmup_s=12.0, lam=1.0)
    lines = [json.loads(l) for l in out.getvalue().strip().split("\n")]
    assert n == len(lines) == 12  # 12 warm-up windows, 48 left -> 12 epochs
    for d in lines:
        assert set(d) == {"epoch_id", "sqi", "threshold", "rejected", "method"}
        assert d["method"] == "FAAR"


def test_run_stream_deterministic():
    e = _planted_corpus(seed=7, n_epochs=12)

    def go():
        pipe = io.BytesIO()
        write_handshake(pipe, fs=e.fs, channels=e.n_channels, window_len_s=1.0, epoch_len_s=4.0)
        for w in _windows(e):
            write_frame(pipe, w)
        pipe.seek(0)
        out = io.StringIO()
        run_stream(pipe, out, warmup_s=12.0)
        return out.getvalue()

    assert go() == go()
