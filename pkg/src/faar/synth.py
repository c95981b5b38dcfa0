"""Seeded synthetic EEG with artifact injection and two-class corpora.

RNG is Philox (counter-based, portable); every epoch draws from its own
(seed, epoch_index)-keyed stream so corpora are reproducible regardless
of generation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BadConfig, LabelOutOfRange
from .model import EpochTensor, Recording

ARTIFACT_KINDS = ("BLINK", "EMG", "STEP", "DRIFT", "NONE")


@dataclass(frozen=True)
class SynthConfig:
    n_channels: int = 8
    fs: float = 250.0
    epoch_s: float = 4.0
    n_epochs: int = 100
    alpha_hz: float = 10.0
    beta_hz: float = 20.0
    noise_exponent: float = 1.0
    noise_rms: float = 10.0  # microvolts
    alpha_gain: float = 5.0
    beta_gain: float = 3.0
    channel_gains: Optional[tuple[float, ...]] = None
    seed: int = 0

    def __post_init__(self):
        if self.fs <= 2 * self.beta_hz:
            raise BadConfig("fs must exceed 2 * beta_hz")
        if self.n_channels < 1 or self.n_epochs < 1 or self.epoch_s <= 0:
            raise BadConfig("invalid geometry")


@dataclass(frozen=True)
class ArtifactLabel:
    epoch_id: int  # epoch index in the tensor
    kind: str
    affected_channels: tuple[int, ...]
    scale: float

    def __post_init__(self):
        if self.kind not in ARTIFACT_KINDS:
            raise BadConfig(f"unknown artifact kind {self.kind!r}")
        if self.scale < 0:
            raise BadConfig("scale must be >= 0")

    def to_json_dict(self) -> dict:
        return {
            "epoch_id": self.epoch_id,
            "kind": self.kind,
            "affected_channels": list(self.affected_channels),
            "scale": self.scale,
        }


def _epoch_rng(seed: int, epoch: int, salt: int = 0) -> np.random.Generator:
    # Philox is counter-based and portable; the 2x64-bit key derives one
    # independent stream per (seed, epoch, salt)
    key = (np.uint64(seed), np.uint64(epoch) << np.uint64(8) | np.uint64(salt))
    return np.random.Generator(np.random.Philox(key=key))


def _pink_noise(rng, n, fs, exponent, rms_target):
    """Gaussian 1/f^exponent noise via spectral shaping."""
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    shaping = np.ones_like(freqs)
    nzf = freqs > 0
    shaping[nzf] = freqs[nzf] ** (-exponent / 2.0)
    shaping[0] = 0.0
    x = np.fft.irfft(spec * shaping, n)
    cur = np.sqrt(np.mean(x * x))
    return x * (rms_target / cur) if cur > 0 else x


def _epoch_signal(cfg: SynthConfig, rng, gains, class_scale=None):
    n = int(round(cfg.epoch_s * cfg.fs))
    t = np.arange(n) / cfg.fs
    data = np.empty((cfg.n_channels, n))
    for c in range(cfg.n_channels):
        phase_a = rng.uniform(0, 2 * np.pi)
        phase_b = rng.uniform(0, 2 * np.pi)
        g = gains[c]
        osc_scale = 1.0 if class_scale is None else class_scale[c]
        data[c] = (
            _pink_noise(rng, n, cfg.fs, cfg.noise_exponent, cfg.noise_rms)
            + osc_scale * g * cfg.alpha_gain * np.sin(2 * np.pi * cfg.alpha_hz * t + phase_a)
            + osc_scale * g * cfg.beta_gain * np.sin(2 * np.pi * cfg.beta_hz * t + phase_b)
        )
    return data


def gen_clean(cfg: SynthConfig) -> EpochTensor:
    """Clean corpus: 1/f noise plus alpha/beta oscillations, per-epoch phases."""
    gains = cfg.channel_gains or tuple(1.0 for _ in range(cfg.n_channels))
    if len(gains) != cfg.n_channels:
        raise BadConfig("channel_gains length != n_channels")
    epochs = [
        _epoch_signal(cfg, _epoch_rng(cfg.seed, i), gains)
        for i in range(cfg.n_epochs)
    ]
    return EpochTensor(data=np.stack(epochs), fs=cfg.fs)


def gen_clean_recording(cfg: SynthConfig, subject_id="s0", session_id="0") -> Recording:
    """Continuous clean recording of n_epochs * epoch_s seconds."""
    e = gen_clean(cfg)
    data = np.concatenate([e.data[i] for i in range(e.n_epochs)], axis=1)
    return Recording(data=data, fs=cfg.fs, subject_id=subject_id, session_id=session_id)


def clean_rms_reference(e: EpochTensor) -> np.ndarray:
    """Per-channel median RMS of the corpus; artifact amplitudes scale on it."""
    r = np.sqrt(np.mean(e.data * e.data, axis=2))
    return np.median(r, axis=0)


def inject(e: EpochTensor, labels: Sequence[ArtifactLabel], seed: int = 0) -> EpochTensor:
    """Add the labelled artifacts; scale is a multiple of per-channel clean RMS."""
    data = e.data.copy()
    n_ep, n_ch, n = data.shape
    ref_rms = clean_rms_reference(e)
    t = np.arange(n) / e.fs
    for lab in labels:
        if lab.kind == "NONE" or lab.scale == 0:
            continue
        if not (0 <= lab.epoch_id < n_ep):
            raise LabelOutOfRange(f"epoch {lab.epoch_id} out of range")
        if any(c < 0 or c >= n_ch for c in lab.affected_channels):
            raise LabelOutOfRange("channel index out of range")
        rng = _epoch_rng(seed, lab.epoch_id, salt=1)
        for c in lab.affected_channels:
            amp = lab.scale * ref_rms[c]
            if lab.kind == "BLINK":
                width = int(round(0.3 * e.fs))
                onset = int(rng.integers(0, max(1, n - width)))
                pulse = amp * np.sin(np.pi * np.arange(width) / width)
                data[lab.epoch_id, c, onset : onset + width] += pulse
            elif lab.kind == "EMG":
                lo, hi = 40.0, 0.9 * e.fs / 2
                noise = rng.standard_normal(n)
                spec = np.fft.rfft(noise)
                freqs = np.fft.rfftfreq(n, d=1.0 / e.fs)
                spec[(freqs < lo) | (freqs > hi)] = 0.0
                band = np.fft.irfft(spec, n)
                cur = np.sqrt(np.mean(band * band))
                if cur > 0:
                    data[lab.epoch_id, c] += band * (amp / cur)
            elif lab.kind == "STEP":
                onset = int(rng.integers(0, n - 1))
                data[lab.epoch_id, c, onset:] += amp
            elif lab.kind == "DRIFT":
                data[lab.epoch_id, c] += amp * t / t[-1]
    return EpochTensor(
        data=data,
        fs=e.fs,
        channel_names=e.channel_names,
        labels=e.labels,
        epoch_ids=e.epoch_ids,
        subject_ids=e.subject_ids,
        session_ids=e.session_ids,
    )


def gen_two_class(
    cfg: SynthConfig,
    class_gain_map: dict,
    class_channels: Optional[Sequence[int]] = None,
) -> EpochTensor:
    """Two-class corpus whose classes differ in oscillation gain on the
    designated channels; labels alternate deterministically."""
    classes = sorted(class_gain_map)
    if len(classes) != 2:
        raise BadConfig("need exactly two classes")
    if class_channels is None:
        class_channels = list(range(min(2, cfg.n_channels)))
    gains = cfg.channel_gains or tuple(1.0 for _ in range(cfg.n_channels))
    labels = np.array([classes[i % 2] for i in range(cfg.n_epochs)], dtype=object)
    epochs = []
    for i in range(cfg.n_epochs):
        scale = np.ones(cfg.n_channels)
        for c in class_channels:
            scale[c] = class_gain_map[labels[i]]
        epochs.append(_epoch_signal(cfg, _epoch_rng(cfg.seed, i), gains, class_scale=scale))
    return EpochTensor(data=np.stack(epochs), fs=cfg.fs, labels=labels)


def contaminated_corpus(
    cfg: SynthConfig,
    contamination: float,
    scale: float = 6.0,
    seed: Optional[int] = None,
    kinds: Sequence[str] = ("BLINK", "EMG", "STEP", "DRIFT"),
    n_affected: int = 2,
    base: Optional[EpochTensor] = None,
) -> tuple[EpochTensor, list[ArtifactLabel]]:
    """Clean corpus plus a random contaminated fraction, with ground truth."""
    seed = cfg.seed if seed is None else seed
    clean = base if base is not None else gen_clean(cfg)
    rng = np.random.Generator(np.random.Philox(key=(np.uint64(seed), np.uint64(0xA57))))  # corpus-level stream
    n_bad = int(round(contamination * clean.n_epochs))
    bad_idx = rng.choice(clean.n_epochs, size=n_bad, replace=False)
    labels = []
    for i in sorted(bad_idx.tolist()):
        kind = str(rng.choice(list(kinds)))
        chans = tuple(
            int(c)
            for c in rng.choice(clean.n_channels, size=min(n_affected, clean.n_channels), replace=False)
        )
        labels.append(ArtifactLabel(epoch_id=i, kind=kind, affected_channels=chans, scale=scale))
    return inject(clean, labels, seed=seed), labels
