"""FAAR: fast automatic artifact rejection for EEG, with a motor-imagery
decoding harness to measure how epoch rejection affects downstream
classification."""

from .baselines import IForest, iforest_fit, iforest_reject, iforest_score, p2p_reject
from .features import (
    band_magnitude,
    extract_features,
    kurtosis,
    max_gradient,
    rms,
    zero_crossing_rate,
)
from .io import read_faar, write_faar
from .kernels import DEFAULT_BACKEND, HAS_COMPILED
from .knee import KneeResult, kneedle, reject, select_threshold
from .model import EpochTensor, Recording, RejectionDecision, WindowGrid, validate_epochs
from .pipeline import faar_calibrate_epochs, faar_reject
from .reference import (
    CleanWindowSelection,
    ReferenceModel,
    calibrate,
    fit_reference,
    rms_grid,
    select_clean_windows,
    standardize_per_channel,
    update_reference,
)
from .sqi import SqiReport, epoch_sqi, score_epochs, severity
from .stream import StreamEngine
from .synth import ArtifactLabel, SynthConfig, gen_clean, gen_two_class, inject

__version__ = "0.1.0"
