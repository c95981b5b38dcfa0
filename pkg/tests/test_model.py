"""Core data model validation."""

import math

import numpy as np
import pytest

from faar.errors import EmptyInput, NonFinite, ShapeMismatch
from faar.model import (
    FEATURE_NAMES,
    EpochTensor,
    Recording,
    RejectionDecision,
    validate_epochs,
)


def test_feature_names_order():
    assert FEATURE_NAMES == ("band_mag", "rms", "max_grad", "zcr", "kurt")


def test_recording_validation(rng):
    r = Recording(data=rng.normal(size=(4, 100)), fs=250.0)
    assert r.n_channels == 4
    assert r.n_samples == 100
    with pytest.raises(ShapeMismatch):
        Recording(data=rng.normal(size=(4,)), fs=250.0)
    with pytest.raises(EmptyInput):
        Recording(data=np.empty((0, 100)), fs=250.0)
    bad = rng.normal(size=(2, 10))
    bad[0, 3] = np.nan
    with pytest.raises(NonFinite):
        Recording(data=bad, fs=250.0)
    with pytest.raises(ShapeMismatch):
        Recording(data=rng.normal(size=(2, 10)), fs=0.0)


def test_epoch_tensor_validation(rng):
    e = EpochTensor(data=rng.normal(size=(5, 3, 100)), fs=100.0)
    assert e.n_epochs == 5
    with pytest.raises(ShapeMismatch):
        EpochTensor(data=rng.normal(size=(3, 100)), fs=100.0)
    with pytest.raises(EmptyInput):
        EpochTensor(data=np.empty((0, 3, 100)), fs=100.0)


def test_epoch_tensor_labels(rng):
    data = rng.normal(size=(4, 2, 50))
    e = EpochTensor(data=data, fs=50.0, labels=np.array([0, 1, 0, 1]))
    assert e.labels is not None
    with pytest.raises(ShapeMismatch):
        EpochTensor(data=data, fs=50.0, labels=np.array([0, 1]))


def test_epoch_tensor_subset(rng):
    data = rng.normal(size=(6, 2, 50))
    e = EpochTensor(
        data=data,
        fs=50.0,
        labels=np.array([0, 1, 0, 1, 0, 1]),
        subject_ids=np.array(["a"] * 3 + ["b"] * 3),
        session_ids=np.array(["s1", "s2"] * 3),
    )
    sub = e.subset(np.array([0, 2, 5]))
    assert sub.n_epochs == 3
    np.testing.assert_array_equal(sub.labels, [0, 0, 1])
    np.testing.assert_array_equal(sub.subject_ids, ["a", "a", "b"])
    np.testing.assert_array_equal(sub.data, data[[0, 2, 5]])


def test_validate_epochs(rng):
    e = EpochTensor(data=rng.normal(size=(3, 2, 50)), fs=50.0)
    validate_epochs(e)  # no raise
    object.__setattr__(e, "data", np.full((3, 2, 50), np.inf))
    with pytest.raises(NonFinite):
        validate_epochs(e)


def test_rejection_decision_json():
    d = RejectionDecision(epoch_id="e000001", sqi=1.25, threshold=math.inf, rejected=False)
    j = d.to_json_dict()
    assert j["threshold"] == "inf"
    assert j["sqi"] == 1.25
    assert j["rejected"] is False
    d2 = RejectionDecision(epoch_id="e2", sqi=2.0, threshold=1.5, rejected=True)
    assert d2.to_json_dict()["threshold"] == 1.5
