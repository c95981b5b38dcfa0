import json

import pytest

from faar_exporter.manifest import ExportManifest, cross_session_manifest


def make_manifest(sessions):
    return ExportManifest(
        dataset_name="BNCI2014_001",
        paradigm="left_right",
        fs=250.0,
        channels=["C3", "Cz", "C4"],
        event_window_s=(2.0, 6.0),
        sessions_per_subject=sessions,
    )


def test_cross_session_excludes_single_session_subjects():
    m = make_manifest({"1": ["0train", "1test"], "2": ["0train"], "3": ["a", "b", "c"]})
    with pytest.warns(UserWarning, match="excluded single-session subjects"):
        out = cross_session_manifest(m)
    assert out.subjects == ["1", "3"]
    assert "2" not in out.sessions_per_subject


def test_cross_session_no_warning_when_all_qualify():
    m = make_manifest({"1": ["a", "b"]})
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = cross_session_manifest(m)
    assert out.sessions_per_subject == {"1": ["a", "b"]}


def test_duplicate_session_names_count_once():
    m = make_manifest({"1": ["a", "a"]})
    with pytest.warns(UserWarning):
        out = cross_session_manifest(m)
    assert out.subjects == []


def test_manifest_json_round_trip():
    m = make_manifest({"1": ["a", "b"]})
    back = ExportManifest.from_json(m.to_json())
    assert back == m
    assert json.loads(m.to_json())["paradigm"] == "left_right"
