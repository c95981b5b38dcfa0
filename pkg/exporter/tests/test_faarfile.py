import json
import struct

import numpy as np
import pytest

from faar_exporter.faarfile import write_epochs


def test_byte_layout(tmp_path):
    data = np.arange(24, dtype=np.float32).reshape(2, 3, 4)
    p = tmp_path / "x.faar"
    write_epochs(p, data, 250.0, channel_names=["a", "b", "c"], labels=[0, 1],
                 subject_id="7", session_id="s1")
    blob = p.read_bytes()
    assert blob[:4] == b"FAAR"
    assert struct.unpack("<H", blob[4:6]) == (1,)
    (hlen,) = struct.unpack("<I", blob[6:10])
    header = json.loads(blob[10 : 10 + hlen])
    assert header["kind"] == "epochs"
    assert header["shape"] == [2, 3, 4]
    assert header["fs"] == 250.0
    assert header["dtype"] == "f32"
    assert header["labels"] == [0, 1]
    assert header["subject_ids"] == ["7", "7"]
    assert header["session_ids"] == ["s1", "s1"]
    assert header["epoch_ids"] == ["e000000", "e000001"]
    payload = np.frombuffer(blob[10 + hlen :], dtype="<f4").reshape(2, 3, 4)
    assert np.array_equal(payload, data)


def test_rejects_non_3d(tmp_path):
    with pytest.raises(ValueError):
        write_epochs(tmp_path / "x.faar", np.zeros((2, 3)), 250.0)


def test_round_trips_through_engine_reader(tmp_path):
    faar_io = pytest.importorskip("faar.io")
    rng = np.random.default_rng(0)
    data = rng.normal(size=(5, 4, 100)).astype(np.float32)
    p = tmp_path / "x.faar"
    write_epochs(p, data, 128.0, channel_names=list("abcd"), labels=[0, 1, 0, 1, 0],
                 subject_id="s9", session_id="B")
    e = faar_io.read_faar(p)
    assert e.data.shape == (5, 4, 100)
    assert e.fs == 128.0
    assert np.array_equal(np.asarray(e.data), data)
    assert list(np.asarray(e.labels, dtype=int)) == [0, 1, 0, 1, 0]
    assert e.subject_ids == ("s9",) * 5
    assert e.session_ids == ("B",) * 5


def test_determinism(tmp_path):
    data = np.random.default_rng(1).normal(size=(3, 2, 10)).astype(np.float32)
    p1, p2 = tmp_path / "a.faar", tmp_path / "b.faar"
    write_epochs(p1, data, 100.0, labels=[1, 0, 1])
    write_epochs(p2, data, 100.0, labels=[1, 0, 1])
    assert p1.read_bytes() == p2.read_bytes()
