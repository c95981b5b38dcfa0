"""CLI subcommands: library parity, determinism, exit codes."""

import io
import json

import numpy as np
import pytest

from faar.cli import main
from faar.io import read_decisions_jsonl, read_faar, write_faar
from faar.model import EpochTensor
from faar.pipeline import faar_reject
from faar.baselines import p2p_reject
from faar.reference import ReferenceModel


def run(argv):
    return main(argv)


@pytest.fixture()
def corpus_file(tmp_path):
    path = tmp_path / "corpus.faar"
    assert run([
        "synth", "--out", str(path), "--epochs", "60", "--channels", "8",
        "--contamination", "0.1", "--artifact-scale", "8.0", "--seed", "3",
        "--labels-out", str(tmp_path / "truth.jsonl"),
    ]) == 0
    return path


def test_synth_deterministic(tmp_path):
    a = tmp_path / "a.faar"
    b = tmp_path / "b.faar"
    for p in (a, b):
        assert run(["synth", "--out", str(p), "--epochs", "20", "--seed", "5"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_synth_labels_ground_truth(corpus_file, tmp_path):
    truth = [json.loads(l) for l in (tmp_path / "truth.jsonl").read_text().splitlines()]
    assert len(truth) == 6  # 10% of 60
    for t in truth:
        assert t["kind"] in {"BLINK", "EMG", "STEP", "DRIFT"}
        assert 0 <= t["epoch_id"] < 60


def test_calibrate_writes_model(corpus_file, tmp_path):
    out = tmp_path / "model.json"
    assert run(["calibrate", str(corpus_file), "--out", str(out)]) == 0
    m = ReferenceModel.from_json(out.read_text())
    assert m.mean.shape == (8, 5)
    assert (m.std > 0).all()


def test_score_emits_jsonl(corpus_file, tmp_path):
    out = tmp_path / "sqi.jsonl"
    assert run(["score", str(corpus_file), "--out", str(out)]) == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(rows) == 60
    assert all({"epoch_id", "sqi", "worst_channel"} <= set(r) for r in rows)


def test_reject_faar_cli_library_parity(corpus_file, tmp_path):
    out = tmp_path / "dec.jsonl"
    assert run(["reject", str(corpus_file), "--method", "faar", "--out", str(out)]) == 0
    cli_decs = read_decisions_jsonl(out)
    e = read_faar(corpus_file)
    lib_decs, _, _ = faar_reject(e)
    assert [d.rejected for d in cli_decs] == [d.rejected for d in lib_decs]
    assert [d.sqi for d in cli_decs] == [d.sqi for d in lib_decs]


def test_reject_p2p_cli_library_parity(corpus_file, tmp_path):
    out = tmp_path / "p2p.jsonl"
    assert run([
        "reject", str(corpus_file), "--method", "p2p",
        "--p2p-threshold-uv", "120", "--out", str(out),
    ]) == 0
    cli_decs = read_decisions_jsonl(out)
    lib_decs = p2p_reject(read_faar(corpus_file), 120.0)
    assert [d.rejected for d in cli_decs] == [d.rejected for d in lib_decs]


def test_reject_iforest_runs(corpus_file, tmp_path):
    out = tmp_path / "if.jsonl"
    assert run(["reject", str(corpus_file), "--method", "iforest", "--out", str(out)]) == 0
    decs = read_decisions_jsonl(out)
    assert len(decs) == 60
    assert all(d.method == "IFOREST" for d in decs)


def _two_class_file(tmp_path, seed=0):
    from conftest import build_two_session_corpus

    e = build_two_session_corpus(seed=seed, n=60)
    path = tmp_path / "mi.faar"
    write_faar(path, e)
    return path


def test_eval_deterministic(tmp_path):
    path = _two_class_file(tmp_path)
    outs = []
    for name in ("s1.json", "s2.json"):
        out = tmp_path / name
        assert run([
            "eval", str(path), "--rejector", "none", "--out", str(out), "--seed", "7",
        ]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    summary = json.loads(outs[0])
    assert 0.0 <= summary["mean_ba"] <= 1.0
    assert summary["n_folds"] == 2


def test_eval_faar_with_csv_and_baseline(tmp_path):
    path = _two_class_file(tmp_path, seed=2)
    out = tmp_path / "faar.json"
    csv_out = tmp_path / "subj.csv"
    base_out = tmp_path / "base.json"
    assert run([
        "eval", str(path), "--rejector", "faar", "--out", str(out),
        "--csv-out", str(csv_out), "--baseline-out", str(base_out),
    ]) == 0
    summary = json.loads(out.read_text())
    assert summary["win_rate_vs_baseline"] is not None
    assert csv_out.exists() and base_out.exists()


def test_eval_external_rejector(tmp_path):
    path = _two_class_file(tmp_path, seed=4)
    dec_out = tmp_path / "dec.jsonl"
    assert run(["reject", str(path), "--method", "faar", "--out", str(dec_out)]) == 0
    out = tmp_path / "ext.json"
    assert run([
        "eval", str(path), "--rejector", f"external:{dec_out}", "--out", str(out),
    ]) == 0
    assert json.loads(out.read_text())["n_folds"] == 2


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epochs": 15, "seed": 9}))
    out = tmp_path / "c.faar"
    assert run(["synth", "--config", str(cfg), "--out", str(out)]) == 0
    assert read_faar(out).n_epochs == 15
    # explicit flag beats config
    assert run(["synth", "--config", str(cfg), "--epochs", "7", "--out", str(out)]) == 0
    assert read_faar(out).n_epochs == 7


def test_usage_error_exit_1():
    assert run(["synth"]) == 1  # missing --out
    assert run(["no-such-command"]) == 1


def test_data_error_exit_2(tmp_path):
    missing = tmp_path / "nope.faar"
    assert run(["calibrate", str(missing), "--out", str(tmp_path / "m.json")]) == 2
    bad = tmp_path / "bad.faar"
    bad.write_bytes(b"garbage")
    assert run(["score", str(bad), "--out", str(tmp_path / "s.jsonl")]) == 2


def test_bench_runs_fast_config(tmp_path, capsys):
    out = tmp_path / "bench.json"
    assert run([
        "bench", "--channels", "8", "--duration-s", "20", "--out", str(out),
    ]) == 0
    text = out.read_text()
    assert "rtf" in text or "real_time_factor" in text
