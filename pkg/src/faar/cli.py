"""Command-line interface: synth, calibrate, score, reject, eval, stream, bench."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as bench_mod
from .baselines import IFOREST_PSI, IFOREST_SCORE_THRESHOLD, IFOREST_TREES, iforest_reject, p2p_reject
from .errors import FaarError
from .io import read_decisions_jsonl, read_faar, write_decisions_jsonl, write_faar
from .knee import DEFAULT_SENSITIVITY
from .metrics import fold_metrics, summarize, write_subject_csv
from .model import EpochTensor, Recording
from .pipeline import (
    faar_reject,
    make_external_rejector,
    make_faar_rejector,
    make_iforest_rejector,
    make_p2p_rejector,
)
from .reference import ReferenceModel, calibrate
from .sqi import score_epochs, write_sqi_jsonl
from .stream import DEFAULT_BUFFER, DEFAULT_LAMBDA, DEFAULT_WARMUP_S, run_stream
from .synth import ArtifactLabel, SynthConfig, contaminated_corpus, gen_clean, gen_two_class
from .decoder import DecoderConfig, crossval


def _load_config(path):
    with open(path) as fh:
        return json.load(fh)


def _apply_config(args, parser):
    """--config supplies defaults; explicit flags win."""
    if not getattr(args, "config", None):
        return args
    subparser = parser.subparsers[args.command]
    cfg = _load_config(args.config)
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr):
            # only fill values the user left at the parser default
            if getattr(args, attr) == subparser.get_default(attr):
                setattr(args, attr, value)
    return args


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-len-s", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="faar", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    ap.subparsers = {}

    def add_parser(name, **kw):
        p = sub.add_parser(name, **kw)
        ap.subparsers[name] = p
        return p

    p = add_parser("synth", help="generate a synthetic corpus")
    _add_common(p)
    p.add_argument("--out", required=True, help="output .faar file")
    p.add_argument("--labels-out", help="ground-truth artifact labels JSONL")
    p.add_argument("--channels", type=int, default=8)
    p.add_argument("--fs", type=float, default=250.0)
    p.add_argument("--epoch-s", type=float, default=4.0)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--contamination", type=float, default=0.0)
    p.add_argument("--artifact-scale", type=float, default=6.0)
    p.add_argument("--two-class", action="store_true")
    p.add_argument("--gain-ratio", type=float, default=3.0)

    p = add_parser("calibrate", help="fit and save a ReferenceModel")
    _add_common(p)
    p.add_argument("input", help=".faar recording or epochs file")
    p.add_argument("--out", required=True, help="reference model JSON")

    p = add_parser("score", help="emit per-epoch SQI JSONL")
    _add_common(p)
    p.add_argument("input", help=".faar epochs file")
    p.add_argument("--model", help="reference model JSON (default: self-calibrate)")
    p.add_argument("--out", required=True)

    p = add_parser("reject", help="emit rejection decisions JSONL")
    _add_common(p)
    p.add_argument("input", help=".faar epochs file")
    p.add_argument("--method", choices=["faar", "p2p", "iforest"], default="faar")
    p.add_argument("--model", help="reference model JSON for FAAR")
    p.add_argument("--out", required=True)
    p.add_argument("--sensitivity", type=float, default=DEFAULT_SENSITIVITY)
    p.add_argument("--p2p-threshold-uv", type=float, default=150.0)
    p.add_argument("--iforest-trees", type=int, default=IFOREST_TREES)
    p.add_argument("--iforest-psi", type=int, default=IFOREST_PSI)
    p.add_argument("--iforest-score-threshold", type=float, default=IFOREST_SCORE_THRESHOLD)

    p = add_parser("eval", help="cross-validated decoding study")
    _add_common(p)
    p.add_argument("input", help=".faar epochs file with labels and group tags")
    p.add_argument("--scheme", choices=["cross-session", "cross-subject"], default="cross-session")
    p.add_argument(
        "--rejector",
        default="none",
        help="none | faar | p2p | iforest | external:<decisions.jsonl>",
    )
    p.add_argument("--p2p-threshold-uv", type=float, default=150.0)
    p.add_argument("--out", required=True, help="StudySummary JSON")
    p.add_argument("--csv-out", help="per-subject CSV")
    p.add_argument("--baseline-out", help="also run the no-rejection baseline and write its summary")

    p = add_parser("stream", help="score a StreamFrame feed on stdin")
    _add_common(p)
    p.add_argument("--warmup-s", type=float, default=DEFAULT_WARMUP_S)
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--buffer", type=int, default=DEFAULT_BUFFER)
    p.add_argument("--model", help="pre-learned reference model JSON (skips warm-up)")

    p = add_parser("bench", help="real-time-factor report")
    _add_common(p)
    p.add_argument("--channels", type=int, default=64)
    p.add_argument("--fs", type=float, default=250.0)
    p.add_argument("--duration-s", type=float, default=120.0)
    p.add_argument("--out", help="write the JSON report here as well")
    return ap


def _cmd_synth(args):
    cfg = SynthConfig(
        n_channels=args.channels,
        fs=args.fs,
        epoch_s=args.epoch_s,
        n_epochs=args.epochs,
        seed=args.seed,
    )
    if args.two_class:
        e = gen_two_class(cfg, {0: 1.0, 1: args.gain_ratio})
        labels = []
    elif args.contamination > 0:
        e, labels = contaminated_corpus(cfg, args.contamination, scale=args.artifact_scale)
    else:
        e, labels = gen_clean(cfg), []
    write_faar(args.out, e)
    if args.labels_out:
        with open(args.labels_out, "w") as fh:
            for lab in labels:
                fh.write(json.dumps(lab.to_json_dict()) + "\n")
    return 0


def _cmd_calibrate(args):
    obj = read_faar(args.input)
    if isinstance(obj, Recording):
        model, _ = calibrate(obj, args.window_len_s)
    else:
        from .pipeline import faar_calibrate_epochs

        model = faar_calibrate_epochs(obj, args.window_len_s)
    with open(args.out, "w") as fh:
        fh.write(model.to_json())
    return 0


def _load_model(path):
    with open(path) as fh:
        return ReferenceModel.from_json(fh.read())


def _cmd_score(args):
    e = read_faar(args.input)
    if not isinstance(e, EpochTensor):
        raise FaarError("score expects an epochs file")
    if args.model:
        model = _load_model(args.model)
    else:
        from .pipeline import faar_calibrate_epochs

        model = faar_calibrate_epochs(e, args.window_len_s)
    reports = score_epochs(e, model, args.window_len_s)
    write_sqi_jsonl(reports, args.out)
    return 0


def _cmd_reject(args):
    e = read_faar(args.input)
    if not isinstance(e, EpochTensor):
        raise FaarError("reject expects an epochs file")
    if args.method == "faar":
        model = _load_model(args.model) if args.model else None
        decisions, _, _ = faar_reject(
            e,
            model=model,
            window_len_s=args.window_len_s,
            sensitivity=args.sensitivity,
        )
    elif args.method == "p2p":
        decisions = p2p_reject(e, args.p2p_threshold_uv)
    else:
        decisions = iforest_reject(
            e,
            n_trees=args.iforest_trees,
            psi=args.iforest_psi,
            score_threshold=args.iforest_score_threshold,
            seed=args.seed,
            window_len_s=args.window_len_s,
        )
    write_decisions_jsonl(args.out, decisions)
    return 0


def _make_rejector(args):
    name = args.rejector
    if name == "none":
        return None
    if name == "faar":
        return make_faar_rejector(args.window_len_s)
    if name == "p2p":
        return make_p2p_rejector(args.p2p_threshold_uv)
    if name == "iforest":
        return make_iforest_rejector(seed=args.seed, window_len_s=args.window_len_s)
    if name.startswith("external:"):
        return make_external_rejector(read_decisions_jsonl(name.split(":", 1)[1]))
    raise FaarError(f"unknown rejector {name!r}")


def _run_study(e, rejector, scheme, method_name, baseline_folds=None):
    folds = crossval(e, rejector, scheme=scheme, cfg=DecoderConfig())
    fms = [fold_metrics(f) for f in folds]
    return fms, summarize(method_name, fms, baseline_folds=baseline_folds)


def _cmd_eval(args):
    e = read_faar(args.input)
    if not isinstance(e, EpochTensor) or e.labels is None:
        raise FaarError("eval expects a labelled epochs file")
    scheme = args.scheme.replace("-", "_")
    baseline_fms = None
    if args.rejector != "none":
        baseline_fms, baseline_summary = _run_study(e, None, scheme, "none")
        if args.baseline_out:
            with open(args.baseline_out, "w") as fh:
                json.dump(baseline_summary.to_json_dict(), fh, indent=2, sort_keys=True)
    fms, summary = _run_study(
        e, _make_rejector(args), scheme, args.rejector, baseline_folds=baseline_fms
    )
    with open(args.out, "w") as fh:
        json.dump(summary.to_json_dict(), fh, indent=2, sort_keys=True)
    if args.csv_out:
        write_subject_csv(args.csv_out, fms, args.rejector)
    return 0


def _cmd_stream(args):
    model = _load_model(args.model) if args.model else None
    run_stream(
        sys.stdin.buffer,
        sys.stdout,
        warmup_s=args.warmup_s,
        lam=args.lam,
        buffer=args.buffer,
        model=model,
    )
    return 0


def _cmd_bench(args):
    report = bench_mod.bench_scoring(
        n_channels=args.channels,
        fs=args.fs,
        duration_s=args.duration_s,
        seed=args.seed,
    )
    text = bench_mod.format_report(report)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "calibrate": _cmd_calibrate,
    "score": _cmd_score,
    "reject": _cmd_reject,
    "eval": _cmd_eval,
    "stream": _cmd_stream,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        args = _apply_config(args, parser)
        return _COMMANDS[args.command](args)
    except FaarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
