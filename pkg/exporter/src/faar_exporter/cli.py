"""Command-line entry point: `faar-export list` and `faar-export export`."""

from __future__ import annotations

import argparse
import sys

from .errors import ExporterError
from .exporter import export, list_datasets


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="faar-export")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="enumerate supported MI datasets")
    ex = sub.add_parser("export", help="export one subject to FaarFile")
    ex.add_argument("--dataset", required=True)
    ex.add_argument("--subject", required=True, type=int)
    ex.add_argument("--session", default=None)
    ex.add_argument("--out", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for info in list_datasets():
                print(
                    f"{info.name}\t{info.paradigm}\t"
                    f"{info.n_subjects} subjects\t{info.n_sessions} sessions"
                )
        else:
            paths, manifest = export(args.dataset, args.subject, args.session, args.out)
            for p in paths:
                print(p)
            print(f"{manifest.dataset_name}: {len(paths)} file(s) written")
    except ExporterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
