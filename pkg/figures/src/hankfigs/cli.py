"""CLI: `hankfigs render <figure-id> --from <run-dir>`."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURES, FigureSpec, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="hankfigs")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render a figure from a run directory")
    p.add_argument("figure_id", choices=sorted(FIGURES))
    p.add_argument("--from", dest="run_dir", required=True,
                   help="directory holding the run's CSVs and manifest.json")
    p.add_argument("--out", dest="out_dir", default=None)
    args = ap.parse_args(argv)
    try:
        written = render(FigureSpec(args.figure_id, args.run_dir, args.out_dir))
    except Exception as exc:   # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for w in written:
        print(f"wrote {w}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
