"""CLI: plots <kind> --in DIR --out FILE.png"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, PlotRequest, render
from .readers import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from simulation output directories"
    )
    parser.add_argument("kind", choices=FIGURE_KINDS, help="figure kind")
    parser.add_argument("--in", dest="input_dir", required=True, help="simulation output directory")
    parser.add_argument("--out", dest="output_path", required=True, help="image file to write")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = render(PlotRequest(args.input_dir, args.kind, args.output_path))
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    extras = f" (overlays: {', '.join(result.overlays)})" if result.overlays else ""
    print(f"wrote {result.path}{extras}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
