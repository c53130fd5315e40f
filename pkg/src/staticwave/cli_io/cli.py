"""Command-line entry point: simulate, spectrum, greens, verify."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .runner import run_greens, run_simulate, run_spectrum, run_verify


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="staticwave",
        description="Spectral Klein-Gordon simulator on 1+1 static spacetimes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", default=None, help="output directory (default: from config)")
        p.add_argument("--modes", type=int, default=None, help="override truncation.max_modes")
        p.add_argument("--seed", type=int, default=None, help="accepted for interface parity; runs are deterministic")

    p_sim = sub.add_parser("simulate", help="run the evolution and write CSV outputs")
    common(p_sim)
    p_sim.add_argument("--solver", choices=["spectral", "fd", "both"], default=None)

    p_spec = sub.add_parser("spectrum", help="write the discrete spectrum table")
    common(p_spec)

    p_g = sub.add_parser("greens", help="tabulate the resolvent kernel")
    common(p_g)
    p_g.add_argument("--lam", type=_parse_complex, required=True, help="resolvent point, e.g. '2.5+0.5j'")
    p_g.add_argument("--points", type=int, default=33)

    p_v = sub.add_parser("verify", help="run the invariant battery")
    common(p_v)
    p_v.add_argument("--full", action="store_true", help="include the finite-difference comparison")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.modes is not None:
            from dataclasses import replace

            cfg = replace(cfg, max_modes=args.modes)
        if getattr(args, "solver", None):
            from dataclasses import replace

            cfg = replace(cfg, solver=args.solver)
        if args.command == "simulate":
            meta = run_simulate(cfg, args.out)
            print(f"wrote outputs to {args.out or cfg.output_dir} (hash {meta['content_hash'][:12]})")
        elif args.command == "spectrum":
            meta = run_spectrum(cfg, args.out)
            print(
                f"{meta['eigenvalue_count']} eigenvalues, classification={meta['classification']},"
                f" zero_in_spectrum={meta['zero_in_spectrum']}"
            )
        elif args.command == "greens":
            run_greens(cfg, args.lam, args.points, args.out)
            print(f"wrote greens.csv for lambda={args.lam}")
        elif args.command == "verify":
            report = run_verify(cfg, args.out, fast=not args.full)
            for c in report["checks"]:
                mark = "PASS" if c["pass"] else "FAIL"
                op = "<=" if c["comparator"] == "le" else ">="
                print(f"[{mark}] {c['check']}: {c['value']:.3e} {op} {c['tolerance']:.3e}")
            print("verification", "PASSED" if report["passed"] else "FAILED")
            return 0 if report["passed"] else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
