"""Command-line entry point: ``pdglbm {run,converge,riemann} CONFIG [--set key=value ...]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, PdglbmError, UnstableRunError
from .harness import converge, load_config, riemann_compare, run, shipped_configs


def _parse_overrides(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override {item!r} is not of the form key=value")
        out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdglbm", description="Palindromic DG lattice-Boltzmann experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run", "single simulation, writes the macroscopic profile CSV"),
        ("converge", "mesh-refinement study at fixed CFL number"),
        ("riemann", "isothermal Riemann problem against the exact solution"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help=f"config file or shipped name ({', '.join(shipped_configs())})")
        p.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE", help="override a config key")
        p.add_argument("-o", "--output", help="CSV output path (relative paths honour PDGLBM_OUTPUT_DIR)")
        if name == "converge":
            p.add_argument("--nx", help="comma-separated mesh list, overrides nx_list")
    sub.add_parser("list", help="list the shipped configs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "list":
        print("\n".join(shipped_configs()))
        return 0
    try:
        overrides = _parse_overrides(args.overrides)
        if args.output is not None:
            overrides["output"] = args.output
        if getattr(args, "nx", None):
            overrides["nx_list"] = args.nx
        config = load_config(args.config, overrides).validate()
        if args.command == "run":
            report = run(config)
        elif args.command == "converge":
            report = converge(config)
        else:
            report = riemann_compare(config)
    except UnstableRunError as exc:
        print(exc.report.summary() if getattr(exc, "report", None) else str(exc), file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PdglbmError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    print(report.summary())
    return 0 if report.status == "ok" else 1


if __name__ == "__main__":
    sys.exit(main())
