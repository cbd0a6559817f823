"""Command-line front end: run scenarios, list presets, validate configs."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .dynamics import IntegrationError
from .scenario import (
    ConfigError,
    list_presets,
    load_config,
    preset,
    run_scenario,
    validate_config,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INTEGRATION = 2
EXIT_INVARIANT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qflows",
        description="Run thermodynamic flow scenarios and emit CSV/JSON artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario from a config file or preset")
    run.add_argument("config", nargs="?", help="path to a TOML scenario config")
    run.add_argument("--preset", help="named preset to run instead of a config file")
    run.add_argument("--out", help="output directory (overrides the config output_path)")

    sub.add_parser("list-presets", help="list available presets with their parameters")

    val = sub.add_parser("validate", help="validate a config file without running it")
    val.add_argument("config", help="path to a TOML scenario config")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("QFLOWS_LOG_LEVEL", "WARNING").upper())
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "list-presets":
        print(list_presets())
        return EXIT_OK

    try:
        if args.command == "validate":
            config = load_config(args.config)
            problems = validate_config(config)
            if problems:
                print("\n".join(problems), file=sys.stderr)
                return EXIT_CONFIG
            print(f"ok: {config.name}")
            return EXIT_OK

        if (args.config is None) == (args.preset is None):
            print("run requires exactly one of <config> or --preset", file=sys.stderr)
            return EXIT_CONFIG
        config = preset(args.preset) if args.preset else load_config(args.config)
        result = run_scenario(config, out_dir=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION

    print(f"wrote {result.csv_path} and {result.json_path}")
    if result.violations:
        print(f"invariant violations: {result.violations}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
