"""Command-line entry point.

Exit codes: 0 ok, 2 config error, 3 numeric error, 4 enumeration-cap or
size refusal.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, EnumerationCapError, GscoError, NumericError
from .harness import cmd_compare, cmd_generate, cmd_solve, parse_config_file, parse_overrides

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsco",
        description="Graph-structured convex optimization benchmark toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_action="store"):
        p.add_argument(
            "--config",
            action=config_action,
            default=None,
            help="run config file (flat key=value lines)",
        )
        p.add_argument("--seed", type=int, default=None, help="global seed override")
        p.add_argument("--out", default="gsco_out", help="output directory")
        p.add_argument(
            "overrides",
            nargs="*",
            metavar="key=value",
            help="config overrides (win over the file)",
        )

    common(sub.add_parser("generate", help="generate a synthetic instance"))
    common(sub.add_parser("solve", help="run one configured method"))
    common(
        sub.add_parser("compare", help="run several configs and compare them"),
        config_action="append",
    )
    return parser


def _merged_config(args) -> dict[str, str]:
    cfg: dict[str, str] = {}
    if args.config:
        cfg.update(parse_config_file(args.config))
    cfg.update(parse_overrides(args.overrides))
    if args.seed is not None:
        cfg["seed"] = str(args.seed)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            cmd_generate(_merged_config(args), args.out)
        elif args.command == "solve":
            cmd_solve(_merged_config(args), args.out)
        else:
            overrides = parse_overrides(args.overrides)
            if args.seed is not None:
                overrides["seed"] = str(args.seed)
            cmd_compare(args.config or [], overrides, args.out)
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GscoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
