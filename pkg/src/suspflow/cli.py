"""Command line front end.

Subcommands
-----------
run       execute an experiment config (bundled template name or JSON path)
list      show bundled templates
validate  check a config without running it

Exit codes: 0 on success, 1 when a run fails its checks or a numeric
routine gives up, 2 for unusable configs or arguments.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import SuspflowError
from .experiments import (
    list_templates,
    load_config,
    run_experiment,
    validate_config,
)
from .fileio import format_scalar


def build_parser():
    parser = argparse.ArgumentParser(
        prog="suspflow",
        description="Suspension flow experiments over shifts of finite type.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config or template")
    run.add_argument("config", help="bundled template name or path to a JSON config")
    run.add_argument("--outdir", default=None,
                     help="output directory (default: ./out/<name>)")
    run.add_argument("--quiet", action="store_true", help="print only the verdict")

    sub.add_parser("list", help="list bundled experiment templates")

    val = sub.add_parser("validate", help="validate a config without running it")
    val.add_argument("config", help="bundled template name or path to a JSON config")

    return parser


def _cmd_list(_args):
    rows = list_templates()
    width = max(len(name) for name, _, _ in rows)
    kind_width = max(len(kind) for _, kind, _ in rows)
    for name, kind, description in rows:
        print(f"{name:<{width}}  {kind:<{kind_width}}  {description}")
    return 0


def _cmd_validate(args):
    try:
        name, config, base = load_config(args.config)
        kind = validate_config(config, base)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 2
    print(f"ok: {name} is a valid {kind} experiment")
    return 0


def _cmd_run(args):
    try:
        name, config, base = load_config(args.config)
        validate_config(config, base)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2

    outdir = Path(args.outdir) if args.outdir else Path("out") / name
    try:
        result = run_experiment(name, config, outdir, base)
    except SuspflowError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1

    if not args.quiet:
        print(f"[{result.kind}] {name}: {result.summary}")
        for key, value in sorted(result.values.items()):
            print(f"  {key} = {format_scalar(value)}")
        for label, ok in result.checks:
            print(f"  {'PASS' if ok else 'FAIL'}  {label}")
        for path in result.outputs:
            print(f"  wrote {path}")
    print(f"{'PASS' if result.success else 'FAIL'} {name}")
    return 0 if result.success else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _cmd_run, "list": _cmd_list, "validate": _cmd_validate}
    return handler[args.command](args)


def entry_point():
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
