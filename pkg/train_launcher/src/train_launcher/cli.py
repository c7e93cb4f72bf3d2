"""Command line entry point.

    fusion-train launch --plan plan.json --dry-run
    fusion-train launch --plan plan.json

A dry run validates everything the live run would touch and prints the
fully resolved configuration, including the validated record count, without
importing the trainer (so no tensor library loads and no accelerator is
probed). Failures print a one-line JSON object on stderr and exit 1.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import plan as plan_mod
from .errors import LauncherError


def cmd_launch(args) -> int:
    train_plan = plan_mod.load_plan(args.plan)
    config, records = plan_mod.resolve_plan(train_plan)
    if args.dry_run:
        print(json.dumps(config, ensure_ascii=False, indent=2, sort_keys=True))
        return 0
    from . import trainer

    summary = trainer.run_training(records, config, train_plan.output_dir)
    print(json.dumps(summary, ensure_ascii=False, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fusion-train", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("launch", help="validate a plan and run (or preview) training")
    p.add_argument("--plan", required=True, help="path to a JSON training plan")
    p.add_argument(
        "--dry-run",
        action="store_true",
        help="print the resolved configuration and record count, then stop",
    )
    p.set_defaults(func=cmd_launch)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LauncherError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}, ensure_ascii=False),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
