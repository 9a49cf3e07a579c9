"""Command-line front end.

::

    tlfrls case1 [--config PATH] [--out DIR] [--set key=value ...] [--steps N]
    tlfrls case2 ...
    tlfrls custom --config PATH ...
    tlfrls verify [--config PATH] [--set ...] [--only 1,7]

Exit status: 0 success, 1 parse or validation error, 2 acceptance failure,
3 I/O error.
"""

import argparse
import math
import sys
from pathlib import Path

from .acceptance import verify
from .config import parse_config
from .csvio import emit_csv
from .errors import ParseError, ValidationError
from .experiments import run

EXIT_OK, EXIT_CONFIG, EXIT_ACCEPTANCE, EXIT_IO = 0, 1, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(prog="tlfrls", description="Two-layer forgetting RLS experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("case1", "constant plant, compare all estimators"),
        ("case2", "plant changes a -> b -> c"),
        ("custom", "run the methods listed in a config file"),
        ("verify", "run the acceptance checks and print a pass/fail table"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", metavar="PATH", help="config file (INI-style)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key; repeatable")
        p.add_argument("--steps", type=int, help="shorthand for --set steps=N")
        if name == "verify":
            p.add_argument("--only", help="comma-separated criterion numbers")
        else:
            p.add_argument("--out", metavar="DIR", help="write trace CSVs and summary.csv here")
    return parser


def _load(args):
    text = ""
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    overrides = list(args.overrides)
    if args.steps is not None:
        overrides.append(f"steps={args.steps}")
    case = "case1" if args.command == "verify" else args.command
    return parse_config(text, case=case, overrides=overrides)


def _cell(value):
    if value is None:
        return "-"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.4g}"
    return str(value)


def format_summary(rows):
    if not rows:
        return "(no methods)"
    headers = ["method", "final_param_err", "final_ident_err", "k_e", "max_cond_P", "contraction_violations", "diverged_at"]
    table = [headers] + [[_cell(r[h]) for h in headers] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in table)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        only = None
        if args.command == "verify" and args.only:
            only = {int(x) for x in args.only.split(",") if x.strip()}
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: --only: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "verify":
        return verify(cfg, only)

    if args.out:
        try:
            Path(args.out).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    result = run(cfg)
    print(format_summary(result.summary))
    if args.out:
        try:
            paths = emit_csv(result, args.out)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote {len(paths)} files to {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
