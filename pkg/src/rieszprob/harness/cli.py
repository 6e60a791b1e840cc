"""Command line entry point.

Exit status: 0 when every check passes, 1 when a property fails, 2 on a
configuration or I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..errors import ConfigInvalid, RieszError
from .config import SuiteConfig
from .curves import emit_curves, load_process
from .properties import PROPERTIES
from .suite import run_suite

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rieszprob",
        description="Verify exponential calculus, conditional independence and concentration "
        "bounds on finite Riesz spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the seeded verification suite")
    v.add_argument("--seed", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--config", help="JSON file with SuiteConfig fields")
    v.add_argument("--json", dest="json_out", help="write the report here (default: stdout)")
    v.add_argument("--workers", type=int)
    v.add_argument("--property", action="append", dest="properties", help="restrict to a property id")
    v.add_argument("--timing", action="store_true", help="print wall time to stderr")

    c = sub.add_parser("curves", help="write tail and bound curves for a Bernoulli process")
    c.add_argument("--spec", required=True, help='JSON: {"base_weights", "blocks", "p", "n"}')
    c.add_argument("--t-min", type=float, required=True)
    c.add_argument("--t-max", type=float, required=True)
    c.add_argument("--points", type=int, required=True)
    c.add_argument("--out", required=True)

    e = sub.add_parser("explain", help="describe a property")
    e.add_argument("property_id", nargs="?", help="omit to list all property ids")
    return parser


def _verify(args) -> int:
    cfg = SuiteConfig.from_json(args.config) if args.config else SuiteConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.properties:
        overrides["properties"] = tuple(args.properties)
    if overrides:
        cfg = cfg.replace(**overrides)
    report = run_suite(cfg)
    text = report.to_json()
    if args.json_out:
        try:
            with open(args.json_out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigInvalid(f"cannot write {args.json_out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    if args.timing:
        print(f"wall time: {report.wall_time:.2f} s", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def _curves(args) -> int:
    if args.points < 1:
        raise ConfigInvalid("--points must be >= 1")
    proc = load_process(args.spec)
    grid = np.linspace(args.t_min, args.t_max, args.points)
    try:
        emit_curves(proc, grid.tolist(), args.out)
    except OSError as exc:
        raise ConfigInvalid(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def _explain(args) -> int:
    if args.property_id is None:
        for pid, p in PROPERTIES.items():
            print(f"{pid}: {p.statement}")
        return EXIT_OK
    p = PROPERTIES.get(args.property_id)
    if p is None:
        print(f"unknown property {args.property_id!r}; known: {', '.join(PROPERTIES)}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{p.id}\n  statement: {p.statement}\n  formula:   {p.formula}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args)
        if args.command == "curves":
            return _curves(args)
        return _explain(args)
    except RieszError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
