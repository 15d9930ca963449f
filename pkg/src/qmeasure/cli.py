"""Command-line front end.

Exit codes: 0 success, 1 oracle comparison above tolerance, 2 unreadable
scenario, 3 precondition violation, 4 oracle cutoff did not converge.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import load_config, validate
from .errors import ConfigError, ConvergenceError, PreconditionError
from .runner import OUTPUT_NAMES, execute, format_value, write_csv

log = logging.getLogger("qmeasure")

EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_CONVERGENCE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmeasure",
        description="Decoherence, pointer amplification and Fock-space checks for the bath/pointer measurement model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run the scenario's run.kind"),
        ("sweep", "sweep one parameter (sweep.parameter) over sweep.values"),
        ("oracle-compare", "compare closed forms with truncated Fock-space evolution"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path, help="scenario file (TOML, dotted keys)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
        p.add_argument("--tolerance", type=float, default=1e-6, help="oracle agreement tolerance (default: 1e-6)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for time points / sweep rows")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        cfg = load_config(args.config)
        kind = {"sweep": "sweep", "oracle-compare": "oracle-compare"}.get(args.command, cfg.kind)
        validate(cfg, kind)
        if args.threads < 1:
            raise PreconditionError("--threads: must be >= 1")
        if not args.tolerance > 0:
            raise PreconditionError("--tolerance: must be positive")
        table = execute(cfg, kind, tolerance=args.tolerance, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ConvergenceError as exc:
        print(f"oracle did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    path = write_csv(table, args.out / OUTPUT_NAMES[kind])
    log.info("wrote %s (%d rows)", path, len(table.rows))
    if kind == "oracle-compare":
        worst = max((row[3] for row in table.rows), default=0.0)
        log.info("max |closed_form - oracle| = %s", format_value(worst))
        if worst > args.tolerance:
            print(f"oracle mismatch {format_value(worst)} above tolerance {args.tolerance:g}", file=sys.stderr)
            return EXIT_MISMATCH
    return 0


if __name__ == "__main__":
    sys.exit(main())
