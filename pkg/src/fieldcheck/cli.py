"""Command-line entry point.

Exit status: 0 pass, 1 condition failure, 2 configuration error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import kernels
from .run import (
    CONFIG_ERROR,
    NUMERICAL_ERROR,
    run_charge,
    run_convergence,
    run_flux,
    run_sample,
    run_verify,
    text_summary,
)
from .scenario import ConfigError, load_scenario
from .solver import SolverError
from .quadrature import QuadratureError

COMMANDS = {
    "verify": run_verify,
    "flux": run_flux,
    "charge": run_charge,
    "convergence": run_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fieldcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify", "sample", "flux", "charge", "convergence"):
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", help="output path (default: scenario output block, else stdout)")
        p.add_argument("--format", choices=("json", "csv", "text"), default=None)
        p.add_argument("--threads", type=int, default=None, help="worker threads (env FIELDCHECK_THREADS)")
        p.add_argument("--seed", type=int, default=None, help="reserved; accepted and ignored")
        if name == "sample":
            p.add_argument("--what", choices=("potential", "gradient", "field", "stress", "psi"), default=None)
    return parser


def _render_document(doc: dict, fmt: str) -> str:
    if fmt == "text":
        return text_summary(doc)
    if fmt == "csv":
        raise ConfigError("csv output is only available for the sample command", "--format")
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _render_table(header, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"columns": header, "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        kernels.set_threads(args.threads)
    elif os.environ.get("FIELDCHECK_THREADS"):
        kernels.set_threads(kernels._threads_from_env())
    try:
        sc = load_scenario(args.scenario)
        if args.command == "sample":
            fmt = args.format or "csv"
            header, rows = run_sample(sc, args.what)
            _write(_render_table(header, rows, fmt), args.out or sc.output.get("csv"))
            return 0
        fmt = args.format or "json"
        status, doc = COMMANDS[args.command](sc)
        _write(_render_document(doc, fmt), args.out or sc.output.get("report"))
        return status
    except ConfigError as exc:
        print(f"fieldcheck: configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except (SolverError, QuadratureError, ArithmeticError, ValueError) as exc:
        print(f"fieldcheck: numerical error in scenario {args.scenario}: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
