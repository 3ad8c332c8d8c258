"""Command-line entry point: bound tables, identity checks and theta series.

    python src/cli.py bound --dims 1..8 --output csv
    python src/cli.py check quadrature --dim 3 --r 2 --nodes 400
    python src/cli.py theta theta72 --K 16

Reports go to stdout, diagnostics to stderr. Exit codes: 0 ok, 1 violation,
2 invalid configuration, 3 accuracy or resource failure.
"""

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ValidationError

_src = Path(__file__).resolve().parent
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))

import check_loader
import config
import lattices
import lpquad
import qseries
from errors import AccuracyError, LpSphereError, ResourceError
from models import OutputFormat
from schemas import CheckResult, RunConfig

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2
EXIT_ACCURACY = 3

_STATUS_EXIT = {"ok": EXIT_OK, "violation": EXIT_VIOLATION, "error": EXIT_ACCURACY}

# check flag -> params key; only flags given on the command line are forwarded
_CHECK_FLAGS = ("dim", "r", "nodes", "lattice", "kmax", "y", "u", "v", "s", "function", "alpha", "jmax", "power", "band", "pairs")


def parse_dims(text: str) -> list[int]:
    """"1..8", "2" or "1,2,8"."""
    dims: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            dims.extend(range(int(lo), int(hi) + 1))
        elif part:
            dims.append(int(part))
    return dims


def to_wire(value: Any) -> Any:
    """Floats as 15-significant-digit strings, rationals as "p/q", models and enums unpacked."""
    if isinstance(value, BaseModel):
        return to_wire(value.model_dump(mode="python"))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return f"{value:.15g}"
    if isinstance(value, dict):
        return {str(k): to_wire(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_wire(v) for v in value]
    if hasattr(value, "tolist"):
        return to_wire(value.tolist())
    return str(value)


def _json_document(command: str, params: dict, result: Any) -> str:
    doc = {"schema": config.JSON_SCHEMA_VERSION, "command": command, "params": to_wire(params), "result": to_wire(result)}
    return json.dumps(doc, indent=2)


def _csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([to_wire(v) for v in row])
    return buf.getvalue()


def _emit_plot_data(path: str | None, header: list[str], rows: list[list[Any]]) -> None:
    if not path:
        return
    Path(path).write_text(_csv_text(header, rows))
    logger.info(f"Wrote plot data ({len(rows)} rows) to {path}")


# ---------------------------------------------------------------------------
# bound


def _bound_row(n: int, nodes: int, with_residual: bool) -> dict[str, Any]:
    result = lpquad.bessel_bound(n)
    row = {
        "n": n,
        "j": result.j_value,
        "density_bound": result.density_bound,
        "center_density_bound": result.center_density_bound,
    }
    if with_residual:
        row["identity_residual"] = lpquad.optimality_residual(n, nodes)
    return row


def cmd_bound(args: argparse.Namespace, run: RunConfig) -> tuple[str, int]:
    if not run.dims:
        raise ValueError("empty dimension range")
    with ThreadPoolExecutor(max_workers=config.WORKERS) as pool:
        rows = list(pool.map(lambda n: _bound_row(n, run.nodes, args.residuals), run.dims))
    header = list(rows[0])
    table = [[row[k] for k in header] for row in rows]
    _emit_plot_data(args.emit_plot_data, ["n", "density_bound"], [[r["n"], r["density_bound"]] for r in rows])
    if run.output == OutputFormat.CSV:
        return _csv_text(header, table), EXIT_OK
    if run.output == OutputFormat.TEXT:
        lines = [" ".join(f"{h:>22}" for h in header)]
        lines += [" ".join(f"{to_wire(v):>22}" for v in row) for row in table]
        return "\n".join(lines) + "\n", EXIT_OK
    return _json_document("bound", run.model_dump(), rows) + "\n", EXIT_OK


# ---------------------------------------------------------------------------
# check


def cmd_check(args: argparse.Namespace, run: RunConfig) -> tuple[str, int]:
    checks = check_loader.load_checks()
    if args.which not in checks:
        raise ValueError(f"unknown check {args.which!r}; available: {sorted(checks)}")
    params = {key: getattr(args, key) for key in _CHECK_FLAGS if getattr(args, key) is not None}
    if "seed" in checks[args.which].params_model.model_fields:
        params["seed"] = run.seed
    if args.tolerance is not None:
        params["tolerance"] = args.tolerance
    result: CheckResult = check_loader.run_check(checks[args.which], params)
    code = _STATUS_EXIT[result.status]
    if run.output == OutputFormat.CSV:
        scalars = [[k, v] for k, v in result.data.items() if not isinstance(v, (dict, list))]
        return _csv_text(["key", "value"], [["status", result.status], *scalars]), code
    if run.output == OutputFormat.TEXT:
        return result.to_string() + "\n", code
    return _json_document(f"check {args.which}", params, result) + "\n", code


# ---------------------------------------------------------------------------
# theta


def cmd_theta(args: argparse.Namespace, run: RunConfig) -> tuple[str, int]:
    series = qseries.NAMED_SERIES[args.name](run.K)
    report = qseries.extremality(series)
    rows = [[k, 2 * k, c] for k, c in enumerate(series.coeffs)]
    _emit_plot_data(args.emit_plot_data, ["norm", "coefficient"], [[norm, c] for _, norm, c in rows])
    code = EXIT_VIOLATION if report.negative_coeffs else EXIT_OK
    if run.output == OutputFormat.CSV:
        return _csv_text(["k", "norm", "coefficient"], rows), code
    if run.output == OutputFormat.TEXT:
        lines = [f"{series.name} ({qseries.CONVENTION})"]
        lines += [f"  norm {norm:>3}: {to_wire(c)}" for _, norm, c in rows]
        lines.append(f"min norm {report.min_norm}, negative coefficients: {len(report.negative_coeffs)}")
        return "\n".join(lines) + "\n", code
    result = {
        "name": series.name,
        "convention": qseries.CONVENTION,
        "coeffs": list(series.coeffs),
        "extremality": report,
    }
    return _json_document("theta", run.model_dump(), result) + "\n", code


# ---------------------------------------------------------------------------


def _common_flags() -> argparse.ArgumentParser:
    """--output, --log-level and --seed, accepted before or after the subcommand.

    Defaults live on the top-level parser only; SUPPRESS keeps a subparser
    from overwriting a value given before the subcommand.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=[f.value for f in OutputFormat], default=argparse.SUPPRESS)
    common.add_argument("--log-level", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized sweeps")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="lpsphere", description="Sphere-packing LP bounds and identity checks", parents=[common]
    )
    parser.set_defaults(output=OutputFormat.JSON.value, log_level=config.LOG_LEVEL, seed=0)
    sub = parser.add_subparsers(dest="command", required=True)

    bound = sub.add_parser("bound", parents=[common], help="Bessel-function density bounds per dimension")
    bound.add_argument("--dims", type=parse_dims, required=True, help='e.g. "1..8", "2" or "1,2,8"')
    bound.add_argument("--nodes", type=int, default=lpquad.DEFAULT_NODES)
    bound.add_argument("--residuals", action="store_true", help="add the quadrature equality residual column")
    bound.add_argument("--emit-plot-data", metavar="PATH")

    check = sub.add_parser("check", parents=[common], help="run one identity or positivity check")
    check.add_argument("which", help="quadrature, dini, poisson, theta-transform, thetacoeff, silp, dual-feasibility")
    check.add_argument("--dim", type=int)
    check.add_argument("--r", type=float)
    check.add_argument("--nodes", type=int)
    check.add_argument("--lattice", help=f"one of {', '.join(lattices.BUILTIN_NAMES)} or a lattice JSON file")
    check.add_argument("--kmax", type=int)
    check.add_argument("--y", type=float, nargs="+")
    check.add_argument("--u", type=float, nargs="+")
    check.add_argument("--v", nargs="+", help='shift in basis coordinates, e.g. "1/2"')
    check.add_argument("--s", type=float, nargs="+")
    check.add_argument("--function")
    check.add_argument("--alpha", type=float)
    check.add_argument("--jmax", type=int)
    check.add_argument("--power", type=int)
    check.add_argument("--band", type=float)
    check.add_argument("--pairs", type=int)
    check.add_argument("--tolerance", type=float)

    theta = sub.add_parser("theta", parents=[common], help="exact theta series coefficients")
    theta.add_argument("name", choices=sorted(qseries.NAMED_SERIES))
    theta.add_argument("--K", type=int, default=config.QSERIES_DEFAULT_K)
    theta.add_argument("--emit-plot-data", metavar="PATH")
    return parser


COMMANDS = {"bound": cmd_bound, "check": cmd_check, "theta": cmd_theta}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
    )

    try:
        tolerance = config.default_tolerance()
        run = RunConfig(
            command=args.command,
            dims=getattr(args, "dims", []),
            K=getattr(args, "K", config.QSERIES_DEFAULT_K),
            nodes=getattr(args, "nodes", None) or lpquad.DEFAULT_NODES,
            tolerance=tolerance,
            output=args.output,
            seed=args.seed,
        )
        text, code = COMMANDS[args.command](args, run)
    except (AccuracyError, ResourceError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ACCURACY
    except (ValidationError, ValueError, LpSphereError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_INVALID

    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
