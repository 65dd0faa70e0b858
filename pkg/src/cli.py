"""
Command-line entry point for primespline.

    python -m src.cli eval --fn p --x 25
    python -m src.cli triplets --count 1000 --csv
    python -m src.cli solve --config twin.json

Data goes to stdout (or --out), logs and error messages to stderr.
Exit codes: 0 success, 1 domain or configuration error, 2 usage error.
"""

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.api.error_handlers import ConfigError, MalformedConfigError, PrimeSplineError
from src.api.models import SolveConfig
from src.config.settings import settings
from src.ingestion.prime_source import dumps, sieve, write
from src.inversion.facade import BACKENDS, SPLINE_KINDS, PrimeFunction
from src.postprocessing.analysis import VarianceWindow, comparison_frame, count_peaks, grid, variance_curve
from src.postprocessing.figures import FIGURES, write_figures
from src.postprocessing.report_formatter import (
    format_number,
    format_solve_run,
    solve_run_json,
    write_csv,
    write_table,
)
from src.solver.dioph_solver import solve_config
from src.splines.cubic_spline import violation_census
from src.splines.quad_spline import coeff_table
from src.utils.cache_manager import get_cache_manager
from src.utils.logger import get_logger
from src.utils.metrics import RequestTimer, RunMetrics, get_metrics_collector

logger = get_logger(__name__)

# --y0 spellings accepted on the command line
Y0_CHOICES = {"li": "li", "xlnx": "x_over_lnx", "R": "riemann_R"}


# ==================== PARSER ====================


def _grid_spec(text: str):
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B:STEP, got '{text}'") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"need A <= B and STEP > 0, got '{text}'")
    return start, stop, step


def build_parser() -> argparse.ArgumentParser:
    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group()
    group.add_argument("--primes", metavar="FILE", help="Prime file (default: $PRIMESPLINE_PRIMES or a sieve)")
    group.add_argument("--sieve-limit", type=int, metavar="N", help="Sieve all primes up to N")
    source.add_argument("--spline", choices=SPLINE_KINDS, default=settings.default_spline)

    parser = argparse.ArgumentParser(prog="primespline", description="Prime-interpolating splines and friends")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p_sieve = subparsers.add_parser("sieve", help="Write a prime table")
    p_sieve.add_argument("--limit", type=int, required=True, help="Largest integer to sieve")
    p_sieve.add_argument("--out", help="Output file (default: stdout)")

    p_eval = subparsers.add_parser("eval", parents=[source], help="Evaluate p, p', p^-1 or (p^-1)'")
    p_eval.add_argument("--fn", choices=("p", "dp", "pinv", "dpinv"), default="p")
    where = p_eval.add_mutually_exclusive_group(required=True)
    where.add_argument("--x", type=float, help="Single abscissa")
    where.add_argument("--grid", type=_grid_spec, metavar="A:B:STEP", help="Inclusive grid")
    p_eval.add_argument("--backend", choices=BACKENDS, default=None, help="Inverse backend")
    p_eval.add_argument("--y0", choices=tuple(Y0_CHOICES), default=None, help="Newton initial guess")
    p_eval.add_argument("--trace", action="store_true", help="Dump the Newton trace of --x as CSV")
    p_eval.add_argument("--csv", action="store_true")

    p_table = subparsers.add_parser("table1", parents=[source], help="Integer coefficients of S_quad")
    p_table.add_argument("--from", dest="i_from", type=int, default=2)
    p_table.add_argument("--to", dest="i_to", type=int, default=20)
    p_table.add_argument("--csv", action="store_true")

    p_trip = subparsers.add_parser("triplets", parents=[source], help="Triplets breaking S_cub monotonicity")
    p_trip.add_argument("--count", type=int, default=1000, help="Number of leading primes to scan")
    p_trip.add_argument("--csv", action="store_true")

    p_cmp = subparsers.add_parser("compare", parents=[source], help="pi(x), p^-1(x), li(x) and R(x)")
    p_cmp.add_argument("--from", dest="start", type=float, default=2.0)
    p_cmp.add_argument("--to", dest="stop", type=float, default=1000.0)
    p_cmp.add_argument("--step", type=float, default=1.0)
    p_cmp.add_argument("--csv", action="store_true")

    p_var = subparsers.add_parser("variance", parents=[source], help="Local variance A(x) or B(x)")
    p_var.add_argument("--kind", choices=("A", "B"), default="A")
    p_var.add_argument("--x0", type=float, required=True)
    p_var.add_argument("--eps", type=float, default=None, help="Window length (default: x0 / 4)")
    p_var.add_argument("--step", type=float, default=0.01)
    p_var.add_argument("--csv", action="store_true")

    p_fig = subparsers.add_parser("figures", parents=[source], help="Write plot datasets as CSV")
    p_fig.add_argument("--which", type=int, nargs="+", choices=FIGURES, default=list(FIGURES))
    p_fig.add_argument("--out", default="figures", help="Output directory")
    p_fig.add_argument("--step", type=float, default=0.01)

    p_solve = subparsers.add_parser("solve", parents=[source], help="Diophantine search from a JSON config")
    p_solve.add_argument("--config", required=True, help="JSON file with a solve configuration")
    p_solve.add_argument("--seed", type=int, default=None, help="Override the config seed")
    p_solve.add_argument("--json", action="store_true", help="Print the run as JSON")
    p_solve.add_argument("--out", help="Also write the run as JSON to this file")

    p_serve = subparsers.add_parser("serve", help="Run the HTTP service")
    p_serve.add_argument("--host", default=settings.host)
    p_serve.add_argument("--port", type=int, default=settings.port)

    return parser


# ==================== HELPERS ====================


def get_function(args: argparse.Namespace) -> PrimeFunction:
    """Facade for the prime source named by the arguments or the environment."""
    primes_file = args.primes or os.environ.get("PRIMESPLINE_PRIMES") or None
    sieve_limit = None if primes_file else (args.sieve_limit or settings.default_sieve_limit)
    return get_cache_manager().get_function(primes_file, sieve_limit, args.spline)


def _emit(frame: pd.DataFrame, as_csv: bool) -> None:
    if as_csv:
        write_csv(frame)
    else:
        write_table(frame)


def load_solve_config(path: str, seed: Optional[int] = None) -> SolveConfig:
    """Parse a solve config file; unparseable or invalid files are malformed."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}") from None
    try:
        config = SolveConfig(**json.loads(text))
    except json.JSONDecodeError as e:
        raise MalformedConfigError("config", f"invalid JSON in {path}: {e.msg} (line {e.lineno})") from None
    except (ValidationError, TypeError) as e:
        raise MalformedConfigError("config", f"invalid solve config in {path}: {e}") from None
    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    return config


# ==================== COMMANDS ====================


def cmd_sieve(args: argparse.Namespace) -> None:
    table = sieve(args.limit)
    if args.out:
        write(table, args.out)
        logger.info(f"Wrote {len(table)} primes to {args.out}")
    else:
        sys.stdout.write(dumps(table))


def cmd_eval(args: argparse.Namespace) -> None:
    function = get_function(args)
    if args.y0 is not None:
        cfg = function.newton_config.model_copy(update={"y0_strategy": Y0_CHOICES[args.y0]})
        function = function.with_newton_config(cfg)

    if args.trace:
        if args.fn != "pinv" or args.x is None:
            raise ConfigError("trace", "--trace needs --fn pinv and a single --x")
        _, trace = function.pinv_newton(args.x)
        write_csv(trace.to_frame())
        return

    xs = grid(*args.grid) if args.grid is not None else np.array([args.x])
    if args.fn == "p":
        values = function.p_of(xs)
    elif args.fn == "dp":
        values = function.dp_of(xs)
    elif args.fn == "pinv":
        values = function.pinv_of(xs, args.backend)
    else:
        values = function.dpinv_of(xs, args.backend)

    if args.grid is None and not args.csv:
        print(format_number(float(values[0])))
    else:
        _emit(pd.DataFrame({"x": xs, args.fn: values}), args.csv)


def cmd_table1(args: argparse.Namespace) -> None:
    _emit(coeff_table(args.i_from, args.i_to, get_function(args).table), args.csv)


def cmd_triplets(args: argparse.Namespace) -> None:
    reports = violation_census(args.count, get_function(args).table)
    frame = pd.DataFrame(
        [r.as_dict() for r in reports],
        columns=["i", "p_im1", "p_i", "p_ip1", "d_i", "violates", "lower", "upper", "t_i"],
    )
    _emit(frame[["i", "p_im1", "p_i", "p_ip1", "d_i", "violates"]], args.csv)


def cmd_compare(args: argparse.Namespace) -> None:
    _emit(comparison_frame(get_function(args), args.start, args.stop, args.step), args.csv)


def cmd_variance(args: argparse.Namespace) -> None:
    window = VarianceWindow.around(args.x0, args.kind, args.eps)
    frame = variance_curve(window, get_function(args), args.step)
    _emit(frame, args.csv)
    logger.info(f"{args.kind}(x) on [{window.x0}, {window.end}): {count_peaks(frame[args.kind])} peaks")


def cmd_figures(args: argparse.Namespace) -> None:
    paths = write_figures(get_function(args), args.out, args.which, args.step)
    for which, path in paths.items():
        print(f"figure {which}: {path}")


def cmd_solve(args: argparse.Namespace) -> None:
    config = load_solve_config(args.config, args.seed)
    run = solve_config(config, get_function(args))
    if args.json:
        print(solve_run_json(run))
    else:
        print(format_solve_run(run))
    if args.out:
        Path(args.out).write_text(solve_run_json(run) + "\n", encoding="utf-8")
        logger.info(f"Wrote solve run to {args.out}")


def cmd_serve(args: argparse.Namespace) -> None:
    from src.main import run

    run(args.host, args.port)


HANDLERS = {
    "sieve": cmd_sieve,
    "eval": cmd_eval,
    "table1": cmd_table1,
    "triplets": cmd_triplets,
    "compare": cmd_compare,
    "variance": cmd_variance,
    "figures": cmd_figures,
    "solve": cmd_solve,
    "serve": cmd_serve,
}


# ==================== DISPATCH ====================


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return 0 if e.code == 0 else 2

    with RequestTimer() as timer:
        try:
            HANDLERS[args.command](args)
            code, error = 0, None
        except PrimeSplineError as e:
            logger.debug(f"{args.command} failed: {e.error_code}")
            print(f"primespline {args.command}: {e.message}", file=sys.stderr)
            code, error = e.exit_code, e.error_code
        except OSError as e:
            logger.debug(f"{args.command} failed: {e}")
            print(f"primespline {args.command}: {e}", file=sys.stderr)
            code, error = 1, "IO_ERROR"

    get_metrics_collector().record(
        RunMetrics(
            name=args.command,
            surface="cli",
            processing_time_ms=timer.elapsed_ms,
            status_code=0 if code == 0 else 400,
            error=error,
        )
    )
    return code


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
