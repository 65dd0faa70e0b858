import json
import sys
from typing import Iterable, Optional, TextIO, Tuple

import pandas as pd

from src.solver.dioph_solver import SolveRun


def format_number(value) -> str:
    """Integers as is, floats with 12 significant digits."""
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return f"{value:.12g}"


def format_tuples(points: Iterable[Tuple[int, ...]]) -> list:
    return ["(" + ", ".join(str(v) for v in p) + ")" for p in points]


def format_solve_run(run: SolveRun) -> str:
    """
    Human-readable summary of a solver run, ending in a FOUND SOLUTIONS block
    with one verified tuple per line.
    """
    lines = [
        f"system: {run.system}",
        f"penalty: {run.kind}",
        f"seed: {run.seed}",
        f"attempts: {run.attempts}",
        f"stopped: {'no new solution in a full round' if run.exhausted else 'extraction limit reached'}",
        "",
        "FOUND SOLUTIONS",
    ]
    if run.rounded:
        for k, text in enumerate(format_tuples(run.rounded), start=1):
            lines.append(f"{k:>3}  {text}")
    else:
        unrounded = [s for s in run.found if s.rounded is None]
        for k, sol in enumerate(unrounded, start=1):
            lines.append(f"{k:>3}  (" + ", ".join(format_number(v) for v in sol.x) + ")")
        if not unrounded:
            lines.append("  none")
    lines.append(f"total: {len(run.rounded) or len(run.found)}")
    return "\n".join(lines)


def solve_run_json(run: SolveRun) -> str:
    return json.dumps(run.to_dict(), indent=2, default=float)


def write_csv(frame: pd.DataFrame, out: Optional[TextIO] = None) -> None:
    """CSV with ',' separators, '.' decimals and '\\n' line endings."""
    frame.to_csv(out or sys.stdout, index=False, lineterminator="\n")


def write_table(frame: pd.DataFrame, out: Optional[TextIO] = None) -> None:
    """Whitespace-aligned table for terminals."""
    stream = out or sys.stdout
    text = frame.to_string(index=False, float_format=lambda v: f"{v:.12g}")
    stream.write(text + "\n")
