"""
Tests for the figure datasets and the report formatter.
"""

import io
import json

import numpy as np
import pandas as pd
import pytest

from src.api.error_handlers import DomainError
from src.postprocessing.figures import FIGURES, SEWING_PRIMES, figure_dataset, write_figures
from src.postprocessing.report_formatter import (
    format_number,
    format_solve_run,
    format_tuples,
    solve_run_json,
    write_csv,
    write_table,
)
from src.solver.dioph_solver import FoundSolution, SolveRun

FIGURE_COLUMNS = {
    1: ["x", "S_cub", "S_quad"],
    2: ["x", "dS_cub", "dS_quad"],
    3: ["y", "pinv_quad", "cub_y", "cub_x"],
    4: ["x", "p", "S_quad", "asymptote"],
    5: ["x", "pi", "pinv", "li", "R"],
    6: ["x", "p"],
    7: ["x", "A"],
    8: ["x", "B"],
    9: ["x", "B"],
}


# ==================== FIGURE DATASETS ====================

@pytest.mark.parametrize("which", FIGURES)
def test_figure_columns(function_10k, which):
    frame = figure_dataset(which, function_10k, step=0.5)
    assert list(frame.columns) == FIGURE_COLUMNS[which]
    assert len(frame) > 1


@pytest.mark.parametrize("which", [0, 10])
def test_unknown_figure(function_10k, which):
    with pytest.raises(DomainError):
        figure_dataset(which, function_10k)


def test_spline_figure_hits_primes(function_10k):
    frame = figure_dataset(1, function_10k, step=0.5)
    at_428 = frame[frame["x"] == 428.0].iloc[0]
    prime = function_10k.table.prime_at(428)
    assert at_428["S_quad"] == pytest.approx(prime)
    assert at_428["S_cub"] == pytest.approx(prime)


def test_sewing_figure_is_monotone(function_10k):
    frame = figure_dataset(4, function_10k, step=0.5)
    sew_x = SEWING_PRIMES - 0.5
    assert frame["x"].min() == pytest.approx(sew_x - 50.0)
    assert (np.diff(frame["p"]) > 0).all()
    above = frame["x"] > sew_x
    assert frame.loc[above, "S_quad"].isna().all()
    np.testing.assert_allclose(frame.loc[~above, "p"], frame.loc[~above, "S_quad"])


def test_write_figures(function_10k, tmp_path):
    paths = write_figures(function_10k, tmp_path / "figs", which=[1, 6], step=0.5)
    assert set(paths) == {1, 6}
    assert paths[6].name == "figure_6.csv"
    frame = pd.read_csv(paths[6])
    assert list(frame.columns) == ["x", "p"]
    assert b"\r\n" not in paths[1].read_bytes()


# ==================== REPORT FORMATTER ====================

@pytest.mark.parametrize(
    "value,text",
    [(97.0, "97"), (25, "25"), (2.5, "2.5"), (1.0 / 3.0, "0.333333333333"), (-4.0, "-4")],
)
def test_format_number(value, text):
    assert format_number(value) == text


def test_format_tuples():
    assert format_tuples([(5, 5, 7), (11, 7, 13)]) == ["(5, 5, 7)", "(11, 7, 13)"]


def test_format_solve_run_lists_tuples():
    run = SolveRun(
        system="quasi_pythagorean_twin", kind="primes", seed=1, rounded=[(5, 5, 7), (11, 7, 13)], attempts=12
    )
    text = format_solve_run(run)
    lines = text.splitlines()
    start = lines.index("FOUND SOLUTIONS")
    assert lines[start + 1] == "  1  (5, 5, 7)"
    assert lines[start + 2] == "  2  (11, 7, 13)"
    assert lines[-1] == "total: 2"
    assert "penalty: primes" in lines


def test_format_solve_run_without_rounding():
    found = FoundSolution(x=[2.0, 0.5], residual_norm=0.0, rounded=None, attempt=0, eps0=1e-2, iterations=4)
    text = format_solve_run(SolveRun(system="custom", kind="none", seed=0, found=[found], attempts=1))
    assert "  1  (2, 0.5)" in text.splitlines()
    empty = format_solve_run(SolveRun(system="custom", kind="primes", seed=0, exhausted=True))
    assert "  none" in empty.splitlines()
    assert "no new solution" in empty


def test_solve_run_json():
    run = SolveRun(system="quasi_pythagorean_twin", kind="primes", seed=3, rounded=[(5, 5, 7)], attempts=1)
    data = json.loads(solve_run_json(run))
    assert data["rounded"] == [[5, 5, 7]]
    assert data["seed"] == 3


def test_write_csv_and_table():
    frame = pd.DataFrame({"x": [1.5, 2.0], "p": [2.5, 3.0]})
    buffer = io.StringIO()
    write_csv(frame, buffer)
    assert buffer.getvalue() == "x,p\n1.5,2.5\n2.0,3.0\n"

    buffer = io.StringIO()
    write_table(frame, buffer)
    header = buffer.getvalue().splitlines()[0].split()
    assert header == ["x", "p"]


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
