"""
Datasets for the nine standard plots, as DataFrames.

    1  S_cub and S_quad on [428, 432]
    2  their derivatives on [428, 432]
    3  inverses over the image of [428, 432]
    4  sewing of S_quad with the asymptote (first 6000 primes)
    5  pi(x), p^-1(x), li(x), R(x) on [2, 1000]
    6  p(x) on the index window [154.78, 168.2]
    7  A(x) on the same window
    8  B(x) on [900, 1000]
    9  B(x) on [900, 1150]
"""

from pathlib import Path
from typing import Dict, Iterable, Union

import numpy as np
import pandas as pd

from src.analytic.asymptotics import asymptote
from src.api.error_handlers import DomainError
from src.config.constants import VARIANCE_A_WINDOW
from src.inversion.facade import PrimeFunction
from src.postprocessing.analysis import VarianceWindow, comparison_frame, grid, variance_curve
from src.splines import cubic_spline, quad_spline
from src.utils.logger import get_logger

logger = get_logger(__name__)

FIGURES = tuple(range(1, 10))
SPLINE_WINDOW = (428.0, 432.0)
SEWING_PRIMES = 6000


def _splines(function: PrimeFunction, step: float) -> pd.DataFrame:
    xs = grid(*SPLINE_WINDOW, step)
    return pd.DataFrame(
        {
            "x": xs,
            "S_cub": cubic_spline.eval_cubic(xs, function.table),
            "S_quad": quad_spline.eval_quad(xs, function.table),
        }
    )


def _derivatives(function: PrimeFunction, step: float) -> pd.DataFrame:
    xs = grid(*SPLINE_WINDOW, step)
    return pd.DataFrame(
        {
            "x": xs,
            "dS_cub": cubic_spline.eval_cubic_deriv(xs, function.table),
            "dS_quad": quad_spline.eval_quad_deriv(xs, function.table),
        }
    )


def _inverses(function: PrimeFunction, step: float) -> pd.DataFrame:
    # S_cub is not invertible here, so its inverse is drawn as the swapped graph
    t = grid(*SPLINE_WINDOW, step)
    lo, hi = quad_spline.eval_quad(np.array(SPLINE_WINDOW), function.table)
    y = np.linspace(lo, hi, t.size)
    return pd.DataFrame(
        {
            "y": y,
            "pinv_quad": quad_spline.eval_inverse(y, function.table),
            "cub_y": cubic_spline.eval_cubic(t, function.table),
            "cub_x": t,
        }
    )


def _sewing(function: PrimeFunction, step: float) -> pd.DataFrame:
    table = function.table
    if len(table) > SEWING_PRIMES:
        table = table.head(SEWING_PRIMES)
    sewn = PrimeFunction(table, spline="quad", slope_decay=function.sewing.slope_decay)
    xs = grid(sewn.sew_x - 50.0, sewn.sew_x + 50.0, step)
    spline_part = np.full(xs.size, np.nan)
    below = xs <= sewn.sew_x
    spline_part[below] = quad_spline.eval_quad(xs[below], table)
    return pd.DataFrame(
        {"x": xs, "p": sewn.p_of(xs), "S_quad": spline_part, "asymptote": asymptote(xs)}
    )


def figure_dataset(which: int, function: PrimeFunction, step: float = 0.01) -> pd.DataFrame:
    """DataFrame for one figure; step is the grid spacing in x."""
    if which not in FIGURES:
        raise DomainError("figures", f"figure must be in 1..9, got {which}")
    if which == 1:
        return _splines(function, step)
    if which == 2:
        return _derivatives(function, step)
    if which == 3:
        return _inverses(function, step)
    if which == 4:
        return _sewing(function, step)
    if which == 5:
        return comparison_frame(function, 2.0, 1000.0, max(step, 0.5))

    x0, x1 = VARIANCE_A_WINDOW
    if which == 6:
        xs = grid(x0, x1, step)
        return pd.DataFrame({"x": xs, "p": function.p_of(xs)})
    if which == 7:
        return variance_curve(VarianceWindow(x0, x1 - x0, "A"), function, step)
    if which == 8:
        return variance_curve(VarianceWindow(900.0, 100.0, "B"), function, step)
    return variance_curve(VarianceWindow(900.0, 250.0, "B"), function, step)


def figure_datasets(function: PrimeFunction, which: Iterable[int] = FIGURES, step: float = 0.01) -> Dict[int, pd.DataFrame]:
    return {w: figure_dataset(w, function, step) for w in which}


def write_figures(
    function: PrimeFunction, out_dir: Union[str, Path], which: Iterable[int] = FIGURES, step: float = 0.01
) -> Dict[int, Path]:
    """Write figure_<k>.csv files into out_dir and return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for w, frame in figure_datasets(function, which, step).items():
        path = out / f"figure_{w}.csv"
        frame.to_csv(path, index=False, lineterminator="\n")
        paths[w] = path
        logger.info(f"Wrote figure {w} dataset ({len(frame)} rows) to {path}")
    return paths
