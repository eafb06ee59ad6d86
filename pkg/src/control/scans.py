from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math
import numpy as np
from control.lbfgs import LbfgsOptions, OptimResult, minimize
from control.problem import ControlProblem, loss

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScanRow:
    """
    One grid point of a one-dimensional scan with inner optimisation.

    Attributes:
        value (float): Value of the scanned parameter.
        params (Dict[str, float]): Full optimised parameter point.
        nbar (float): Optimal n̄_T, NaN if the point failed.
        converged (bool): Whether the inner minimisation converged.
        iterations (int): Inner L-BFGS iterations.
        error (Optional[str]): Failure message.
    """

    value: float
    params: Dict[str, float]
    nbar: float
    converged: bool
    iterations: int
    error: Optional[str] = None


@dataclass(frozen=True)
class GridCell:
    """One cell of a two-dimensional loss grid; nbar is NaN on failure."""

    value1: float
    value2: float
    nbar: float
    error: Optional[str] = None


def scan1d(
    problem: ControlProblem,
    scan_param: str,
    grid: Sequence[float],
    inner_free: Sequence[str],
    options: LbfgsOptions = LbfgsOptions(),
    scales: Optional[Dict[str, float]] = None,
) -> List[ScanRow]:
    """Scans one parameter, minimising over inner_free at each grid point.

    Each point is warm-started from the optimum of the previous successful
    point; the first starts from the problem's base point. Parameters in
    neither set stay at their base values.

    Raises:
        ValueError: If scan_param is also an inner free parameter.
        KeyError: If a name is not a parameter of the scheme.
    """
    if scan_param in inner_free:
        raise ValueError(f"Scanned parameter `{scan_param}` cannot also be free")
    if scan_param not in problem.scheme.parameter_names:
        raise KeyError(
            f"Unknown parameter `{scan_param}` for scheme {problem.scheme.name}"
        )

    warm = problem.base_params
    rows: List[ScanRow] = []
    for value in grid:
        point = problem.respecify(inner_free, {**warm, scan_param: float(value)})
        try:
            result = minimize(point, options, scales)
        except RuntimeError as e:
            logger.warning("Scan point %s = %g failed: %s", scan_param, value, e)
            rows.append(
                ScanRow(float(value), point.base_params, math.nan, False, 0, str(e))
            )
            continue

        warm = result.params_opt
        rows.append(
            ScanRow(
                float(value),
                result.params_opt,
                result.loss_opt,
                result.converged,
                result.iterations,
            )
        )

    return rows


def scan2d(
    problem: ControlProblem,
    param1: str,
    grid1: Sequence[float],
    param2: str,
    grid2: Sequence[float],
    threads: int = 1,
) -> List[GridCell]:
    """Evaluates n̄_T on the full grid, param1 outer and param2 inner.

    Other parameters stay at the problem's base values. Cells run
    concurrently; the rows come back in grid order.

    Raises:
        ValueError: If the two parameters coincide.
    """
    if param1 == param2:
        raise ValueError(f"Cannot scan `{param1}` against itself")

    for name in (param1, param2):
        if name not in problem.scheme.parameter_names:
            raise KeyError(
                f"Unknown parameter `{name}` for scheme {problem.scheme.name}"
            )

    fixed = problem.respecify(())
    cells = [(float(a), float(b)) for a in grid1 for b in grid2]

    def evaluate(cell: Tuple[float, float]) -> GridCell:
        a, b = cell
        point = fixed.respecify((), {param1: a, param2: b})
        try:
            return GridCell(a, b, loss(point, np.zeros(0)))
        except RuntimeError as e:
            logger.warning("Grid cell (%g, %g) failed: %s", a, b, e)
            return GridCell(a, b, math.nan, str(e))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(evaluate, cells))


def run_starts(
    problem: ControlProblem,
    starts: Sequence[Dict[str, float]],
    options: LbfgsOptions = LbfgsOptions(),
    scales: Optional[Dict[str, float]] = None,
    threads: int = 1,
) -> List[Optional[OptimResult]]:
    """Minimises from every start; None marks a start that failed.

    Each start overrides the free parameters it names; the rest of the
    point comes from the problem.
    """
    if not starts:
        raise ValueError("At least one start is required")

    def run(index: int) -> Optional[OptimResult]:
        start = problem.respecify(problem.free, starts[index])
        try:
            result = minimize(start, options, scales)
        except RuntimeError as e:
            logger.warning("Start %d failed: %s", index, e)
            return None
        logger.info("Start %d: n̄_T %.6g (%s)", index, result.loss_opt, result.message)
        return result

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(run, range(len(starts))))


def best_result(results: Sequence[Optional[OptimResult]]) -> OptimResult:
    """The lowest-loss run, ties going to the earliest start.

    Raises:
        RuntimeError: If every run failed.
    """
    finished = [(r.loss_opt, i, r) for i, r in enumerate(results) if r is not None]
    if not finished:
        raise RuntimeError("Every start failed")

    return min(finished, key=lambda item: (item[0], item[1]))[2]


def multistart(
    problem: ControlProblem,
    starts: Sequence[Dict[str, float]],
    options: LbfgsOptions = LbfgsOptions(),
    scales: Optional[Dict[str, float]] = None,
    threads: int = 1,
) -> OptimResult:
    """Runs minimize from several starts and returns the best run."""
    return best_result(run_starts(problem, starts, options, scales, threads))
