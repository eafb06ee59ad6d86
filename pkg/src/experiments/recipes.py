from contextlib import ExitStack
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence
import logging
import math
import numpy as np
from config.loader import ExperimentConfig
from control.lbfgs import OptimResult, minimize
from control.problem import ControlProblem, grad, loss
from control.scans import best_result, run_starts, scan1d, scan2d
from experiments.output import CsvTable, OutputDirectory
from physics.dynamics import (
    DEFAULT_FIT_START,
    DEFAULT_SAMPLES,
    RateFit,
    Trajectory,
    fit_rate,
    mean_phonon,
    trajectory,
)
from physics.fock import DensityMatrix, SpaceSpec, thermal_state
from physics.liouville import steady_state
from physics.schemes import (
    ControlParams,
    PhysicalConstants,
    SchemeId,
    ac_stark,
    build,
    eit3_to_eit4_params,
    eit_rabi_from_condition,
    shifted_resonance,
    steady_formula,
)

logger = logging.getLogger(__name__)

Recipe = Callable[[ExperimentConfig, OutputDirectory], Dict[str, Any]]

# Gradients smaller than this are compared absolutely in gradcheck.
GRADCHECK_FLOOR = 1e-3

# Multistart seeds on the δ = ν line for the four-level comparison.
SEED_DETUNINGS = (60.0, 110.0, 160.0)
SEED_RATIO = 0.15

DIAGNOSTIC_COLUMNS: Dict[SchemeId, List[str]] = {
    SchemeId.RWSC: ["resonance_residual", "nbar_formula"],
    SchemeId.SWSC: ["resonance_residual", "nbar_formula"],
    SchemeId.EIT3: ["ac_stark", "ratio", "nbar_formula"],
    SchemeId.EIT4: [],
}


def initial_state(
    config: ExperimentConfig, space: Optional[SpaceSpec] = None
) -> DensityMatrix:
    return thermal_state(config.nbar0, space or config.space, config.level)


def control_problem(
    config: ExperimentConfig,
    horizon: float,
    free: Optional[Sequence[str]] = None,
    params: Optional[Mapping[str, float]] = None,
) -> ControlProblem:
    """The config's model at one horizon, free set and parameter point."""
    return ControlProblem.from_params(
        config.scheme,
        config.consts,
        config.space,
        initial_state(config),
        horizon,
        config.params if params is None else params,
        config.control.free if free is None else free,
        config.control.frechet_method,
    )


def diagnostics(
    scheme: SchemeId, consts: PhysicalConstants, params: Mapping[str, float]
) -> Dict[str, Optional[float]]:
    """Reference quantities plotted next to the scan curves."""
    match scheme:
        case SchemeId.RWSC | SchemeId.SWSC:
            return {
                "resonance_residual": shifted_resonance(
                    params["delta"], params["omega"], consts.nu
                ),
                "nbar_formula": steady_formula(scheme, consts, params),
            }
        case SchemeId.EIT3:
            omega_g, omega_r = params["omega_g"], params["omega_r"]
            return {
                "ac_stark": ac_stark(params["delta"], omega_g, omega_r),
                "ratio": omega_g / omega_r if omega_r != 0 else math.nan,
                "nbar_formula": steady_formula(scheme, consts, params),
            }
        case SchemeId.EIT4:
            return {}


def eit_seed_starts(
    scheme: SchemeId,
    nu: float = 1.0,
    detunings: Sequence[float] = SEED_DETUNINGS,
    ratio: float = SEED_RATIO,
) -> List[ControlParams]:
    """EIT starting points on the δ = ν line, one per detuning."""
    starts: List[ControlParams] = []
    for delta in detunings:
        omega_g, omega_r = eit_rabi_from_condition(delta * nu, ratio, nu)
        if scheme is SchemeId.EIT4:
            starts.append(
                {
                    "delta_g": delta * nu,
                    "delta_r": delta * nu,
                    "omega_g": omega_g,
                    "omega_r": omega_r,
                }
            )
        else:
            starts.append({"delta": delta * nu, "omega_g": omega_g, "omega_r": omega_r})

    return starts


def random_point(
    scheme: SchemeId, consts: PhysicalConstants, rng: np.random.Generator
) -> ControlParams:
    """A random parameter point in the region where the scheme cools."""
    nu = consts.nu
    match scheme:
        case SchemeId.RWSC | SchemeId.SWSC:
            return {
                "delta": float(rng.uniform(-1.5, -0.5)) * nu,
                "omega": float(rng.uniform(0.05, 1.0)) * nu,
            }
        case SchemeId.EIT3 | SchemeId.EIT4:
            delta = float(rng.uniform(30.0, 150.0)) * nu
            ratio = float(rng.uniform(0.1, 2.0))
            omega_g, omega_r = eit_rabi_from_condition(delta, ratio, nu)
            omega_g *= float(rng.uniform(0.8, 1.2))
            omega_r *= float(rng.uniform(0.8, 1.2))
            if scheme is SchemeId.EIT3:
                return {"delta": delta, "omega_g": omega_g, "omega_r": omega_r}
            return {
                "delta_g": delta,
                "delta_r": delta + float(rng.uniform(-1.0, 1.0)) * nu,
                "omega_g": omega_g,
                "omega_r": omega_r,
            }


def central_difference(
    problem: ControlProblem, x: np.ndarray, index: int, step: float
) -> float:
    """∂n̄_T/∂xᵢ by central differences with h = step·max(1, |xᵢ|)."""
    h = step * max(1.0, abs(float(x[index])))
    forward, backward = x.copy(), x.copy()
    forward[index] += h
    backward[index] -= h

    return (loss(problem, forward) - loss(problem, backward)) / (2.0 * h)


def relative_error(analytic: float, numeric: float) -> float:
    scale = max(abs(analytic), abs(numeric), GRADCHECK_FLOOR)
    return abs(analytic - numeric) / scale


def cooling_curve(
    scheme: SchemeId,
    consts: PhysicalConstants,
    params: Mapping[str, float],
    rho0: DensityMatrix,
    t_final: float,
    samples: int = DEFAULT_SAMPLES,
    label: str = "",
) -> Trajectory:
    l = build(scheme, consts, params, rho0.space)
    provenance = {"scheme": scheme.value, "params": dict(params), "label": label}
    return trajectory(l, rho0, t_final, samples, provenance)


def _fit_summary(fit: RateFit) -> Dict[str, Any]:
    return {
        "W": fit.rate,
        "nbar_inf": fit.nbar_inf,
        "amplitude": fit.amplitude,
        "residual": fit.residual,
        "fit_converged": fit.converged,
        "window_start": fit.window_start,
    }


def _write_history(history: CsvTable, horizon: float, result: OptimResult) -> None:
    for record in result.history:
        history.write(
            {
                "horizon": horizon,
                "iteration": record.iteration,
                "loss": record.loss,
                "grad_norm": record.grad_norm,
            }
        )


def _optimize_horizon(
    config: ExperimentConfig, horizon: float, starts_table: Optional[CsvTable]
) -> OptimResult:
    problem = control_problem(config, horizon)
    control = config.control
    if not control.starts:
        return minimize(problem, control.options, control.scales)

    results = run_starts(
        problem, control.starts, control.options, control.scales, config.output.threads
    )
    assert starts_table is not None
    for index, (start, result) in enumerate(zip(control.starts, results)):
        row: Dict[str, Any] = {"horizon": horizon, "start": index}
        row.update({f"start_{k}": v for k, v in start.items()})
        if result is not None:
            row.update(result.params_opt)
            row.update(nbar_T=result.loss_opt, converged=result.converged)
        starts_table.write(row)

    return best_result(results)


def run_optimize(config: ExperimentConfig, out: OutputDirectory) -> Dict[str, Any]:
    """Minimises n̄_T at every horizon, from several starts when given."""
    names = list(config.scheme.parameter_names)
    fit = config.evolve
    columns = [
        "horizon",
        *names,
        "nbar_T",
        "grad_norm",
        "iters",
        "converged",
        "message",
    ]
    if fit is not None:
        columns += ["W", "nbar_inf", "nbar_t_final"]
    start_columns = [
        "horizon",
        "start",
        *[f"start_{name}" for name in config.control.free],
        *names,
        "nbar_T",
        "converged",
    ]

    summary: List[Dict[str, Any]] = []
    with ExitStack() as stack:
        table = stack.enter_context(out.table(columns))
        history = stack.enter_context(
            out.table(["horizon", "iteration", "loss", "grad_norm"], "history")
        )
        starts_table = None
        if config.control.starts:
            starts_table = stack.enter_context(out.table(start_columns, "starts"))

        for horizon in config.control.horizons:
            result = _optimize_horizon(config, horizon, starts_table)
            _write_history(history, horizon, result)

            row: Dict[str, Any] = {
                "horizon": horizon,
                **result.params_opt,
                "nbar_T": result.loss_opt,
                "grad_norm": result.gradient_norm,
                "iters": result.iterations,
                "converged": result.converged,
                "message": result.message,
            }
            entry: Dict[str, Any] = {
                "horizon": horizon,
                "params": result.params_opt,
                "nbar_T": result.loss_opt,
                "converged": result.converged,
            }
            if fit is not None:
                curve = cooling_curve(
                    config.scheme,
                    config.consts,
                    result.params_opt,
                    initial_state(config),
                    fit.t_final,
                    fit.samples,
                )
                rate = fit_rate(curve, fit.fit_start)
                row.update(
                    W=rate.rate, nbar_inf=rate.nbar_inf, nbar_t_final=curve.final_nbar
                )
                entry["fit"] = _fit_summary(rate)

            table.write(row)
            summary.append(entry)

    return {"optima": summary}


def run_scan1d(config: ExperimentConfig, out: OutputDirectory) -> Dict[str, Any]:
    """Warm-started inner optimisation along one parameter, per horizon."""
    scan = config.scan
    assert scan is not None
    others = [n for n in config.scheme.parameter_names if n != scan.param]
    extra = DIAGNOSTIC_COLUMNS[config.scheme]
    columns = [
        "horizon",
        scan.param,
        *others,
        "nbar_T",
        "converged",
        "iterations",
        *extra,
        "error",
    ]

    failures = 0
    best: List[Dict[str, Any]] = []
    with out.table(columns) as table:
        for horizon in config.control.horizons:
            problem = control_problem(config, horizon, free=scan.inner)
            rows = scan1d(
                problem,
                scan.param,
                scan.grid,
                scan.inner,
                config.control.options,
                config.control.scales,
            )
            for row in rows:
                record: Dict[str, Any] = {
                    "horizon": horizon,
                    **row.params,
                    scan.param: row.value,
                    "nbar_T": row.nbar,
                    "converged": row.converged,
                    "iterations": row.iterations,
                    "error": row.error,
                }
                record.update(diagnostics(config.scheme, config.consts, row.params))
                table.write(record)

            finished = [row for row in rows if row.error is None]
            failures += len(rows) - len(finished)
            if finished:
                lowest = min(finished, key=lambda row: row.nbar)
                best.append(
                    {"horizon": horizon, "params": lowest.params, "nbar_T": lowest.nbar}
                )

    return {"minima": best, "failed_points": failures}


def run_scan2d(config: ExperimentConfig, out: OutputDirectory) -> Dict[str, Any]:
    """n̄_T on a parameter grid, per horizon."""
    scan = config.scan
    assert scan is not None and scan.param2 is not None

    failures = 0
    with out.table(["horizon", scan.param, scan.param2, "nbar_T", "error"]) as table:
        for horizon in config.control.horizons:
            problem = control_problem(config, horizon)
            cells = scan2d(
                problem,
                scan.param,
                scan.grid,
                scan.param2,
                scan.grid2,
                config.output.threads,
            )
            for cell in cells:
                failures += cell.error is not None
                table.write(
                    {
                        "horizon": horizon,
                        scan.param: cell.value1,
                        scan.param2: cell.value2,
                        "nbar_T": cell.nbar,
                        "error": cell.error,
                    }
                )

    cells = len(scan.grid) * len(scan.grid2) * len(config.control.horizons)
    return {"cells": cells, "failed_points": failures}


def run_evolve(config: ExperimentConfig, out: OutputDirectory) -> Dict[str, Any]:
    """n̄(t) at the configured parameters, with an exponential rate fit."""
    settings = config.evolve
    assert settings is not None

    curve = cooling_curve(
        config.scheme,
        config.consts,
        config.params,
        initial_state(config),
        settings.t_final,
        settings.samples,
    )
    with out.table(["t", "nbar"]) as table:
        for t, nbar in zip(curve.times, curve.nbar):
            table.write({"t": t, "nbar": nbar})

    summary: Dict[str, Any] = {"params": config.params, "nbar_final": curve.final_nbar}
    if settings.fit:
        summary["fit"] = _fit_summary(fit_rate(curve, settings.fit_start))

    return summary


def run_steady(config: ExperimentConfig, out: OutputDirectory) -> Dict[str, Any]:
    """Exact steady-state n̄ beside the weak-coupling formula."""
    names = list(config.scheme.parameter_names)
    points: List[ControlParams] = [dict(config.params)]
    if config.scan is not None:
        points = [{**config.params, config.scan.param: v} for v in config.scan.grid]

    failures = 0
    columns = [*names, "nbar_steady", "nbar_formula", "rel_deviation", "error"]
    with out.table(columns) as table:
        for params in points:
            row: Dict[str, Any] = dict(params)
            formula = steady_formula(config.scheme, config.consts, params)
            row["nbar_formula"] = formula
            try:
                l = build(config.scheme, config.consts, params, config.space)
                rho = steady_state(l)
            except ValueError as e:
                logger.warning("Steady state failed at %s: %s", params, e)
                failures += 1
                row["error"] = str(e)
                table.write(row)
                continue

            exact = mean_phonon(rho)
            row["nbar_steady"] = exact
            if formula is not None and math.isfinite(formula) and formula > 0:
                row["rel_deviation"] = abs(exact - formula) / formula
            table.write(row)

    if failures == len(points):
        raise RuntimeError("Steady state failed at every point")

    return {"points": len(points), "failed_points": failures}


def run_gradcheck(config: ExperimentConfig, out: OutputDirectory) -> Dict[str, Any]:
    """Exact gradient against central differences at random points.

    Raises:
        RuntimeError: If the largest relative error exceeds the tolerance.
    """
    settings = config.gradcheck
    rng = np.random.default_rng(settings.seed)
    worst = 0.0

    columns = ["horizon", "point", "param", "value", "analytic", "numeric", "rel_err"]
    with out.table(columns) as table:
        for horizon in config.control.horizons:
            for point in range(settings.points):
                sampled = random_point(config.scheme, config.consts, rng)
                free = {k: sampled[k] for k in config.control.free}
                params = {**config.params, **free}
                problem = control_problem(config, horizon, params=params)
                x = problem.initial_guess
                _, gradient = grad(problem, x)
                for i, name in enumerate(problem.free):
                    numeric = central_difference(problem, x, i, settings.step)
                    error = relative_error(float(gradient[i]), numeric)
                    worst = max(worst, error)
                    table.write(
                        {
                            "horizon": horizon,
                            "point": point,
                            "param": name,
                            "value": float(x[i]),
                            "analytic": float(gradient[i]),
                            "numeric": numeric,
                            "rel_err": error,
                        }
                    )

    logger.info(
        "Largest relative gradient error %.3e (tolerance %g)", worst, settings.tolerance
    )
    if worst > settings.tolerance:
        raise RuntimeError(
            f"Gradient check failed: largest relative error {worst:.3e} "
            f"exceeds {settings.tolerance:g}"
        )

    return {"max_rel_err": worst, "tolerance": settings.tolerance}


def _compare_starts(
    config: ExperimentConfig, scheme: SchemeId, warm: Optional[ControlParams]
) -> List[Dict[str, float]]:
    """Configured starts for the configured scheme, δ = ν seeds otherwise,
    plus the optimum of the previous horizon.
    """
    if scheme is config.scheme and config.control.starts:
        starts = [dict(start) for start in config.control.starts]
    else:
        starts = eit_seed_starts(scheme, config.consts.nu)
    if warm is not None:
        starts.append(dict(warm))

    return starts


def _compare_row(
    config: ExperimentConfig,
    label: str,
    horizon: float,
    params: ControlParams,
    result: OptimResult,
    curves: CsvTable,
) -> Dict[str, Any]:
    """Evaluates four-level parameters over [0, t_eval] and fits the rate."""
    t_eval = config.compare.t_eval
    evolve = config.evolve
    samples = DEFAULT_SAMPLES if evolve is None else evolve.samples
    fit_start = DEFAULT_FIT_START if evolve is None else evolve.fit_start
    curve = cooling_curve(
        SchemeId.EIT4,
        config.consts,
        params,
        initial_state(config),
        t_eval,
        samples,
        label,
    )
    rate = fit_rate(curve, fit_start)
    for t, nbar in zip(curve.times, curve.nbar):
        curves.write({"t": t, "label": label, "nbar": nbar})

    return {
        "label": label,
        "T": horizon,
        **params,
        "W": rate.rate,
        f"nbar_{t_eval:g}": curve.final_nbar,
        "nbar_T": result.loss_opt,
        "converged": result.converged,
    }


def run_eit_compare(config: ExperimentConfig, out: OutputDirectory) -> Dict[str, Any]:
    """Optimal four-level conditions per horizon plus the three-level
    reduction evaluated in the four-level model, with n̄(t) curves.
    """
    settings = config.compare
    control = config.control
    threads = config.output.threads
    columns = [
        "label",
        "T",
        "omega_g",
        "omega_r",
        "delta_g",
        "delta_r",
        "W",
        f"nbar_{settings.t_eval:g}",
        "nbar_T",
        "converged",
    ]

    rows: List[Dict[str, Any]] = []
    with out.table(columns) as table, out.table(
        ["t", "label", "nbar"], "trajectories"
    ) as curves:
        warm: Optional[ControlParams] = None
        for horizon in settings.horizons:
            problem = control_problem(
                config, horizon, free=SchemeId.EIT4.parameter_names
            )
            starts = _compare_starts(config, SchemeId.EIT4, warm)
            result = best_result(
                run_starts(problem, starts, control.options, control.scales, threads)
            )
            warm = result.params_opt
            row = _compare_row(
                config, f"EIT4-{horizon:g}", horizon, result.params_opt, result, curves
            )
            table.write(row)
            rows.append(row)

        # the three-level model without |t⟩, evaluated in the four-level one
        reduced = config.consts.eit3_reduction()
        space = SpaceSpec(SchemeId.EIT3.internal_dim, config.space.fock_dim)
        horizon = settings.eit3_horizon
        starts = _compare_starts(config, SchemeId.EIT3, None)
        problem = ControlProblem.from_params(
            SchemeId.EIT3,
            reduced,
            space,
            initial_state(config, space),
            horizon,
            starts[0],
            SchemeId.EIT3.parameter_names,
            control.frechet_method,
        )
        result = best_result(
            run_starts(problem, starts, control.options, control.scales, threads)
        )
        params = eit3_to_eit4_params(result.params_opt)
        row = _compare_row(config, f"EIT3-{horizon:g}", horizon, params, result, curves)
        table.write(row)
        rows.append(row)

    return {"rows": rows}


RECIPES: Dict[str, Recipe] = {
    "optimize": run_optimize,
    "scan1d": run_scan1d,
    "scan2d": run_scan2d,
    "evolve": run_evolve,
    "steady": run_steady,
    "gradcheck": run_gradcheck,
    "eit_compare": run_eit_compare,
}
