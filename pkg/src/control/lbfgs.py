from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, List, Optional, Tuple
import logging
import warnings
import numpy as np
import scipy.optimize
from scipy.optimize._linesearch import LineSearchWarning
from numerics.linalg import RVec
from control.problem import ControlProblem, Objective

logger = logging.getLogger(__name__)

FunAndGrad = Callable[[RVec], Tuple[float, RVec]]


@dataclass(frozen=True)
class LbfgsOptions:
    """
    Settings of the L-BFGS minimiser.

    Attributes:
        history (int): Number of stored (step, gradient change) pairs.
        c1 (float): Sufficient-decrease constant of the Wolfe conditions.
        c2 (float): Curvature constant of the strong Wolfe conditions.
        gtol (float): Stop when the gradient ∞-norm falls below this.
        ftol (float): Stop when the relative loss decrease stays below this...
        ftol_window (int): ...for this many consecutive iterations.
        max_iter (int): Iteration cap.
        line_search_max_iter (int): Iteration cap of a single line search.
    """

    history: int = 10
    c1: float = 1e-4
    c2: float = 0.9
    gtol: float = 1e-8
    ftol: float = 1e-12
    ftol_window: int = 3
    max_iter: int = 500
    line_search_max_iter: int = 20

    def __post_init__(self) -> None:
        if self.history < 1:
            raise ValueError(f"history must be at least 1, got {self.history}")
        if not 0 < self.c1 < self.c2 < 1:
            raise ValueError(f"Need 0 < c1 < c2 < 1, got c1={self.c1}, c2={self.c2}")
        if self.max_iter < 0:
            raise ValueError(f"max_iter must be non-negative, got {self.max_iter}")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    loss: float
    grad_norm: float


@dataclass
class LbfgsResult:
    """
    Outcome of an L-BFGS run: the best point seen, never worse than the start.

    Attributes:
        x (RVec): Best point.
        fun (float): Loss at x.
        grad (RVec): Gradient at x.
        iterations (int): Completed iterations.
        converged (bool): Whether the gradient test was met.
        message (str): Why the run stopped.
        history (List[IterationRecord]): Loss and gradient norm per iteration.
    """

    x: RVec
    fun: float
    grad: RVec
    iterations: int
    converged: bool
    message: str
    history: List[IterationRecord] = field(default_factory=list)

    @property
    def grad_norm(self) -> float:
        return float(np.max(np.abs(self.grad))) if self.grad.size else 0.0


class InverseHessian:
    """
    Limited-memory inverse Hessian, applied by the two-loop recursion with
    the initial matrix scaled by sᵀy / yᵀy of the newest pair.
    """

    def __init__(self, history: int) -> None:
        self._pairs: Deque[Tuple[float, RVec, RVec]] = deque(maxlen=history)

    def __len__(self) -> int:
        return len(self._pairs)

    def clear(self) -> None:
        self._pairs.clear()

    def append(self, s: RVec, y: RVec) -> bool:
        """Stores a pair if it has positive curvature; returns whether it did."""
        curvature = float(np.dot(s, y))
        scale = float(np.linalg.norm(s) * np.linalg.norm(y))
        if curvature <= np.finfo(np.float64).eps * scale:
            return False

        self._pairs.append((1.0 / curvature, s.copy(), y.copy()))
        return True

    def apply(self, g: RVec) -> RVec:
        """H·g for the current approximation H of the inverse Hessian."""
        q = g.copy()
        alphas: List[float] = []
        for rho, s, y in reversed(self._pairs):
            alpha = rho * float(np.dot(s, q))
            q -= alpha * y
            alphas.append(alpha)
        alphas.reverse()

        if self._pairs:
            _, s, y = self._pairs[-1]
            q *= float(np.dot(s, y) / np.dot(y, y))

        for (rho, s, y), alpha in zip(self._pairs, alphas):
            beta = rho * float(np.dot(y, q))
            q += (alpha - beta) * s

        return q


class _Tracker:
    """Caches evaluations for the line search and remembers the best point."""

    def __init__(self, fun_and_grad: FunAndGrad) -> None:
        self.fun_and_grad = fun_and_grad
        self.best: Optional[Tuple[float, RVec, RVec]] = None
        self._last: Dict[bytes, Tuple[float, RVec]] = {}

    def __call__(self, x: RVec) -> Tuple[float, RVec]:
        key = x.tobytes()
        if key not in self._last:
            value, gradient = self.fun_and_grad(x)
            gradient = np.asarray(gradient, dtype=np.float64)
            if not np.isfinite(value) or not np.all(np.isfinite(gradient)):
                raise FloatingPointError(f"Non-finite loss or gradient at {x}")
            self._last = {key: (float(value), gradient)}
            if self.best is None or value < self.best[0]:
                self.best = (float(value), x.copy(), gradient.copy())

        value, gradient = self._last[key]
        return value, gradient.copy()

    def fun(self, x: RVec) -> float:
        return self(x)[0]

    def jac(self, x: RVec) -> RVec:
        return self(x)[1]


def _line_search(
    tracker: _Tracker,
    x: RVec,
    direction: RVec,
    value: float,
    gradient: RVec,
    options: LbfgsOptions,
) -> Optional[float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LineSearchWarning)
        step = scipy.optimize.line_search(
            tracker.fun,
            tracker.jac,
            x,
            direction,
            gfk=gradient,
            old_fval=value,
            c1=options.c1,
            c2=options.c2,
            maxiter=options.line_search_max_iter,
        )[0]

    return None if step is None else float(step)


def lbfgs(
    fun_and_grad: FunAndGrad, x0: RVec, options: LbfgsOptions = LbfgsOptions()
) -> LbfgsResult:
    """Minimises a smooth function by L-BFGS with a strong-Wolfe line search.

    The first step (and any step after a line-search failure, which resets
    the history) moves along the unit steepest-descent direction.

    Args:
        fun_and_grad (FunAndGrad): Returns the loss and its gradient.
        x0 (RVec): Starting point.
        options (LbfgsOptions): Settings.

    Returns:
        LbfgsResult: The best point evaluated.

    Raises:
        FloatingPointError: If the loss or gradient is not finite at x0.
    """
    tracker = _Tracker(fun_and_grad)
    hessian = InverseHessian(options.history)

    x = np.asarray(x0, dtype=np.float64).copy()
    value, gradient = tracker(x)
    history = [IterationRecord(0, value, float(np.max(np.abs(gradient), initial=0.0)))]

    converged = False
    message = "maximum iterations reached"
    stalled = 0
    iteration = 0

    while True:
        grad_norm = float(np.max(np.abs(gradient), initial=0.0))
        if grad_norm < options.gtol:
            converged, message = True, "gradient norm below tolerance"
            break
        if iteration >= options.max_iter:
            break

        if len(hessian):
            direction = -hessian.apply(gradient)
        else:
            direction = -gradient / np.linalg.norm(gradient)

        step = None
        try:
            step = _line_search(tracker, x, direction, value, gradient, options)
        except (FloatingPointError, RuntimeError) as e:
            logger.debug("Line search left the feasible region: %s", e)

        if step is None:
            if len(hessian):
                logger.debug("Line search failed, resetting the L-BFGS history")
                hessian.clear()
                continue
            message = "line search failed"
            break

        x_new = x + step * direction
        value_new, gradient_new = tracker(x_new)
        hessian.append(x_new - x, gradient_new - gradient)

        decrease = (value - value_new) / max(abs(value), np.finfo(np.float64).tiny)
        stalled = stalled + 1 if decrease < options.ftol else 0

        x, value, gradient = x_new, value_new, gradient_new
        iteration += 1
        history.append(
            IterationRecord(iteration, value, float(np.max(np.abs(gradient))))
        )
        logger.debug(
            "L-BFGS iteration %d: loss %.10g, |g|∞ %.3e, step %.3e",
            iteration,
            value,
            history[-1].grad_norm,
            step,
        )

        if stalled >= options.ftol_window:
            message = "relative loss decrease below tolerance"
            break

    assert tracker.best is not None
    best_value, best_x, best_gradient = tracker.best
    if best_value < value:
        x, value, gradient = best_x, best_value, best_gradient
        converged = bool(np.max(np.abs(gradient), initial=0.0) < options.gtol)

    return LbfgsResult(x, value, gradient, iteration, converged, message, history)


@dataclass
class OptimResult:
    """
    Outcome of minimising a ControlProblem.

    Attributes:
        params_opt (Dict[str, float]): Full parameter point at the optimum.
        loss_opt (float): n̄_T there.
        gradient_norm (float): ∞-norm of the gradient in the scaled variables.
        iterations (int): L-BFGS iterations.
        converged (bool): Whether the gradient test was met.
        message (str): Why the run stopped.
        history (List[IterationRecord]): Per-iteration loss and gradient norm.
        scales (Dict[str, float]): Scale dividing each free parameter.
        start (Dict[str, float]): The starting parameter point.
        evaluations (int): Propagations with gradient performed.
    """

    params_opt: Dict[str, float]
    loss_opt: float
    gradient_norm: float
    iterations: int
    converged: bool
    message: str
    history: List[IterationRecord]
    scales: Dict[str, float]
    start: Dict[str, float]
    evaluations: int = 0


def minimize(
    problem: ControlProblem,
    options: LbfgsOptions = LbfgsOptions(),
    scales: Optional[Dict[str, float]] = None,
) -> OptimResult:
    """Minimises n̄_T over the free parameters of a problem.

    The optimiser works on x / s, with s the characteristic scale of each
    free parameter.

    Args:
        problem (ControlProblem): The problem, starting at its initial guess.
        options (LbfgsOptions): L-BFGS settings.
        scales (Optional[Dict[str, float]]): Scale overrides by parameter name.

    Returns:
        OptimResult: The best point found.

    Raises:
        RuntimeError: If the loss cannot be evaluated at the initial guess.
    """
    scale = problem.scales(scales)
    objective = Objective(problem)

    def scaled(z: RVec) -> Tuple[float, RVec]:
        value, gradient = objective(z * scale)
        return value, gradient * scale

    try:
        result = lbfgs(scaled, problem.initial_guess / scale, options)
    except FloatingPointError as e:
        raise RuntimeError(
            f"Loss is not finite at the initial guess {problem.base_params}"
        ) from e

    params_opt = problem.params(result.x * scale)
    logger.info(
        "%s T=%g: n̄_T %.6g after %d iterations (%s) at %s",
        problem.scheme.name,
        problem.horizon,
        result.fun,
        result.iterations,
        result.message,
        {k: round(v, 6) for k, v in params_opt.items()},
    )

    return OptimResult(
        params_opt=params_opt,
        loss_opt=result.fun,
        gradient_norm=result.grad_norm,
        iterations=result.iterations,
        converged=result.converged,
        message=result.message,
        history=result.history,
        scales=dict(zip(problem.free, scale.tolist())),
        start=problem.base_params,
        evaluations=objective.evaluations,
    )
