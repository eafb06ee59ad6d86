from dataclasses import dataclass, field
from typing import Any, Dict, Optional
import logging
import warnings
import numpy as np
from numpy.typing import NDArray
import scipy.optimize
from numerics.linalg import CMat, RVec, expm, hermitize
from physics.fock import DensityMatrix, SpaceSpec, phonon_number
from physics.liouville import Superoperator, unvec, vec

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 121
DEFAULT_FIT_START = 5.0
MIN_FIT_SAMPLES = 10

FIT_MAX_EVALUATIONS = 100
FIT_STEP_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Sampled mean phonon number n̄(t).

    Attributes:
        times (RVec): Strictly increasing sample times in units of 1/ν.
        nbar (RVec): n̄ at each sample.
        provenance (Dict[str, Any]): Scheme, parameters and anything else
            needed to regenerate the curve.
    """

    times: RVec
    nbar: RVec
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.times.shape != self.nbar.shape or self.times.ndim != 1:
            raise ValueError(
                "Trajectory times and nbar must be vectors of equal length"
            )
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("Trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def final_nbar(self) -> float:
        """n̄ at the last sample."""
        return float(self.nbar[-1])


@dataclass(frozen=True)
class RateFit:
    """
    Exponential fit n̄(t) ≈ nbar_inf + amplitude·e^{-W t}.

    Attributes:
        rate (float): Cooling rate W in units of ν.
        nbar_inf (float): Asymptotic n̄.
        amplitude (float): Amplitude of the decaying part at t = 0.
        residual (float): Root-mean-square residual over the fit window.
        converged (bool): Whether the solver converged to a decaying fit.
        window_start (float): First time included in the fit.
        iterations (int): Model evaluations used by the solver.
    """

    rate: float
    nbar_inf: float
    amplitude: float
    residual: float
    converged: bool
    window_start: float
    iterations: int


def phonon_expectation(space: SpaceSpec, matrix: CMat) -> float:
    """Re tr(n̂ ρ) on a raw matrix, without density-matrix validation."""
    number = phonon_number(space)
    return float(np.real(np.vdot(vec(number), vec(matrix))))


def mean_phonon(rho: DensityMatrix) -> float:
    """n̄ = Re tr(n̂ ρ) with n̂ = I_internal ⊗ a†a."""
    return phonon_expectation(rho.space, rho.matrix)


def evolve(l: Superoperator, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """Propagates ρ(t) = e^{𝓛t} ρ₀.

    Args:
        l (Superoperator): Time-independent generator.
        rho0 (DensityMatrix): Initial state.
        t (float): Evolution time in units of 1/ν.

    Returns:
        DensityMatrix: The Hermitised evolved state.

    Raises:
        ValueError: If t is negative or the spaces differ.
    """
    if t < 0:
        raise ValueError(f"Evolution time must be non-negative, got {t}")
    if l.space != rho0.space:
        raise ValueError("Generator and state live on different spaces")

    dim = rho0.space.dim
    propagated = expm(l.matrix * t) @ vec(rho0.matrix)

    return DensityMatrix(rho0.space, hermitize(unvec(propagated, (dim, dim))))


def trajectory(
    l: Superoperator,
    rho0: DensityMatrix,
    t_final: float,
    samples: int = DEFAULT_SAMPLES,
    provenance: Optional[Dict[str, Any]] = None,
) -> Trajectory:
    """Samples n̄(t) on a uniform grid over [0, t_final].

    The step propagator e^{𝓛Δt} is computed once and applied repeatedly.

    Raises:
        ValueError: If samples < 2 or t_final is not positive.
    """
    if samples < 2:
        raise ValueError(f"A trajectory needs at least 2 samples, got {samples}")
    if not t_final > 0:
        raise ValueError(f"Trajectory length must be positive, got {t_final}")

    times = np.linspace(0.0, t_final, samples)
    step = expm(l.matrix * (times[1] - times[0]))
    number = vec(phonon_number(rho0.space))

    state = vec(rho0.matrix)
    nbar = np.empty(samples, dtype=np.float64)
    nbar[0] = float(np.real(np.vdot(number, state)))
    for i in range(1, samples):
        state = step @ state
        nbar[i] = float(np.real(np.vdot(number, state)))

    logger.debug(
        "Trajectory over [0, %g] with %d samples: n̄ %.6g -> %.6g",
        t_final,
        samples,
        nbar[0],
        nbar[-1],
    )

    return Trajectory(times, nbar, dict(provenance or {}))


def _exponential(t: RVec, offset: float, amplitude: float, rate: float) -> RVec:
    return offset + amplitude * np.exp(-rate * t)


def _exponential_jacobian(
    t: RVec, offset: float, amplitude: float, rate: float
) -> NDArray[np.float64]:
    """Jacobian of c + A e^{-Wt} w.r.t. (c, A, W)."""
    decay = np.exp(-rate * t)
    return np.column_stack([np.ones_like(t), decay, -amplitude * t * decay])


def _initial_guess(t: RVec, y: RVec) -> NDArray[np.float64]:
    """Log-linear regression of y - y_end against t."""
    offset = float(y[-1])
    excess = y[:-1] - offset
    usable = excess > 0
    span = float(t[-1] - t[0])

    if np.count_nonzero(usable) >= 2:
        slope, intercept = np.polyfit(t[:-1][usable], np.log(excess[usable]), 1)
        if slope < 0:
            return np.array([offset, float(np.exp(intercept)), float(-slope)])

    return np.array([offset, float(y[0] - offset), 1.0 / span])


def fit_rate(traj: Trajectory, fit_start: float = DEFAULT_FIT_START) -> RateFit:
    """Least-squares exponential fit of a trajectory.

    The guess from a log-linear regression is refined by damped Gauss–Newton
    (Levenberg–Marquardt) with the analytic Jacobian.

    Args:
        traj (Trajectory): The sampled curve.
        fit_start (float): Samples before this time are left out.

    Returns:
        RateFit: The fit; converged is False when the solver gave up or
            the fitted rate is not positive.

    Raises:
        ValueError: If fewer than 10 samples lie in the fit window.
    """
    window = traj.times >= fit_start
    t, y = traj.times[window], traj.nbar[window]
    if t.size < MIN_FIT_SAMPLES:
        raise ValueError(
            f"Fit window from t = {fit_start} holds {t.size} samples, "
            f"need at least {MIN_FIT_SAMPLES}"
        )

    guess = _initial_guess(t, y)
    try:
        with warnings.catch_warnings():
            # Covariance is unused; a perfect fit makes it singular.
            warnings.simplefilter("ignore", scipy.optimize.OptimizeWarning)
            params, _, info, message, status = scipy.optimize.curve_fit(
                _exponential,
                t,
                y,
                p0=guess,
                jac=_exponential_jacobian,
                full_output=True,
                maxfev=FIT_MAX_EVALUATIONS,
                xtol=FIT_STEP_TOLERANCE,
                ftol=FIT_STEP_TOLERANCE,
            )
        converged = status in (1, 2, 3, 4)
        evaluations = int(info["nfev"])
    except RuntimeError as error:
        logger.warning("Rate fit failed: %s", error)
        params, message, converged, evaluations = guess, str(error), False, 0

    offset, amplitude, rate = (float(p) for p in params)
    residual = y - _exponential(t, offset, amplitude, rate)
    if rate <= 0:
        logger.warning("Trajectory is not decaying: fitted rate %.3e", rate)
        converged = False
    elif not converged:
        logger.warning("Rate fit did not converge: %s", message)

    return RateFit(
        rate=rate,
        nbar_inf=offset,
        amplitude=amplitude,
        residual=float(np.sqrt(np.mean(residual**2))),
        converged=converged,
        window_start=float(fit_start),
        iterations=evaluations,
    )
