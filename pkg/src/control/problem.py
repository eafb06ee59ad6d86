from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple
import logging
import numpy as np
from numerics.linalg import FrechetMethod, RVec, expm, expm_frechet
from physics.fock import DensityMatrix, SpaceSpec, phonon_number
from physics.liouville import vec
from physics.schemes import (
    ControlParams,
    LindbladFamily,
    PhysicalConstants,
    SchemeId,
    lindblad_family,
    parameter_scale,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ControlProblem:
    """
    Minimise the mean phonon number n̄_T = tr(n̂ e^{𝓛(α)T} ρ₀) over the free
    laser parameters α with the rest held fixed.

    Attributes:
        scheme (SchemeId): The cooling scheme.
        consts (PhysicalConstants): Fixed physical constants.
        space (SpaceSpec): Hilbert space of the model.
        rho0 (DensityMatrix): Initial state.
        horizon (float): Cooling time T in units of 1/ν.
        free (Tuple[str, ...]): Optimised parameter names, in vector order.
        fixed (Dict[str, float]): Values of the remaining parameters.
        initial_guess (RVec): Starting values of the free parameters.
        frechet_method (FrechetMethod): Algorithm for the exact gradient.
    """

    scheme: SchemeId
    consts: PhysicalConstants
    space: SpaceSpec
    rho0: DensityMatrix
    horizon: float
    free: Tuple[str, ...]
    fixed: Dict[str, float]
    initial_guess: RVec = field(repr=False)
    frechet_method: FrechetMethod = "blockEnlarge"

    def __post_init__(self) -> None:
        names = set(self.scheme.parameter_names)
        free, fixed = set(self.free), set(self.fixed)

        if len(free) != len(self.free):
            raise ValueError(f"Free parameters repeat a name: {self.free}")
        if free & fixed:
            raise ValueError(
                f"Parameters both free and fixed: {sorted(free & fixed)}"
            )
        for name in free | fixed:
            if name not in names:
                raise KeyError(
                    f"Unknown parameter `{name}` for scheme {self.scheme.name}"
                )
        if free | fixed != names:
            raise KeyError(
                f"Parameters {sorted(names - free - fixed)} are neither free nor fixed"
            )

        guess = np.asarray(self.initial_guess, dtype=np.float64).reshape(-1)
        if guess.size != len(self.free):
            raise ValueError(
                f"Initial guess has {guess.size} entries "
                f"for {len(self.free)} free parameters"
            )
        if self.horizon < 0:
            raise ValueError(f"Horizon must be non-negative, got {self.horizon}")
        if self.rho0.space != self.space:
            raise ValueError("Initial state lives on a different space")

        object.__setattr__(self, "free", tuple(self.free))
        object.__setattr__(self, "fixed", dict(self.fixed))
        object.__setattr__(self, "initial_guess", guess)

    @classmethod
    def from_params(
        cls,
        scheme: SchemeId,
        consts: PhysicalConstants,
        space: SpaceSpec,
        rho0: DensityMatrix,
        horizon: float,
        params: Mapping[str, float],
        free: Sequence[str],
        frechet_method: FrechetMethod = "blockEnlarge",
    ) -> "ControlProblem":
        """Builds a problem from a full parameter point and a free set.

        Raises:
            KeyError: If params misses a scheme parameter.
        """
        missing = [name for name in scheme.parameter_names if name not in params]
        if missing:
            raise KeyError(f"Missing parameters {missing} for scheme {scheme.name}")

        return cls(
            scheme=scheme,
            consts=consts,
            space=space,
            rho0=rho0,
            horizon=horizon,
            free=tuple(free),
            fixed={k: float(v) for k, v in params.items() if k not in free},
            initial_guess=np.array([params[name] for name in free], dtype=np.float64),
            frechet_method=frechet_method,
        )

    @property
    def family(self) -> LindbladFamily:
        return lindblad_family(self.scheme, self.consts, self.space)

    @property
    def base_params(self) -> ControlParams:
        """The full parameter point at the initial guess."""
        return self.params(self.initial_guess)

    def params(self, x: RVec) -> ControlParams:
        """Merges a free-parameter vector with the fixed values."""
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.size != len(self.free):
            raise ValueError(f"Expected {len(self.free)} free values, got {x.size}")

        point = dict(self.fixed)
        point.update({name: float(value) for name, value in zip(self.free, x)})

        return {name: point[name] for name in self.scheme.parameter_names}

    def vector(self, params: Mapping[str, float]) -> RVec:
        """Extracts the free-parameter vector from a parameter point."""
        return np.array([params[name] for name in self.free], dtype=np.float64)

    def scales(self, overrides: Optional[Mapping[str, float]] = None) -> RVec:
        """Characteristic scales of the free parameters."""
        overrides = overrides or {}
        scales = [
            overrides.get(name, parameter_scale(self.scheme, name))
            for name in self.free
        ]
        return np.array(scales, dtype=np.float64)

    def respecify(
        self,
        free: Sequence[str],
        values: Optional[Mapping[str, float]] = None,
        horizon: Optional[float] = None,
    ) -> "ControlProblem":
        """The same model with another free set.

        Args:
            free (Sequence[str]): New free parameters.
            values (Optional[Mapping[str, float]]): Parameter values overriding
                the current base point (fixed values or initial guesses).
            horizon (Optional[float]): New cooling time.
        """
        point = self.base_params
        point.update(values or {})

        return ControlProblem.from_params(
            self.scheme,
            self.consts,
            self.space,
            self.rho0,
            self.horizon if horizon is None else horizon,
            point,
            free,
            self.frechet_method,
        )


def _propagation_error(
    problem: ControlProblem, x: RVec, error: Exception
) -> RuntimeError:
    values = {**problem.fixed, **dict(zip(problem.free, np.ravel(x).tolist()))}
    point = ", ".join(f"{k}={v:.6g}" for k, v in values.items())
    return RuntimeError(
        f"Propagation failed for {problem.scheme.name} at ({point}), "
        f"T = {problem.horizon}: {error}"
    )


def loss(problem: ControlProblem, x: RVec) -> float:
    """n̄_T at the free parameters x.

    Raises:
        RuntimeError: If assembling or propagating fails; the message carries
            the parameter point.
    """
    try:
        generator = problem.family.lindbladian(problem.params(x))
        final = expm(generator.matrix * problem.horizon) @ vec(problem.rho0.matrix)
        number = vec(phonon_number(problem.space))
        return float(np.real(np.vdot(number, final)))
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        raise _propagation_error(problem, x, e) from e


def grad(problem: ControlProblem, x: RVec) -> Tuple[float, RVec]:
    """n̄_T and its exact gradient with respect to the free parameters.

    Every parameter enters 𝓛 linearly, so
    ∂n̄_T/∂αᵢ = Re vec(n̂)† L_exp(𝓛T, Gᵢ T) vec(ρ₀), where L_exp is the
    Fréchet derivative of the exponential and Gᵢ = ∂𝓛/∂αᵢ. The loss comes
    from the exponential computed alongside the first derivative.

    Raises:
        RuntimeError: As for loss.
    """
    if not problem.free:
        return loss(problem, x), np.zeros(0, dtype=np.float64)

    try:
        family = problem.family
        horizon = problem.horizon
        generator = family.lindbladian(problem.params(x)).matrix * horizon
        number = vec(phonon_number(problem.space))
        rho0 = vec(problem.rho0.matrix)

        gradient = np.empty(len(problem.free), dtype=np.float64)
        propagator = None
        for i, name in enumerate(problem.free):
            direction = family.generators[name].matrix * horizon
            expm_a, frechet = expm_frechet(generator, direction, problem.frechet_method)
            if propagator is None:
                propagator = expm_a
            gradient[i] = float(np.real(np.vdot(number, frechet @ rho0)))

        assert propagator is not None
        value = float(np.real(np.vdot(number, propagator @ rho0)))
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        raise _propagation_error(problem, x, e) from e

    return value, gradient


class Objective:
    """
    Loss-and-gradient callable over a ControlProblem that memoises its
    evaluations, so a line search asking for f and f' at the same point
    triggers one propagation.
    """

    def __init__(self, problem: ControlProblem, cache_size: int = 8) -> None:
        self.problem = problem
        self.cache_size = cache_size
        self.evaluations = 0
        self._cache: Dict[bytes, Tuple[float, RVec]] = {}

    def __call__(self, x: RVec) -> Tuple[float, RVec]:
        x = np.asarray(x, dtype=np.float64)
        key = x.tobytes()
        if key not in self._cache:
            if len(self._cache) >= self.cache_size:
                self._cache.pop(next(iter(self._cache)))
            self.evaluations += 1
            self._cache[key] = grad(self.problem, x)

        value, gradient = self._cache[key]
        return value, gradient.copy()
