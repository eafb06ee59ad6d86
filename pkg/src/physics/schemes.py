from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from math import pi, sqrt
from typing import Dict, List, Mapping, Optional, Tuple
import logging
import numpy as np
import scipy.constants
from numerics.linalg import CMat, eigh
from physics.fock import SpaceSpec, embed, level_op, number_op, position_op
from physics.liouville import (
    DipolePattern,
    RecoilChannel,
    Superoperator,
    hamiltonian_part,
    recoil_dissipator,
)

logger = logging.getLogger(__name__)

ControlParams = Dict[str, float]
SchemeTerms = Tuple[Dict[str, CMat], List[RecoilChannel]]

# Internal level indices; two-level schemes use G and E only.
G, E, R, T = 0, 1, 2, 3
LEVEL_NAMES = {"g": G, "e": E, "r": R, "t": T}


class SchemeId(Enum):
    """The four cooling schemes."""

    RWSC = "rwsc"  # running-wave sideband cooling
    SWSC = "swsc"  # standing-wave sideband cooling
    EIT3 = "eit3"  # Λ-system EIT cooling
    EIT4 = "eit4"  # four-level EIT cooling with the extra |t⟩ level

    @property
    def internal_dim(self) -> int:
        """Number of internal levels the scheme needs."""
        return {"rwsc": 2, "swsc": 2, "eit3": 3, "eit4": 4}[self.value]

    @property
    def parameter_names(self) -> Tuple[str, ...]:
        """Ordered names of the tunable laser parameters."""
        match self:
            case SchemeId.RWSC | SchemeId.SWSC:
                return ("delta", "omega")
            case SchemeId.EIT3:
                return ("delta", "omega_g", "omega_r")
            case SchemeId.EIT4:
                return ("delta_g", "delta_r", "omega_g", "omega_r")


def lamb_dicke(mass_u: float, wavelength_m: float, nu_angular: float) -> float:
    """Lamb–Dicke parameter η = k √(ħ / (2 m ν)) for a single ion.

    Args:
        mass_u (float): Ion mass in atomic mass units.
        wavelength_m (float): Laser wavelength in metres.
        nu_angular (float): Trap angular frequency in rad/s.
    """
    k = 2.0 * pi / wavelength_m
    mass = mass_u * scipy.constants.atomic_mass

    return k * sqrt(scipy.constants.hbar / (2.0 * mass * nu_angular))


# ⁴⁰Ca⁺ on the 397 nm S₁/₂ → P₁/₂ line in a 2π × 1.3 MHz trap.
CALCIUM_NU_MHZ = 1.3
CALCIUM_ETA = lamb_dicke(40.0, 397e-9, 2.0 * pi * CALCIUM_NU_MHZ * 1e6)


@dataclass(frozen=True)
class PhysicalConstants:
    """
    Fixed physical constants of a scheme, all rates in units of ν.

    Two-level schemes read eta/gamma; EIT3 reads eta_g/eta_r and
    gamma_g/gamma_r; EIT4 reads eta and gamma_g/gamma_r together with
    detuning_offset (Δ_t = Δ_g + detuning_offset).

    Attributes:
        nu (float): Trap frequency (the unit).
        eta (float): Lamb–Dicke parameter.
        gamma (float): Excited-state decay rate.
        eta_g (float): EIT3 Lamb–Dicke parameter of the g–e laser.
        eta_r (float): EIT3 Lamb–Dicke parameter of the r–e laser.
        gamma_g (float): Decay rate into |g⟩ (EIT4: the π-decays e→g, t→r).
        gamma_r (float): Decay rate into |r⟩ (EIT4: the σ-decays e→r, t→g).
        detuning_offset (float): Δ_t - Δ_g for EIT4.
        recoil_eta (Optional[float]): EIT3 recoil Lamb–Dicke parameter when it
            differs from the laser ones.
    """

    nu: float = 1.0
    eta: float = 0.1
    gamma: float = 0.1
    eta_g: float = 0.15
    eta_r: float = -0.15
    gamma_g: float = 20.0 / 3.0
    gamma_r: float = 40.0 / 3.0
    detuning_offset: float = 8.0
    recoil_eta: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.nu > 0:
            raise ValueError(f"Trap frequency must be positive, got {self.nu}")
        for name in ("gamma", "gamma_g", "gamma_r"):
            if not getattr(self, name) > 0:
                raise ValueError(f"Decay rate {name} must be positive")

    @classmethod
    def running_wave(cls) -> "PhysicalConstants":
        """Running-wave sideband constants: η = 0.1, γ = 0.1ν."""
        return cls(eta=0.1, gamma=0.1)

    @classmethod
    def standing_wave(cls) -> "PhysicalConstants":
        """Standing-wave sideband constants: η = 0.08, γ = 0.1ν."""
        return cls(eta=0.08, gamma=0.1)

    @classmethod
    def three_level(cls) -> "PhysicalConstants":
        """Λ-system EIT constants with counter-propagating lasers."""
        return cls(eta_g=0.15, eta_r=-0.15, gamma_g=20.0 / 3.0, gamma_r=40.0 / 3.0)

    @classmethod
    def calcium(cls) -> "PhysicalConstants":
        """⁴⁰Ca⁺ four-level constants: γ_g = 2π×20/3 MHz, γ_r = 2π×40/3 MHz,
        ν = 2π×1.3 MHz, η = CALCIUM_ETA, Δ_t = Δ_g + 8ν.
        """
        return cls(
            eta=CALCIUM_ETA,
            gamma_g=(20.0 / 3.0) / CALCIUM_NU_MHZ,
            gamma_r=(40.0 / 3.0) / CALCIUM_NU_MHZ,
            detuning_offset=8.0,
        )

    def eit3_reduction(self) -> "PhysicalConstants":
        """Three-level constants of the four-level setup with |t⟩ removed:
        both lasers carry -(√2/2)η, recoil keeps η.
        """
        projected = -sqrt(2.0) / 2.0 * self.eta
        return replace(self, eta_g=projected, eta_r=projected, recoil_eta=self.eta)


PRESETS = {
    "running_wave": PhysicalConstants.running_wave,
    "standing_wave": PhysicalConstants.standing_wave,
    "three_level": PhysicalConstants.three_level,
    "calcium": PhysicalConstants.calcium,
}


def motional_phase(d: int, eta: float) -> CMat:
    """e^{iηX} on the Fock factor, through the eigendecomposition of X."""
    eigenvalues, u = eigh(position_op(d))
    return (u * np.exp(1j * eta * eigenvalues)) @ u.conj().T


def motional_sine(d: int, eta: float) -> CMat:
    """sin(ηX) = (e^{iηX} - e^{-iηX}) / 2i."""
    forward = motional_phase(d, eta)
    return (forward - forward.conj().T) / 2j


def _coupling(space: SpaceSpec, bra: int, ket: int, motional: CMat) -> CMat:
    """½(|bra⟩⟨ket| ⊗ M + H.c.), the unit-Rabi-frequency coupling term."""
    term = embed(level_op(space.internal_dim, bra, ket), motional, space)
    return 0.5 * (term + term.conj().T)


def _projector(space: SpaceSpec, level: int) -> CMat:
    return embed(
        level_op(space.internal_dim, level, level),
        np.eye(space.fock_dim, dtype=np.complex128),
        space,
    )


class LindbladFamily:
    """
    The parametric Lindbladian 𝓛(α) = -i[H₀ + Σ αᵢ Hᵢ, ·] + 𝒟 of a scheme.

    Every laser parameter enters the Hamiltonian linearly, so the family is
    stored as a parameter-free drift plus one generator per parameter, and
    ∂𝓛/∂αᵢ is exactly the generator superoperator.

    Attributes:
        scheme (SchemeId): The cooling scheme.
        space (SpaceSpec): Hilbert space of the model.
        drift_hamiltonian (CMat): H₀.
        hamiltonian_generators (Dict[str, CMat]): ∂H/∂αᵢ.
        channels (List[RecoilChannel]): Decay channels of 𝒟.
        drift (Superoperator): -i[H₀, ·] + 𝒟.
        generators (Dict[str, Superoperator]): -i[∂H/∂αᵢ, ·].
    """

    def __init__(
        self,
        scheme: SchemeId,
        space: SpaceSpec,
        drift_hamiltonian: CMat,
        hamiltonian_generators: Dict[str, CMat],
        channels: List[RecoilChannel],
    ) -> None:
        self.scheme = scheme
        self.space = space
        self.drift_hamiltonian = drift_hamiltonian
        self.hamiltonian_generators = hamiltonian_generators
        self.channels = channels

        drift = hamiltonian_part(drift_hamiltonian, space)
        for channel in channels:
            drift = drift + recoil_dissipator(channel, space)
        self.drift = drift
        self.dissipator = drift - hamiltonian_part(drift_hamiltonian, space)

        self.generators = {
            name: hamiltonian_part(h, space)
            for name, h in hamiltonian_generators.items()
        }

    def __repr__(self) -> str:
        return (
            f"LindbladFamily({self.scheme.name}, {self.space}, "
            f"params={list(self.generators)})"
        )

    def check_params(self, params: Mapping[str, float]) -> None:
        """Checks that params names exactly the scheme's parameters.

        Raises:
            KeyError: If a name is unknown or missing.
        """
        for name in params:
            if name not in self.generators:
                raise KeyError(
                    f"Unknown parameter `{name}` for scheme {self.scheme.name}"
                )
        for name in self.generators:
            if name not in params:
                raise KeyError(
                    f"Missing parameter `{name}` for scheme {self.scheme.name}"
                )

    def hamiltonian(self, params: Mapping[str, float]) -> CMat:
        """H(α) = H₀ + Σ αᵢ Hᵢ."""
        self.check_params(params)
        h = self.drift_hamiltonian.copy()
        for name, generator in self.hamiltonian_generators.items():
            h += params[name] * generator

        return h

    def lindbladian(self, params: Mapping[str, float]) -> Superoperator:
        """𝓛(α) = drift + Σ αᵢ ∂𝓛/∂αᵢ."""
        self.check_params(params)
        matrix = self.drift.matrix.copy()
        for name, generator in self.generators.items():
            matrix += params[name] * generator.matrix

        return Superoperator(self.space, matrix)


def _rwsc_terms(consts: PhysicalConstants, space: SpaceSpec) -> SchemeTerms:
    d = space.fock_dim
    return (
        {
            "delta": -_projector(space, E),
            "omega": _coupling(space, E, G, motional_phase(d, -consts.eta)),
        },
        [RecoilChannel(consts.gamma, G, E, consts.eta)],
    )


def _swsc_terms(consts: PhysicalConstants, space: SpaceSpec) -> SchemeTerms:
    d = space.fock_dim
    return (
        {
            "delta": -_projector(space, E),
            "omega": _coupling(space, E, G, motional_sine(d, consts.eta)),
        },
        [RecoilChannel(consts.gamma, G, E, consts.eta)],
    )


def _eit3_terms(consts: PhysicalConstants, space: SpaceSpec) -> SchemeTerms:
    d = space.fock_dim
    recoil_g = consts.eta_g if consts.recoil_eta is None else consts.recoil_eta
    recoil_r = consts.eta_r if consts.recoil_eta is None else consts.recoil_eta
    return (
        {
            "delta": -_projector(space, E),
            "omega_g": _coupling(space, G, E, motional_phase(d, -consts.eta_g)),
            "omega_r": _coupling(space, R, E, motional_phase(d, consts.eta_r)),
        },
        [
            RecoilChannel(consts.gamma_g, G, E, recoil_g),
            RecoilChannel(consts.gamma_r, R, E, recoil_r),
        ],
    )


def _eit4_terms(consts: PhysicalConstants, space: SpaceSpec) -> SchemeTerms:
    d = space.fock_dim
    projected = sqrt(2.0) / 2.0 * consts.eta
    forward = motional_phase(d, projected)
    backward = motional_phase(d, -projected)
    p_e, p_r, p_t = (_projector(space, level) for level in (E, R, T))
    parallel, perpendicular = DipolePattern.PARALLEL, DipolePattern.PERPENDICULAR
    return (
        {
            "delta_g": -p_e - p_r - 2.0 * p_t,
            "delta_r": p_r + p_t,
            "omega_g": (
                _coupling(space, G, E, forward) + _coupling(space, R, T, forward)
            ),
            "omega_r": _coupling(space, R, E, backward),
        },
        [
            RecoilChannel(consts.gamma_g, G, E, consts.eta, parallel),
            RecoilChannel(consts.gamma_r, R, E, consts.eta, perpendicular),
            RecoilChannel(consts.gamma_r, G, T, consts.eta, perpendicular),
            RecoilChannel(consts.gamma_g, R, T, consts.eta, parallel),
        ],
    )


@lru_cache(maxsize=32)
def lindblad_family(
    scheme: SchemeId, consts: PhysicalConstants, space: SpaceSpec
) -> LindbladFamily:
    """Builds (and caches) the parametric Lindbladian of a scheme.

    Raises:
        ValueError: If the space has the wrong number of internal levels.
    """
    if space.internal_dim != scheme.internal_dim:
        raise ValueError(
            f"Scheme {scheme.name} needs {scheme.internal_dim} internal levels, "
            f"space has {space.internal_dim}"
        )

    match scheme:
        case SchemeId.RWSC:
            generators, channels = _rwsc_terms(consts, space)
        case SchemeId.SWSC:
            generators, channels = _swsc_terms(consts, space)
        case SchemeId.EIT3:
            generators, channels = _eit3_terms(consts, space)
        case SchemeId.EIT4:
            generators, channels = _eit4_terms(consts, space)

    internal_identity = np.eye(space.internal_dim, dtype=np.complex128)
    drift = consts.nu * embed(internal_identity, number_op(space.fock_dim), space)
    if scheme is SchemeId.EIT4:
        drift = drift - consts.detuning_offset * _projector(space, T)

    logger.debug("Assembling %s Lindbladian on %s", scheme.name, space)

    return LindbladFamily(scheme, space, drift, generators, channels)


def build(
    scheme: SchemeId,
    consts: PhysicalConstants,
    params: Mapping[str, float],
    space: SpaceSpec,
) -> Superoperator:
    """𝓛(α) for the scheme at the given laser parameters.

    Raises:
        ValueError: If the space does not fit the scheme.
        KeyError: If a parameter is unknown or missing.
    """
    return lindblad_family(scheme, consts, space).lindbladian(params)


def derivative_generators(
    scheme: SchemeId,
    consts: PhysicalConstants,
    params: Mapping[str, float],
    space: SpaceSpec,
) -> List[Tuple[str, Superoperator]]:
    """Exact ∂𝓛/∂αᵢ for every scheme parameter, in parameter order.

    Raises:
        ValueError: If the space does not fit the scheme.
        KeyError: If a parameter is unknown or missing.
    """
    family = lindblad_family(scheme, consts, space)
    family.check_params(params)

    return [(name, family.generators[name]) for name in scheme.parameter_names]


def _cooling_ratio(a_plus: float, a_minus: float, label: str) -> float:
    """A₊ / (A₋ - A₊), or +inf in the heating regime."""
    if a_minus <= a_plus:
        logger.warning("%s formula is in the heating regime (A- <= A+)", label)
        return float("inf")

    return a_plus / (a_minus - a_plus)


def rwsc_steady_nbar(consts: PhysicalConstants, params: Mapping[str, float]) -> float:
    """Weak-coupling steady-state n̄ of running-wave sideband cooling.

    The common prefactor η²(Ω/2)² of A± cancels, so the result does not
    depend on Ω and stays defined at Ω = 0.
    """
    delta, gamma, nu = params["delta"], consts.gamma, consts.nu
    carrier = 0.4 * gamma / (delta**2 + gamma**2 / 4)
    a_plus = gamma / ((delta - nu) ** 2 + gamma**2 / 4) + carrier
    a_minus = gamma / ((delta + nu) ** 2 + gamma**2 / 4) + carrier

    return _cooling_ratio(a_plus, a_minus, "RWSC")


def swsc_steady_nbar(consts: PhysicalConstants, params: Mapping[str, float]) -> float:
    """Weak-coupling steady-state n̄ of standing-wave sideband cooling
    (no carrier contribution at the node).
    """
    delta, gamma, nu = params["delta"], consts.gamma, consts.nu
    a_plus = gamma / ((delta - nu) ** 2 + gamma**2 / 4)
    a_minus = gamma / ((delta + nu) ** 2 + gamma**2 / 4)

    return _cooling_ratio(a_plus, a_minus, "SWSC")


def shifted_resonance(delta: float, omega: float, nu: float = 1.0) -> float:
    """Residual √(Δ² + Ω²) - ν of the light-shifted red-sideband resonance."""
    return sqrt(delta**2 + omega**2) - nu


def ac_stark(delta: float, omega_g: float, omega_r: float) -> float:
    """AC Stark shift of the bright state, δ = (-Δ + √(Ω_g² + Ω_r² + Δ²)) / 2."""
    return 0.5 * (-delta + sqrt(omega_g**2 + omega_r**2 + delta**2))


def eit_condition_rabi_sq(delta: float, nu: float = 1.0) -> float:
    """Ω_g² + Ω_r² on the δ = ν line: 4ν(ν + Δ)."""
    return 4.0 * nu * (nu + delta)


def eit_rabi_from_condition(
    delta: float, ratio: float, nu: float = 1.0
) -> Tuple[float, float]:
    """(Ω_g, Ω_r) with Ω_g/Ω_r = ratio satisfying δ = ν at detuning Δ.

    Raises:
        ValueError: If Δ ≤ -ν, where the condition has no solution.
    """
    total = eit_condition_rabi_sq(delta, nu)
    if total <= 0:
        raise ValueError(f"δ = ν has no solution at Δ = {delta}")

    omega_r = sqrt(total / (1.0 + ratio**2))
    return ratio * omega_r, omega_r


def eit_steady_nbar(consts: PhysicalConstants, params: Mapping[str, float]) -> float:
    """Weak-coupling steady-state n̄ of Λ-system EIT cooling, γ = γ_g + γ_r."""
    delta, omega_g, omega_r = params["delta"], params["omega_g"], params["omega_r"]
    gamma, nu = consts.gamma_g + consts.gamma_r, consts.nu
    shift = (omega_g**2 + omega_r**2) / 4

    def rate(sign: float) -> float:
        detuned = shift - nu * (nu - sign * delta)
        return (
            omega_g**2 / gamma * gamma**2 * nu**2
            / (gamma**2 * nu**2 + 4 * detuned**2)
        )

    return _cooling_ratio(rate(1.0), rate(-1.0), "EIT")


def eit3_to_eit4_params(params: Mapping[str, float]) -> ControlParams:
    """Maps three-level (Δ, Ω_g, Ω_r) onto four-level (Δ_g = Δ_r = Δ, Ω_g, Ω_r)."""
    return {
        "delta_g": params["delta"],
        "delta_r": params["delta"],
        "omega_g": params["omega_g"],
        "omega_r": params["omega_r"],
    }


def steady_formula(
    scheme: SchemeId, consts: PhysicalConstants, params: Mapping[str, float]
) -> Optional[float]:
    """The weak-coupling n̄ formula of a scheme, None where none exists."""
    match scheme:
        case SchemeId.RWSC:
            return rwsc_steady_nbar(consts, params)
        case SchemeId.SWSC:
            return swsc_steady_nbar(consts, params)
        case SchemeId.EIT3:
            return eit_steady_nbar(consts, params)
        case SchemeId.EIT4:
            return None


# Characteristic scales dividing the optimiser variables.
DETUNING_SCALES = {
    SchemeId.RWSC: 1.0,
    SchemeId.SWSC: 1.0,
    SchemeId.EIT3: 10.0,
    SchemeId.EIT4: 10.0,
}
RABI_SCALE = 1.0

DEFAULT_EIT_DETUNING = 60.0
DEFAULT_EIT_RATIO = 0.15


def parameter_scale(scheme: SchemeId, name: str) -> float:
    """Characteristic scale of a parameter in units of ν."""
    return DETUNING_SCALES[scheme] if name.startswith("delta") else RABI_SCALE


def default_params(scheme: SchemeId, consts: PhysicalConstants) -> ControlParams:
    """Default starting point of a scheme, in units of ν.

    Sideband schemes start at (Δ, Ω) = (-ν, 0.3ν); the EIT schemes start on
    the δ = ν line at Δ = 60ν with Ω_g/Ω_r = 0.15.
    """
    nu = consts.nu
    match scheme:
        case SchemeId.RWSC | SchemeId.SWSC:
            return {"delta": -nu, "omega": 0.3 * nu}
        case SchemeId.EIT3:
            delta = DEFAULT_EIT_DETUNING * nu
            omega_g, omega_r = eit_rabi_from_condition(delta, DEFAULT_EIT_RATIO, nu)
            return {"delta": delta, "omega_g": omega_g, "omega_r": omega_r}
        case SchemeId.EIT4:
            delta = DEFAULT_EIT_DETUNING * nu
            omega_g, omega_r = eit_rabi_from_condition(delta, DEFAULT_EIT_RATIO, nu)
            return {
                "delta_g": delta,
                "delta_r": delta,
                "omega_g": omega_g,
                "omega_r": omega_r,
            }
