from dataclasses import dataclass, field
from enum import Enum
from math import factorial
from typing import Iterable, Tuple, Union
import logging
import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from numerics.linalg import CMat, as_cmat, eigh, hermiticity_defect, hermitize
from physics.fock import DensityMatrix, SpaceSpec, embed, level_op, position_op

logger = logging.getLogger(__name__)

# Below this |μ| the recoil kernels switch from the closed forms to their
# even Taylor series.
KERNEL_SERIES_THRESHOLD = 1e-1
KERNEL_SERIES_TERMS = 7

HAMILTONIAN_TOLERANCE = 1e-10
KERNEL_DEGENERACY_TOLERANCE = 1e-11


class DipolePattern(Enum):
    """Angular emission pattern projected on the motional axis, as a weight
    w(c) over c = cos θ ∈ [-1, 1] with ∫w = 2.
    """

    PARALLEL = "parallel"  # (3/4)(1 + c²)
    PERPENDICULAR = "perpendicular"  # (3/2)(1 - c²)

    def weight(self, c: NDArray[np.float64]) -> NDArray[np.float64]:
        """Evaluates the pattern weight w(c)."""
        match self:
            case DipolePattern.PARALLEL:
                return 0.75 * (1.0 + c**2)
            case DipolePattern.PERPENDICULAR:
                return 1.5 * (1.0 - c**2)

    def moment(self, k: int) -> float:
        """Even moment ∫ w(c) c^(2k) dc."""
        match self:
            case DipolePattern.PARALLEL:
                return 1.5 * (1.0 / (2 * k + 1) + 1.0 / (2 * k + 3))
            case DipolePattern.PERPENDICULAR:
                return 3.0 * (1.0 / (2 * k + 1) - 1.0 / (2 * k + 3))


@dataclass(frozen=True)
class RecoilChannel:
    """
    A spontaneous-emission channel upper → lower with photon recoil.

    Attributes:
        rate (float): Decay rate γ_j in units of ν.
        lower (int): Index of the final internal level.
        upper (int): Index of the decaying internal level.
        lamb_dicke (float): Recoil Lamb–Dicke parameter η_j.
        pattern (DipolePattern): Emission dipole pattern.
    """

    rate: float
    lower: int
    upper: int
    lamb_dicke: float
    pattern: DipolePattern = DipolePattern.PARALLEL

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise ValueError(f"Decay rate must be positive, got {self.rate}")
        if self.lower == self.upper:
            raise ValueError("Decay channel must connect two different levels")


@dataclass(frozen=True, eq=False)
class Superoperator:
    """
    A dense superoperator acting on column-stacked density matrices.

    Attributes:
        space (SpaceSpec): The Hilbert space the density matrices live on.
        matrix (CMat): The (dim² x dim²) matrix.
    """

    space: SpaceSpec
    matrix: CMat = field(repr=False)

    def __post_init__(self) -> None:
        size = self.space.dim**2
        matrix = as_cmat(self.matrix)
        if matrix.shape != (size, size):
            raise ValueError(
                f"Superoperator shape {matrix.shape} does not match ({size}, {size})"
            )
        object.__setattr__(self, "matrix", matrix)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        if other.space != self.space:
            raise ValueError("Cannot add superoperators on different spaces")
        return Superoperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        return self + other * -1.0

    def __mul__(self, scalar: Union[float, complex]) -> "Superoperator":
        return Superoperator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def apply(self, rho: CMat) -> CMat:
        """Applies the superoperator to an operator on the space."""
        return unvec(self.matrix @ vec(rho), (self.space.dim, self.space.dim))

    def trace_defect(self) -> float:
        """max|vec(I)† 𝓛|, zero for trace-preserving generators."""
        identity = vec(np.eye(self.space.dim, dtype=np.complex128))
        return float(np.max(np.abs(identity.conj() @ self.matrix)))

    @classmethod
    def zero(cls, space: SpaceSpec) -> "Superoperator":
        """The zero superoperator."""
        return cls(space, np.zeros((space.dim**2, space.dim**2), dtype=np.complex128))


def vec(m: CMat) -> NDArray[np.complex128]:
    """Column-stacks a matrix, so that vec(AXB) = (Bᵀ ⊗ A) vec(X)."""
    return np.asarray(m, dtype=np.complex128).reshape(-1, order="F")


def unvec(v: NDArray[np.complex128], shape: Tuple[int, int]) -> CMat:
    """Inverse of vec.

    Raises:
        ValueError: If the vector length does not match the shape.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size != shape[0] * shape[1]:
        raise ValueError(f"Cannot reshape vector of size {v.size} to {shape}")

    return v.reshape(shape, order="F")


def hamiltonian_part(h: CMat, space: SpaceSpec) -> Superoperator:
    """The coherent generator ρ ↦ -i[h, ρ] = -i(I ⊗ h - hᵀ ⊗ I) vec(ρ).

    Raises:
        ValueError: If h is not Hermitian.
    """
    h = as_cmat(h)
    defect = hermiticity_defect(h)
    if defect > HAMILTONIAN_TOLERANCE:
        raise ValueError(f"Hamiltonian is not Hermitian (defect {defect:.3e})")

    identity = np.eye(space.dim, dtype=np.complex128)

    return Superoperator(space, -1j * (np.kron(identity, h) - np.kron(h.T, identity)))


def recoil_kernel(
    mu: Union[float, NDArray[np.float64]], pattern: DipolePattern
) -> Union[float, NDArray[np.float64]]:
    """Angular recoil kernel f(μ) = ∫₋₁¹ w(c) e^{iμc} dc (real, even in μ).

    Closed forms:
        parallel:      (3/2)[sin μ/μ + ((μ² - 2) sin μ + 2μ cos μ)/μ³]
        perpendicular: 6 (sin μ - μ cos μ)/μ³

    Args:
        mu (float | NDArray): Argument(s).
        pattern (DipolePattern): Emission pattern.

    Returns:
        float | NDArray: Kernel values, f(0) = 2 for both patterns.
    """
    scalar = np.ndim(mu) == 0
    mu_arr = np.abs(np.atleast_1d(np.asarray(mu, dtype=np.float64)))
    small = mu_arr < KERNEL_SERIES_THRESHOLD

    result = np.empty_like(mu_arr)

    series = np.zeros(int(small.sum()))
    mu_small = mu_arr[small]
    for k in range(KERNEL_SERIES_TERMS):
        series += (-1) ** k * mu_small ** (2 * k) / factorial(2 * k) * pattern.moment(k)
    result[small] = series

    m = mu_arr[~small]
    sin, cos = np.sin(m), np.cos(m)
    match pattern:
        case DipolePattern.PARALLEL:
            tail = ((m**2 - 2.0) * sin + 2.0 * m * cos) / m**3
            result[~small] = 1.5 * (sin / m + tail)
        case DipolePattern.PERPENDICULAR:
            result[~small] = 6.0 * (sin - m * cos) / m**3

    return float(result[0]) if scalar else result


def _motional_kernel_superop(
    lamb_dicke: float, pattern: DipolePattern, d: int
) -> NDArray[np.complex128]:
    """d² x d² superoperator of ρ ↦ ∫ w(c) e^{iηXc} ρ e^{-iηXc} dc on the Fock
    factor, built in the X eigenbasis where it is an entrywise product.
    """
    eigenvalues, u = eigh(position_op(d))
    kernel = recoil_kernel(
        lamb_dicke * (eigenvalues[:, None] - eigenvalues[None, :]), pattern
    )

    # vec(U M U†) = (ū ⊗ u) vec(M); vec(U† ρ U) = (uᵀ ⊗ u†) vec(ρ)
    to_eigen = np.kron(u.T, u.conj().T)
    from_eigen = np.kron(u.conj(), u)

    return from_eigen @ (vec(kernel)[:, None] * to_eigen)


def _block_indices(level: int, space: SpaceSpec) -> NDArray[np.intp]:
    """Positions in vec(ρ) of the motional block ρ[(level, ·), (level, ·)],
    ordered like vec of a d x d matrix.
    """
    d = space.fock_dim
    rows, cols = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    rows = level * d + rows.reshape(-1, order="F")
    cols = level * d + cols.reshape(-1, order="F")

    return rows + space.dim * cols


def recoil_dissipator(channel: RecoilChannel, space: SpaceSpec) -> Superoperator:
    """Lindblad dissipator of one decay channel with recoil:

        ρ ↦ (γ/2) |l⟩⟨u| [∫ w(c) e^{iηXc} ρ e^{-iηXc} dc] |u⟩⟨l|
            - (γ/2) {|u⟩⟨u|, ρ}

    Args:
        channel (RecoilChannel): The decay channel.
        space (SpaceSpec): Target space.

    Returns:
        Superoperator: The trace-preserving dissipator.

    Raises:
        IndexError: If the channel levels do not exist in the space.
    """
    for index in (channel.lower, channel.upper):
        if not 0 <= index < space.internal_dim:
            raise IndexError(
                f"Channel level {index} out of range for {space.internal_dim} levels"
            )

    half_rate = 0.5 * channel.rate
    matrix = np.zeros((space.dim**2, space.dim**2), dtype=np.complex128)

    # Feeding: upper-level motional block, smeared by recoil, lands on the lower level
    gain = _motional_kernel_superop(channel.lamb_dicke, channel.pattern, space.fock_dim)
    rows = _block_indices(channel.lower, space)
    cols = _block_indices(channel.upper, space)
    matrix[np.ix_(rows, cols)] += half_rate * gain

    # Loss: -(γ/2){P, ρ}
    projector = embed(
        level_op(space.internal_dim, channel.upper, channel.upper),
        np.eye(space.fock_dim, dtype=np.complex128),
        space,
    )
    identity = np.eye(space.dim, dtype=np.complex128)
    anticommutator = np.kron(identity, projector) + np.kron(projector.T, identity)
    matrix -= half_rate * anticommutator

    return Superoperator(space, matrix)


def lindbladian(
    h: CMat, channels: Iterable[RecoilChannel], space: SpaceSpec
) -> Superoperator:
    """Assembles 𝓛 = -i[h, ·] + Σ_j 𝒟_j."""
    generator = hamiltonian_part(h, space)
    for channel in channels:
        generator = generator + recoil_dissipator(channel, space)

    return generator


def steady_state(l: Superoperator) -> DensityMatrix:
    """Null vector of 𝓛 as a density matrix.

    Args:
        l (Superoperator): A generator with a one-dimensional kernel.

    Returns:
        DensityMatrix: Hermitised, trace-normalised stationary state.

    Raises:
        ValueError: If the kernel is degenerate within tolerance.
    """
    _, singular, vh = scipy.linalg.svd(l.matrix)
    scale = singular[0]

    if singular[-2] < KERNEL_DEGENERACY_TOLERANCE * scale:
        degeneracy = int(np.sum(singular < KERNEL_DEGENERACY_TOLERANCE * scale))
        raise ValueError(
            f"Steady state is not unique: kernel dimension {degeneracy} "
            f"(second smallest singular value {singular[-2]:.3e})"
        )

    null_vector = vh[-1].conj()
    rho = hermitize(unvec(null_vector, (l.space.dim, l.space.dim)))
    rho = rho / np.trace(rho)
    logger.debug(
        "Steady state found, smallest singular value %.3e", singular[-1]
    )

    return DensityMatrix(l.space, hermitize(rho))
