from dataclasses import dataclass, field
import numpy as np
from numerics.linalg import CMat, as_cmat, hermiticity_defect, kron

INTERNAL_DIMS = (2, 3, 4)
MAX_FOCK_DIM = 64

DENSITY_HERMITIAN_TOLERANCE = 1e-10
DENSITY_TRACE_TOLERANCE = 1e-10
DENSITY_POSITIVITY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SpaceSpec:
    """
    The joint Hilbert space of the ion: internal levels ⊗ truncated phonon
    Fock space. Operators are always ordered internal ⊗ motional.

    Attributes:
        internal_dim (int): Number of internal levels (2, 3 or 4).
        fock_dim (int): Phonon truncation d.
    """

    internal_dim: int
    fock_dim: int

    def __post_init__(self) -> None:
        if self.internal_dim not in INTERNAL_DIMS:
            raise ValueError(
                f"internal_dim must be one of {INTERNAL_DIMS}, got {self.internal_dim}"
            )
        if not 2 <= self.fock_dim <= MAX_FOCK_DIM:
            raise ValueError(
                f"fock_dim must lie in [2, {MAX_FOCK_DIM}], got {self.fock_dim}"
            )

    @property
    def dim(self) -> int:
        """Total Hilbert-space dimension internal_dim * fock_dim."""
        return self.internal_dim * self.fock_dim


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    A physical state on a SpaceSpec: Hermitian, unit trace, positive
    semidefinite (all within tolerance, checked on construction).

    Attributes:
        space (SpaceSpec): The space the state lives on.
        matrix (CMat): The (dim x dim) matrix.
    """

    space: SpaceSpec
    matrix: CMat = field(repr=False)

    def __post_init__(self) -> None:
        matrix = as_cmat(self.matrix)
        if matrix.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"Density matrix shape {matrix.shape} does not match "
                f"space dimension {self.space.dim}"
            )

        defect = hermiticity_defect(matrix)
        if defect > DENSITY_HERMITIAN_TOLERANCE:
            raise ValueError(f"Density matrix is not Hermitian (defect {defect:.3e})")

        trace = np.trace(matrix)
        if abs(trace - 1.0) > DENSITY_TRACE_TOLERANCE:
            raise ValueError(f"Density matrix trace is {trace.real:.12f}, not 1")

        smallest = float(np.linalg.eigvalsh(matrix)[0])
        if smallest < -DENSITY_POSITIVITY_TOLERANCE:
            raise ValueError(
                f"Density matrix has negative eigenvalue {smallest:.3e}"
            )

        object.__setattr__(self, "matrix", matrix)


def annihilator(d: int) -> CMat:
    """Truncated phonon annihilation operator with a[n-1, n] = √n."""
    if d < 2:
        raise ValueError(f"Fock truncation must be at least 2, got {d}")

    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(np.complex128)


def number_op(d: int) -> CMat:
    """Phonon number operator a†a = diag(0, 1, ..., d-1)."""
    return np.diag(np.arange(d)).astype(np.complex128)


def position_op(d: int) -> CMat:
    """Dimensionless position X = a† + a; the physical kx̂ is η·X."""
    a = annihilator(d)
    return a + a.conj().T


def level_op(internal_dim: int, bra: int, ket: int) -> CMat:
    """Internal transition operator |bra⟩⟨ket|.

    Raises:
        IndexError: If an index is outside the internal levels.
    """
    for index in (bra, ket):
        if not 0 <= index < internal_dim:
            raise IndexError(
                f"Level index {index} out of range for {internal_dim} internal levels"
            )

    op = np.zeros((internal_dim, internal_dim), dtype=np.complex128)
    op[bra, ket] = 1.0

    return op


def embed(internal: CMat, motional: CMat, space: SpaceSpec) -> CMat:
    """Embeds internal ⊗ motional factors into the joint space.

    Raises:
        ValueError: If a factor does not match its part of the space.
    """
    internal = as_cmat(internal)
    motional = as_cmat(motional)

    if internal.shape != (space.internal_dim, space.internal_dim):
        raise ValueError(
            f"Internal factor shape {internal.shape} does not match "
            f"internal_dim {space.internal_dim}"
        )
    if motional.shape != (space.fock_dim, space.fock_dim):
        raise ValueError(
            f"Motional factor shape {motional.shape} does not match "
            f"fock_dim {space.fock_dim}"
        )

    return kron(internal, motional)


def phonon_number(space: SpaceSpec) -> CMat:
    """n̂ = I_internal ⊗ a†a on the joint space."""
    return embed(
        np.eye(space.internal_dim, dtype=np.complex128),
        number_op(space.fock_dim),
        space,
    )


def thermal_populations(nbar0: float, d: int) -> np.ndarray:
    """Geometric populations pₙ ∝ (n̄/(1+n̄))ⁿ for n < d, renormalised
    after truncation.
    """
    if nbar0 < 0:
        raise ValueError(f"Thermal occupation must be non-negative, got {nbar0}")

    ratio = nbar0 / (1.0 + nbar0)
    weights = ratio ** np.arange(d, dtype=np.float64)

    return weights / weights.sum()


def thermal_state(
    nbar0: float, space: SpaceSpec, internal_level: int = 0
) -> DensityMatrix:
    """Truncated thermal phonon state in a pure internal level.

    Args:
        nbar0 (float): Nominal mean phonon number of the untruncated state.
        space (SpaceSpec): Target space.
        internal_level (int): Index of the occupied internal level.

    Returns:
        DensityMatrix: |level⟩⟨level| ⊗ Σ pₙ |n⟩⟨n|.
    """
    populations = thermal_populations(nbar0, space.fock_dim)
    internal = level_op(space.internal_dim, internal_level, internal_level)

    return DensityMatrix(space, embed(internal, np.diag(populations), space))


def fock_state(n: int, space: SpaceSpec, internal_level: int = 0) -> DensityMatrix:
    """Pure state |level⟩⟨level| ⊗ |n⟩⟨n|."""
    if not 0 <= n < space.fock_dim:
        raise IndexError(f"Fock level {n} out of range for d = {space.fock_dim}")

    motional = np.zeros((space.fock_dim, space.fock_dim), dtype=np.complex128)
    motional[n, n] = 1.0
    internal = level_op(space.internal_dim, internal_level, internal_level)

    return DensityMatrix(space, embed(internal, motional, space))
