from typing import Literal, Tuple
import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

CMat = NDArray[np.complex128]
RVec = NDArray[np.float64]

FrechetMethod = Literal["blockEnlarge", "SPS"]

HERMITIAN_TOLERANCE = 1e-12


def as_cmat(a: ArrayLike) -> CMat:
    """Coerces an array-like into a dense complex matrix.

    Args:
        a (ArrayLike): The input entries.

    Returns:
        CMat: A two-dimensional complex128 array.

    Raises:
        ValueError: If the input is not two-dimensional, is empty,
            or holds NaN/Inf entries.
    """
    matrix = np.asarray(a, dtype=np.complex128)

    if matrix.ndim != 2:
        raise ValueError(f"Expected a matrix, got an array of shape {matrix.shape}")
    if matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise ValueError("Matrix must have at least one row and column")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix entries must be finite")

    return matrix


def dagger(a: CMat) -> CMat:
    """Returns the conjugate transpose."""
    return a.conj().T


def hermiticity_defect(a: CMat) -> float:
    """Returns max|a - a†|, the distance of a square matrix from Hermiticity."""
    return float(np.max(np.abs(a - dagger(a))))


def hermitize(a: CMat) -> CMat:
    """Returns the Hermitian part (a + a†)/2."""
    return 0.5 * (a + dagger(a))


def _require_square(a: CMat, name: str = "matrix") -> None:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"Expected a square {name}, got shape {a.shape}")


def kron(a: CMat, b: CMat) -> CMat:
    """Kronecker product with result[i*p + k, j*q + l] = a[i, j] * b[k, l]
    for b of shape (p, q).
    """
    return np.kron(as_cmat(a), as_cmat(b))


def eigh(a: CMat, tolerance: float = HERMITIAN_TOLERANCE) -> Tuple[RVec, CMat]:
    """Diagonalises a Hermitian matrix as a = U diag(λ) U†.

    Args:
        a (CMat): The matrix to diagonalise.
        tolerance (float): Largest accepted max|a - a†|.

    Returns:
        Tuple[RVec, CMat]: Ascending eigenvalues and the unitary matrix
            whose columns are the matching eigenvectors.

    Raises:
        ValueError: If the matrix is not square or not Hermitian.
    """
    matrix = as_cmat(a)
    _require_square(matrix)

    defect = hermiticity_defect(matrix)
    if defect > tolerance:
        raise ValueError(
            f"Matrix is not Hermitian: max|a - a†| = {defect:.3e} > {tolerance:.1e}"
        )

    eigenvalues, eigenvectors = scipy.linalg.eigh(hermitize(matrix))

    return eigenvalues.astype(np.float64), eigenvectors.astype(np.complex128)


def expm(a: CMat) -> CMat:
    """Matrix exponential by Padé-13 scaling and squaring.

    Raises:
        ValueError: If the matrix is not square.
    """
    matrix = as_cmat(a)
    _require_square(matrix)

    return np.asarray(scipy.linalg.expm(matrix), dtype=np.complex128)


def expm_frechet(
    a: CMat, e: CMat, method: FrechetMethod = "blockEnlarge"
) -> Tuple[CMat, CMat]:
    """Computes exp(a) together with the Fréchet derivative of exp at a
    in the direction e.

    The default method exponentiates the block matrix [[a, e], [0, a]];
    its diagonal block is exp(a) and its upper-right block is the
    derivative. "SPS" selects the Al-Mohy–Higham scaling-Padé-squaring
    variant, which works at the original dimension.

    Args:
        a (CMat): Point of differentiation.
        e (CMat): Direction, same shape as a.
        method (FrechetMethod): "blockEnlarge" or "SPS".

    Returns:
        Tuple[CMat, CMat]: exp(a) and the directional derivative.

    Raises:
        ValueError: If a and e are not square matrices of the same shape.
    """
    point = as_cmat(a)
    direction = as_cmat(e)
    _require_square(point)

    if point.shape != direction.shape:
        raise ValueError(
            f"Direction shape {direction.shape} does not match {point.shape}"
        )

    expm_a, frechet = scipy.linalg.expm_frechet(
        point, direction, method=method, compute_expm=True, check_finite=False
    )

    return (
        np.asarray(expm_a, dtype=np.complex128),
        np.asarray(frechet, dtype=np.complex128),
    )
