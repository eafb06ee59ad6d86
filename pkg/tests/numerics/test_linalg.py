import numpy as np
import pytest
from numerics.linalg import *


def random_matrix(n: int, seed: int = 0) -> CMat:
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def test_as_cmat():
    matrix = as_cmat([[1, 2], [3, 4]])
    assert matrix.dtype == np.complex128
    assert matrix.shape == (2, 2)


def test_as_cmat_errors():
    with pytest.raises(ValueError, match=r"Expected a matrix"):
        as_cmat([1, 2, 3])
    with pytest.raises(ValueError, match=r"at least one row"):
        as_cmat(np.zeros((0, 2)))
    with pytest.raises(ValueError, match=r"must be finite"):
        as_cmat([[1.0, np.nan], [0.0, 1.0]])


def test_kron_ordering():
    a = as_cmat([[1, 2], [3, 4]])
    b = as_cmat([[0, 1], [1, 0]])
    product = kron(a, b)

    assert product[1 * 2 + 0, 0 * 2 + 1] == a[1, 0] * b[0, 1]
    assert product[0 * 2 + 1, 1 * 2 + 0] == a[0, 1] * b[1, 0]


def test_hermitize():
    a = random_matrix(4)
    h = hermitize(a)

    assert hermiticity_defect(h) < 1e-15
    assert hermiticity_defect(a) > 0.1


def test_eigh():
    a = hermitize(random_matrix(5, seed=1))
    eigenvalues, u = eigh(a)

    assert np.all(np.diff(eigenvalues) >= 0)
    np.testing.assert_allclose(u @ np.diag(eigenvalues) @ dagger(u), a, atol=1e-12)
    np.testing.assert_allclose(dagger(u) @ u, np.eye(5), atol=1e-12)


def test_eigh_errors():
    with pytest.raises(ValueError, match=r"Matrix is not Hermitian"):
        eigh(random_matrix(3))
    with pytest.raises(ValueError, match=r"Expected a square matrix"):
        eigh(np.zeros((2, 3)))


def test_expm_diagonal():
    np.testing.assert_allclose(
        expm(np.diag([0.0, 1.0, -2.0 + 1j])),
        np.diag(np.exp([0.0, 1.0, -2.0 + 1j])),
        atol=1e-14,
    )


def test_expm_rotation():
    theta = 0.7
    rotation = expm(as_cmat([[0.0, -theta], [theta, 0.0]]))
    expected = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]

    np.testing.assert_allclose(rotation, expected, atol=1e-14)


def test_expm_not_square():
    with pytest.raises(ValueError, match=r"Expected a square matrix"):
        expm(np.ones((2, 3)))


@pytest.mark.parametrize("method", ["blockEnlarge", "SPS"])
def test_expm_frechet_against_differences(method):
    a = 0.5 * random_matrix(6, seed=2)
    e = random_matrix(6, seed=3)
    h = 1e-6

    expm_a, frechet = expm_frechet(a, e, method)
    numeric = (expm(a + h * e) - expm(a - h * e)) / (2 * h)

    np.testing.assert_allclose(expm_a, expm(a), atol=1e-12)
    np.testing.assert_allclose(frechet, numeric, atol=1e-7)


@pytest.mark.parametrize("method", ["blockEnlarge", "SPS"])
def test_expm_frechet_commuting_direction(method):
    a = np.diag([0.1, -0.4, 1.2 + 0.5j]).astype(np.complex128)
    _, frechet = expm_frechet(a, a, method)

    np.testing.assert_allclose(frechet, a @ expm(a), atol=1e-13)


def test_expm_frechet_shape_mismatch():
    with pytest.raises(ValueError, match=r"Direction shape \(3, 3\) does not match \(2, 2\)"):
        expm_frechet(np.eye(2), np.eye(3))


def test_expm_inverse():
    a = random_matrix(6, seed=4)
    a *= 4.0 / np.linalg.norm(a, 2)
    np.testing.assert_allclose(expm(a) @ expm(-a), np.eye(6), atol=1e-10)


def test_expm_against_taylor_series():
    a = random_matrix(6, seed=5)
    a /= np.linalg.norm(a, 2)

    series = np.eye(6, dtype=np.complex128)
    term = np.eye(6, dtype=np.complex128)
    for k in range(1, 30):
        term = term @ a / k
        series += term

    np.testing.assert_allclose(expm(a), series, rtol=1e-12, atol=1e-14)


def test_expm_frechet_is_linear_in_direction():
    a = random_matrix(4, seed=6)
    e1, e2 = random_matrix(4, seed=7), random_matrix(4, seed=8)

    _, d1 = expm_frechet(a, e1)
    _, d2 = expm_frechet(a, e2)
    _, d12 = expm_frechet(a, e1 + e2)

    np.testing.assert_allclose(d12, d1 + d2, atol=1e-10)
