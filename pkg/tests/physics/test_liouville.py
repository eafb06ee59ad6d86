import numpy as np
import pytest
import scipy.linalg
from physics.fock import SpaceSpec, embed, fock_state, level_op, position_op
from physics.liouville import *


def quadrature_kernel(mu: float, pattern: DipolePattern) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(64)
    return float(np.sum(weights * pattern.weight(nodes) * np.cos(mu * nodes)))


def test_vec_identity():
    rng = np.random.default_rng(0)
    a, x, b = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))

    np.testing.assert_allclose(vec(a @ x @ b), np.kron(b.T, a) @ vec(x), atol=1e-12)
    np.testing.assert_allclose(unvec(vec(x), (3, 3)), x)


def test_unvec_size():
    with pytest.raises(ValueError, match=r"Cannot reshape vector of size 5 to \(2, 2\)"):
        unvec(np.zeros(5), (2, 2))


@pytest.mark.parametrize("pattern", list(DipolePattern))
def test_pattern_normalisation(pattern):
    assert quadrature_kernel(0.0, pattern) == pytest.approx(2.0)
    assert pattern.moment(0) == pytest.approx(2.0)
    assert recoil_kernel(0.0, pattern) == pytest.approx(2.0)


@pytest.mark.parametrize("pattern", list(DipolePattern))
@pytest.mark.parametrize("mu", [1e-4, 0.03, 0.0999, 0.1001, 0.4, 1.0, 3.7, 12.0])
def test_kernel_against_quadrature(pattern, mu):
    assert recoil_kernel(mu, pattern) == pytest.approx(
        quadrature_kernel(mu, pattern), abs=1e-11
    )


@pytest.mark.parametrize("pattern", list(DipolePattern))
def test_kernel_is_even_and_vectorised(pattern):
    mu = np.array([-2.0, -0.05, 0.0, 0.05, 2.0])
    values = recoil_kernel(mu, pattern)

    assert values.shape == (5,)
    np.testing.assert_allclose(values, values[::-1])


def test_parallel_second_moment():
    # f(μ) ≈ 2 - 0.4 μ² for the parallel pattern
    assert recoil_kernel(1e-3, DipolePattern.PARALLEL) == pytest.approx(
        2.0 - 0.4e-6, abs=1e-12
    )


def test_channel_errors():
    with pytest.raises(ValueError, match=r"Decay rate must be positive"):
        RecoilChannel(0.0, 0, 1, 0.1)
    with pytest.raises(ValueError, match=r"two different levels"):
        RecoilChannel(1.0, 1, 1, 0.1)
    with pytest.raises(IndexError, match=r"Channel level 2 out of range for 2 levels"):
        recoil_dissipator(RecoilChannel(1.0, 0, 2, 0.1), SpaceSpec(2, 3))


@pytest.mark.parametrize("pattern", list(DipolePattern))
def test_dissipator_preserves_trace(pattern):
    space = SpaceSpec(4, 6)
    dissipator = recoil_dissipator(RecoilChannel(3.0, 2, 3, 0.2, pattern), space)

    assert dissipator.trace_defect() < 1e-12


def test_dissipator_without_recoil():
    space = SpaceSpec(2, 4)
    rho = fock_state(2, space, internal_level=1).matrix
    dissipator = recoil_dissipator(RecoilChannel(0.5, 0, 1, 0.0), space)

    expected = 0.5 * (fock_state(2, space, 0).matrix - rho)
    np.testing.assert_allclose(dissipator.apply(rho), expected, atol=1e-14)


def test_recoil_spreads_phonons():
    space = SpaceSpec(2, 8)
    rho = fock_state(0, space, internal_level=1).matrix
    fed = recoil_dissipator(RecoilChannel(1.0, 0, 1, 0.3), space).apply(rho)

    ground_block = fed[:8, :8].real
    assert ground_block[1, 1] > 0
    assert np.trace(ground_block) == pytest.approx(1.0)


def test_hamiltonian_part():
    space = SpaceSpec(2, 3)
    rng = np.random.default_rng(1)
    h = rng.normal(size=(6, 6))
    h = h + h.T
    rho = fock_state(1, space).matrix

    generator = hamiltonian_part(h, space)

    expected = -1j * (h @ rho - rho @ h)
    np.testing.assert_allclose(generator.apply(rho), expected, atol=1e-12)
    assert generator.trace_defect() < 1e-12

    with pytest.raises(ValueError, match=r"Hamiltonian is not Hermitian"):
        hamiltonian_part(np.triu(np.ones((6, 6))), space)


def test_superoperator_arithmetic():
    space = SpaceSpec(2, 2)
    one = Superoperator(space, np.eye(16))

    np.testing.assert_allclose((one + one * 2.0).matrix, 3.0 * np.eye(16))
    np.testing.assert_allclose((one - one).matrix, Superoperator.zero(space).matrix)

    with pytest.raises(ValueError, match=r"different spaces"):
        one + Superoperator.zero(SpaceSpec(2, 3))  # type: ignore
    with pytest.raises(ValueError, match=r"does not match \(16, 16\)"):
        Superoperator(space, np.eye(4))


def test_steady_state_of_decay():
    # without recoil or trap motion every phonon state is stationary
    space = SpaceSpec(2, 2)
    drive = 0.3 * embed(level_op(2, 1, 0) + level_op(2, 0, 1), np.eye(2), space)
    generator = lindbladian(drive, [RecoilChannel(1.0, 0, 1, 0.0)], space)

    with pytest.raises(ValueError, match=r"Steady state is not unique"):
        steady_state(generator)


def test_unique_steady_state():
    space = SpaceSpec(2, 3)
    h = embed(
        0.2 * (level_op(2, 1, 0) + level_op(2, 0, 1)),
        np.eye(3, dtype=np.complex128),
        space,
    ) + embed(np.eye(2), np.diag([0.0, 1.0, 2.0]), space)
    channels = [RecoilChannel(1.0, 0, 1, 0.4)]
    generator = lindbladian(h, channels, space)

    rho = steady_state(generator)

    assert np.trace(rho.matrix).real == pytest.approx(1.0)
    np.testing.assert_allclose(generator.apply(rho.matrix), 0, atol=1e-10)


def quadrature_dissipator(channel: RecoilChannel, space: SpaceSpec, nodes: int = 32):
    """The dissipator as a sum of discrete jump operators |l⟩⟨u| ⊗ e^{iηXc}."""
    c, weights = np.polynomial.legendre.leggauss(nodes)
    eigenvalues, u = np.linalg.eigh(position_op(space.fock_dim))
    transition = level_op(space.internal_dim, channel.lower, channel.upper)
    projector = transition.conj().T @ transition
    identity = np.eye(space.dim)

    matrix = np.zeros((space.dim**2, space.dim**2), dtype=np.complex128)
    for node, weight in zip(c, weights * channel.pattern.weight(c)):
        kick = (u * np.exp(1j * channel.lamb_dicke * eigenvalues * node)) @ u.conj().T
        jump = embed(transition, kick, space)
        matrix += 0.5 * channel.rate * weight * np.kron(jump.conj(), jump)

    loss = embed(projector, np.eye(space.fock_dim), space)
    matrix -= 0.5 * channel.rate * (np.kron(identity, loss) + np.kron(loss.T, identity))
    return matrix


@pytest.mark.parametrize("pattern", list(DipolePattern))
def test_dissipator_against_quadrature(pattern):
    space = SpaceSpec(2, 6)
    channel = RecoilChannel(0.7, 0, 1, 0.15, pattern)

    np.testing.assert_allclose(
        recoil_dissipator(channel, space).matrix,
        quadrature_dissipator(channel, space),
        atol=1e-9,
    )


def test_generator_preserves_hermiticity():
    space = SpaceSpec(2, 3)
    h = embed(0.3 * (level_op(2, 1, 0) + level_op(2, 0, 1)), position_op(3), space)
    generator = lindbladian(h, [RecoilChannel(1.0, 0, 1, 0.2)], space)

    rng = np.random.default_rng(3)
    rho = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = rho + rho.conj().T

    image = generator.apply(rho)
    np.testing.assert_allclose(image, image.conj().T, atol=1e-10)


def test_steady_state_is_long_time_limit():
    space = SpaceSpec(2, 3)
    h = embed(
        0.2 * (level_op(2, 1, 0) + level_op(2, 0, 1)),
        np.eye(3, dtype=np.complex128),
        space,
    ) + embed(np.eye(2), np.diag([0.0, 1.0, 2.0]), space)
    generator = lindbladian(h, [RecoilChannel(1.0, 0, 1, 0.4)], space)

    rho = steady_state(generator).matrix
    rho0 = fock_state(2, space, internal_level=1).matrix
    late = unvec(
        scipy.linalg.expm(generator.matrix * 1e5) @ vec(rho0), (space.dim, space.dim)
    )

    distance = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(late - rho)))
    assert distance < 1e-6
