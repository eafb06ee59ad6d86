import numpy as np
import pytest
from control.lbfgs import *
from control.problem import ControlProblem, loss
from physics.fock import SpaceSpec, thermal_state
from physics.schemes import PhysicalConstants, SchemeId

CENTRE = np.array([1.0, -2.0, 0.5])


def bowl(x):
    return 0.5 * float(np.sum((x - CENTRE) ** 2)), x - CENTRE


def rosenbrock(x):
    a, b = x
    value = (1 - a) ** 2 + 100 * (b - a**2) ** 2
    gradient = np.array([-2 * (1 - a) - 400 * a * (b - a**2), 200 * (b - a**2)])
    return value, gradient


def test_options_checks():
    with pytest.raises(ValueError, match=r"history must be at least 1, got 0"):
        LbfgsOptions(history=0)
    with pytest.raises(ValueError, match=r"Need 0 < c1 < c2 < 1"):
        LbfgsOptions(c1=0.5, c2=0.4)
    with pytest.raises(ValueError, match=r"max_iter must be non-negative"):
        LbfgsOptions(max_iter=-1)


def test_isotropic_bowl():
    result = lbfgs(bowl, np.zeros(3))

    assert result.converged
    assert result.message == "gradient norm below tolerance"
    np.testing.assert_allclose(result.x, CENTRE, atol=1e-8)
    assert result.fun < 1e-15
    assert result.iterations < 10
    assert result.history[0].iteration == 0
    assert result.history[-1].iteration == result.iterations


def test_rosenbrock():
    result = lbfgs(rosenbrock, np.array([-1.2, 1.0]), LbfgsOptions(max_iter=1000))

    np.testing.assert_allclose(result.x, [1.0, 1.0], atol=1e-5)
    assert result.fun < 1e-10


def test_losses_never_increase_past_start():
    result = lbfgs(rosenbrock, np.array([-1.2, 1.0]), LbfgsOptions(max_iter=5))

    assert result.fun <= rosenbrock(np.array([-1.2, 1.0]))[0]
    assert result.iterations == 5
    assert not result.converged
    assert result.message == "maximum iterations reached"


def test_zero_iterations_returns_start():
    x0 = np.array([0.3, -0.1, 2.0])
    result = lbfgs(bowl, x0, LbfgsOptions(max_iter=0))

    np.testing.assert_allclose(result.x, x0)
    assert result.iterations == 0
    assert not result.converged


def test_start_at_minimum():
    result = lbfgs(bowl, CENTRE.copy())

    assert result.converged
    assert result.iterations == 0
    assert result.grad_norm == 0.0


def test_non_finite_start():
    with pytest.raises(FloatingPointError, match=r"Non-finite loss or gradient"):
        lbfgs(lambda x: (float("nan"), x), np.ones(2))


def test_inverse_hessian_one_dimensional():
    hessian = InverseHessian(3)
    assert hessian.append(np.array([2.0]), np.array([8.0]))
    np.testing.assert_allclose(hessian.apply(np.array([4.0])), [1.0])


def test_inverse_hessian_rejects_negative_curvature():
    hessian = InverseHessian(3)
    assert not hessian.append(np.array([1.0, 0.0]), np.array([-1.0, 0.0]))
    assert len(hessian) == 0


def test_inverse_hessian_history_limit():
    hessian = InverseHessian(2)
    for i in range(1, 5):
        hessian.append(np.array([float(i), 0.0]), np.array([2.0 * i, 0.0]))
    assert len(hessian) == 2

    hessian.clear()
    assert len(hessian) == 0


def rwsc_problem(horizon=40.0):
    space = SpaceSpec(2, 5)
    return ControlProblem.from_params(
        SchemeId.RWSC,
        PhysicalConstants.running_wave(),
        space,
        thermal_state(0.5, space),
        horizon,
        {"delta": -1.0, "omega": 0.2},
        ("delta", "omega"),
    )


def test_minimize_lowers_phonon_number():
    problem = rwsc_problem()
    start = loss(problem, problem.initial_guess)

    result = minimize(problem, LbfgsOptions(max_iter=60))

    assert result.loss_opt < start
    assert result.loss_opt == pytest.approx(
        loss(problem, problem.vector(result.params_opt)), rel=1e-10
    )
    assert set(result.params_opt) == {"delta", "omega"}
    assert result.start == {"delta": -1.0, "omega": 0.2}
    assert result.scales == {"delta": 1.0, "omega": 1.0}
    assert result.evaluations >= result.iterations


def test_minimize_scale_overrides():
    result = minimize(rwsc_problem(), LbfgsOptions(max_iter=2), {"delta": 0.5})
    assert result.scales == {"delta": 0.5, "omega": 1.0}


def test_minimize_reports_bad_start():
    problem = rwsc_problem()

    def broken(*args):
        raise FloatingPointError("overflow")

    with pytest.MonkeyPatch.context() as patch:
        patch.setattr("control.lbfgs.lbfgs", broken)
        with pytest.raises(RuntimeError, match=r"Loss is not finite at the initial guess"):
            minimize(problem)
