import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgcnn.errors import UsageError
from qgcnn.optim import RMSProp


def test_first_step_seeds_average_with_g0_squared():
    opt = RMSProp()
    theta = opt.step(np.zeros(1), np.ones(1))
    np.testing.assert_array_equal(opt.sq_avg, [1.0])
    assert theta[0] == pytest.approx(-0.01 / (1 + 1e-8), abs=1e-15)


def test_two_constant_steps_hand_iterated():
    opt = RMSProp()
    t1 = opt.step(np.zeros(1), np.ones(1))
    t2 = opt.step(t1, np.ones(1))
    assert opt.sq_avg[0] == pytest.approx(0.99 * 1 + 0.01 * 1, abs=1e-15)
    assert t2[0] == pytest.approx(t1[0] - 0.01 / (1 + 1e-8), abs=1e-12)


def test_zero_gradient_leaves_params():
    opt = RMSProp()
    t = opt.step(np.array([0.5, -1.0]), np.array([2.0, 3.0]))
    np.testing.assert_array_equal(opt.step(t, np.zeros(2)), t)


def test_length_mismatch():
    opt = RMSProp()
    with pytest.raises(UsageError):
        opt.step(np.zeros(3), np.zeros(2))
    opt.step(np.zeros(2), np.ones(2))
    with pytest.raises(UsageError):
        opt.step(np.zeros(3), np.ones(3))


def test_constant_gradient_step_tends_to_eta():
    opt = RMSProp()
    theta = np.zeros(1)
    for _ in range(200):
        new = opt.step(theta, np.full(1, 3.0))
        delta, theta = abs(new[0] - theta[0]), new
    assert delta == pytest.approx(0.01, rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(grads=st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=20))
def test_sq_avg_nonnegative_and_step_bounded(grads):
    opt = RMSProp()
    theta = np.zeros(1)
    for g in grads:
        new = opt.step(theta, np.array([g]))
        assert opt.sq_avg[0] >= 0
        if opt.sq_avg[0] > 0:
            assert abs(new[0] - theta[0]) <= 0.01 * abs(g) / np.sqrt(opt.sq_avg[0]) + 1e-15
        theta = new


def test_deterministic():
    rng = np.random.default_rng(5)
    grads = rng.normal(size=(10, 4))
    runs = []
    for _ in range(2):
        opt, t = RMSProp(), np.zeros(4)
        for g in grads:
            t = opt.step(t, g)
        runs.append(t)
    assert np.array_equal(*runs)
