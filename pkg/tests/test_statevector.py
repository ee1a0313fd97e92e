import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgcnn.errors import ConfigError, EncodingError, UsageError
from qgcnn.statevector import (
    RotationTriple,
    StateVector,
    apply_cnot,
    apply_rot,
    apply_ry,
    apply_rz,
    expect_z,
    init_zero,
    set_amplitudes,
)

from .conftest import random_state

R2 = 1 / math.sqrt(2)
angles = st.floats(-10, 10, allow_nan=False)


def basis(bits: str) -> StateVector:
    s = init_zero(len(bits))
    s.amplitudes[:] = 0
    s.amplitudes[int(bits, 2)] = 1
    return s


@pytest.mark.parametrize("n", [1, 2, 10])
def test_init_zero(n):
    s = init_zero(n)
    expected = np.zeros(1 << n)
    expected[0] = 1
    np.testing.assert_array_equal(s.amplitudes, expected)


@pytest.mark.parametrize("n", [0, 13, -1])
def test_init_zero_range(n):
    with pytest.raises(ConfigError):
        init_zero(n)


def test_ry_examples():
    np.testing.assert_allclose(apply_ry(init_zero(1), 0, math.pi).amplitudes, [0, 1], atol=1e-16)
    np.testing.assert_array_equal(apply_ry(init_zero(1), 0, 0.0).amplitudes, [1, 0])
    np.testing.assert_allclose(apply_ry(init_zero(1), 0, math.pi / 2).amplitudes, [R2, R2], atol=1e-15)


def test_rz_examples():
    theta = 0.83
    s = apply_rz(init_zero(1), 0, theta)
    np.testing.assert_allclose(s.amplitudes, [np.exp(-0.5j * theta), 0], atol=1e-15)
    assert expect_z(s, 0) == pytest.approx(1.0, abs=1e-15)

    plus = StateVector(1, [R2, R2])
    np.testing.assert_allclose(apply_rz(plus, 0, math.pi).amplitudes,
                               [np.exp(-0.5j * math.pi) * R2, np.exp(0.5j * math.pi) * R2], atol=1e-15)
    s0 = StateVector(1, [0.6, 0.8j])
    np.testing.assert_array_equal(apply_rz(s0.copy(), 0, 0.0).amplitudes, s0.amplitudes)


def test_rot_examples():
    np.testing.assert_allclose(apply_rot(init_zero(1), 0, RotationTriple(0, 0, 0)).amplitudes, [1, 0])
    np.testing.assert_allclose(apply_rot(init_zero(1), 0, RotationTriple(0, math.pi, 0)).amplitudes,
                               [0, 1], atol=1e-16)


def test_rot_equals_composition_random(rng):
    # Rz(alpha) acts first, then Ry(beta), then Rz(gamma)
    for _ in range(100):
        a, b, g = rng.uniform(-2 * np.pi, 2 * np.pi, 3)
        q = int(rng.integers(3))
        s = StateVector(3, random_state(rng, 3))
        got = apply_rot(s.copy(), q, RotationTriple(a, b, g)).amplitudes
        want = apply_rz(apply_ry(apply_rz(s.copy(), q, a), q, b), q, g).amplitudes
        np.testing.assert_allclose(got, want, atol=1e-12, rtol=0)


def test_cnot_truth_table():
    for bits, out in [("00", "00"), ("01", "01"), ("10", "11"), ("11", "10")]:
        np.testing.assert_array_equal(apply_cnot(basis(bits), 0, 1).amplitudes, basis(out).amplitudes)
    sup = StateVector(2, [R2, 0, R2, 0])
    np.testing.assert_allclose(apply_cnot(sup, 0, 1).amplitudes, [R2, 0, 0, R2])


def test_cnot_reverse_and_distant():
    # control below target, and non-adjacent qubits
    np.testing.assert_array_equal(apply_cnot(basis("01"), 1, 0).amplitudes, basis("11").amplitudes)
    np.testing.assert_array_equal(apply_cnot(basis("10010"), 3, 0).amplitudes, basis("00010").amplitudes)
    np.testing.assert_array_equal(apply_cnot(basis("10010"), 0, 4).amplitudes, basis("10011").amplitudes)


def test_gate_errors():
    s = init_zero(2)
    with pytest.raises(UsageError):
        apply_cnot(s, 1, 1)
    with pytest.raises(UsageError):
        apply_ry(s, 2, 0.1)
    with pytest.raises(UsageError):
        apply_rz(s, -1, 0.1)
    with pytest.raises(UsageError):
        expect_z(s, 5)


def test_expect_z():
    assert expect_z(init_zero(1), 0) == 1.0
    assert expect_z(basis("1"), 0) == -1.0
    assert expect_z(apply_ry(init_zero(1), 0, 0.7), 0) == pytest.approx(0.7648421872844885, abs=1e-12)


def test_set_amplitudes():
    np.testing.assert_allclose(set_amplitudes(init_zero(1), [3, 4]).amplitudes, [0.6, 0.8])
    np.testing.assert_array_equal(set_amplitudes(init_zero(2), [1, 0, 0, 0]).amplitudes, [1, 0, 0, 0])
    s = set_amplitudes(init_zero(1), [1, -1])
    np.testing.assert_allclose(s.amplitudes, [R2, -R2])
    assert np.all(s.amplitudes.imag == 0)
    with pytest.raises(EncodingError):
        set_amplitudes(init_zero(2), [0, 0, 0, 0])
    with pytest.raises(UsageError):
        set_amplitudes(init_zero(2), [1, 0])


def test_norm_preserved_over_random_circuit(rng):
    s = StateVector(5, random_state(rng, 5))
    for _ in range(1000):
        kind = rng.integers(4)
        q = int(rng.integers(5))
        if kind == 0:
            apply_ry(s, q, rng.normal() * 3)
        elif kind == 1:
            apply_rz(s, q, rng.normal() * 3)
        elif kind == 2:
            apply_rot(s, q, RotationTriple(*rng.normal(size=3) * 3))
        else:
            apply_cnot(s, q, int((q + 1 + rng.integers(4)) % 5))
        assert abs(s.norm() - 1) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(theta=angles, seed=st.integers(0, 2**32 - 1))
def test_rotations_invert(theta, seed):
    rng = np.random.default_rng(seed)
    orig = StateVector(3, random_state(rng, 3))
    q = seed % 3
    back = apply_ry(apply_ry(orig.copy(), q, theta), q, -theta)
    np.testing.assert_allclose(back.amplitudes, orig.amplitudes, atol=1e-9)
    back = apply_rz(apply_rz(orig.copy(), q, theta), q, -theta)
    np.testing.assert_allclose(back.amplitudes, orig.amplitudes, atol=1e-9)
    back = apply_cnot(apply_cnot(orig.copy(), q, (q + 1) % 3), q, (q + 1) % 3)
    np.testing.assert_allclose(back.amplitudes, orig.amplitudes, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_expect_z_bounded(seed):
    rng = np.random.default_rng(seed)
    s = StateVector(4, random_state(rng, 4))
    for q in range(4):
        assert -1 - 1e-12 <= expect_z(s, q) <= 1 + 1e-12


@settings(max_examples=30, deadline=None)
@given(theta=angles, k=st.integers(0, 3))
def test_ry_locality(theta, k):
    # product state with distinct per-qubit tilts
    s = init_zero(4)
    for q, t in enumerate([0.3, 1.1, 2.0, 2.9]):
        apply_ry(s, q, t)
    before = [expect_z(s, q) for q in range(4)]
    apply_ry(s, k, theta)
    for q in range(4):
        if q != k:
            assert expect_z(s, q) == pytest.approx(before[q], abs=1e-9)
