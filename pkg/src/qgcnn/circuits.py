"""The two variational blocks of the hybrid model, built gate by gate.

Block one starts from an amplitude-encoded image; block two starts from a
product state carrying ``Ry(arctan x_i)`` followed by ``Rz(arctan x_i**2)`` on
each qubit. Both then repeat ``repeats`` times: CNOT ring, then one general
rotation per qubit. Outputs are the Pauli-Z expectation of every qubit.

Block angles are arrays of shape ``(repeats, num_qubits, 3)`` holding
``(alpha, beta, gamma)`` per qubit per layer.
"""
from __future__ import annotations

import numpy as np

from .errors import UsageError
from .statevector import (
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

NUM_QUBITS = 10
DEFAULT_REPEATS = 3


def block_shape(repeats: int = DEFAULT_REPEATS, num_qubits: int = NUM_QUBITS) -> tuple:
    return (repeats, num_qubits, 3)


def check_block_params(angles, num_qubits: int) -> np.ndarray:
    angles = np.asarray(angles, dtype=np.float64)
    if angles.ndim != 3 or angles.shape[1:] != (num_qubits, 3):
        raise UsageError(
            f"block angles must have shape (repeats, {num_qubits}, 3), got {angles.shape}"
        )
    if not np.all(np.isfinite(angles)):
        raise UsageError("block angles must be finite")
    return angles


def amplitude_encode(values) -> StateVector:
    values = np.asarray(values, dtype=np.float64).ravel()
    n = values.size.bit_length() - 1
    if n < 1 or values.size != 1 << n:
        raise UsageError(f"amplitude encoding needs a power-of-two length, got {values.size}")
    return set_amplitudes(init_zero(n), values)


def variational_encode(x, num_qubits: int | None = None) -> StateVector:
    x = np.asarray(x, dtype=np.float64).ravel()
    if num_qubits is not None and x.size != num_qubits:
        raise UsageError(f"expected {num_qubits} encoding values, got {x.size}")
    state = init_zero(x.size)
    for i, xi in enumerate(x):
        apply_ry(state, i, np.arctan(xi))
        apply_rz(state, i, np.arctan(xi * xi))
    return state


def entangling_layer(state: StateVector) -> StateVector:
    """CNOT(0->1), CNOT(1->2), ..., CNOT(n-2 -> n-1), then CNOT(n-1 -> 0)."""
    n = state.num_qubits
    if n == 1:
        return state
    for q in range(n - 1):
        apply_cnot(state, q, q + 1)
    return apply_cnot(state, n - 1, 0)


def run_block(initial: StateVector, angles, entangle: bool = True) -> np.ndarray:
    """Run the repeated entangler + rotation layers and measure every qubit.

    ``initial`` is not modified. ``entangle=False`` drops the CNOT ring, which
    is only meaningful for single-qubit sanity checks.
    """
    angles = check_block_params(angles, initial.num_qubits)
    state = initial.copy()
    for layer in angles:
        if entangle:
            entangling_layer(state)
        for q, (a, b, g) in enumerate(layer):
            apply_rot(state, q, RotationTriple(a, b, g))
    return np.array([expect_z(state, q) for q in range(state.num_qubits)])
