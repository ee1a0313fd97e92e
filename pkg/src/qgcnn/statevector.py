"""Dense pure-state simulator for small qubit registers.

Qubits are indexed from 0 and qubit 0 is the most significant bit of the
basis index, so ``|q0 q1 ... q_{n-1}>`` sits at index ``q0*2^(n-1) + ... + q_{n-1}``.

Gates mutate the state in place and also return it so calls can be chained::

    s = init_zero(2)
    expect_z(apply_cnot(apply_ry(s, 0, np.pi), 0, 1), 1)   # -1.0
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EncodingError, UsageError

MAX_QUBITS = 12


@dataclass(eq=False)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ConfigError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise UsageError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def _pairs(self, qubit: int) -> np.ndarray:
        """View with axis 1 selecting the value of ``qubit``."""
        _check_qubit(self, qubit)
        return self.amplitudes.reshape(1 << qubit, 2, -1)


@dataclass(frozen=True)
class RotationTriple:
    alpha: float
    beta: float
    gamma: float


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise UsageError(f"qubit {qubit} out of range for {state.num_qubits}-qubit state")


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=np.complex128)


def rot_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Rz(gamma) @ Ry(beta) @ Rz(alpha)."""
    return rz_matrix(gamma) @ ry_matrix(beta) @ rz_matrix(alpha)


def init_zero(num_qubits: int) -> StateVector:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def apply_matrix(state: StateVector, qubit: int, matrix: np.ndarray) -> StateVector:
    """Apply an arbitrary 2x2 matrix to one qubit."""
    v = state._pairs(qubit)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :].copy()
    v[:, 0, :] = matrix[0, 0] * a0 + matrix[0, 1] * a1
    v[:, 1, :] = matrix[1, 0] * a0 + matrix[1, 1] * a1
    return state


def apply_ry(state: StateVector, qubit: int, theta: float) -> StateVector:
    return apply_matrix(state, qubit, ry_matrix(theta))


def apply_rz(state: StateVector, qubit: int, theta: float) -> StateVector:
    _check_qubit(state, qubit)
    v = state._pairs(qubit)
    v[:, 0, :] *= np.exp(-0.5j * theta)
    v[:, 1, :] *= np.exp(0.5j * theta)
    return state


def apply_rot(state: StateVector, qubit: int, r: RotationTriple) -> StateVector:
    """General rotation; Rz(alpha) acts first, then Ry(beta), then Rz(gamma)."""
    return apply_matrix(state, qubit, rot_matrix(r.alpha, r.beta, r.gamma))


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise UsageError(f"control and target are both qubit {control}")
    n = state.num_qubits
    t = state.amplitudes.reshape((2,) * n)
    idx1 = [slice(None)] * n
    idx1[control] = 1
    # axis index of target inside the control=1 slice shifts down if control precedes it
    axis = target - 1 if target > control else target
    sub = t[tuple(idx1)]
    sub[...] = np.flip(sub, axis=axis).copy()
    return state


def expect_z(state: StateVector, qubit: int) -> float:
    v = state._pairs(qubit)
    p = np.abs(v) ** 2
    return float(p[:, 0, :].sum() - p[:, 1, :].sum())


def set_amplitudes(state: StateVector, values) -> StateVector:
    """Overwrite the state with ``values / ||values||`` (real amplitudes)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (state.dim,):
        raise UsageError(f"expected {state.dim} values, got shape {values.shape}")
    norm = np.linalg.norm(values)
    if not norm > 0:
        raise EncodingError("cannot amplitude-encode a zero-norm vector")
    state.amplitudes[:] = values / norm
    return state
