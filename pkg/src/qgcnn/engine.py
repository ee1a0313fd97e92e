"""Batched circuit evaluation used on the training hot path.

Everything here works on a stack of state vectors of shape ``(batch, 2**n)``
and mirrors the gate-by-gate functions in :mod:`qgcnn.circuits`, which stay as
the readable reference. Tests check the two agree.

The ring of CNOTs is a permutation of basis states, so a whole entangling
layer is a single gather.
"""
from __future__ import annotations

from functools import lru_cache

import numba
import numpy as np

HALF_PI = np.pi / 2


def rot_matrices(angles: np.ndarray) -> np.ndarray:
    """Rz(g) Ry(b) Rz(a) for every trailing ``(a, b, g)`` triple.

    Returns an array of shape ``angles.shape[:-1] + (2, 2)``.
    """
    angles = np.asarray(angles, dtype=np.float64)
    a, b, g = angles[..., 0], angles[..., 1], angles[..., 2]
    c, s = np.cos(b / 2), np.sin(b / 2)
    plus = np.exp(-0.5j * (g + a))
    minus = np.exp(-0.5j * (g - a))
    out = np.empty(angles.shape[:-1] + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = plus * c
    out[..., 0, 1] = -minus * s
    out[..., 1, 0] = np.conj(minus) * s
    out[..., 1, 1] = np.conj(plus) * c
    return out


@lru_cache(maxsize=None)
def ring_permutation(num_qubits: int) -> np.ndarray:
    """Gather indices for CNOT(0->1), CNOT(1->2), ..., CNOT(n-1 -> 0) applied in order.

    ``new = old[perm]`` reproduces the layer. For a single qubit the ring is
    empty and the identity is returned.
    """
    n = num_qubits
    dest = np.arange(1 << n)
    if n > 1:
        for c in range(n):
            t = (c + 1) % n
            cbit, tbit = 1 << (n - 1 - c), 1 << (n - 1 - t)
            dest = np.where(dest & cbit, dest ^ tbit, dest)
    perm = np.empty_like(dest)
    perm[dest] = np.arange(1 << n)
    perm.setflags(write=False)
    return perm


@numba.njit(cache=True, nogil=True)
def _rotation_layer(states, mats):
    # states (B, D) complex, mats (B, n, 2, 2); in place
    nb, dim = states.shape
    n = mats.shape[1]
    for b in range(nb):
        for q in range(n):
            stride = 1 << (n - 1 - q)
            m00 = mats[b, q, 0, 0]
            m01 = mats[b, q, 0, 1]
            m10 = mats[b, q, 1, 0]
            m11 = mats[b, q, 1, 1]
            for hi in range(0, dim, 2 * stride):
                for lo in range(stride):
                    i = hi + lo
                    j = i + stride
                    a0 = states[b, i]
                    a1 = states[b, j]
                    states[b, i] = m00 * a0 + m01 * a1
                    states[b, j] = m10 * a0 + m11 * a1


@numba.njit(cache=True, nogil=True)
def _expect_z_all(states, n):
    nb, dim = states.shape
    out = np.zeros((nb, n))
    for b in range(nb):
        for i in range(dim):
            a = states[b, i]
            p = a.real * a.real + a.imag * a.imag
            for q in range(n):
                if (i >> (n - 1 - q)) & 1:
                    out[b, q] -= p
                else:
                    out[b, q] += p
    return out


def expect_z_all(states: np.ndarray) -> np.ndarray:
    """Pauli-Z expectation of every qubit, shape ``(batch, n)``."""
    n = states.shape[1].bit_length() - 1
    return _expect_z_all(np.ascontiguousarray(states), n)


def entangle(states: np.ndarray) -> np.ndarray:
    n = states.shape[1].bit_length() - 1
    return np.take(states, ring_permutation(n), axis=1)


def rotate(states: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """Apply one rotation per qubit in place; ``mats`` is ``(n,2,2)`` or ``(B,n,2,2)``."""
    if mats.ndim == 3:
        mats = np.broadcast_to(mats, (states.shape[0],) + mats.shape)
    _rotation_layer(states, mats)
    return states


def run_layers(states: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """Apply ``entangle`` + ``rotate`` for each layer of ``mats`` (R, n, 2, 2) or (B, R, n, 2, 2)."""
    out = states
    for layer in range(mats.shape[-4]):
        out = rotate(entangle(out), mats[..., layer, :, :, :])
    return out


def block_expectations(states: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Run a variational block on a batch of initial states.

    ``angles`` is ``(R, n, 3)`` shared by the batch or ``(B, R, n, 3)``.
    Returns ``(B, n)`` Z expectations.
    """
    states = np.asarray(states, dtype=np.complex128)
    return expect_z_all(run_layers(states, rot_matrices(angles)))


def block_shift_expectations(states: np.ndarray, angles: np.ndarray):
    """Base and +-pi/2 shifted outputs of a block for every rotation angle.

    Returns ``(base, shifted)`` with ``base`` of shape ``(S, n)`` and
    ``shifted`` of shape ``(S, R, n, 3, 2, n)``; index ``[..., 0, :]`` is the
    ``+pi/2`` evaluation and ``[..., 1, :]`` the ``-pi/2`` one. States before
    the shifted layer are shared rather than recomputed.
    """
    states = np.asarray(states, dtype=np.complex128)
    angles = np.asarray(angles, dtype=np.float64)
    reps, n, _ = angles.shape
    nsamp, dim = states.shape
    base_mats = rot_matrices(angles)

    eye = np.eye(3 * n).reshape(n, 3, n, 3)
    # offsets[q, a, s, q', a'] = +-pi/2 when (q', a') == (q, a)
    offsets = np.stack([eye, -eye], axis=2) * HALF_PI
    nvar = n * 3 * 2

    shifted = np.empty((nsamp, reps, n, 3, 2, n))
    current = states
    for layer in range(reps):
        ent = entangle(current)
        variant_mats = rot_matrices(angles[layer] + offsets).reshape(nvar, n, 2, 2)
        batch = np.repeat(ent, nvar, axis=0)
        rotate(batch, np.tile(variant_mats, (nsamp, 1, 1, 1)))
        batch = run_layers(batch, base_mats[layer + 1:])
        shifted[:, layer] = expect_z_all(batch).reshape(nsamp, n, 3, 2, n)
        current = rotate(ent, base_mats[layer])
    return expect_z_all(current), shifted


def product_states(ry_angles: np.ndarray, rz_angles: np.ndarray) -> np.ndarray:
    """States ``(x)_q Rz(rz_q) Ry(ry_q) |0>`` for each row, shape ``(B, 2**n)``."""
    ry_angles = np.atleast_2d(np.asarray(ry_angles, dtype=np.float64))
    rz_angles = np.atleast_2d(np.asarray(rz_angles, dtype=np.float64))
    c = np.cos(ry_angles / 2) * np.exp(-0.5j * rz_angles)
    s = np.sin(ry_angles / 2) * np.exp(0.5j * rz_angles)
    nb, n = ry_angles.shape
    out = np.ones((nb, 1), dtype=np.complex128)
    for q in range(n):
        out = (out[:, :, None] * np.stack([c[:, q], s[:, q]], axis=1)[:, None, :]).reshape(nb, -1)
    return out
