"""Gradient building blocks for the hybrid model.

Quantum angles are differentiated with the two-term shift rule, the classical
stages analytically. ``finite_diff`` exists only as an independent check.
"""
from __future__ import annotations

import numpy as np

from .errors import UsageError

SHIFT = np.pi / 2


def param_shift(f, theta: float):
    """``(f(theta + pi/2) - f(theta - pi/2)) / 2``.

    Exact for expectation values when ``theta`` drives a single Pauli
    rotation. ``f`` may return a scalar or an array.
    """
    return 0.5 * (np.asarray(f(theta + SHIFT)) - np.asarray(f(theta - SHIFT)))


def finite_diff(f, theta: float, h: float = 1e-5):
    if not h > 0:
        raise UsageError(f"step must be positive, got {h}")
    return (np.asarray(f(theta + h)) - np.asarray(f(theta - h))) / (2 * h)


def finite_diff_grad(f, theta, h: float = 1e-5) -> np.ndarray:
    """Central differences of scalar ``f`` along each coordinate of ``theta``."""
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.empty_like(theta)
    for k in np.ndindex(theta.shape):
        grad[k] = finite_diff(lambda t: f(_replace(theta, k, t)), theta[k], h)
    return grad


def _replace(arr, idx, value):
    out = arr.copy()
    out[idx] = value
    return out


def encoding_angle_derivs(x):
    """Derivatives of the two encoding angles ``arctan(x)`` and ``arctan(x**2)``."""
    x = np.asarray(x, dtype=np.float64)
    return 1.0 / (1.0 + x * x), 2.0 * x / (1.0 + x**4)


def encoding_input_grad(f, x: float):
    """Derivative of an encoded circuit output with respect to its input value.

    ``f(ry_angle, rz_angle)`` evaluates the circuit with the qubit's encoding
    gates set to the given angles (everything else fixed). Both angles are
    shifted independently and combined through the chain rule.
    """
    ry0, rz0 = np.arctan(x), np.arctan(x * x)
    g_ry = param_shift(lambda t: f(t, rz0), ry0)
    g_rz = param_shift(lambda t: f(ry0, t), rz0)
    d_ry, d_rz = encoding_angle_derivs(x)
    return g_ry * d_ry + g_rz * d_rz


def log_softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax_xent(logits, labels):
    """Per-sample cross-entropy and its gradient with respect to the logits.

    ``logits`` is ``(..., C)`` and ``labels`` integer class indices ``(...)``.
    """
    logp = log_softmax(logits)
    labels = np.asarray(labels)
    onehot = np.eye(logp.shape[-1])[labels]
    loss = -(logp * onehot).sum(axis=-1)
    return loss, np.exp(logp) - onehot


def classical_grads(logits, label: int, features, weights):
    """Loss and gradients of the linear readout ``logits = W.T @ features + b``.

    Returns ``(loss, dL/dfeatures, dL/dW, dL/db)``; ``weights`` has shape
    ``(num_features, num_classes)``.
    """
    features = np.asarray(features, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    loss, dlogits = softmax_xent(logits, label)
    return float(loss), weights @ dlogits, np.outer(features, dlogits), dlogits
