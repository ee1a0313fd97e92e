"""Hybrid graph-convolution + two-block VQC classifier, and the MLP baseline.

Forward pass of the hybrid model for one image::

    flatten -> A^hops x -> amplitude encode -> block 1 -> tanh
            -> variational encode -> block 2 -> W.T m + b

The graph convolution and amplitude encoding carry no trainable parameters,
so :func:`encode_images` can be run once per dataset and its output reused.
Flat parameter vectors are ordered block 1 angles, block 2 angles, readout
weights (row-major, ``(10, 2)``), readout bias.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import engine
from .autodiff import SHIFT, encoding_angle_derivs, softmax_xent
from .circuits import DEFAULT_REPEATS, NUM_QUBITS, check_block_params
from .errors import EncodingError, FormatError, UsageError
from .graphconv import DEFAULT_HOPS, aggregate

NUM_CLASSES = 2
IMAGE_SIZE = 32
MLP_HIDDEN = 128


@dataclass
class ModelParams:
    block1: np.ndarray
    block2: np.ndarray
    readout_w: np.ndarray
    readout_b: np.ndarray

    def __post_init__(self):
        self.block1 = check_block_params(self.block1, NUM_QUBITS)
        self.block2 = check_block_params(self.block2, NUM_QUBITS)
        self.readout_w = np.asarray(self.readout_w, dtype=np.float64).reshape(NUM_QUBITS, NUM_CLASSES)
        self.readout_b = np.asarray(self.readout_b, dtype=np.float64).reshape(NUM_CLASSES)

    @property
    def repeats(self) -> int:
        return self.block1.shape[0]

    @classmethod
    def init(cls, rng: np.random.Generator, repeats: int = DEFAULT_REPEATS) -> "ModelParams":
        shape = (repeats, NUM_QUBITS, 3)
        bound = 1 / np.sqrt(NUM_QUBITS)
        return cls(
            block1=rng.uniform(-np.pi, np.pi, shape),
            block2=rng.uniform(-np.pi, np.pi, shape),
            readout_w=rng.uniform(-bound, bound, (NUM_QUBITS, NUM_CLASSES)),
            readout_b=np.zeros(NUM_CLASSES),
        )

    @classmethod
    def zeros(cls, repeats: int = DEFAULT_REPEATS) -> "ModelParams":
        shape = (repeats, NUM_QUBITS, 3)
        return cls(np.zeros(shape), np.zeros(shape), np.zeros((NUM_QUBITS, NUM_CLASSES)),
                   np.zeros(NUM_CLASSES))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.block1.ravel(), self.block2.ravel(),
                               self.readout_w.ravel(), self.readout_b])

    @classmethod
    def from_vector(cls, vec, repeats: int = DEFAULT_REPEATS) -> "ModelParams":
        vec = np.asarray(vec, dtype=np.float64)
        nb = repeats * NUM_QUBITS * 3
        expected = 2 * nb + NUM_QUBITS * NUM_CLASSES + NUM_CLASSES
        if vec.shape != (expected,):
            raise UsageError(f"expected {expected} parameters, got {vec.size}")
        shape = (repeats, NUM_QUBITS, 3)
        return cls(vec[:nb].reshape(shape), vec[nb:2 * nb].reshape(shape),
                   vec[2 * nb:-NUM_CLASSES], vec[-NUM_CLASSES:])


@dataclass
class MlpParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @classmethod
    def init(cls, rng: np.random.Generator, inputs: int = IMAGE_SIZE**2,
             hidden: int = MLP_HIDDEN) -> "MlpParams":
        b_in, b_hid = 1 / np.sqrt(inputs), 1 / np.sqrt(hidden)
        return cls(rng.uniform(-b_in, b_in, (inputs, hidden)), np.zeros(hidden),
                   rng.uniform(-b_hid, b_hid, (hidden, NUM_CLASSES)), np.zeros(NUM_CLASSES))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.w1.ravel(), self.b1, self.w2.ravel(), self.b2])

    @classmethod
    def from_vector(cls, vec, inputs: int = IMAGE_SIZE**2, hidden: int = MLP_HIDDEN) -> "MlpParams":
        vec = np.asarray(vec, dtype=np.float64)
        sizes = [inputs * hidden, hidden, hidden * NUM_CLASSES, NUM_CLASSES]
        if vec.shape != (sum(sizes),):
            raise UsageError(f"expected {sum(sizes)} parameters, got {vec.size}")
        w1, b1, w2, b2 = np.split(vec, np.cumsum(sizes)[:-1])
        return cls(w1.reshape(inputs, hidden), b1, w2.reshape(hidden, NUM_CLASSES), b2)


def count_parameters(p) -> int:
    return int(p.to_vector().size)


def predict(logits) -> np.ndarray | int:
    """Argmax over classes; ties go to class 0."""
    logits = np.asarray(logits)
    out = np.argmax(logits, axis=-1)
    return int(out) if out.ndim == 0 else out


# -- hybrid model ----------------------------------------------------------------


def encode_images(images, adjacency: np.ndarray, hops: int = DEFAULT_HOPS) -> np.ndarray:
    """Aggregate and L2-normalize a stack of images into real amplitude vectors.

    Returns ``(N, H*W)`` float64 rows of unit norm. A row with zero norm
    raises :class:`EncodingError` naming the sample.
    """
    images = np.asarray(images, dtype=np.float64)
    if images.ndim == 2:
        images = images[None]
    flat = images.reshape(len(images), -1)
    # one mat-vec per image: a batched product would round differently per batch size
    agg = np.array([aggregate(adjacency, row, hops) for row in flat]).reshape(flat.shape)
    norms = np.linalg.norm(agg, axis=1)
    bad = np.flatnonzero(~(norms > 0))
    if bad.size:
        raise EncodingError(f"sample {bad[0]} has zero norm after graph convolution")
    return agg / norms[:, None]


def _block2_inputs(m1: np.ndarray):
    x = np.tanh(m1)
    return x, np.arctan(x), np.arctan(x * x)


def qgcnn_logits(p: ModelParams, amplitudes: np.ndarray) -> np.ndarray:
    """Logits ``(N, 2)`` from pre-encoded amplitude rows."""
    m1 = engine.block_expectations(amplitudes, p.block1)
    _, ry, rz = _block2_inputs(m1)
    m2 = engine.block_expectations(engine.product_states(ry, rz), p.block2)
    return m2 @ p.readout_w + p.readout_b


def qgcnn_forward(p: ModelParams, img, adjacency: np.ndarray, hops: int = DEFAULT_HOPS) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.shape != (IMAGE_SIZE, IMAGE_SIZE):
        raise UsageError(f"expected a {IMAGE_SIZE}x{IMAGE_SIZE} image, got {img.shape}")
    return qgcnn_logits(p, encode_images(img, adjacency, hops))[0]


def _encoding_shift_states(ry: np.ndarray, rz: np.ndarray) -> np.ndarray:
    """Product states with one encoding angle shifted by +-pi/2.

    Output rows are ordered ``(sample, qubit, [ry, rz], [+, -])``.
    """
    s, n = ry.shape
    ry_v = np.broadcast_to(ry[:, None, None, None, :], (s, n, 2, 2, n)).copy()
    rz_v = np.broadcast_to(rz[:, None, None, None, :], (s, n, 2, 2, n)).copy()
    q = np.arange(n)
    for sign, off in enumerate((SHIFT, -SHIFT)):
        ry_v[:, q, 0, sign, q] += off
        rz_v[:, q, 1, sign, q] += off
    return engine.product_states(ry_v.reshape(-1, n), rz_v.reshape(-1, n))


def _contract(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # sum over the last axis; unlike einsum/matmul the result for one sample
    # does not depend on how many samples share the call
    return (a * b).sum(axis=-1)


def per_sample_grads(p: ModelParams, amplitudes: np.ndarray, labels) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample losses ``(S,)`` and flat gradients ``(S, P)``.

    Every quantum derivative is a two-term shift; the classical stages
    (readout, softmax, tanh, arctan encoding) are chained analytically.
    """
    labels = np.asarray(labels)
    amplitudes = np.atleast_2d(amplitudes)
    s = len(amplitudes)
    n = NUM_QUBITS

    m1, sh1 = engine.block_shift_expectations(amplitudes, p.block1)
    jac1 = 0.5 * (sh1[..., 0, :] - sh1[..., 1, :])             # (S, R, n, 3, n)

    x, ry, rz = _block2_inputs(m1)
    m2, sh2 = engine.block_shift_expectations(engine.product_states(ry, rz), p.block2)
    jac2 = 0.5 * (sh2[..., 0, :] - sh2[..., 1, :])

    enc = engine.block_expectations(_encoding_shift_states(ry, rz), p.block2)
    enc = enc.reshape(s, n, 2, 2, n)
    g_enc = 0.5 * (enc[:, :, :, 0, :] - enc[:, :, :, 1, :])    # (S, i, [ry, rz], k)
    d_ry, d_rz = encoding_angle_derivs(x)
    dm2_dx = g_enc[:, :, 0, :] * d_ry[..., None] + g_enc[:, :, 1, :] * d_rz[..., None]

    logits = m2 @ p.readout_w + p.readout_b
    loss, dlogits = softmax_xent(logits, labels)
    dm2 = _contract(dlogits[:, None, :], p.readout_w)
    dx = _contract(dm2_dx, dm2[:, None, :])
    dm1 = dx * (1.0 - x * x)

    grads = np.concatenate([
        _contract(jac1, dm1[:, None, None, None, :]).reshape(s, -1),
        _contract(jac2, dm2[:, None, None, None, :]).reshape(s, -1),
        (m2[:, :, None] * dlogits[:, None, :]).reshape(s, -1),
        dlogits,
    ], axis=1)
    return loss, grads


def qgcnn_loss_and_grad_encoded(p: ModelParams, amplitudes: np.ndarray, labels):
    loss, grads = per_sample_grads(p, amplitudes, labels)
    return float(loss.mean()), grads.mean(axis=0)


def qgcnn_loss_and_grad(p: ModelParams, images, labels, adjacency: np.ndarray,
                        hops: int = DEFAULT_HOPS):
    """Mean cross-entropy over a non-empty batch and its flat gradient."""
    images = np.asarray(images, dtype=np.float64)
    if images.ndim == 2:
        images = images[None]
        labels = np.atleast_1d(labels)
    if len(images) == 0:
        raise UsageError("empty batch")
    return qgcnn_loss_and_grad_encoded(p, encode_images(images, adjacency, hops), labels)


def qgcnn_loss(p: ModelParams, amplitudes: np.ndarray, labels) -> float:
    loss, _ = softmax_xent(qgcnn_logits(p, amplitudes), np.asarray(labels))
    return float(loss.mean())


# -- MLP baseline ----------------------------------------------------------------


def mlp_logits(p: MlpParams, images) -> np.ndarray:
    x = np.asarray(images, dtype=np.float64).reshape(-1, p.w1.shape[0])
    h = np.maximum(x @ p.w1 + p.b1, 0.0)
    return h @ p.w2 + p.b2


def mlp_forward(p: MlpParams, img) -> np.ndarray:
    return mlp_logits(p, img)[0]


def mlp_loss_and_grad(p: MlpParams, images, labels):
    x = np.asarray(images, dtype=np.float64).reshape(-1, p.w1.shape[0])
    pre = x @ p.w1 + p.b1
    h = np.maximum(pre, 0.0)
    loss, dlogits = softmax_xent(h @ p.w2 + p.b2, np.atleast_1d(labels))
    dlogits = dlogits / len(x)
    dh = (dlogits @ p.w2.T) * (pre > 0)
    grad = np.concatenate([(x.T @ dh).ravel(), dh.sum(axis=0),
                           (h.T @ dlogits).ravel(), dlogits.sum(axis=0)])
    return float(loss.mean()), grad


# -- checkpoints -----------------------------------------------------------------

CHECKPOINT_MAGIC = b"QGCN"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def save_checkpoint(vec, path) -> None:
    """16-byte header (magic, version, count, reserved) then little-endian float64s."""
    vec = np.asarray(vec, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, vec.size, 0))
        fh.write(vec.tobytes())


def load_checkpoint(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header at offset {len(raw)}")
    magic, version, count, _ = _HEADER.unpack_from(raw)
    if magic != CHECKPOINT_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r} at offset 0")
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"{path}: unsupported version {version} at offset 4")
    expected = _HEADER.size + 8 * count
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(raw)} "
                          f"(data ends at offset {len(raw)})")
    return np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).astype(np.float64)
