"""Synthetic single-particle images and the binary dataset container.

Particles start near a common vertex on the left of a 30x30 grid and travel
roughly to the right, drawn as anti-aliased one-pixel strokes (each point
along the path deposits intensity bilinearly onto its four neighbours):

* ``track``: a long, nearly straight segment chain of moderate intensity.
* ``heavy_track``: straighter still and about twice as bright.
* ``kink``: a track that turns by 30-90 degrees at a random interior point.
* ``shower``: a cone of short branching segments whose intensity decays with
  every generation.

Images are padded to 32x32 after generation so their flattened length is a
power of two.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, FormatError, UsageError

KINDS = ("track", "shower", "kink", "heavy_track")
NATIVE_SIZE = 30
PADDED_SIZE = 32
# half-width (radians) of the initial direction distribution around +x
BEAM_SPREAD = 0.25

DATASET_MAGIC = b"QGCD"
DATASET_VERSION = 1
_HEADER = struct.Struct("<4sIIII")


@dataclass
class Dataset:
    images: np.ndarray                  # (N, H, W) float32
    labels: np.ndarray                  # (N,) uint8
    class_names: tuple = ("class0", "class1")
    split: str = "train"

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        if self.images.ndim != 3:
            raise UsageError(f"images must be (N, H, W), got {self.images.shape}")
        if len(self.labels) != len(self.images):
            raise UsageError(f"{len(self.labels)} labels for {len(self.images)} images")
        if np.any(self.labels > 1):
            raise UsageError("labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.images.shape == other.images.shape
                and np.array_equal(self.images, other.images)
                and np.array_equal(self.labels, other.labels))

    @property
    def shape(self) -> tuple:
        return self.images.shape[1:]


@dataclass
class GeneratorConfig:
    class_a: str = "track"
    class_b: str = "shower"
    train_count: int = 160
    test_count: int = 40
    noise_level: float = 0.05
    seed: int = 0
    size: int = NATIVE_SIZE
    pad: int = PADDED_SIZE

    def validate(self) -> None:
        for kind in (self.class_a, self.class_b):
            if kind not in KINDS:
                raise ConfigError(f"unknown particle kind {kind!r}; choose from {KINDS}")
        if self.class_a == self.class_b:
            raise ConfigError(f"both classes are {self.class_a!r}")
        if self.train_count < 1 or self.test_count < 1:
            raise ConfigError("train_count and test_count must be positive")
        if self.noise_level < 0:
            raise ConfigError("noise_level must be >= 0")
        if self.pad < self.size:
            raise ConfigError(f"cannot pad {self.size} down to {self.pad}")


# -- drawing ---------------------------------------------------------------------


def draw_segment(canvas: np.ndarray, p0, p1, intensity: float, step: float = 0.25) -> None:
    """Deposit ``intensity`` per unit length along ``p0 -> p1`` with bilinear weights.

    Points are ``(row, col)`` in pixel units; anything falling off the canvas
    is dropped.
    """
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    length = float(np.hypot(*(p1 - p0)))
    k = max(int(np.ceil(length / step)), 1)
    t = (np.arange(k) + 0.5) / k
    pts = p0 + t[:, None] * (p1 - p0)
    w = intensity * length / k
    r0 = np.floor(pts[:, 0]).astype(int)
    c0 = np.floor(pts[:, 1]).astype(int)
    fr = pts[:, 0] - r0
    fc = pts[:, 1] - c0
    h, wd = canvas.shape
    for dr, dc, wt in ((0, 0, (1 - fr) * (1 - fc)), (0, 1, (1 - fr) * fc),
                       (1, 0, fr * (1 - fc)), (1, 1, fr * fc)):
        r, c = r0 + dr, c0 + dc
        ok = (r >= 0) & (r < h) & (c >= 0) & (c < wd)
        np.add.at(canvas, (r[ok], c[ok]), w * wt[ok])


def _direction(angle: float) -> np.ndarray:
    return np.array([np.sin(angle), np.cos(angle)])


def _vertex(rng, size):
    return np.array([rng.uniform(0.35, 0.65) * (size - 1), rng.uniform(1.0, 4.0)])


def _walk(canvas, rng, start, angle, length, jitter, intensity, pieces=6):
    """Polyline of ``pieces`` segments with Gaussian angular jitter per piece."""
    pos = start
    for _ in range(pieces):
        angle += rng.normal(0.0, jitter)
        nxt = pos + _direction(angle) * (length / pieces)
        draw_segment(canvas, pos, nxt, intensity)
        pos = nxt
    return pos, angle


def _track(canvas, rng, size, intensity=1.0, jitter=np.radians(2.0)):
    angle = rng.uniform(-BEAM_SPREAD, BEAM_SPREAD)
    length = rng.uniform(0.6, 0.8) * size
    _walk(canvas, rng, _vertex(rng, size), angle, length, jitter, intensity)


def _heavy_track(canvas, rng, size):
    _track(canvas, rng, size, intensity=2.0, jitter=np.radians(0.5))


def _kink(canvas, rng, size):
    angle = rng.uniform(-BEAM_SPREAD, BEAM_SPREAD)
    length = rng.uniform(0.6, 0.8) * size
    split = rng.uniform(0.3, 0.5)
    pos, angle = _walk(canvas, rng, _vertex(rng, size), angle, split * length,
                       np.radians(2.0), 1.0, pieces=3)
    bend = np.radians(rng.uniform(30.0, 90.0)) * rng.choice([-1.0, 1.0])
    _walk(canvas, rng, pos, angle + bend, (1 - split) * length, np.radians(2.0), 1.0, pieces=3)


def _shower(canvas, rng, size):
    axis = rng.uniform(-BEAM_SPREAD, BEAM_SPREAD)
    half_open = np.radians(rng.uniform(25.0, 45.0))
    pos = _vertex(rng, size)
    end = pos + _direction(axis) * rng.uniform(2.0, 4.0)
    draw_segment(canvas, pos, end, 1.0)
    tips = [(end, axis)]
    intensity = 1.0
    for _ in range(5):
        intensity *= 0.85
        nxt = []
        for tip, ang in tips:
            for _ in range(2 if len(tips) < 4 else rng.integers(1, 3)):
                a = np.clip(ang + rng.normal(0.0, half_open / 2), axis - half_open, axis + half_open)
                stop = tip + _direction(a) * rng.uniform(2.0, 4.0)
                draw_segment(canvas, tip, stop, intensity)
                nxt.append((stop, a))
        tips = nxt[:24]


_DRAW = {"track": _track, "heavy_track": _heavy_track, "kink": _kink, "shower": _shower}


def draw_particle(kind: str, rng: np.random.Generator, size: int = NATIVE_SIZE,
                  noise_level: float = 0.0) -> np.ndarray:
    if kind not in _DRAW:
        raise ConfigError(f"unknown particle kind {kind!r}")
    canvas = np.zeros((size, size))
    _DRAW[kind](canvas, rng, size)
    if noise_level > 0:
        canvas += noise_level * np.abs(rng.standard_normal(canvas.shape))
    return canvas


def pad_to(img: np.ndarray, size: int = PADDED_SIZE) -> np.ndarray:
    """Zero-pad on the bottom and right to ``size x size``."""
    img = np.asarray(img)
    h, w = img.shape
    if h > size or w > size:
        raise UsageError(f"image {img.shape} larger than {size}x{size}")
    out = np.zeros((size, size), dtype=img.dtype)
    out[:h, :w] = img
    return out


def _draw_split(cfg: GeneratorConfig, count: int, seq: np.random.SeedSequence, split: str) -> Dataset:
    rng = np.random.default_rng(seq)
    labels = np.arange(count) % 2
    rng.shuffle(labels)
    kinds = (cfg.class_a, cfg.class_b)
    images = np.empty((count, cfg.pad, cfg.pad), dtype=np.float32)
    for i, lab in enumerate(labels):
        while True:
            img = draw_particle(kinds[lab], rng, cfg.size, cfg.noise_level)
            if img.max() > 0:
                break
        images[i] = pad_to(img.astype(np.float32), cfg.pad)
    return Dataset(images, labels.astype(np.uint8), kinds, split)


def generate(cfg: GeneratorConfig) -> tuple[Dataset, Dataset]:
    """Balanced train and test splits drawn from independent child seeds."""
    cfg.validate()
    train_seq, test_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    return (_draw_split(cfg, cfg.train_count, train_seq, "train"),
            _draw_split(cfg, cfg.test_count, test_seq, "test"))


# -- file format -----------------------------------------------------------------


def save(ds: Dataset, path) -> None:
    """Little-endian: magic, version, count, height, width, then per sample a
    ``u8`` label and ``height*width`` float32 pixels row-major."""
    n = len(ds)
    h, w = ds.shape
    rec = np.empty(n, dtype=[("label", "u1"), ("pixels", "<f4", (h * w,))])
    rec["label"] = ds.labels
    rec["pixels"] = ds.images.reshape(n, h * w)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(DATASET_MAGIC, DATASET_VERSION, n, h, w))
        fh.write(rec.tobytes())


def load(path, class_names=("class0", "class1"), split: str = "train") -> Dataset:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header, file ends at offset {len(raw)}")
    magic, version, n, h, w = _HEADER.unpack_from(raw)
    if magic != DATASET_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r} at offset 0")
    if version != DATASET_VERSION:
        raise FormatError(f"{path}: unsupported version {version} at offset 4")
    dtype = np.dtype([("label", "u1"), ("pixels", "<f4", (h * w,))])
    expected = _HEADER.size + n * dtype.itemsize
    if len(raw) < expected:
        done = (len(raw) - _HEADER.size) // dtype.itemsize
        offset = _HEADER.size + done * dtype.itemsize
        raise FormatError(f"{path}: truncated in sample {done} at offset {offset}")
    if len(raw) > expected:
        raise FormatError(f"{path}: {len(raw) - expected} trailing bytes at offset {expected}")
    rec = np.frombuffer(raw, dtype=dtype, count=n, offset=_HEADER.size)
    if np.any(rec["label"] > 1):
        bad = int(np.flatnonzero(rec["label"] > 1)[0])
        raise FormatError(f"{path}: label {rec['label'][bad]} at offset "
                          f"{_HEADER.size + bad * dtype.itemsize}")
    images = rec["pixels"].reshape(n, h, w).astype(np.float32)
    return Dataset(images, rec["label"].copy(), tuple(class_names), split)


def summary(ds: Dataset) -> str:
    lines = [f"{ds.split}: {len(ds)} samples, {ds.shape[0]}x{ds.shape[1]}"]
    for lab in (0, 1):
        imgs = ds.images[ds.labels == lab]
        if len(imgs):
            nz = imgs[imgs > 0]
            lines.append(
                f"  {lab} {ds.class_names[lab]}: {len(imgs)} samples, "
                f"mean total intensity {imgs.sum(axis=(1, 2)).mean():.4f}, "
                f"mean nonzero pixel {nz.mean() if nz.size else 0.0:.4f}, "
                f"max pixel {imgs.max():.4f}"
            )
        else:
            lines.append(f"  {lab} {ds.class_names[lab]}: 0 samples")
    return "\n".join(lines)
