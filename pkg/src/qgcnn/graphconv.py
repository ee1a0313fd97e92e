"""Parameter-free graph convolution on small graphs and image grids.

Adjacency matrices are plain symmetric ``float64`` arrays. Pixels are
flattened row-major, and pixel centres live on the unit square (spacing
``1/(W-1)`` horizontally and ``1/(H-1)`` vertically) when distances are taken.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NormalizationError, UsageError

DEFAULT_SIGMA = 0.05 * np.pi
DEFAULT_HOPS = 2
MAX_PIXELS = 4096


@dataclass(frozen=True)
class Graph:
    num_nodes: int
    edges: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_edges(cls, num_nodes: int, edges) -> "Graph":
        pairs = set()
        for i, j in edges:
            if not (0 <= i < num_nodes and 0 <= j < num_nodes):
                raise UsageError(f"edge ({i}, {j}) out of range for {num_nodes} nodes")
            if i == j:
                raise UsageError(f"self-edge on node {i}; use add_self_loops")
            pairs.add(frozenset((i, j)))
        return cls(num_nodes, frozenset(pairs))


def adjacency_from_graph(g: Graph) -> np.ndarray:
    a = np.zeros((g.num_nodes, g.num_nodes))
    for edge in g.edges:
        i, j = tuple(edge)
        a[i, j] = a[j, i] = 1.0
    return a


def add_self_loops(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=np.float64) + np.eye(len(a))


def normalize(a: np.ndarray) -> np.ndarray:
    """Symmetric degree normalization ``D^-1/2 A D^-1/2``."""
    a = np.asarray(a, dtype=np.float64)
    deg = a.sum(axis=1)
    bad = np.flatnonzero(deg <= 0)
    if bad.size:
        raise NormalizationError(f"node {bad[0]} has zero degree")
    inv = 1.0 / np.sqrt(deg)
    out = a * inv[:, None] * inv[None, :]
    # (i, j) and (j, i) multiply in different orders; mirror the upper triangle
    return np.triu(out) + np.triu(out, 1).T


def pixel_coordinates(height: int, width: int) -> np.ndarray:
    """Row-major ``(x, y)`` pixel centres on the unit square, shape ``(H*W, 2)``."""
    xs = np.arange(width) / max(width - 1, 1)
    ys = np.arange(height) / max(height - 1, 1)
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def gaussian_pixel_adjacency(height: int, width: int, sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    """``A_ij = exp(-d_ij / sigma**2)`` with ``d_ij`` the Euclidean pixel distance.

    The distance enters unsquared. Entries depend only on the coordinate
    offset of the two pixels, so the matrix is built from a table of offsets.
    """
    if height * width > MAX_PIXELS:
        raise UsageError(f"grid {height}x{width} exceeds {MAX_PIXELS} pixels")
    if not sigma > 0:
        raise UsageError(f"sigma must be positive, got {sigma}")
    dx = np.arange(width) / max(width - 1, 1)
    dy = np.arange(height) / max(height - 1, 1)
    kernel = np.exp(-np.hypot(dy[:, None], dx[None, :]) / sigma**2)
    rows, cols = np.divmod(np.arange(height * width), width)
    return kernel[np.abs(rows[:, None] - rows[None, :]), np.abs(cols[:, None] - cols[None, :])]


@lru_cache(maxsize=8)
def cached_pixel_adjacency(height: int, width: int, sigma: float = DEFAULT_SIGMA,
                           normalized: bool = False) -> np.ndarray:
    a = gaussian_pixel_adjacency(height, width, sigma)
    if normalized:
        a = normalize(a)
    a.setflags(write=False)
    return a


def aggregate(a: np.ndarray, x: np.ndarray, n: int = DEFAULT_HOPS) -> np.ndarray:
    """``A^n x`` as ``n`` successive products; ``x`` may carry extra trailing columns."""
    a = np.asarray(a)
    x = np.asarray(x, dtype=np.float64)
    if n < 0:
        raise UsageError(f"hops must be >= 0, got {n}")
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[1] != x.shape[0]:
        raise UsageError(f"adjacency {a.shape} does not match features {x.shape}")
    for _ in range(n):
        x = a @ x
    return x


def export_adjacency_csv(a: np.ndarray, path) -> None:
    """Dense dump, one row per node, for eyeballing the banded structure."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(a):
            writer.writerow([repr(float(v)) for v in row])
