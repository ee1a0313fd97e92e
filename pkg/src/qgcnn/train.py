"""Mini-batch RMSProp training and evaluation for both model families."""
from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import model
from .autodiff import softmax_xent
from .circuits import DEFAULT_REPEATS
from .data import Dataset
from .errors import ConfigError, NumericError, UsageError
from .graphconv import DEFAULT_HOPS, DEFAULT_SIGMA, cached_pixel_adjacency
from .optim import RMSProp

MODELS = ("qgcnn", "mlp")


@dataclass
class TrainConfig:
    model: str = "qgcnn"
    epochs: int = 30
    batch_size: int = 8
    seed: int = 0
    hops: int = DEFAULT_HOPS
    repeats: int = DEFAULT_REPEATS
    sigma: float = DEFAULT_SIGMA
    normalize_adjacency: bool = False
    eta: float = 0.01
    alpha: float = 0.99
    epsilon: float = 1e-8
    workers: int = 1

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")
        if self.hops < 0 or self.repeats < 1 or not self.sigma > 0:
            raise ConfigError("need hops >= 0, repeats >= 1, sigma > 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    train_acc: float
    test_loss: float
    test_acc: float


@dataclass
class Evaluation:
    loss: float
    accuracy: float
    confusion: np.ndarray = field(repr=False)     # rows true class, cols predicted


class Classifier:
    """Uniform face over the two models: flat parameter vector in, logits out."""

    def __init__(self, cfg: TrainConfig, image_shape=(model.IMAGE_SIZE, model.IMAGE_SIZE)):
        cfg.validate()
        self.cfg = cfg
        if tuple(image_shape) != (model.IMAGE_SIZE, model.IMAGE_SIZE):
            raise UsageError(f"expected {model.IMAGE_SIZE}x{model.IMAGE_SIZE} images, got {image_shape}")
        if cfg.model == "qgcnn":
            self.adjacency = cached_pixel_adjacency(model.IMAGE_SIZE, model.IMAGE_SIZE,
                                                    float(cfg.sigma), bool(cfg.normalize_adjacency))

    def init_params(self, rng: np.random.Generator) -> np.ndarray:
        if self.cfg.model == "qgcnn":
            return model.ModelParams.init(rng, self.cfg.repeats).to_vector()
        return model.MlpParams.init(rng).to_vector()

    def unpack(self, vec):
        if self.cfg.model == "qgcnn":
            return model.ModelParams.from_vector(vec, self.cfg.repeats)
        return model.MlpParams.from_vector(vec)

    def prepare(self, ds: Dataset) -> np.ndarray:
        """Model inputs for a dataset: amplitude rows or flattened pixels."""
        if ds.shape != (model.IMAGE_SIZE, model.IMAGE_SIZE):
            raise UsageError(f"expected {model.IMAGE_SIZE}x{model.IMAGE_SIZE} images, got {ds.shape}")
        if self.cfg.model == "qgcnn":
            return model.encode_images(ds.images, self.adjacency, self.cfg.hops)
        return ds.images.reshape(len(ds), -1).astype(np.float64)

    def logits(self, vec, inputs: np.ndarray) -> np.ndarray:
        p = self.unpack(vec)
        if self.cfg.model == "qgcnn":
            return model.qgcnn_logits(p, inputs)
        return model.mlp_logits(p, inputs)

    def loss_and_grad(self, vec, inputs: np.ndarray, labels: np.ndarray, pool=None):
        p = self.unpack(vec)
        if self.cfg.model == "mlp":
            return model.mlp_loss_and_grad(p, inputs, labels)
        if pool is None:
            losses, grads = model.per_sample_grads(p, inputs, labels)
        else:
            chunks = np.array_split(np.arange(len(inputs)), min(self.cfg.workers, len(inputs)))
            parts = list(pool.map(lambda idx: model.per_sample_grads(p, inputs[idx], labels[idx]),
                                  chunks))
            losses = np.concatenate([lo for lo, _ in parts])
            grads = np.concatenate([g for _, g in parts])
        return float(losses.mean()), grads.mean(axis=0)

    def evaluate(self, vec, inputs: np.ndarray, labels: np.ndarray) -> Evaluation:
        logits = self.logits(vec, inputs)
        loss, _ = softmax_xent(logits, labels)
        pred = model.predict(logits)
        confusion = np.zeros((2, 2), dtype=int)
        np.add.at(confusion, (labels.astype(int), pred), 1)
        return Evaluation(float(loss.mean()), float(np.mean(pred == labels)), confusion)


def train(cfg: TrainConfig, train_ds: Dataset, test_ds: Dataset, on_epoch=None):
    """Run ``cfg.epochs`` epochs; returns ``(params, history)``.

    Parameters are initialised and batches shuffled from independent children
    of ``cfg.seed``. ``on_epoch(metrics)`` is called after every epoch. A
    non-finite batch loss raises :class:`NumericError` carrying the
    parameters in ``.params``.
    """
    clf = Classifier(cfg, train_ds.shape)
    init_seq, shuffle_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    params = clf.init_params(np.random.default_rng(init_seq))
    shuffle_rng = np.random.default_rng(shuffle_seq)
    opt = RMSProp(cfg.eta, cfg.alpha, cfg.epsilon)

    x_train, y_train = clf.prepare(train_ds), train_ds.labels.astype(np.int64)
    x_test, y_test = clf.prepare(test_ds), test_ds.labels.astype(np.int64)
    history = []
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for epoch in range(1, cfg.epochs + 1):
            order = shuffle_rng.permutation(len(x_train))
            for start in range(0, len(order), cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                loss, grad = clf.loss_and_grad(params, x_train[idx], y_train[idx], pool)
                if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
                    err = NumericError(f"non-finite loss {loss} in epoch {epoch} at batch {start // cfg.batch_size}")
                    err.params = params
                    raise err
                params = opt.step(params, grad)
            tr = clf.evaluate(params, x_train, y_train)
            te = clf.evaluate(params, x_test, y_test)
            metrics = EpochMetrics(epoch, tr.loss, tr.accuracy, te.loss, te.accuracy)
            history.append(metrics)
            if on_epoch is not None:
                on_epoch(metrics)
    finally:
        if pool is not None:
            pool.shutdown()
    return params, history


def evaluate(cfg: TrainConfig, params, ds: Dataset) -> Evaluation:
    clf = Classifier(cfg, ds.shape)
    return clf.evaluate(params, clf.prepare(ds), ds.labels.astype(np.int64))
