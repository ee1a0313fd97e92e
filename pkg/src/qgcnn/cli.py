"""Command-line entry point: ``qgcnn {gen-data,train,eval,summary,export-adjacency}``.

Exit codes: 0 success, 1 usage or configuration, 2 unreadable or malformed
data, 3 numeric failure (non-finite loss), 4 failure writing an output file.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import data, model
from .errors import ConfigError, FormatError, NumericError, QGCNNError, UsageError
from .graphconv import DEFAULT_HOPS, DEFAULT_SIGMA, export_adjacency_csv, gaussian_pixel_adjacency, normalize
from .train import MODELS, TrainConfig, evaluate, train

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC, EXIT_WRITE = 0, 1, 2, 3, 4
CSV_COLUMNS = "epoch,train_loss,train_acc,test_loss,test_acc"


class OutputError(QGCNNError):
    exit_code = EXIT_WRITE


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=MODELS, default="qgcnn")
    p.add_argument("--hops", type=int, default=DEFAULT_HOPS, help="graph convolution order")
    p.add_argument("--repeats", type=int, default=3, help="layers per variational block")
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA, help="Gaussian adjacency scale")
    p.add_argument("--normalize-adjacency", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgcnn", description="Generate particle images, train and evaluate QGCNN or MLP classifiers.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate synthetic train/test datasets")
    g.add_argument("--class-a", default="track", choices=data.KINDS)
    g.add_argument("--class-b", default="shower", choices=data.KINDS)
    g.add_argument("--train-count", type=int, default=160)
    g.add_argument("--test-count", type=int, default=40)
    g.add_argument("--noise-level", type=float, default=data.GeneratorConfig.noise_level)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--train-out", required=True)
    g.add_argument("--test-out", required=True)

    t = sub.add_parser("train", help="train a model and write metrics + checkpoint")
    _add_model_args(t)
    t.add_argument("--train", required=True, dest="train_path")
    t.add_argument("--test", required=True, dest="test_path")
    t.add_argument("--epochs", type=int, default=30)
    t.add_argument("--batch-size", type=int, default=8)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--eta", type=float, default=0.01)
    t.add_argument("--alpha", type=float, default=0.99)
    t.add_argument("--epsilon", type=float, default=1e-8)
    t.add_argument("--workers", type=int, default=1, help="threads for per-sample gradients")
    t.add_argument("--serial", action="store_true", help="force single-threaded execution")
    t.add_argument("--metrics", required=True, help="output CSV path")
    t.add_argument("--checkpoint", required=True, help="output checkpoint path")

    e = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    _add_model_args(e)
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--data", required=True)

    s = sub.add_parser("summary", help="print per-class counts and intensity statistics")
    s.add_argument("path")

    a = sub.add_parser("export-adjacency", help="dump the pixel adjacency as dense CSV")
    a.add_argument("--size", type=int, default=model.IMAGE_SIZE)
    a.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    a.add_argument("--normalize-adjacency", action="store_true")
    a.add_argument("--out", required=True)
    return parser


def _load(path: str, split: str) -> data.Dataset:
    try:
        return data.load(path, split=split)
    except OSError as exc:
        raise FormatError(f"cannot read dataset {path}: {exc}") from exc


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        model=args.model, epochs=args.epochs, batch_size=args.batch_size, seed=args.seed,
        hops=args.hops, repeats=args.repeats, sigma=args.sigma,
        normalize_adjacency=args.normalize_adjacency, eta=args.eta, alpha=args.alpha,
        epsilon=args.epsilon, workers=1 if args.serial else args.workers,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_gen_data(args) -> int:
    cfg = data.GeneratorConfig(args.class_a, args.class_b, args.train_count, args.test_count,
                               args.noise_level, args.seed)
    train_ds, test_ds = data.generate(cfg)
    for ds, path in ((train_ds, args.train_out), (test_ds, args.test_out)):
        try:
            data.save(ds, path)
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
        counts = np.bincount(ds.labels, minlength=2)
        print(f"{path}: {ds.split} {counts[0]} x {cfg.class_a}, {counts[1]} x {cfg.class_b}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _train_config(args)
    cfg.validate()
    train_ds = _load(args.train_path, "train")
    test_ds = _load(args.test_path, "test")
    for ds, path in ((train_ds, args.train_path), (test_ds, args.test_path)):
        if ds.shape != (model.IMAGE_SIZE, model.IMAGE_SIZE):
            raise UsageError(f"{path}: images are {ds.shape[0]}x{ds.shape[1]}, "
                             f"expected {model.IMAGE_SIZE}x{model.IMAGE_SIZE}")
    record = dict(cfg.as_dict(), train=args.train_path, test=args.test_path)
    record.pop("workers")
    try:
        fh = open(args.metrics, "w", newline="\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {args.metrics}: {exc}") from exc
    with fh:
        fh.write(f"# config: {json.dumps(record, sort_keys=True)}\n{CSV_COLUMNS}\n")

        def log(m):
            fh.write(",".join([str(m.epoch)] + [_fmt(v) for v in
                              (m.train_loss, m.train_acc, m.test_loss, m.test_acc)]) + "\n")
            fh.flush()

        try:
            params, history = train(cfg, train_ds, test_ds, on_epoch=log)
        except NumericError as exc:
            dump = args.checkpoint + ".nan-dump"
            model.save_checkpoint(exc.params, dump)
            raise NumericError(f"{exc}; parameters dumped to {dump}") from exc
    try:
        model.save_checkpoint(params, args.checkpoint)
    except OSError as exc:
        raise OutputError(f"cannot write checkpoint {args.checkpoint}: {exc}") from exc
    last = history[-1]
    print(f"{cfg.model}: {cfg.epochs} epochs, train loss {last.train_loss:.4f} "
          f"acc {last.train_acc:.4f}, test loss {last.test_loss:.4f} acc {last.test_acc:.4f}")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = TrainConfig(model=args.model, hops=args.hops, repeats=args.repeats, sigma=args.sigma,
                      normalize_adjacency=args.normalize_adjacency)
    cfg.validate()
    try:
        params = model.load_checkpoint(args.checkpoint)
    except OSError as exc:
        raise FormatError(f"cannot read checkpoint {args.checkpoint}: {exc}") from exc
    expected = _expected_count(cfg)
    if params.size != expected:
        raise ConfigError(f"checkpoint holds {params.size} parameters but model {cfg.model} "
                          f"needs {expected}: model/checkpoint mismatch")
    ds = _load(args.data, "test")
    res = evaluate(cfg, params, ds)
    print(f"loss {_fmt(res.loss)}")
    print(f"accuracy {_fmt(res.accuracy)}")
    print("confusion (rows true, cols predicted)")
    for row in res.confusion:
        print(" ".join(str(v) for v in row))
    return EXIT_OK


def _expected_count(cfg: TrainConfig) -> int:
    if cfg.model == "qgcnn":
        return model.count_parameters(model.ModelParams.zeros(cfg.repeats))
    return model.count_parameters(model.MlpParams.init(np.random.default_rng(0)))


def cmd_summary(args) -> int:
    print(data.summary(_load(args.path, "train")))
    return EXIT_OK


def cmd_export_adjacency(args) -> int:
    a = gaussian_pixel_adjacency(args.size, args.size, args.sigma)
    if args.normalize_adjacency:
        a = normalize(a)
    try:
        export_adjacency_csv(a, args.out)
    except OSError as exc:
        raise OutputError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


COMMANDS = {"gen-data": cmd_gen_data, "train": cmd_train, "eval": cmd_eval,
            "summary": cmd_summary, "export-adjacency": cmd_export_adjacency}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except QGCNNError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code if not isinstance(exc, (ConfigError, UsageError)) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
