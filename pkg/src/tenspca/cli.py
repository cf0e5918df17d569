"""Command-line interface.

Subcommands: fit, transform, tensor-reduce, classify, experiment, synth.
All numeric output uses full round-trip precision; errors exit nonzero
with a one-line ``error: <Type>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import admm, baselines, data, experiment, model_io
from .classifiers import KrrParams, LabeledFeatures, krr_fit, krr_predict_batch, nn_classify_batch
from .errors import TenspcaError
from .metrics import evaluate
from .pipeline import TensorPcaConfig, mode3_output_counts, tensor_sparse_pca, tensor_sparse_pca_train_test


def _rho_value(text):
    return None if text == "auto" else float(text)


def _mode3_value(text):
    return None if text == "keep" else int(text)


def _sigma_value(text):
    return None if text == "auto" else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tenspca",
        description="Sparse PCA via ADMM, tensor-mode reduction, and recognition benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a PCA or sparse PCA model on CSV rows")
    p.add_argument("--input", required=True, help="CSV of label,value,... rows")
    p.add_argument("--method", required=True, choices=("pca", "spca"))
    p.add_argument("--dim", required=True, type=int)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="sparsity weight (spca; default 0.01*rho)")
    p.add_argument("--rho", type=_rho_value, default=None,
                   help="penalty weight or 'auto' (spca)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output model file")

    p = sub.add_parser("transform", help="project CSV rows through a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="output CSV (labels preserved)")

    p = sub.add_parser("tensor-reduce", help="run the tensor pipeline on datasets")
    p.add_argument("--train", required=True)
    p.add_argument("--test", default=None)
    p.add_argument("--height", required=True, type=int)
    p.add_argument("--width", required=True, type=int)
    p.add_argument("--dim1", type=int, default=25)
    p.add_argument("--dim2", type=int, default=25)
    p.add_argument("--mode3", type=_mode3_value, default=None,
                   help="'keep' (default) or a fixed per-person count")
    p.add_argument("--apply", choices=("per-split", "fit-transform"),
                   default="per-split")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--rho", type=_rho_value, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("classify", help="train a classifier and score a test CSV")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--classifier", required=True, choices=("nn", "krr"))
    p.add_argument("--sigma", type=_sigma_value, default=None,
                   help="'auto' (median heuristic) or a value (krr)")
    p.add_argument("--c", type=float, default=1e-3, help="ridge weight (krr)")
    p.add_argument("--out", required=True, help="output JSON report")

    p = sub.add_parser("experiment", help="run a variant x classifier grid")
    p.add_argument("--config", required=True, help="JSON experiment config")

    p = sub.add_parser("synth", help="generate synthetic blob datasets")
    p.add_argument("--classes", type=int, default=15)
    p.add_argument("--train-per-class", type=int, default=8)
    p.add_argument("--test-per-class", type=int, default=3)
    p.add_argument("--height", type=int, default=32)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--separation", type=float, required=True)
    p.add_argument("--noise", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)

    return parser


def _cmd_fit(args) -> int:
    _, rows = data.load_csv_matrix(args.input)
    if args.method == "pca":
        model = baselines.pca_fit(rows, args.dim)
    else:
        params = admm.AdmmParams(rho=args.rho, lam=args.lam, seed=args.seed)
        model = admm.fit(rows, args.dim, params)
    model_io.save_model(model, args.out)
    print(f"saved {args.method} model: p={rows.shape[1]} dim={args.dim} -> {args.out}")
    return 0


def _cmd_transform(args) -> int:
    model = model_io.load_model(args.model)
    labels, rows = data.load_csv_matrix(args.input)
    if isinstance(model, admm.SparsePcaModel):
        projected = admm.transform(model, rows)
    else:
        projected = baselines.pca_transform(model, rows)
    data.save_csv_matrix(labels, projected, args.out)
    print(f"wrote {projected.shape[0]} x {projected.shape[1]} features -> {args.out}")
    return 0


def _cmd_tensor_reduce(args) -> int:
    train = data.load_csv_dataset(args.train, args.height, args.width)
    params = admm.AdmmParams(rho=args.rho, lam=args.lam, seed=args.seed)
    cfg = TensorPcaConfig(
        dim1=args.dim1,
        dim2=args.dim2,
        mode3_dim=args.mode3,
        admm=params,
        application=args.apply,
    )

    def reduced_dataset(ds, tensor):
        labels = np.repeat(ds.block_labels(), mode3_output_counts(ds.partition, args.mode3))
        return data.Dataset(
            tensor=tensor,
            labels=labels,
            partition=mode3_output_counts(ds.partition, args.mode3),
        )

    if args.test is None:
        out = tensor_sparse_pca(train.tensor, train.partition, cfg)
        data.save_csv_dataset(reduced_dataset(train, out), f"{args.out_prefix}_train.csv")
        print(f"reduced train -> {args.out_prefix}_train.csv shape={out.shape}")
        return 0
    test = data.load_csv_dataset(args.test, args.height, args.width)
    train_out, test_out = tensor_sparse_pca_train_test(
        train.tensor, train.partition, test.tensor, test.partition, cfg
    )
    data.save_csv_dataset(reduced_dataset(train, train_out), f"{args.out_prefix}_train.csv")
    data.save_csv_dataset(reduced_dataset(test, test_out), f"{args.out_prefix}_test.csv")
    print(
        f"reduced train shape={train_out.shape}, test shape={test_out.shape} "
        f"-> {args.out_prefix}_train.csv, {args.out_prefix}_test.csv"
    )
    return 0


def _cmd_classify(args) -> int:
    train_labels, train_rows = data.load_csv_matrix(args.train)
    test_labels, test_rows = data.load_csv_matrix(args.test)
    labeled = LabeledFeatures(features=train_rows, labels=train_labels)
    if args.classifier == "nn":
        predicted = nn_classify_batch(labeled, test_rows)
    else:
        model = krr_fit(labeled, KrrParams(sigma=args.sigma, c=args.c))
        predicted = krr_predict_batch(model, test_rows)
    n_classes = int(max(train_labels.max(), test_labels.max())) + 1
    report = evaluate(predicted, test_labels, n_classes)
    with open(args.out, "w", encoding="ascii") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    print(
        f"accuracy={report.plain_accuracy!r} q_accuracy={report.q_accuracy!r} "
        f"({report.n_test} samples, {report.n_classes} classes) -> {args.out}"
    )
    return 0


def _cmd_experiment(args) -> int:
    cfg = experiment.config_from_json(args.config)
    rows = experiment.run_experiment(cfg)
    text = experiment.format_results_tsv(rows)
    if cfg.output:
        with open(cfg.output, "w", encoding="ascii") as fh:
            fh.write(text)
        print(f"wrote {len(rows)} rows -> {cfg.output}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_synth(args) -> int:
    train, test = data.synth_blobs(
        args.classes,
        args.train_per_class,
        args.test_per_class,
        args.height,
        args.width,
        args.separation,
        args.noise,
        args.seed,
    )
    data.save_csv_dataset(train, f"{args.out_prefix}_train.csv")
    data.save_csv_dataset(test, f"{args.out_prefix}_test.csv")
    print(
        f"wrote {train.n_images} train and {test.n_images} test samples "
        f"-> {args.out_prefix}_train.csv, {args.out_prefix}_test.csv"
    )
    return 0


_COMMANDS = {
    "fit": _cmd_fit,
    "transform": _cmd_transform,
    "tensor-reduce": _cmd_tensor_reduce,
    "classify": _cmd_classify,
    "experiment": _cmd_experiment,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (TenspcaError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
