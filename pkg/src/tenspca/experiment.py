"""Experiment orchestration: variant x classifier grids over a dataset pair.

A run builds feature sets per variant (raw pixels, PCA / sparse PCA at a
target dimension, or the tensor pipeline), scores every classifier on each,
and emits one result row per cell. Rows are ordered by the config's variant
then classifier order and are deterministic for a fixed seed, except for
the wall-time column.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .admm import AdmmParams, fit, transform
from .baselines import pca_fit, pca_transform
from .classifiers import (
    KrrParams,
    LabeledFeatures,
    krr_fit,
    krr_predict_batch,
    nn_classify_batch,
)
from .data import Dataset, load_csv_dataset, synth_blobs
from .errors import ParseError, ShapeMismatch
from .metrics import EvalReport, evaluate
from .pipeline import TensorPcaConfig, mode3_output_counts, tensor_sparse_pca_train_test

TSV_HEADER = "variant\tclassifier\taccuracy\tq_accuracy\tseconds"


@dataclass(frozen=True)
class CsvSource:
    train_path: str
    test_path: str
    height: int
    width: int


@dataclass(frozen=True)
class SynthSource:
    n_classes: int = 15
    train_per_class: int = 8
    test_per_class: int = 3
    height: int = 32
    width: int = 32
    separation: float = 1.0
    noise: float = 0.1
    seed: int | None = None  # falls back to the experiment seed


@dataclass(frozen=True)
class VariantSpec:
    """kind is one of raw | pca | spca | tensor; dim applies to pca/spca,
    the remaining fields to tensor."""

    kind: str
    dim: int | None = None
    dim1: int = 25
    dim2: int = 25
    mode3_dim: int | None = None
    application: str = "per-split"

    def __post_init__(self):
        if self.kind not in ("raw", "pca", "spca", "tensor"):
            raise ValueError(f"unknown variant kind {self.kind!r}")
        if self.kind in ("pca", "spca") and (self.dim is None or self.dim < 1):
            raise ValueError(f"{self.kind} variant needs dim >= 1")

    def label(self) -> str:
        if self.kind == "raw":
            return "raw"
        if self.kind in ("pca", "spca"):
            return f"{self.kind}(d={self.dim})"
        mode3 = "keep" if self.mode3_dim is None else str(self.mode3_dim)
        return f"tensor({self.dim1}x{self.dim2},mode3={mode3},{self.application})"


@dataclass(frozen=True)
class ClassifierSpec:
    """kind is nn | krr; sigma and c apply to krr (sigma None = median)."""

    kind: str
    sigma: float | None = None
    c: float = 1e-3

    def __post_init__(self):
        if self.kind not in ("nn", "krr"):
            raise ValueError(f"unknown classifier kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "nn":
            return "nn"
        sigma = "auto" if self.sigma is None else repr(self.sigma)
        return f"krr(sigma={sigma},c={self.c!r})"


@dataclass(frozen=True)
class ExperimentConfig:
    source: CsvSource | SynthSource
    variants: list[VariantSpec]
    classifiers: list[ClassifierSpec]
    admm: AdmmParams = field(default_factory=AdmmParams)
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if not self.variants:
            raise ValueError("at least one variant is required")
        if not self.classifiers:
            raise ValueError("at least one classifier is required")


@dataclass(frozen=True)
class ResultRow:
    variant: str
    classifier: str
    report: EvalReport
    seconds: float


def _load_pair(cfg: ExperimentConfig) -> tuple[Dataset, Dataset]:
    src = cfg.source
    if isinstance(src, CsvSource):
        train = load_csv_dataset(src.train_path, src.height, src.width)
        test = load_csv_dataset(src.test_path, src.height, src.width)
    else:
        seed = src.seed if src.seed is not None else cfg.seed
        train, test = synth_blobs(
            src.n_classes,
            src.train_per_class,
            src.test_per_class,
            src.height,
            src.width,
            src.separation,
            src.noise,
            seed,
        )
    if (train.height, train.width) != (test.height, test.width):
        raise ShapeMismatch("train and test images must share dimensions")
    return train, test


def _tensor_labels(ds: Dataset, mode3_dim: int | None) -> np.ndarray:
    counts = mode3_output_counts(ds.partition, mode3_dim)
    return np.repeat(ds.block_labels(), counts)


def _build_features(variant: VariantSpec, train: Dataset, test: Dataset, admm: AdmmParams):
    """Returns (train_features, train_labels, test_features, test_labels)."""
    if variant.kind == "raw":
        return train.flat_rows(), train.labels, test.flat_rows(), test.labels
    if variant.kind == "pca":
        model = pca_fit(train.flat_rows(), variant.dim)
        return (
            pca_transform(model, train.flat_rows()),
            train.labels,
            pca_transform(model, test.flat_rows()),
            test.labels,
        )
    if variant.kind == "spca":
        model = fit(train.flat_rows(), variant.dim, admm)
        return (
            transform(model, train.flat_rows()),
            train.labels,
            transform(model, test.flat_rows()),
            test.labels,
        )
    cfg = TensorPcaConfig(
        dim1=variant.dim1,
        dim2=variant.dim2,
        mode3_dim=variant.mode3_dim,
        admm=admm,
        application=variant.application,
    )
    train_red, test_red = tensor_sparse_pca_train_test(
        train.tensor, train.partition, test.tensor, test.partition, cfg
    )
    flat = lambda t: t.transpose(2, 0, 1).reshape(t.shape[2], -1)
    return (
        flat(train_red),
        _tensor_labels(train, variant.mode3_dim),
        flat(test_red),
        _tensor_labels(test, variant.mode3_dim),
    )


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run the full variant x classifier grid and return one row per cell."""
    train, test = _load_pair(cfg)
    n_classes = max(train.n_classes, test.n_classes)
    admm = replace(cfg.admm, seed=cfg.seed)
    rows = []
    for variant in cfg.variants:
        tr_feats, tr_labels, te_feats, te_labels = _build_features(
            variant, train, test, admm
        )
        labeled = LabeledFeatures(features=tr_feats, labels=tr_labels)
        for clf in cfg.classifiers:
            start = time.perf_counter()
            if clf.kind == "nn":
                predicted = nn_classify_batch(labeled, te_feats)
            else:
                model = krr_fit(labeled, KrrParams(sigma=clf.sigma, c=clf.c))
                predicted = krr_predict_batch(model, te_feats)
            report = evaluate(predicted, te_labels, n_classes)
            seconds = time.perf_counter() - start
            rows.append(
                ResultRow(
                    variant=variant.label(),
                    classifier=clf.label(),
                    report=report,
                    seconds=seconds,
                )
            )
    return rows


def format_results_tsv(rows: list[ResultRow]) -> str:
    lines = [TSV_HEADER]
    for row in rows:
        lines.append(
            "\t".join(
                (
                    row.variant,
                    row.classifier,
                    repr(row.report.plain_accuracy),
                    repr(row.report.q_accuracy),
                    repr(row.seconds),
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_results_tsv(rows: list[ResultRow], path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_results_tsv(rows))


def _parse_variant(obj: dict) -> VariantSpec:
    kind = obj.get("kind")
    if kind in ("raw", "pca", "spca"):
        return VariantSpec(kind=kind, dim=obj.get("dim"))
    if kind == "tensor":
        mode3 = obj.get("mode3", "keep")
        return VariantSpec(
            kind="tensor",
            dim1=int(obj.get("dim1", 25)),
            dim2=int(obj.get("dim2", 25)),
            mode3_dim=None if mode3 == "keep" else int(mode3),
            application=obj.get("application", "per-split"),
        )
    raise ParseError(f"unknown variant kind {kind!r}")


def _parse_classifier(obj: dict) -> ClassifierSpec:
    kind = obj.get("kind")
    sigma = obj.get("sigma", "auto")
    return ClassifierSpec(
        kind=kind,
        sigma=None if sigma == "auto" else float(sigma),
        c=float(obj.get("c", 1e-3)),
    )


def config_from_dict(obj: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from a parsed JSON object.

    Expected shape::

        {
          "data": {"train_csv": ..., "test_csv": ..., "height": ..., "width": ...}
                  or {"synth": {"classes": ..., "train_per_class": ..., ...}},
          "variants": [{"kind": "raw"}, {"kind": "pca", "dim": 200}, ...],
          "classifiers": [{"kind": "nn"}, {"kind": "krr", "sigma": "auto"}],
          "admm": {"rho": "auto", "lambda": null, "tol": 1e-10, "max_iter": 10000},
          "seed": 0,
          "output": "results.tsv"
        }
    """
    try:
        data = obj["data"]
        if "synth" in data:
            s = data["synth"]
            source: CsvSource | SynthSource = SynthSource(
                n_classes=int(s.get("classes", 15)),
                train_per_class=int(s.get("train_per_class", 8)),
                test_per_class=int(s.get("test_per_class", 3)),
                height=int(s.get("height", 32)),
                width=int(s.get("width", 32)),
                separation=float(s.get("separation", 1.0)),
                noise=float(s.get("noise", 0.1)),
                seed=s.get("seed"),
            )
        else:
            source = CsvSource(
                train_path=data["train_csv"],
                test_path=data["test_csv"],
                height=int(data["height"]),
                width=int(data["width"]),
            )
        admm_obj = obj.get("admm", {})
        rho = admm_obj.get("rho", "auto")
        lam = admm_obj.get("lambda")
        admm = AdmmParams(
            rho=None if rho in ("auto", None) else float(rho),
            lam=None if lam is None else float(lam),
            tol=float(admm_obj.get("tol", 1e-10)),
            max_iter=int(admm_obj.get("max_iter", 10000)),
            seed=int(obj.get("seed", 0)),
        )
        return ExperimentConfig(
            source=source,
            variants=[_parse_variant(v) for v in obj["variants"]],
            classifiers=[_parse_classifier(c) for c in obj["classifiers"]],
            admm=admm,
            seed=int(obj.get("seed", 0)),
            output=obj.get("output"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad experiment config: {exc}") from exc


def config_from_json(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return config_from_dict(obj)
