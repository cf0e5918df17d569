"""Tensor-mode sparse PCA: spatial reduction plus per-person image mixing.

The pipeline runs three stages on an image stack, strictly in order:

1. unfold along mode 1 (height), sparse-PCA reduce to ``dim1`` rows, refold;
2. unfold along mode 2 (width), reduce to ``dim2`` columns, refold;
3. for every person's sub-stack, unfold along mode 3 (images), fit sparse
   PCA over the images-as-features, transform, refold, and merge the
   sub-stacks back in person order.

Stage 3 keeps each person's image count by default (``mode3_dim=None``) or
compresses it to a fixed count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .admm import AdmmParams, SparsePcaModel, fit, transform
from .errors import (
    DegenerateComponent,
    MaxIterExceeded,
    NotPositiveDefinite,
    ShapeMismatch,
)
from .tensor import check_partition, merge_mode3, refold, slice_mode3, unfold

_APPLICATIONS = ("per-split", "fit-transform")


@dataclass(frozen=True)
class TensorPcaConfig:
    """Targets and policies for the three-stage reduction.

    ``application`` selects how a train/test pair is handled:
    ``"per-split"`` fits each split independently, ``"fit-transform"``
    reuses the train split's mode-1/mode-2 loadings on the test split
    (mode 3 is always refit per split: its feature count is the per-person
    image count, which differs between splits).
    """

    dim1: int = 25
    dim2: int = 25
    mode3_dim: int | None = None
    admm: AdmmParams = field(default_factory=AdmmParams)
    application: str = "per-split"

    def __post_init__(self):
        if self.dim1 < 1 or self.dim2 < 1:
            raise ValueError("dim1 and dim2 must be positive")
        if self.mode3_dim is not None and self.mode3_dim < 1:
            raise ValueError("mode3_dim must be positive when fixed")
        if self.application not in _APPLICATIONS:
            raise ValueError(f"application must be one of {_APPLICATIONS}")


def reduce_mode(t, mode: int, dim: int, admm: AdmmParams) -> tuple[np.ndarray, SparsePcaModel]:
    """Sparse-PCA reduce one spatial mode of `t` to `dim`.

    Returns the reduced tensor and the fitted model so the same loadings
    can be applied to another tensor.
    """
    t = np.asarray(t, dtype=float)
    if mode not in (1, 2):
        raise ShapeMismatch(f"reduce_mode handles modes 1 and 2, got {mode}")
    size = t.shape[mode - 1]
    if not 1 <= dim <= size:
        raise ShapeMismatch(f"dim must be in [1, {size}] for mode {mode}, got {dim}")
    unfolded = unfold(t, mode)
    model = fit(unfolded, dim, admm)
    reduced = transform(model, unfolded)
    dims = list(t.shape)
    dims[mode - 1] = dim
    return refold(reduced, mode, tuple(dims)), model


def apply_mode(t, mode: int, model: SparsePcaModel) -> np.ndarray:
    """Apply an already-fitted mode reduction to another tensor."""
    t = np.asarray(t, dtype=float)
    if mode not in (1, 2):
        raise ShapeMismatch(f"apply_mode handles modes 1 and 2, got {mode}")
    reduced = transform(model, unfold(t, mode))
    dims = list(t.shape)
    dims[mode - 1] = model.dim
    return refold(reduced, mode, tuple(dims))


def per_person_mode3(t, part, mode3_dim: int | None, admm: AdmmParams) -> np.ndarray:
    """Fit-and-transform each person's images along mode 3, then merge.

    ``mode3_dim=None`` keeps each person's image count; an integer
    compresses every person to that many mixed images.
    """
    t = np.asarray(t, dtype=float)
    counts = check_partition(part, t.shape[2])
    if mode3_dim is not None and mode3_dim > min(counts):
        raise ShapeMismatch(
            f"mode3_dim={mode3_dim} exceeds the smallest person count {min(counts)}"
        )
    outputs = []
    for i, slab in enumerate(slice_mode3(t, counts)):
        dim3 = counts[i] if mode3_dim is None else mode3_dim
        unfolded = unfold(slab, 3)
        try:
            model = fit(unfolded, dim3, admm)
        except (NotPositiveDefinite, MaxIterExceeded, DegenerateComponent) as exc:
            raise type(exc)(f"person {i}: {exc}") from exc
        reduced = transform(model, unfolded)
        outputs.append(refold(reduced, 3, (t.shape[0], t.shape[1], dim3)))
    return merge_mode3(outputs)


def _reduce_spatial(t, cfg: TensorPcaConfig):
    r1, model1 = reduce_mode(t, 1, cfg.dim1, cfg.admm)
    r2, model2 = reduce_mode(r1, 2, cfg.dim2, cfg.admm)
    return r2, model1, model2


def tensor_sparse_pca(t, part, cfg: TensorPcaConfig = TensorPcaConfig()) -> np.ndarray:
    """Full three-stage reduction of one tensor.

    Output shape is ``(dim1, dim2, sum of per-person output counts)``.
    """
    reduced, _, _ = _reduce_spatial(np.asarray(t, dtype=float), cfg)
    return per_person_mode3(reduced, part, cfg.mode3_dim, cfg.admm)


def tensor_sparse_pca_train_test(
    train_t, train_part, test_t, test_part, cfg: TensorPcaConfig = TensorPcaConfig()
) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a train/test tensor pair according to ``cfg.application``."""
    train_t = np.asarray(train_t, dtype=float)
    test_t = np.asarray(test_t, dtype=float)
    if cfg.application == "per-split":
        return (
            tensor_sparse_pca(train_t, train_part, cfg),
            tensor_sparse_pca(test_t, test_part, cfg),
        )
    train_red, model1, model2 = _reduce_spatial(train_t, cfg)
    train_out = per_person_mode3(train_red, train_part, cfg.mode3_dim, cfg.admm)
    test_red = apply_mode(apply_mode(test_t, 1, model1), 2, model2)
    test_out = per_person_mode3(test_red, test_part, cfg.mode3_dim, cfg.admm)
    return train_out, test_out


def mode3_output_counts(part, mode3_dim: int | None) -> list[int]:
    """Per-person image counts after the mode-3 stage."""
    counts = [int(c) for c in part]
    return counts if mode3_dim is None else [mode3_dim] * len(counts)
