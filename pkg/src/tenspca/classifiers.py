"""Recognition back-ends: 1-nearest-neighbor and kernel ridge regression.

Kernel ridge regression trains one-vs-all on one-hot targets with a
Gaussian RBF kernel and decodes by argmax; the bandwidth defaults to the
median heuristic (sigma^2 = median pairwise squared training distance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist, pdist

from .errors import ShapeMismatch, SolveFailure


@dataclass(frozen=True)
class LabeledFeatures:
    """A feature matrix with one integer class id per row."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if feats.ndim != 2 or feats.shape[0] < 1:
            raise ShapeMismatch("features must be a nonempty matrix")
        if labels.shape != (feats.shape[0],):
            raise ShapeMismatch(
                f"need one label per row: {labels.shape} vs {feats.shape[0]} rows"
            )
        if labels.size and labels.min() < 0:
            raise ShapeMismatch("class ids must be nonnegative")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class KrrParams:
    """sigma=None selects the median heuristic; c is the ridge weight."""

    sigma: float | None = None
    c: float = 1e-3

    def __post_init__(self):
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")


@dataclass(frozen=True)
class KrrModel:
    train_features: np.ndarray
    sigma: float
    dual_weights: np.ndarray


def _query_row(query, q: int) -> np.ndarray:
    query = np.asarray(query, dtype=float)
    if query.shape != (q,):
        raise ShapeMismatch(f"query must have length {q}, got {query.shape}")
    return query


def nn_classify(train: LabeledFeatures, query) -> int:
    """Label of the training row nearest to `query` (Euclidean).

    Ties go to the lowest row index.
    """
    query = _query_row(query, train.features.shape[1])
    dists = np.linalg.norm(train.features - query, axis=1)
    return int(train.labels[int(np.argmin(dists))])


def nn_classify_batch(train: LabeledFeatures, queries) -> np.ndarray:
    """Apply :func:`nn_classify` to every row of `queries`."""
    queries = np.asarray(queries, dtype=float)
    if queries.ndim != 2 or queries.shape[1] != train.features.shape[1]:
        raise ShapeMismatch(
            f"queries must be m x {train.features.shape[1]}, got {queries.shape}"
        )
    return np.array([nn_classify(train, q) for q in queries], dtype=int)


def rbf_kernel(a, b, sigma: float) -> np.ndarray:
    """Gaussian kernel K_ij = exp(-||a_i - b_j||^2 / (2 sigma^2))."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ShapeMismatch(f"incompatible kernel operands {a.shape} and {b.shape}")
    return np.exp(-cdist(a, b, "sqeuclidean") / (2.0 * sigma * sigma))


def median_sigma(features) -> float:
    """Median-heuristic bandwidth: sigma^2 = median pairwise squared distance.

    Falls back to 1.0 when there are no pairs or the median is zero.
    """
    features = np.asarray(features, dtype=float)
    if features.shape[0] < 2:
        return 1.0
    med = float(np.median(pdist(features, "sqeuclidean")))
    return float(np.sqrt(med)) if med > 0 else 1.0


def krr_fit(train: LabeledFeatures, params: KrrParams = KrrParams()) -> KrrModel:
    """Solve (K + c I) A = Y for one-hot targets Y over the training classes."""
    sigma = params.sigma if params.sigma is not None else median_sigma(train.features)
    n = train.features.shape[0]
    kernel = rbf_kernel(train.features, train.features, sigma)
    onehot = np.zeros((n, train.n_classes))
    onehot[np.arange(n), train.labels] = 1.0
    try:
        factor = cho_factor(kernel + params.c * np.eye(n), lower=True)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure(f"kernel system failed to factor (c={params.c})") from exc
    weights = cho_solve(factor, onehot)
    return KrrModel(train_features=train.features, sigma=sigma, dual_weights=weights)


def krr_predict(model: KrrModel, query) -> int:
    """argmax_c k(query, train)^T dual_weights; ties to the lowest class id."""
    query = _query_row(query, model.train_features.shape[1])
    scores = rbf_kernel(query[None, :], model.train_features, model.sigma) @ model.dual_weights
    return int(np.argmax(scores[0]))


def krr_predict_batch(model: KrrModel, queries) -> np.ndarray:
    """Apply :func:`krr_predict` to every row of `queries`."""
    queries = np.asarray(queries, dtype=float)
    if queries.ndim != 2 or queries.shape[1] != model.train_features.shape[1]:
        raise ShapeMismatch(
            f"queries must be m x {model.train_features.shape[1]}, got {queries.shape}"
        )
    scores = rbf_kernel(queries, model.train_features, model.sigma) @ model.dual_weights
    return np.argmax(scores, axis=1).astype(int)
