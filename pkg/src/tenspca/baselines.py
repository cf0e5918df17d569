"""Classical PCA baseline used as the comparison arm of the benchmarks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import RankWarning, ShapeMismatch


@dataclass(frozen=True)
class PcaModel:
    """Feature means plus a (p, d) matrix of orthonormal components.

    Columns are ordered by non-increasing explained variance; each column's
    sign makes its largest-magnitude entry positive.
    """

    mu: np.ndarray
    components: np.ndarray

    @property
    def dim(self) -> int:
        return self.components.shape[1]


def _as_matrix(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got ndim={d.ndim}")
    return d


def _fix_signs(components: np.ndarray) -> np.ndarray:
    out = components.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        if out[k, j] < 0:
            out[:, j] = -out[:, j]
    return out


def _complete_basis(existing: np.ndarray, extra: int) -> np.ndarray:
    """Deterministic orthonormal completion by Gram-Schmidt over e_1, e_2, ...

    Returns `extra` unit columns orthogonal to `existing` and to each other.
    """
    p = existing.shape[0]
    cols = []
    basis = existing
    j = 0
    while len(cols) < extra:
        if j >= p:
            raise ShapeMismatch("cannot complete an orthonormal basis past dimension p")
        v = np.zeros(p)
        v[j] = 1.0
        j += 1
        for _ in range(2):
            v = v - basis @ (basis.T @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            v /= norm
            cols.append(v)
            basis = np.column_stack([basis, v])
    return np.column_stack(cols)


def pca_fit(d, dims: int) -> PcaModel:
    """Top principal directions of the centered data via SVD.

    Asking for more directions than the data's numerical rank warns
    (RankWarning) and pads the trailing columns with a deterministic
    orthonormal completion of the null space.
    """
    d = _as_matrix(d)
    n, p = d.shape
    if not 1 <= dims <= p:
        raise ShapeMismatch(f"dims must be in [1, {p}], got {dims}")
    if dims > min(n - 1, p):
        warnings.warn(
            f"dims={dims} exceeds the centered data rank bound {min(n - 1, p)}",
            RankWarning,
            stacklevel=2,
        )
    mu = d.mean(axis=0)
    centered = d - mu
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    if svals.size and svals[0] > 0:
        rank = int(np.sum(svals > svals[0] * max(n, p) * np.finfo(float).eps))
    else:
        rank = 0
    keep = min(dims, rank)
    components = vt[:keep].T
    if keep < dims:
        pad = _complete_basis(
            components if keep else np.empty((p, 0)), dims - keep
        )
        components = np.column_stack([components, pad]) if keep else pad
    return PcaModel(mu=mu, components=_fix_signs(components))


def pca_transform(model: PcaModel, d_new) -> np.ndarray:
    """Project new rows: (d_new - mu) @ components."""
    d_new = _as_matrix(d_new)
    p = model.components.shape[0]
    if d_new.shape[1] != p:
        raise ShapeMismatch(f"expected {p} columns, got {d_new.shape[1]}")
    return (d_new - model.mu) @ model.components
