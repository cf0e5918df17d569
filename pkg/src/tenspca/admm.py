"""Sparse principal component extraction by ADMM with deflation.

One loading vector solves

    minimize_{x,z}  -||A x||^2 + lambda * ||z||_1   subject to  x = z

by alternating three closed-form updates on the augmented Lagrangian with
penalty ``rho``:

    x <- (-2 A^T A + rho I)^{-1} (rho z - y)
    z <- shrink(x + y / rho, lambda / rho)
    y <- y + rho (x - z)

The quadratic is positive definite only when ``rho > 2 sigma_max(A)^2``;
:func:`auto_rho` picks ``rho = max(2.2 sigma_max^2, 1)`` to guarantee that
with margin. Because the objective is unbounded below, the raw iterates
generically grow without bound while their direction converges; the loop
therefore stops either on the literal criterion ``||x_new - x|| <= tol`` or
once the normalized iterate is stable while the norm is demonstrably
diverging (see :func:`extract_component`). The returned loading is always
the final iterate normalized to unit length.

A full model stacks ``dim`` loadings extracted from successively deflated
data ``A <- A (I - x x^T)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    DegenerateComponent,
    MaxIterExceeded,
    NotPositiveDefinite,
    RankWarning,
    ShapeMismatch,
)

# Norm past which the iterates are treated as diverging (the literal stopping
# rule can then never fire) and the normalized-direction criterion takes over.
_DIVERGENCE_NORM = 1e12
# Norm at which the whole state is rescaled down to _RESCALE_TARGET to dodge
# overflow. Both scales keep the shrinkage threshold and the bounded dual
# variable below one ulp of the iterate, so the rescaled trajectory follows
# the unscaled one exactly in floating point; rescaling further down would
# make the constant threshold relatively large again and re-excite
# subdominant directions.
_RESCALE_NORM = 1e100
_RESCALE_TARGET = 1e50
# Smallest meaningful tolerance on a unit-vector difference.
_DIRECTION_TOL_FLOOR = 1e-14


@dataclass(frozen=True)
class AdmmParams:
    """Solver parameters.

    ``rho=None`` resolves to :func:`auto_rho` of the matrix being solved,
    and ``lam=None`` to ``0.01 * rho``; both are re-resolved per component
    during :func:`fit` as the data is deflated. ``seed`` controls the
    initialization of the splitting variable.
    """

    rho: float | None = None
    lam: float | None = None
    tol: float = 1e-10
    max_iter: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.rho is not None and not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.lam is not None and self.lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class CenteredData:
    """A data matrix with its per-column means removed."""

    dtilde: np.ndarray
    mu: np.ndarray


@dataclass(frozen=True)
class SparsePcaModel:
    """Training feature means plus a (p, dim) matrix of unit loadings."""

    mu: np.ndarray
    loadings: np.ndarray

    @property
    def dim(self) -> int:
        return self.loadings.shape[1]


def _as_matrix(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got ndim={d.ndim}")
    return d


def center(d) -> CenteredData:
    """Subtract the column-wise mean of the rows of `d`."""
    d = _as_matrix(d)
    mu = d.mean(axis=0)
    return CenteredData(dtilde=d - mu, mu=mu)


def auto_rho(dtilde) -> float:
    """Penalty weight guaranteeing a positive definite x-update.

    Returns ``max(2.2 * sigma_max(dtilde)^2, 1.0)`` where ``sigma_max`` is
    the largest singular value.
    """
    dtilde = _as_matrix(dtilde)
    n, p = dtilde.shape
    gram = dtilde @ dtilde.T if n <= p else dtilde.T @ dtilde
    top = float(np.linalg.eigvalsh(gram)[-1])
    return max(2.2 * max(top, 0.0), 1.0)


class _XStepSolver:
    """Cached symmetric factorization of M = -2 A^T A + rho I.

    For wide matrices (p > n) the solve is reduced to an n x n system:
    with S = I/2 - A A^T / rho (positive definite iff M is),

        M^{-1} b = b / rho + A^T S^{-1} A b / rho^2.
    """

    def __init__(self, dtilde: np.ndarray, rho: float):
        if not rho > 0:
            raise ValueError(f"rho must be positive, got {rho}")
        n, p = dtilde.shape
        self._rho = rho
        self._wide = p > n
        try:
            if self._wide:
                self._a = dtilde
                s = 0.5 * np.eye(n) - (dtilde @ dtilde.T) / rho
                self._factor = cho_factor(s, lower=True)
            else:
                m = rho * np.eye(p) - 2.0 * (dtilde.T @ dtilde)
                self._factor = cho_factor(m, lower=True)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(
                f"rho={rho} does not exceed twice the squared top singular value"
            ) from exc

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self._wide:
            ab = self._a @ b
            core = cho_solve(self._factor, ab, check_finite=False)
            return b / self._rho + (self._a.T @ core) / self._rho**2
        return cho_solve(self._factor, b, check_finite=False)


def x_update(dtilde, z, y, rho: float) -> np.ndarray:
    """One x-update: solve (-2 A^T A + rho I) x = rho z - y.

    Raises NotPositiveDefinite when the system matrix fails to factor,
    which signals that `rho` is too small for this data.
    """
    dtilde = _as_matrix(dtilde)
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    p = dtilde.shape[1]
    if z.shape != (p,) or y.shape != (p,):
        raise ShapeMismatch(f"z and y must have length {p}")
    return _XStepSolver(dtilde, rho).solve(rho * z - y)


def soft_threshold(v, kappa: float) -> np.ndarray:
    """Elementwise shrinkage sign(v) * max(|v| - kappa, 0)."""
    if kappa < 0:
        raise ValueError(f"kappa must be nonnegative, got {kappa}")
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)


def z_update(x, y, rho: float, lam: float) -> np.ndarray:
    """One z-update: shrink x + y/rho by lambda/rho."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return soft_threshold(x + y / rho, lam / rho)


def y_update(y, x, z, rho: float) -> np.ndarray:
    """One dual update: y + rho (x - z)."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    y = np.asarray(y, dtype=float)
    return y + rho * (np.asarray(x, float) - np.asarray(z, float))


def _resolve(params: AdmmParams, dtilde: np.ndarray) -> tuple[float, float]:
    rho = params.rho if params.rho is not None else auto_rho(dtilde)
    lam = params.lam if params.lam is not None else 0.01 * rho
    return rho, lam


def _fix_sign(x: np.ndarray) -> np.ndarray:
    """Flip so the largest-magnitude entry is positive.

    A loading's sign is arbitrary (the objective is even in x); pinning it
    to the data makes independently fitted models comparable.
    """
    return -x if x[int(np.argmax(np.abs(x)))] < 0 else x


def extract_component(dtilde, params: AdmmParams) -> np.ndarray:
    """Run the ADMM iteration on `dtilde` and return one unit loading.

    Initialization: z is a seeded random unit vector, x = z, y = 0 (the
    all-zero start is a fixed point, so a nonzero z is required).

    Termination: the literal rule ``||x_new - x|| <= tol`` applies on every
    step. When instead the iterate norm exceeds 1e12 while the *normalized*
    iterate moves by at most ``max(tol, 1e-14)``, the direction has
    converged and the raw rule is unreachable, so the loop stops there;
    past norm 1e100 the state is rescaled down to norm 1e50 to avoid
    overflow (exact at those scales). Either way the returned vector is
    the final iterate divided by its norm, sign-fixed so its
    largest-magnitude entry is positive.

    Raises
    ------
    DegenerateComponent
        When the very first shrinkage zeroes every coordinate (lambda too
        large for this data) or the iterate converges to the zero vector.
    MaxIterExceeded
        When neither stopping rule fires within ``max_iter`` steps.
    NotPositiveDefinite
        When ``rho`` is not large enough for the x-update.
    """
    x, _, _ = _run_iteration(dtilde, params)
    norm = np.linalg.norm(x)
    if norm <= 1e-12:
        raise DegenerateComponent(
            "iterate collapsed to zero at convergence (lambda too large)"
        )
    return _fix_sign(x / norm)


def _run_iteration(dtilde, params: AdmmParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The raw x/z/y loop behind :func:`extract_component`.

    Returns the final (x, z, y) state at convergence.
    """
    dtilde = _as_matrix(dtilde)
    p = dtilde.shape[1]
    rho, lam = _resolve(params, dtilde)
    if not np.any(dtilde):
        raise DegenerateComponent("data matrix is identically zero")
    solver = _XStepSolver(dtilde, rho)
    dir_tol = max(params.tol, _DIRECTION_TOL_FLOOR)

    rng = np.random.default_rng(params.seed)
    z = rng.standard_normal(p)
    z /= np.linalg.norm(z)
    y = np.zeros(p)
    x = z.copy()
    u_prev = None

    for k in range(params.max_iter):
        x_new = solver.solve(rho * z - y)
        z = soft_threshold(x_new + y / rho, lam / rho)
        if k == 0 and not z.any():
            raise DegenerateComponent(
                f"lambda={lam} zeroes every coordinate of the first update"
            )
        y = y + rho * (x_new - z)
        if np.linalg.norm(x_new - x) <= params.tol:
            return x_new, z, y
        norm = np.linalg.norm(x_new)
        if norm > 0:
            u = x_new / norm
            if (
                norm >= _DIVERGENCE_NORM
                and u_prev is not None
                and np.linalg.norm(u - u_prev) <= dir_tol
            ):
                return x_new, z, y
            u_prev = u
            if norm >= _RESCALE_NORM:
                scale = norm / _RESCALE_TARGET
                x_new = x_new / scale
                z = z / scale
                y = y / scale
        x = x_new
    raise MaxIterExceeded(f"no convergence within {params.max_iter} iterations")


def deflate(dtilde, x) -> np.ndarray:
    """Remove the direction `x` from the data: A (I - x x^T).

    `x` must have unit norm; the result maps `x` to (numerically) zero.
    """
    dtilde = _as_matrix(dtilde)
    x = np.asarray(x, dtype=float)
    if x.shape != (dtilde.shape[1],):
        raise ShapeMismatch(f"loading must have length {dtilde.shape[1]}")
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise ValueError("deflation direction must have unit norm")
    return dtilde - np.outer(dtilde @ x, x)


def _null_fill(rng: np.random.Generator, prev: np.ndarray, p: int) -> np.ndarray:
    """Seeded unit vector orthogonal to the columns of `prev`.

    Used for components beyond the numerical rank of the (fully deflated)
    data, where the objective no longer prefers any direction.
    """
    for _ in range(100):
        v = rng.standard_normal(p)
        for _ in range(2):
            if prev.shape[1]:
                v = v - prev @ (prev.T @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return _fix_sign(v / norm)
    raise DegenerateComponent("could not complete loadings beyond the data rank")


def fit(d, dim: int, params: AdmmParams = AdmmParams()) -> SparsePcaModel:
    """Fit a sparse PCA model with `dim` loadings by extract-and-deflate.

    Parameters
    ----------
    d : ndarray, shape (n, p)
        Raw data, one sample per row; centered internally.
    dim : int
        Number of loadings, 1 <= dim <= p. Asking for more than
        ``min(n - 1, p)`` warns (RankWarning): the extra directions carry
        no variance and are filled with seeded orthonormal vectors once
        the deflated data vanishes.
    params : AdmmParams
        Component i runs with ``seed + i``; Auto rho/lambda re-resolve on
        the deflated matrix for every component.

    Raises
    ------
    Solver errors from :func:`extract_component`, annotated with the
    component index.
    """
    d = _as_matrix(d)
    n, p = d.shape
    if not 1 <= dim <= p:
        raise ShapeMismatch(f"dim must be in [1, {p}], got {dim}")
    if dim > min(n - 1, p):
        warnings.warn(
            f"dim={dim} exceeds the centered data rank bound {min(n - 1, p)}; "
            "trailing components carry no variance",
            RankWarning,
            stacklevel=2,
        )
    centered = center(d)
    current = centered.dtilde.copy()
    base_scale = np.linalg.norm(current)
    loadings = np.empty((p, dim))
    for i in range(dim):
        comp_params = replace(params, seed=params.seed + i)
        if np.linalg.norm(current) <= 1e-10 * base_scale:
            x = _null_fill(
                np.random.default_rng(comp_params.seed), loadings[:, :i], p
            )
        else:
            try:
                x = extract_component(current, comp_params)
            except (NotPositiveDefinite, MaxIterExceeded, DegenerateComponent) as exc:
                raise type(exc)(f"component {i}: {exc}") from exc
        loadings[:, i] = x
        current = deflate(current, x)
    return SparsePcaModel(mu=centered.mu, loadings=loadings)


def transform(model: SparsePcaModel, d_new) -> np.ndarray:
    """Project new rows onto the loadings: (d_new - mu) @ loadings.

    The projection always uses the original centering, not the deflated
    matrices the loadings were extracted from.
    """
    d_new = _as_matrix(d_new)
    p = model.loadings.shape[0]
    if d_new.shape[1] != p:
        raise ShapeMismatch(f"expected {p} columns, got {d_new.shape[1]}")
    return (d_new - model.mu) @ model.loadings
