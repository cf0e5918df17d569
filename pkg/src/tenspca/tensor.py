"""Dense three-mode tensor containers and mode-wise reshaping operations.

A tensor is a numpy array of shape ``(n1, n2, n3)`` holding an image stack:
``n1`` is image height, ``n2`` image width, ``n3`` the number of images.
Unfoldings put the chosen mode on the columns and enumerate the remaining
two modes on the rows, earlier modes varying fastest:

* mode 1 -> ``(n2*n3, n1)`` with row ``r = i3*n2 + i2``
* mode 2 -> ``(n1*n3, n2)`` with row ``r = i3*n1 + i1``
* mode 3 -> ``(n1*n2, n3)`` with row ``r = i2*n1 + i1``

Refolding inverts the unfolding exactly. All functions return fresh arrays
and never mutate their inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatch

_MODES = (1, 2, 3)


def _as_tensor(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 3:
        raise ShapeMismatch(f"expected a 3-mode tensor, got ndim={t.ndim}")
    return t


def _check_mode(mode: int) -> None:
    if mode not in _MODES:
        raise ShapeMismatch(f"mode must be 1, 2 or 3, got {mode}")


def unfold(t, mode: int) -> np.ndarray:
    """Unfold a three-mode tensor into a matrix along `mode`.

    Parameters
    ----------
    t : ndarray, shape (n1, n2, n3)
    mode : int
        1, 2 or 3; the mode that becomes the column index.

    Returns
    -------
    ndarray
        The unfolding; rows act as samples, columns as the features of
        the unfolded mode.
    """
    t = _as_tensor(t)
    _check_mode(mode)
    n1, n2, n3 = t.shape
    if mode == 1:
        out = t.transpose(2, 1, 0).reshape(n2 * n3, n1)
    elif mode == 2:
        out = t.transpose(2, 0, 1).reshape(n1 * n3, n2)
    else:
        out = t.transpose(1, 0, 2).reshape(n1 * n2, n3)
    return np.ascontiguousarray(out)


def refold(m, mode: int, dims: tuple[int, int, int]) -> np.ndarray:
    """Fold an unfolded matrix back into a tensor of shape `dims`.

    Inverse of :func:`unfold`: ``refold(unfold(t, mode), mode, t.shape)``
    reproduces ``t`` exactly.

    Raises
    ------
    ShapeMismatch
        If `m` is not shaped like the mode-`mode` unfolding of a `dims`
        tensor.
    """
    m = np.asarray(m, dtype=float)
    _check_mode(mode)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got ndim={m.ndim}")
    n1, n2, n3 = (int(d) for d in dims)
    if min(n1, n2, n3) < 1:
        raise ShapeMismatch(f"tensor dims must be positive, got {dims}")
    others = {1: n2 * n3, 2: n1 * n3, 3: n1 * n2}[mode]
    cols = {1: n1, 2: n2, 3: n3}[mode]
    if m.shape != (others, cols):
        raise ShapeMismatch(
            f"mode-{mode} unfolding of {dims} must be {(others, cols)}, got {m.shape}"
        )
    if mode == 1:
        out = m.reshape(n3, n2, n1).transpose(2, 1, 0)
    elif mode == 2:
        out = m.reshape(n3, n1, n2).transpose(1, 2, 0)
    else:
        out = m.reshape(n2, n1, n3).transpose(1, 0, 2)
    return np.ascontiguousarray(out)


def check_partition(counts, n3: int) -> list[int]:
    """Validate a per-person image partition of mode 3 and return it as ints.

    Raises ShapeMismatch unless every count is >= 1 and the counts sum
    to `n3`.
    """
    counts = [int(c) for c in counts]
    if any(c < 1 for c in counts):
        raise ShapeMismatch(f"partition counts must be >= 1, got {counts}")
    if sum(counts) != n3:
        raise ShapeMismatch(
            f"partition sums to {sum(counts)} but the tensor has n3={n3}"
        )
    return counts


def slice_mode3(t, part) -> list[np.ndarray]:
    """Split a tensor into per-person sub-tensors along mode 3.

    `part` lists the number of images per person, in order; the slabs are
    returned in the same order.
    """
    t = _as_tensor(t)
    counts = check_partition(part, t.shape[2])
    out = []
    start = 0
    for c in counts:
        out.append(t[:, :, start:start + c].copy())
        start += c
    return out


def merge_mode3(parts) -> np.ndarray:
    """Concatenate sub-tensors along mode 3, inverse of :func:`slice_mode3`."""
    if not parts:
        raise ShapeMismatch("merge_mode3 needs at least one tensor")
    arrs = [_as_tensor(p) for p in parts]
    head = arrs[0].shape[:2]
    for i, a in enumerate(arrs[1:], start=1):
        if a.shape[:2] != head:
            raise ShapeMismatch(
                f"part {i} has image shape {a.shape[:2]}, expected {head}"
            )
    return np.concatenate(arrs, axis=2)


def flatten_image(img) -> np.ndarray:
    """Flatten an image matrix into a 1 x (rows*cols) row vector, row-major."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ShapeMismatch(f"expected an image matrix, got ndim={img.ndim}")
    return img.reshape(1, img.size).copy()
