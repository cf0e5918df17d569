"""Binary persistence for fitted models.

Container layout (all integers little-endian unsigned 32-bit, all floats
IEEE-754 64-bit little-endian):

    magic   4 bytes   b"SPCA" (sparse PCA) or b"PCAM" (baseline PCA)
    version u32       1
    p       u32       feature count
    dim     u32       component count
    mu      p f64
    loadings/components  p*dim f64, column-major

Round-trips are bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np

from .admm import SparsePcaModel
from .baselines import PcaModel
from .errors import ModelFormatError

_MAGIC = {SparsePcaModel: b"SPCA", PcaModel: b"PCAM"}
_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def _matrix_of(model) -> np.ndarray:
    return model.loadings if isinstance(model, SparsePcaModel) else model.components


def save_model(model, path) -> None:
    """Write a SparsePcaModel or PcaModel to `path`."""
    magic = _MAGIC.get(type(model))
    if magic is None:
        raise ModelFormatError(f"cannot persist {type(model).__name__}")
    mat = np.asarray(_matrix_of(model), dtype="<f8")
    mu = np.asarray(model.mu, dtype="<f8")
    p, dim = mat.shape
    if mu.shape != (p,):
        raise ModelFormatError(f"mu has length {mu.shape}, expected ({p},)")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(magic, _VERSION, p, dim))
        fh.write(mu.tobytes())
        fh.write(mat.flatten(order="F").tobytes())


def load_model(path):
    """Read a model written by :func:`save_model`; the magic picks the type."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ModelFormatError(f"{path}: truncated header")
    magic, version, p, dim = _HEADER.unpack_from(raw)
    if magic not in (b"SPCA", b"PCAM"):
        raise ModelFormatError(f"{path}: unknown magic {magic!r}")
    if version != _VERSION:
        raise ModelFormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 8 * p + 8 * p * dim
    if len(raw) != expected:
        raise ModelFormatError(
            f"{path}: expected {expected} bytes for p={p}, dim={dim}, got {len(raw)}"
        )
    mu = np.frombuffer(raw, dtype="<f8", count=p, offset=_HEADER.size).copy()
    mat = (
        np.frombuffer(raw, dtype="<f8", count=p * dim, offset=_HEADER.size + 8 * p)
        .reshape((p, dim), order="F")
        .copy()
    )
    if magic == b"SPCA":
        return SparsePcaModel(mu=mu, loadings=mat)
    return PcaModel(mu=mu, components=mat)
