import struct

import numpy as np
import pytest

from tenspca import (
    AdmmParams,
    ModelFormatError,
    PcaModel,
    SparsePcaModel,
    fit,
    load_model,
    pca_fit,
    save_model,
)


def test_sparse_model_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    model = fit(rng.standard_normal((12, 6)), 3, AdmmParams(seed=0))
    path = tmp_path / "model.spca"
    save_model(model, path)
    back = load_model(path)
    assert isinstance(back, SparsePcaModel)
    assert np.array_equal(back.mu, model.mu)
    assert np.array_equal(back.loadings, model.loadings)


def test_pca_model_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(1)
    model = pca_fit(rng.standard_normal((10, 5)), 4)
    path = tmp_path / "model.pcam"
    save_model(model, path)
    back = load_model(path)
    assert isinstance(back, PcaModel)
    assert np.array_equal(back.mu, model.mu)
    assert np.array_equal(back.components, model.components)


def test_file_layout(tmp_path):
    mu = np.array([1.5, -2.25])
    loadings = np.array([[1.0, 0.0], [0.0, -1.0]])
    model = SparsePcaModel(mu=mu, loadings=loadings)
    path = tmp_path / "layout.bin"
    save_model(model, path)
    raw = path.read_bytes()
    magic, version, p, dim = struct.unpack_from("<4sIII", raw)
    assert magic == b"SPCA"
    assert version == 1
    assert (p, dim) == (2, 2)
    assert len(raw) == 16 + 8 * p + 8 * p * dim
    assert np.frombuffer(raw, "<f8", count=2, offset=16).tolist() == [1.5, -2.25]
    # column-major payload
    body = np.frombuffer(raw, "<f8", count=4, offset=32)
    assert body.tolist() == [1.0, 0.0, 0.0, -1.0]


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"XXXX" + b"\x00" * 28)
    with pytest.raises(ModelFormatError):
        load_model(path)


def test_bad_version(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(struct.pack("<4sIII", b"SPCA", 2, 1, 1) + b"\x00" * 16)
    with pytest.raises(ModelFormatError):
        load_model(path)


def test_truncated(tmp_path):
    path = tmp_path / "short.bin"
    path.write_bytes(struct.pack("<4sIII", b"SPCA", 1, 3, 2) + b"\x00" * 8)
    with pytest.raises(ModelFormatError):
        load_model(path)
    path.write_bytes(b"SP")
    with pytest.raises(ModelFormatError):
        load_model(path)
