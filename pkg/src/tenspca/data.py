"""Dataset containers, CSV and PGM ingestion, and the synthetic generator.

A dataset stacks images on mode 3 of a tensor and carries one class id per
image; ids must form contiguous non-decreasing blocks (all of a person's
images are adjacent), and the partition records the block lengths.

CSV rows are ``label,pixel,pixel,...`` with pixels in row-major order.
Floats are written with shortest round-trip precision, so a save/load
cycle is bit-exact. PGM ingestion reads binary "P5" files with
maxval <= 255 and scales pixels to [0, 1].
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadPixelCount,
    InconsistentDimensions,
    MissingLabel,
    NonContiguousLabels,
    ParseError,
    PgmFormatError,
    ShapeMismatch,
)
from .tensor import check_partition


@dataclass(frozen=True)
class Dataset:
    """An image tensor (height, width, count) with aligned labels."""

    tensor: np.ndarray
    labels: np.ndarray
    partition: list[int]

    def __post_init__(self):
        tensor = np.asarray(self.tensor, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if tensor.ndim != 3:
            raise ShapeMismatch(f"dataset tensor must be 3-mode, got {tensor.ndim}")
        if labels.shape != (tensor.shape[2],):
            raise ShapeMismatch(
                f"need one label per image: {labels.shape} vs n3={tensor.shape[2]}"
            )
        if np.any(np.diff(labels) < 0):
            raise NonContiguousLabels("labels must be non-decreasing class blocks")
        part = check_partition(self.partition, tensor.shape[2])
        if part != _run_lengths(labels):
            raise ShapeMismatch("partition does not match the label blocks")
        object.__setattr__(self, "tensor", tensor)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "partition", part)

    @property
    def height(self) -> int:
        return self.tensor.shape[0]

    @property
    def width(self) -> int:
        return self.tensor.shape[1]

    @property
    def n_images(self) -> int:
        return self.tensor.shape[2]

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1

    def block_labels(self) -> list[int]:
        """Class id of each contiguous block, in block order."""
        out = []
        start = 0
        for c in self.partition:
            out.append(int(self.labels[start]))
            start += c
        return out

    def flat_rows(self) -> np.ndarray:
        """Images flattened row-major into an (n_images, height*width) matrix."""
        return (
            self.tensor.transpose(2, 0, 1)
            .reshape(self.n_images, self.height * self.width)
            .copy()
        )


def _run_lengths(labels: np.ndarray) -> list[int]:
    out = []
    run = 0
    for i, lab in enumerate(labels):
        if i > 0 and lab != labels[i - 1]:
            out.append(run)
            run = 0
        run += 1
    if run:
        out.append(run)
    return out


def dataset_from_rows(labels, rows, height: int, width: int) -> Dataset:
    """Build a Dataset from flattened row-major image rows."""
    rows = np.asarray(rows, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if rows.ndim != 2 or rows.shape[1] != height * width:
        raise BadPixelCount(
            f"rows must have {height * width} pixels for {height}x{width} images"
        )
    tensor = rows.reshape(rows.shape[0], height, width).transpose(1, 2, 0).copy()
    if np.any(np.diff(labels) < 0):
        raise NonContiguousLabels("labels must be non-decreasing class blocks")
    return Dataset(tensor=tensor, labels=labels, partition=_run_lengths(labels))


def load_csv_matrix(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``label,value,...`` lines into a label vector and a feature matrix.

    Row lengths must agree; label contiguity is not required here.
    """
    labels = []
    rows = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) < 2:
                raise ParseError(f"{path}:{lineno}: need a label and at least one value")
            try:
                labels.append(int(fields[0]))
            except ValueError:
                raise ParseError(
                    f"{path}:{lineno}: bad label {fields[0]!r}"
                ) from None
            try:
                rows.append([float(v) for v in fields[1:]])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad numeric value") from None
            if width is None:
                width = len(fields) - 1
            elif len(fields) - 1 != width:
                raise BadPixelCount(
                    f"{path}:{lineno}: row has {len(fields) - 1} values, expected {width}"
                )
    if not rows:
        raise ParseError(f"{path}: no data rows")
    if np.min(labels) < 0:
        raise ParseError(f"{path}: class ids must be nonnegative")
    return np.asarray(labels, dtype=int), np.asarray(rows, dtype=float)


def save_csv_matrix(labels, rows, path) -> None:
    """Write rows in the ``label,value,...`` format with round-trip floats."""
    labels = np.asarray(labels, dtype=int)
    rows = np.asarray(rows, dtype=float)
    if labels.shape != (rows.shape[0],):
        raise ShapeMismatch("one label per row required")
    with open(path, "w", encoding="ascii") as fh:
        for lab, row in zip(labels, rows):
            fh.write(str(int(lab)))
            fh.write(",")
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def load_csv_dataset(path, height: int, width: int) -> Dataset:
    """Read a CSV file of labeled flattened images into a Dataset."""
    labels, rows = load_csv_matrix(path)
    if rows.shape[1] != height * width:
        raise BadPixelCount(
            f"{path}: rows carry {rows.shape[1]} pixels, expected {height * width}"
        )
    return dataset_from_rows(labels, rows, height, width)


def save_csv_dataset(ds: Dataset, path) -> None:
    save_csv_matrix(ds.labels, ds.flat_rows(), path)


def _read_pgm(path) -> np.ndarray:
    """Binary P5 PGM, maxval <= 255, scaled to [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()

    tokens = []
    i = 0
    while len(tokens) < 4:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i] != 0x0A:
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace():
            i += 1
        if start == i:
            raise PgmFormatError(f"{path}: truncated header")
        tokens.append(data[start:i])
    i += 1  # single whitespace byte after maxval, then the raster

    if tokens[0] != b"P5":
        raise PgmFormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise PgmFormatError(f"{path}: non-numeric header fields") from None
    if width < 1 or height < 1:
        raise PgmFormatError(f"{path}: bad dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise PgmFormatError(f"{path}: maxval {maxval} unsupported (must be <= 255)")
    raster = data[i : i + width * height]
    if len(raster) != width * height:
        raise PgmFormatError(
            f"{path}: raster has {len(raster)} bytes, expected {width * height}"
        )
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return img.astype(float) / maxval


def _write_pgm(path, img, maxval: int = 255) -> None:
    """Canonical P5 writer for pixel values in [0, 1]."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise PgmFormatError("image must be a matrix")
    if img.min() < 0 or img.max() > 1:
        raise PgmFormatError("pixel values must lie in [0, 1] for PGM output")
    raster = np.rint(img * maxval).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode("ascii"))
        fh.write(raster.tobytes())


def load_pgm_dir(path, labels_file) -> Dataset:
    """Load every ``*.pgm`` in a directory, paired with a labels file.

    The labels file holds ``filename,class`` lines. Images are ordered by
    class block and lexicographically within each block. Every PGM must
    have a label and vice versa, and all images must share one size.
    """
    label_map: dict[str, int] = {}
    with open(labels_file, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            name, _, value = line.partition(",")
            if not value:
                raise ParseError(f"{labels_file}:{lineno}: expected 'filename,class'")
            try:
                label_map[name.strip()] = int(value)
            except ValueError:
                raise ParseError(f"{labels_file}:{lineno}: bad class id {value!r}") from None

    files = sorted(f for f in os.listdir(path) if f.lower().endswith(".pgm"))
    if not files:
        raise PgmFormatError(f"{path}: no .pgm files found")
    unlabeled = [f for f in files if f not in label_map]
    if unlabeled:
        raise MissingLabel(f"no label for {unlabeled[0]!r} in {labels_file}")
    orphans = sorted(set(label_map) - set(files))
    if orphans:
        raise MissingLabel(f"labels file names missing image {orphans[0]!r}")

    ordered = sorted(files, key=lambda f: (label_map[f], f))
    slabs = []
    shape = None
    for name in ordered:
        img = _read_pgm(os.path.join(path, name))
        if shape is None:
            shape = img.shape
        elif img.shape != shape:
            raise InconsistentDimensions(
                f"{name} is {img.shape[0]}x{img.shape[1]}, expected {shape[0]}x{shape[1]}"
            )
        slabs.append(img)
    labels = np.asarray([label_map[f] for f in ordered], dtype=int)
    tensor = np.stack(slabs, axis=2)
    return Dataset(tensor=tensor, labels=labels, partition=_run_lengths(labels))


def save_pgm_dir(ds: Dataset, path, labels_file) -> None:
    """Write a dataset as canonical PGMs plus a ``filename,class`` file."""
    os.makedirs(path, exist_ok=True)
    names = []
    for i in range(ds.n_images):
        name = f"img_{i:05d}.pgm"
        _write_pgm(os.path.join(path, name), ds.tensor[:, :, i])
        names.append(name)
    with open(labels_file, "w", encoding="ascii") as fh:
        for name, lab in zip(names, ds.labels):
            fh.write(f"{name},{int(lab)}\n")


def synth_blobs(
    n_classes: int,
    train_per_class: int,
    test_per_class: int,
    height: int,
    width: int,
    separation: float,
    noise: float,
    seed: int,
) -> tuple[Dataset, Dataset]:
    """Deterministic Gaussian-blob image datasets.

    Each class gets a random mean image with entries of scale `separation`;
    samples add independent pixel noise of scale `noise`. Returns
    (train, test) with contiguous class blocks.
    """
    if min(n_classes, train_per_class, test_per_class, height, width) < 1:
        raise ValueError("all counts and dimensions must be >= 1")
    if separation <= 0:
        raise ValueError(f"separation must be positive, got {separation}")
    if noise < 0:
        raise ValueError(f"noise must be nonnegative, got {noise}")
    rng = np.random.default_rng(seed)
    train_slabs, test_slabs = [], []
    for _ in range(n_classes):
        mean = separation * rng.standard_normal((height, width))
        for _ in range(train_per_class):
            train_slabs.append(mean + noise * rng.standard_normal((height, width)))
        for _ in range(test_per_class):
            test_slabs.append(mean + noise * rng.standard_normal((height, width)))

    def build(slabs, per_class):
        tensor = np.stack(slabs, axis=2)
        labels = np.repeat(np.arange(n_classes), per_class)
        return Dataset(tensor=tensor, labels=labels, partition=[per_class] * n_classes)

    return build(train_slabs, train_per_class), build(test_slabs, test_per_class)
