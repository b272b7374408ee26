"""
MNIST IDX Loader
================
Parser for the big-endian IDX format and the MNIST train/test loader.

Image files: magic 0x00000803, count, rows, cols, then uint8 pixels.
Label files: magic 0x00000801, count, then uint8 labels.
Files ending in .gz are decompressed transparently.
"""

import gzip
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from src.core.complex_core import ComplexTensor
from src.services.datasets.dataset import (
    Dataset,
    DatasetNotFoundError,
    IDXFormatError,
    one_hot,
)
from src.utils.config import config
from src.utils.logger import get_logger, log_function_call


logger = get_logger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
MNIST_CLASSES = 10

MNIST_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}

PathLike = Union[str, Path]


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    if not path.exists():
        raise DatasetNotFoundError(f"IDX file not found: {path}")
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def _header(raw: bytes, n_words: int, path: PathLike) -> Tuple[int, ...]:
    needed = 4 * n_words
    if len(raw) < needed:
        raise IDXFormatError(f"Header needs {needed} bytes, file has {len(raw)}", path, len(raw))
    return tuple(int(v) for v in np.frombuffer(raw, dtype=">u4", count=n_words))


def _payload(raw: bytes, offset: int, expected: int, path: PathLike) -> np.ndarray:
    available = len(raw) - offset
    if available < expected:
        raise IDXFormatError(
            f"Truncated data: expected {expected} bytes, found {available}", path, len(raw)
        )
    return np.frombuffer(raw, dtype=np.uint8, count=expected, offset=offset)


def read_idx_images(path: PathLike) -> np.ndarray:
    """
    Read an IDX image file.

    Returns:
        uint8 array of shape (count, rows, cols)

    Raises:
        DatasetNotFoundError: If the file does not exist
        IDXFormatError: Bad magic number or truncated data
    """
    raw = _read_bytes(path)
    magic, count, rows, cols = _header(raw, 4, path)
    if magic != IMAGE_MAGIC:
        raise IDXFormatError(f"Bad image magic 0x{magic:08x} (expected 0x{IMAGE_MAGIC:08x})", path, 0)
    pixels = _payload(raw, 16, count * rows * cols, path)
    return pixels.reshape(count, rows, cols)


def read_idx_labels(path: PathLike) -> np.ndarray:
    """
    Read an IDX label file.

    Returns:
        uint8 array of shape (count,)
    """
    raw = _read_bytes(path)
    magic, count = _header(raw, 2, path)
    if magic != LABEL_MAGIC:
        raise IDXFormatError(f"Bad label magic 0x{magic:08x} (expected 0x{LABEL_MAGIC:08x})", path, 0)
    return _payload(raw, 8, count, path).copy()


def _locate(data_dir: Path, stem: str) -> Path:
    for candidate in (data_dir / stem, data_dir / f"{stem}.gz"):
        if candidate.exists():
            return candidate
    raise DatasetNotFoundError(
        f"MNIST file '{stem}' not found in {data_dir} (set CVNN_DATA_DIR or data.cache_dir)"
    )


def mnist_available(data_dir: Optional[PathLike] = None) -> bool:
    directory = Path(data_dir) if data_dir is not None else config.data_dir
    try:
        for stem in MNIST_FILES.values():
            _locate(directory, stem)
    except DatasetNotFoundError:
        return False
    return True


def load_split(images_path: PathLike, labels_path: PathLike, limit: Optional[int] = None) -> Tuple[ComplexTensor, np.ndarray]:
    """
    Load one split as (features, one-hot labels).

    Pixels are scaled to [0, 1] and flattened; the imaginary plane is zero.

    Raises:
        IDXFormatError: If image and label counts differ
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise IDXFormatError(
            f"{images.shape[0]} images but {labels.shape[0]} labels", labels_path, 4
        )
    if limit is not None:
        images = images[:limit]
        labels = labels[:limit]
    x = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    return ComplexTensor.from_real(x), one_hot(labels, MNIST_CLASSES)


@log_function_call
def load_mnist(
    data_dir: Optional[PathLike] = None,
    train_limit: Optional[int] = None,
    test_limit: Optional[int] = None,
) -> Dataset:
    """
    Load the standard 60000/10000 MNIST split from the cache directory.

    Args:
        data_dir: Directory with the four IDX files (default: config.data_dir)
        train_limit: Keep only the first N training samples
        test_limit: Keep only the first N test samples

    Raises:
        DatasetNotFoundError: If any of the four files is missing
        IDXFormatError: If a file is malformed
    """
    directory = Path(data_dir) if data_dir is not None else config.data_dir
    paths = {key: _locate(directory, stem) for key, stem in MNIST_FILES.items()}

    x_train, y_train = load_split(paths["train_images"], paths["train_labels"], train_limit)
    x_test, y_test = load_split(paths["test_images"], paths["test_labels"], test_limit)
    logger.info(f"Loaded MNIST from {directory}: {x_train.rows} train / {x_test.rows} test")

    return Dataset(
        name="mnist",
        x_train=x_train,
        y_train=y_train,
        x_test=x_test,
        y_test=y_test,
        n_classes=MNIST_CLASSES,
        metadata={
            "source": str(directory),
            "train_limit": train_limit,
            "test_limit": test_limit,
        },
    )


__all__ = [
    "IMAGE_MAGIC",
    "LABEL_MAGIC",
    "MNIST_FILES",
    "read_idx_images",
    "read_idx_labels",
    "mnist_available",
    "load_split",
    "load_mnist",
]
