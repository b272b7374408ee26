"""
Dataset Container
=================
Immutable train/test container shared by the trainer and every loader.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from src.core.complex_core import ComplexTensor


# -----------------------------------------------------------------------------
# Exceptions
# -----------------------------------------------------------------------------

class DatasetError(Exception):
    """Base class for dataset errors."""
    pass


class DatasetNotFoundError(DatasetError):
    """Raised when dataset files are missing from the cache directory."""
    pass


class IDXFormatError(DatasetError):
    """
    Raised for a malformed IDX file.

    Attributes:
        path: File being parsed
        offset: Byte offset where parsing failed
    """

    def __init__(self, message: str, path: Any = None, offset: Optional[int] = None) -> None:
        location = f" ({path} at byte {offset})" if path is not None else ""
        super().__init__(f"{message}{location}")
        self.path = path
        self.offset = offset


class SyntheticSpecError(DatasetError):
    """Raised when a synthetic task specification cannot produce data."""
    pass


class LabelRangeError(DatasetError):
    """Raised when a class index is negative or not below the class count."""
    pass


# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------

def one_hot(labels, n_classes: int) -> np.ndarray:
    """
    Exact one-hot rows for integer labels.

    Raises:
        LabelRangeError: If any label is outside [0, n_classes)
    """
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if n_classes < 1:
        raise LabelRangeError(f"Class count must be >= 1, got {n_classes}")
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        bad = labels[(labels < 0) | (labels >= n_classes)][0]
        raise LabelRangeError(f"Label {bad} is outside [0, {n_classes})")
    out = np.zeros((labels.size, n_classes))
    out[np.arange(labels.size), labels] = 1.0
    return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Train/test split of complex (or real, imaginary plane zero) features.

    Attributes:
        name: Dataset identifier (mnist, synthetic_complex, synthetic_real)
        x_train, x_test: Feature rows
        y_train, y_test: One-hot label rows
        n_classes: Number of classes c
        metadata: Generation or loading parameters
        train_ids, test_ids: Source indices of each split, when known
    """

    name: str
    x_train: ComplexTensor
    y_train: np.ndarray
    x_test: ComplexTensor
    y_test: np.ndarray
    n_classes: int
    metadata: Dict[str, Any] = field(default_factory=dict)
    train_ids: Optional[np.ndarray] = None
    test_ids: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.x_train.rows != self.y_train.shape[0] or self.x_test.rows != self.y_test.shape[0]:
            raise DatasetError(
                f"Feature/label row counts differ: train {self.x_train.rows}/{self.y_train.shape[0]}, "
                f"test {self.x_test.rows}/{self.y_test.shape[0]}"
            )
        if self.x_train.cols != self.x_test.cols:
            raise DatasetError("Train and test features have different widths")
        for y in (self.y_train, self.y_test):
            if y.shape[1] != self.n_classes:
                raise DatasetError(f"Label width {y.shape[1]} does not match {self.n_classes} classes")

    @property
    def n_features(self) -> int:
        return self.x_train.cols

    @property
    def n_train(self) -> int:
        return self.x_train.rows

    @property
    def n_test(self) -> int:
        return self.x_test.rows

    @property
    def is_real(self) -> bool:
        return self.x_train.is_real and self.x_test.is_real

    def labels(self, split: str = "train") -> np.ndarray:
        y = self.y_train if split == "train" else self.y_test
        return np.argmax(y, axis=1)

    def __repr__(self) -> str:
        return (
            f"Dataset(name={self.name!r}, train={self.n_train}, test={self.n_test}, "
            f"d={self.n_features}, c={self.n_classes})"
        )


__all__ = [
    "DatasetError",
    "DatasetNotFoundError",
    "IDXFormatError",
    "SyntheticSpecError",
    "LabelRangeError",
    "one_hot",
    "Dataset",
]
