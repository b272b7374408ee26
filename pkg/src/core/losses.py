"""
Loss Functions
==============
Categorical and binary cross entropy over head probabilities, their
gradients with respect to the probabilities, and the fused gradients with
respect to the head scores (|z|^2 or Re z) used during training.
"""

from enum import Enum
from typing import Union

import numpy as np


EPS_FLOOR = 1e-12


class LossError(Exception):
    """Raised for malformed loss inputs."""
    pass


class LossId(str, Enum):
    CATEGORICAL_CE = "categorical_ce"
    BINARY_CE = "binary_ce"


def _check_shapes(probs: np.ndarray, targets: np.ndarray) -> None:
    if probs.shape != targets.shape:
        raise LossError(f"Prediction shape {probs.shape} does not match target shape {targets.shape}")


def categorical_ce(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean over the batch of -sum(y * log(p + eps))."""
    _check_shapes(probs, labels)
    return float(-np.sum(labels * np.log(probs + EPS_FLOOR)) / probs.shape[0])


def categorical_ce_grad(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """dL/dp of categorical_ce."""
    _check_shapes(probs, labels)
    return -labels / (probs + EPS_FLOOR) / probs.shape[0]


def binary_ce(probs: np.ndarray, targets: np.ndarray) -> float:
    """Mean over batch and outputs of -[y log(p+eps) + (1-y) log(1-p+eps)]."""
    _check_shapes(probs, targets)
    total = targets * np.log(probs + EPS_FLOOR) + (1.0 - targets) * np.log(1.0 - probs + EPS_FLOOR)
    return float(-np.sum(total) / probs.size)


def binary_ce_grad(probs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    _check_shapes(probs, targets)
    return -(targets / (probs + EPS_FLOOR) - (1.0 - targets) / (1.0 - probs + EPS_FLOOR)) / probs.size


def loss_value(loss: Union[str, LossId], probs: np.ndarray, targets: np.ndarray) -> float:
    if LossId(loss) is LossId.CATEGORICAL_CE:
        return categorical_ce(probs, targets)
    return binary_ce(probs, targets)


def loss_grad(loss: Union[str, LossId], probs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    if LossId(loss) is LossId.CATEGORICAL_CE:
        return categorical_ce_grad(probs, targets)
    return binary_ce_grad(probs, targets)


def fused_score_grad(loss: Union[str, LossId], probs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """
    Gradient w.r.t. the head scores for softmax+CE and sigmoid+BCE pairs.

    Drops the eps floor, which keeps the gradient alive when a probability
    underflows to zero.
    """
    _check_shapes(probs, targets)
    if LossId(loss) is LossId.CATEGORICAL_CE:
        return (probs - targets) / probs.shape[0]
    return (probs - targets) / probs.size


def accuracy(probs: np.ndarray, targets: np.ndarray) -> float:
    """Fraction of rows whose argmax matches the one-hot target."""
    _check_shapes(probs, targets)
    if probs.shape[0] == 0:
        return 0.0
    return float(np.mean(np.argmax(probs, axis=1) == np.argmax(targets, axis=1)))


__all__ = [
    "EPS_FLOOR",
    "LossError",
    "LossId",
    "categorical_ce",
    "categorical_ce_grad",
    "binary_ce",
    "binary_ce_grad",
    "loss_value",
    "loss_grad",
    "fused_score_grad",
    "accuracy",
]
