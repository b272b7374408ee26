"""
Synthetic Quadrant Task
=======================
Points whose feature sum decides the class.

complex mode (5 classes): quadrant I-IV of the sum (labels 0-3), or near the
origin (label 4, |sum| < origin_radius).

real_projection mode (3 classes): the real part of the same draws, labelled
by the real sum: positive (0), negative (1), near zero (2, |Re sum| <
origin_radius).

Each candidate is drawn from a target class: the target sum s is
R * exp(i theta) with theta inside the quadrant and R uniform in
[2 rho, 4 rho], or uniform in the disc of radius 0.8 rho for the origin
class. Features are x = (s / d) * 1 + complex Gaussian noise. Candidates are
labelled by their realized sum; those inside the ambiguity band
(| |sum| - rho | < 0.1 rho) are rejected, and in complex mode so are those
whose realized class differs from the target. Classes are filled
separately, so the complex task is exactly balanced.
"""

from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.complex_core import ComplexTensor
from src.services.datasets.dataset import Dataset, SyntheticSpecError, one_hot
from src.utils.logger import get_logger, log_function_call


logger = get_logger(__name__)

N_TARGET_CLASSES = 5
ORIGIN_CLASS = 4
ORIGIN_DISC = 0.8
AMBIGUITY_BAND = 0.1
MIN_ACCEPTANCE = 0.1

# Real projection labels
POSITIVE, NEGATIVE, NEAR_ZERO = 0, 1, 2


class SyntheticMode(str, Enum):
    COMPLEX = "complex"
    REAL_PROJECTION = "real_projection"

    @property
    def n_classes(self) -> int:
        return N_TARGET_CLASSES if self is SyntheticMode.COMPLEX else 3


class SyntheticSpec(BaseModel):
    """Generation parameters of the synthetic task."""

    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(default=10000, ge=10)
    d: int = Field(default=25, ge=1)
    sigma: float = Field(default=0.2, gt=0)
    mode: SyntheticMode = SyntheticMode.COMPLEX
    origin_radius: float = Field(default=1.0, gt=0)
    test_fraction: float = Field(default=0.2, gt=0, lt=1)
    seed: int = Field(default=0, ge=0)


def _streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    draw, split = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.Philox(draw)), np.random.Generator(np.random.Philox(split))


def draw_candidates(
    spec: SyntheticSpec,
    rng: np.random.Generator,
    count: int,
    target: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw candidate points before any relabeling or rejection.

    Args:
        spec: Task parameters (mode is ignored)
        rng: Random stream
        count: Number of candidates
        target: Fix the target class; drawn uniformly from 0-4 when None

    Returns:
        (complex features of shape (count, d), target classes)
    """
    rho = spec.origin_radius
    if target is None:
        classes = rng.integers(0, N_TARGET_CLASSES, size=count)
    else:
        classes = np.full(count, target, dtype=np.int64)

    quadrant = classes < ORIGIN_CLASS
    theta = np.where(
        quadrant,
        (classes + rng.uniform(0.0, 1.0, size=count)) * (np.pi / 2.0),
        rng.uniform(-np.pi, np.pi, size=count),
    )
    radius = np.where(
        quadrant,
        rng.uniform(2.0 * rho, 4.0 * rho, size=count),
        ORIGIN_DISC * rho * np.sqrt(rng.uniform(0.0, 1.0, size=count)),
    )
    s = radius * np.exp(1j * theta)

    noise = rng.normal(0.0, spec.sigma, size=(count, spec.d)) + 1j * rng.normal(
        0.0, spec.sigma, size=(count, spec.d)
    )
    x = (s / spec.d)[:, None] + noise
    return x, classes


def region_label(total, mode, origin_radius: float = 1.0) -> np.ndarray:
    """
    Class of a realized feature sum under the region rule.

    complex: 4 if |S| < rho, else the quadrant of S (I: Re > 0, Im >= 0;
    II: Re <= 0, Im > 0; III: Re < 0, Im <= 0; IV: Re >= 0, Im < 0).
    real_projection: 2 if |Re S| < rho, else 0 for Re S > 0 and 1 otherwise.
    """
    total = np.asarray(total, dtype=np.complex128)
    re, im = total.real, total.imag
    if SyntheticMode(mode) is SyntheticMode.REAL_PROJECTION:
        labels = np.where(re > 0, POSITIVE, NEGATIVE)
        return np.where(np.abs(re) < origin_radius, NEAR_ZERO, labels)

    labels = np.select(
        [(re > 0) & (im >= 0), (re <= 0) & (im > 0), (re < 0) & (im <= 0)],
        [0, 1, 2],
        default=3,
    )
    return np.where(np.abs(total) < origin_radius, ORIGIN_CLASS, labels)


def _ambiguous(total: np.ndarray, mode: SyntheticMode, rho: float) -> np.ndarray:
    distance = np.abs(total) if mode is SyntheticMode.COMPLEX else np.abs(total.real)
    return np.abs(distance - rho) < AMBIGUITY_BAND * rho


def _fill(
    spec: SyntheticSpec,
    rng: np.random.Generator,
    target: Optional[int],
    needed: int,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Draw until `needed` candidates survive rejection."""
    kept_x, kept_y = [], []
    have = drawn = 0
    batch = max(64, needed)
    while have < needed:
        x, classes = draw_candidates(spec, rng, batch, target)
        if spec.mode is SyntheticMode.REAL_PROJECTION:
            x = x.real.astype(np.complex128)
        total = x.sum(axis=1)
        realized = region_label(total, spec.mode, spec.origin_radius)
        keep = ~_ambiguous(total, spec.mode, spec.origin_radius)
        if spec.mode is SyntheticMode.COMPLEX:
            keep &= realized == classes
        drawn += batch
        have += int(keep.sum())
        kept_x.append(x[keep])
        kept_y.append(realized[keep])
        if drawn >= 10 * needed and have < MIN_ACCEPTANCE * drawn:
            raise SyntheticSpecError(
                f"Rejection rate {1 - have / drawn:.1%} exceeds {1 - MIN_ACCEPTANCE:.0%} "
                f"(target class {target}); the geometry is degenerate for sigma={spec.sigma}, "
                f"d={spec.d}, origin_radius={spec.origin_radius}"
            )
    return np.concatenate(kept_x)[:needed], np.concatenate(kept_y)[:needed], drawn


@log_function_call
def gen_synthetic(spec: SyntheticSpec) -> Dataset:
    """
    Generate the synthetic task and split it into train and test sets.

    Raises:
        SyntheticSpecError: If more than 90% of candidates are rejected
    """
    draw_rng, split_rng = _streams(spec.seed)

    if spec.mode is SyntheticMode.COMPLEX:
        per_class = [spec.n_samples // N_TARGET_CLASSES] * N_TARGET_CLASSES
        for i in range(spec.n_samples % N_TARGET_CLASSES):
            per_class[i] += 1
        parts = [_fill(spec, draw_rng, c, n) for c, n in enumerate(per_class)]
    else:
        parts = [_fill(spec, draw_rng, None, spec.n_samples)]

    x = np.concatenate([p[0] for p in parts])
    labels = np.concatenate([p[1] for p in parts])
    drawn = sum(p[2] for p in parts)

    order = split_rng.permutation(spec.n_samples)
    n_test = int(round(spec.n_samples * spec.test_fraction))
    test_ids = np.sort(order[:n_test])
    train_ids = np.sort(order[n_test:])

    features = ComplexTensor.from_complex(x)
    if spec.mode is SyntheticMode.REAL_PROJECTION:
        features = ComplexTensor.from_real(features.re)
    targets = one_hot(labels, spec.mode.n_classes)
    name = "synthetic_complex" if spec.mode is SyntheticMode.COMPLEX else "synthetic_real"

    logger.info(
        f"Generated {name}: {spec.n_samples} samples, d={spec.d}, sigma={spec.sigma}, "
        f"acceptance {spec.n_samples / drawn:.1%}"
    )
    return Dataset(
        name=name,
        x_train=features.rows_at(train_ids),
        y_train=targets[train_ids],
        x_test=features.rows_at(test_ids),
        y_test=targets[test_ids],
        n_classes=spec.mode.n_classes,
        metadata={**spec.model_dump(mode="json"), "acceptance_rate": spec.n_samples / drawn},
        train_ids=train_ids,
        test_ids=test_ids,
    )


__all__ = [
    "SyntheticMode",
    "SyntheticSpec",
    "draw_candidates",
    "region_label",
    "gen_synthetic",
]
