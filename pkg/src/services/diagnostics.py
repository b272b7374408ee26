"""
Weight Trajectory Diagnostics
=============================
Pooled weight statistics per epoch, the follow score comparing the mean
|Im W| trajectory against mean |Re W|, and best-of-N curves.
"""

from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from src.core.autodiff import Model
from src.core.optimizer import TrainingError
from src.models.experiment import EpochDiagnostics, FollowScore, RunResult


MIN_FOLLOW_EPOCHS = 10
SETTLE_TOLERANCE = 1e-4
SETTLE_WINDOW = 3


class DiagnosticsError(TrainingError):
    """Raised when diagnostics are requested on insufficient data."""
    pass


class WeightStats(NamedTuple):
    mean_abs_re: float
    mean_abs_im: float
    mean_magnitude: float


def weight_stats(model: Model) -> WeightStats:
    """
    Means of |Re w|, |Im w| and |w| over every entry of every weight matrix.

    Biases are excluded.
    """
    weights = model.weights()
    if not weights:
        raise DiagnosticsError("Model has no weight matrices")
    re = np.concatenate([W.re.ravel() for W in weights])
    im = np.concatenate([W.im.ravel() for W in weights])
    return WeightStats(
        float(np.mean(np.abs(re))),
        float(np.mean(np.abs(im))),
        float(np.mean(np.hypot(re, im))),
    )


def settle_epoch(
    series: Sequence[float],
    epochs: Sequence[int],
    tolerance: float = SETTLE_TOLERANCE,
    window: int = SETTLE_WINDOW,
) -> Optional[int]:
    """
    First epoch from which `window` consecutive increments stay below
    tolerance * (max - min) of the series; None if it never settles.
    """
    values = np.asarray(series, dtype=np.float64)
    span = float(values.max() - values.min())
    if span == 0.0:
        return int(epochs[0])
    steps = np.abs(np.diff(values)) < tolerance * span
    for start in range(len(steps) - window + 1):
        if steps[start:start + window].all():
            return int(epochs[start + 1])
    return None


def follow_score(
    trajectory: Sequence[EpochDiagnostics],
    tolerance: float = SETTLE_TOLERANCE,
) -> FollowScore:
    """
    Quantify how closely mean |Im W| follows mean |Re W|.

    delta_correlation is the Pearson correlation of the per-epoch increments
    of both series; convergence_lag is settle(im) - settle(re) in epochs.

    Raises:
        DiagnosticsError: With fewer than 10 epochs
    """
    if len(trajectory) < MIN_FOLLOW_EPOCHS:
        raise DiagnosticsError(
            f"Follow score needs at least {MIN_FOLLOW_EPOCHS} epochs, got {len(trajectory)}"
        )
    epochs = [d.epoch for d in trajectory]
    re = np.array([d.mean_abs_re for d in trajectory])
    im = np.array([d.mean_abs_im for d in trajectory])

    d_re = np.diff(re)
    d_im = np.diff(im)
    correlation = None
    if d_re.std() > 0 and d_im.std() > 0:
        correlation = float(np.clip(np.corrcoef(d_re, d_im)[0, 1], -1.0, 1.0))

    settle_re = settle_epoch(re, epochs, tolerance)
    settle_im = settle_epoch(im, epochs, tolerance)
    lag = None if settle_re is None or settle_im is None else settle_im - settle_re
    return FollowScore(delta_correlation=correlation, convergence_lag=lag)


def best_of_n_curve(results: Sequence[RunResult]) -> List[float]:
    """
    Running maximum of final test accuracy over the first N runs.

    Failed runs do not raise the maximum; entries before the first
    successful run are 0.0.
    """
    curve = []
    best = 0.0
    for result in results:
        if not result.failed and result.test_acc is not None:
            best = max(best, result.test_acc)
        curve.append(best)
    return curve


__all__ = [
    "DiagnosticsError",
    "WeightStats",
    "weight_stats",
    "settle_epoch",
    "follow_score",
    "best_of_n_curve",
]
