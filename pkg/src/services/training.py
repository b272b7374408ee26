"""
Training Service
================
Minibatch Adam training of real and complex MLPs, multi-seed execution and
best-of-N selection.

A run is deterministic given its seed: the seed drives weight initialization
(one Philox stream per layer) and the per-epoch shuffles. Pole hits,
overflows and non-finite losses or gradients end a run early and mark it
failed; they never propagate out of fit_model.

Usage:
    from src.services.training import run_many, best_of_runs

    results = run_many(plan, dataset, train_config, workers=4)
    best = best_of_runs(results)
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Union

import numpy as np

from src.core.activations import Activation, ActivationId, PoleError
from src.core.autodiff import Model, backward, forward
from src.core.initializers import InitSpec, initialize_model
from src.core.losses import LossId, accuracy, fused_score_grad, loss_grad, loss_value
from src.core.optimizer import Adam, NonFiniteError, TrainingError
from src.models.experiment import EpochDiagnostics, RunResult, TrainConfig
from src.models.plan import NetworkPlan
from src.services.datasets import Dataset
from src.services.diagnostics import weight_stats
from src.utils.logger import LogContext, get_logger


logger = get_logger(__name__)

# spawn_key prefix of the shuffle streams; init streams use (layer_index,)
_SHUFFLE_STREAM = 1_000_003

_FUSED_PAIRS = {
    (ActivationId.SOFTMAX_INTENSITY, LossId.CATEGORICAL_CE),
    (ActivationId.SOFTMAX, LossId.CATEGORICAL_CE),
    (ActivationId.SIGMOID_INTENSITY, LossId.BINARY_CE),
}


class AllRunsFailedError(TrainingError):
    """Raised by best_of_runs when no run finished."""

    def __init__(self, results: Sequence[RunResult]) -> None:
        reasons = "; ".join(f"seed {r.seed}: {r.failure_reason}" for r in results)
        super().__init__(f"All {len(results)} runs failed ({reasons})")
        self.results = list(results)


def epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed, spawn_key=(_SHUFFLE_STREAM, epoch))
    return np.random.Generator(np.random.Philox(sequence))


def _check_dims(model: Model, dataset: Dataset) -> None:
    if model.n_inputs != dataset.n_features or model.n_outputs != dataset.n_classes:
        raise TrainingError(
            f"Model maps {model.n_inputs} -> {model.n_outputs} but the dataset has "
            f"{dataset.n_features} features and {dataset.n_classes} classes"
        )


def evaluate(model: Model, x, y: np.ndarray, batch_size: int = 2048) -> float:
    """Accuracy over a split, evaluated in chunks."""
    if x.rows == 0:
        return 0.0
    correct = 0.0
    for start in range(0, x.rows, batch_size):
        rows = slice(start, start + batch_size)
        probs = forward(model, x.rows_at(rows)).output
        correct += accuracy(probs, y[rows]) * probs.shape[0]
    return correct / x.rows


def _train_epoch(
    model: Model,
    optimizer: Adam,
    dataset: Dataset,
    config: TrainConfig,
    rng: np.random.Generator,
    fused: bool,
) -> tuple:
    order = rng.permutation(dataset.n_train)
    loss_sum = acc_sum = 0.0
    for start in range(0, dataset.n_train, config.batch_size):
        rows = order[start:start + config.batch_size]
        x = dataset.x_train.rows_at(rows)
        y = dataset.y_train[rows]

        tape = forward(model, x)
        probs = tape.output
        loss = loss_value(config.loss, probs, y)
        if not np.isfinite(loss):
            raise NonFiniteError(f"Loss became {loss}")

        if fused:
            grads = backward(tape, model, dL_dscores=fused_score_grad(config.loss, probs, y))
        else:
            grads = backward(tape, model, loss_grad(config.loss, probs, y))
        optimizer.step(grads.planes(model))

        loss_sum += loss * len(rows)
        acc_sum += accuracy(probs, y) * len(rows)
    return loss_sum / dataset.n_train, acc_sum / dataset.n_train


def fit_model(
    model: Model,
    dataset: Dataset,
    config: TrainConfig,
    seed: int,
) -> RunResult:
    """
    Train an already-initialized model in place.

    Records one EpochDiagnostics per completed epoch: sample-weighted
    means of the minibatch loss and accuracy, test accuracy after the epoch
    and the pooled weight statistics.

    Raises:
        TrainingError: If the model and dataset dimensions disagree
    """
    _check_dims(model, dataset)
    optimizer = Adam(
        model.parameters(),
        lr=config.learning_rate,
        beta1=config.beta1,
        beta2=config.beta2,
        eps=config.epsilon,
    )
    fused = (model.head.id, config.loss) in _FUSED_PAIRS
    diagnostics: List[EpochDiagnostics] = []

    epoch = 0
    try:
        with np.errstate(over="raise", invalid="raise"):
            for epoch in range(1, config.epochs + 1):
                train_loss, train_acc = _train_epoch(
                    model, optimizer, dataset, config, epoch_rng(seed, epoch), fused
                )
                test_acc = evaluate(model, dataset.x_test, dataset.y_test)
                stats = weight_stats(model)
                diagnostics.append(
                    EpochDiagnostics(
                        epoch=epoch,
                        train_loss=train_loss,
                        train_acc=train_acc,
                        test_acc=test_acc,
                        mean_abs_re=stats.mean_abs_re,
                        mean_abs_im=stats.mean_abs_im,
                        mean_magnitude=stats.mean_magnitude,
                    )
                )
                logger.debug(
                    f"epoch {epoch}: loss={train_loss:.4f} train={train_acc:.4f} "
                    f"test={test_acc:.4f} |Re|={stats.mean_abs_re:.4f} "
                    f"|Im|={stats.mean_abs_im:.4f} |W|={stats.mean_magnitude:.4f}"
                )
    except (PoleError, NonFiniteError, FloatingPointError) as e:
        reason = f"{type(e).__name__}: {e}"
        logger.warning(f"Run with seed {seed} failed in epoch {epoch}: {reason}")
        last = diagnostics[-1] if diagnostics else None
        return RunResult(
            seed=seed,
            domain=model.domain,
            test_acc=last.test_acc if last else None,
            train_acc=last.train_acc if last else None,
            diagnostics=diagnostics,
            failed=True,
            failure_reason=reason,
            failure_epoch=epoch,
        )

    final = diagnostics[-1]
    return RunResult(
        seed=seed,
        domain=model.domain,
        test_acc=final.test_acc,
        train_acc=final.train_acc,
        diagnostics=diagnostics,
    )


def train_run(
    plan: NetworkPlan,
    dataset: Dataset,
    config: TrainConfig,
    seed: int,
    activation: Union[str, Activation] = "relu",
    head: Union[str, Activation] = "softmax_intensity",
    complex_spec: Optional[InitSpec] = None,
    real_spec: Optional[InitSpec] = None,
    trainable_bias: bool = True,
) -> RunResult:
    """Initialize a model for the plan with the run seed and train it."""
    with LogContext(domain=plan.domain.value, seed=seed):
        logger.info(f"Starting {plan.domain.value} run, seed {seed}, widths {plan.hidden_widths}")
        model = initialize_model(
            plan, activation, head, complex_spec, real_spec, seed=seed, trainable_bias=trainable_bias
        )
        result = fit_model(model, dataset, config, seed)
        if not result.failed:
            logger.info(
                f"Finished {plan.domain.value} run, seed {seed}: test acc {result.test_acc:.4f}"
            )
        return result


def run_many(
    plan: NetworkPlan,
    dataset: Dataset,
    config: TrainConfig,
    workers: int = 1,
    activation: Union[str, Activation] = "relu",
    head: Union[str, Activation] = "softmax_intensity",
    complex_spec: Optional[InitSpec] = None,
    real_spec: Optional[InitSpec] = None,
    trainable_bias: bool = True,
) -> List[RunResult]:
    """
    Train config.runs independent runs with seeds base_seed + run_index.

    Results are ordered by run index whatever the completion order.
    """
    seeds = config.seeds()

    def one(seed: int) -> RunResult:
        return train_run(
            plan, dataset, config, seed, activation, head, complex_spec, real_spec, trainable_bias
        )

    if workers <= 1:
        results = [one(seed) for seed in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, seeds))

    failed = sum(r.failed for r in results)
    if failed == len(results):
        logger.error(f"All {len(results)} {plan.domain.value} runs failed")
    elif failed:
        logger.warning(f"{failed}/{len(results)} {plan.domain.value} runs failed")
    return results


def best_of_runs(results: Sequence[RunResult]) -> RunResult:
    """
    Run with the highest final test accuracy; ties go to the lower seed.

    Raises:
        AllRunsFailedError: If no run finished (or the list is empty)
    """
    finished = [r for r in results if not r.failed and r.test_acc is not None]
    if not finished:
        raise AllRunsFailedError(results)
    return min(finished, key=lambda r: (-r.test_acc, r.seed))


__all__ = [
    "AllRunsFailedError",
    "epoch_rng",
    "evaluate",
    "fit_model",
    "train_run",
    "run_many",
    "best_of_runs",
]
