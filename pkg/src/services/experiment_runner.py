"""
Experiment Runner
=================
Loads experiment manifests, builds parameter-matched plans, trains every
requested domain and writes run CSVs plus a summary file.

Output layout under <output_dir>/<name>/:
    summary.jsonl                  one record per domain
    <domain>/run_seed<seed>.csv    one trajectory per run

Usage:
    from src.services.experiment_runner import load_experiment_config, run_experiment

    experiment = load_experiment_config("configs/experiments/mnist_fixed_k0.yaml")
    summaries = run_experiment(experiment)
"""

import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import ValidationError

from src.core.capacity import build_matched_pair
from src.core.initializers import FanMode, InitScheme, InitSpec
from src.models.experiment import (
    DatasetKind,
    DomainSummary,
    ExperimentConfig,
    RunResult,
)
from src.models.plan import Domain, NetworkPlan
from src.services.datasets import Dataset, load_dataset
from src.services.datasets.idx_loader import MNIST_CLASSES
from src.services.datasets.synthetic import SyntheticMode
from src.services.diagnostics import (
    MIN_FOLLOW_EPOCHS,
    best_of_n_curve,
    follow_score,
)
from src.services.reporting import write_run_csv, write_summary
from src.services.training import AllRunsFailedError, best_of_runs, run_many
from src.utils.config import InvalidConfigError, MissingConfigError
from src.utils.logger import LogContext, get_logger, log_function_call


logger = get_logger(__name__)

PathLike = Union[str, Path]
MNIST_FEATURES = 28 * 28
SUMMARY_FILE = "summary.jsonl"


# -----------------------------------------------------------------------------
# Manifests
# -----------------------------------------------------------------------------

def _first_error_field(error: ValidationError) -> Tuple[Optional[str], str]:
    first = error.errors()[0]
    message = first.get("msg", str(error))
    if first.get("loc"):
        return str(first["loc"][0]), message
    # model-level validators prefix their message with the field name
    match = re.search(r"(\w+):", message)
    return (match.group(1) if match else None), message


def load_experiment_config(
    path: Optional[PathLike] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """
    Read a flat YAML manifest and apply overrides (None values are skipped).

    Raises:
        MissingConfigError: If the manifest file does not exist
        InvalidConfigError: Unparsable YAML or an invalid field (named in .field)
    """
    values: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise MissingConfigError(f"Experiment manifest not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                loaded = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise InvalidConfigError(f"Error parsing {path}: {e}")
        if not isinstance(loaded, dict):
            raise InvalidConfigError(f"{path} must contain a flat mapping of keys")
        values.update(loaded)
        values.setdefault("name", path.stem)

    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        field, message = _first_error_field(e)
        raise InvalidConfigError(f"Invalid value for '{field}': {message}", field=field) from e


# -----------------------------------------------------------------------------
# Planning
# -----------------------------------------------------------------------------

def dataset_dims(experiment: ExperimentConfig) -> Tuple[int, int]:
    """(input_dim, output_dim) implied by the manifest, honouring overrides."""
    if experiment.dataset is DatasetKind.MNIST:
        n, c = MNIST_FEATURES, MNIST_CLASSES
    elif experiment.dataset is DatasetKind.SYNTHETIC_COMPLEX:
        n, c = experiment.d, SyntheticMode.COMPLEX.n_classes
    else:
        n, c = experiment.d, SyntheticMode.REAL_PROJECTION.n_classes
    return experiment.input_dim or n, experiment.output_dim or c


def build_plans(experiment: ExperimentConfig) -> Dict[Domain, NetworkPlan]:
    """Matched plans for the requested domain(s)."""
    n, c = dataset_dims(experiment)
    real_plan, complex_plan = build_matched_pair(
        experiment.width_mode,
        input_dim=n,
        output_dim=c,
        k=experiment.k,
        width=experiment.width,
        budget=experiment.budget,
    )
    plans = {Domain.REAL: real_plan, Domain.COMPLEX: complex_plan}
    return {
        domain: plans[domain].model_copy(update={"include_bias": experiment.include_bias})
        for domain in experiment.domain.domains()
    }


def plan_only(experiment: ExperimentConfig) -> List[Dict[str, Any]]:
    """Width lists and parameter totals of every requested domain, no training."""
    reports = []
    for plan in build_plans(experiment).values():
        report = plan.report()
        report["k"] = experiment.k
        report["width_mode"] = experiment.width_mode.value
        reports.append(report)
    return reports


def format_plan(reports: List[Dict[str, Any]]) -> str:
    lines = []
    for r in reports:
        line = (
            f"{r['domain']:>7}  widths={r['widths']}  "
            f"params={r['params_no_bias']} (with bias {r['params_with_bias']})"
        )
        if r.get("budget") is not None:
            line += f"  budget={r['budget']} deviation={r['budget_deviation']:+d}"
        lines.append(line)
    return "\n".join(lines)


# -----------------------------------------------------------------------------
# Running
# -----------------------------------------------------------------------------

def init_specs(experiment: ExperimentConfig) -> Tuple[InitSpec, InitSpec]:
    fan_mode = FanMode(experiment.fan_mode)
    complex_spec = InitSpec(scheme=InitScheme(experiment.init_complex_scheme), fan_mode=fan_mode)
    real_spec = InitSpec(scheme=InitScheme(experiment.init_real_scheme), fan_mode=fan_mode)
    return complex_spec, real_spec


def summarize(
    experiment: ExperimentConfig,
    plan: NetworkPlan,
    results: List[RunResult],
) -> DomainSummary:
    """Collapse the runs of one domain into a summary record."""
    finished = [r for r in results if not r.failed]
    summary = DomainSummary(
        experiment=experiment.name,
        dataset=experiment.dataset,
        k=experiment.k,
        activation=experiment.activation_id.value,
        domain=plan.domain,
        width_mode=experiment.width_mode,
        widths=list(plan.hidden_widths),
        params_no_bias=plan.param_count_no_bias,
        params_with_bias=plan.param_count_with_bias,
        budget=plan.budget,
        runs=len(results),
        failed_runs=len(results) - len(finished),
        best_of_n=best_of_n_curve(results),
    )
    if not finished:
        return summary

    accuracies = np.array([r.test_acc for r in finished])
    best = best_of_runs(results)
    follow = None
    if best.epochs_completed >= MIN_FOLLOW_EPOCHS:
        follow = follow_score(best.diagnostics)
    return summary.model_copy(
        update={
            "best_seed": best.seed,
            "best_test_acc": best.test_acc,
            "best_train_acc": best.train_acc,
            "mean_test_acc": float(accuracies.mean()),
            "var_test_acc": float(accuracies.var()),
            "follow": follow,
        }
    )


@log_function_call
def run_experiment(
    experiment: ExperimentConfig,
    dataset: Optional[Dataset] = None,
) -> List[DomainSummary]:
    """
    Train every requested domain and write CSVs and the summary.

    Returns:
        One DomainSummary per domain

    Raises:
        DatasetError: If the dataset cannot be loaded or generated
        CapacityError: If the plan cannot be built
        InvalidConfigError: If dimension overrides disagree with the dataset
        AllRunsFailedError: If no run of any domain finished (summary is
            still written)
    """
    plans = build_plans(experiment)
    if dataset is None:
        dataset = load_dataset(experiment)
    if dataset_dims(experiment) != (dataset.n_features, dataset.n_classes):
        raise InvalidConfigError(
            f"Manifest dimensions {dataset_dims(experiment)} do not match dataset "
            f"({dataset.n_features}, {dataset.n_classes})",
            field="input_dim",
        )

    out_dir = Path(experiment.output_dir) / experiment.name
    train_config = experiment.train_config()
    complex_spec, real_spec = init_specs(experiment)

    summaries: List[DomainSummary] = []
    all_results: List[RunResult] = []
    with LogContext(experiment=experiment.name):
        for domain, plan in plans.items():
            logger.info(
                f"{experiment.name}: {domain.value} widths {plan.hidden_widths}, "
                f"{plan.param_count_no_bias} params, {train_config.runs} runs"
            )
            results = run_many(
                plan,
                dataset,
                train_config,
                workers=experiment.workers,
                activation=experiment.activation,
                head=experiment.head,
                complex_spec=complex_spec,
                real_spec=real_spec,
                trainable_bias=experiment.train_bias,
            )
            for result in results:
                write_run_csv(result, out_dir / domain.value / f"run_seed{result.seed}.csv")
            summaries.append(summarize(experiment, plan, results))
            all_results.extend(results)

    write_summary(summaries, out_dir / SUMMARY_FILE)
    if all(s.all_failed for s in summaries):
        logger.error(f"{experiment.name}: every run failed")
        raise AllRunsFailedError(all_results)
    return summaries


__all__ = [
    "SUMMARY_FILE",
    "load_experiment_config",
    "dataset_dims",
    "build_plans",
    "plan_only",
    "format_plan",
    "init_specs",
    "summarize",
    "run_experiment",
]
