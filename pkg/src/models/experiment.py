"""
Experiment Models
=================
Pydantic records for experiment manifests, training configuration, per-epoch
diagnostics, run results and per-domain summaries.

Defaults that are not set in a manifest come from configs/config.yaml via
the ConfigLoader.
"""

from enum import Enum
from pathlib import Path
from typing import ClassVar, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.activations import (
    ActivationError,
    ActivationId,
    get_head,
    get_hidden_activation,
    parse_activation,
)
from src.core.initializers import FanMode, InitScheme
from src.core.losses import LossId
from src.models.plan import Domain, WidthMode
from src.utils.config import config


class DatasetKind(str, Enum):
    MNIST = "mnist"
    SYNTHETIC_COMPLEX = "synthetic_complex"
    SYNTHETIC_REAL = "synthetic_real"


class DomainChoice(str, Enum):
    REAL = "real"
    COMPLEX = "complex"
    BOTH = "both"

    def domains(self) -> List[Domain]:
        if self is DomainChoice.BOTH:
            return [Domain.REAL, Domain.COMPLEX]
        return [Domain(self.value)]


def default_loss_for_head(head: ActivationId) -> LossId:
    """Binary cross entropy pairs with the sigmoid head, categorical otherwise."""
    if head is ActivationId.SIGMOID_INTENSITY:
        return LossId.BINARY_CE
    return LossId.CATEGORICAL_CE


# =============================================================================
# Training
# =============================================================================

class TrainConfig(BaseModel):
    """Optimizer, loss and run-count settings shared by every run of an experiment."""

    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default_factory=lambda: config.epochs, ge=1)
    batch_size: int = Field(default_factory=lambda: config.batch_size, ge=1)
    learning_rate: float = Field(default_factory=lambda: config.learning_rate, gt=0)
    beta1: float = Field(default_factory=lambda: config.adam_betas[0], ge=0, lt=1)
    beta2: float = Field(default_factory=lambda: config.adam_betas[1], ge=0, lt=1)
    epsilon: float = Field(default_factory=lambda: config.adam_epsilon, gt=0)
    loss: LossId = LossId.CATEGORICAL_CE
    runs: int = Field(default_factory=lambda: config.runs, ge=1)
    base_seed: int = Field(default_factory=lambda: config.base_seed, ge=0)

    def seeds(self) -> List[int]:
        """One seed per run: base_seed + run_index."""
        return [self.base_seed + i for i in range(self.runs)]


class EpochDiagnostics(BaseModel):
    """Metrics and pooled weight statistics recorded after one epoch."""

    epoch: int = Field(..., ge=1)
    train_loss: float
    train_acc: float = Field(..., ge=0, le=1)
    test_acc: float = Field(..., ge=0, le=1)
    mean_abs_re: float = Field(..., ge=0)
    mean_abs_im: float = Field(..., ge=0)
    mean_magnitude: float = Field(..., ge=0)

    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = (
        "epoch",
        "train_loss",
        "train_acc",
        "test_acc",
        "mean_abs_re",
        "mean_abs_im",
        "mean_magnitude",
    )


class RunResult(BaseModel):
    """
    Outcome of one seeded training run.

    A failed run keeps the diagnostics of every completed epoch; failure_epoch
    is the epoch during which training aborted.
    """

    seed: int
    domain: Domain
    test_acc: Optional[float] = Field(default=None, ge=0, le=1)
    train_acc: Optional[float] = Field(default=None, ge=0, le=1)
    diagnostics: List[EpochDiagnostics] = Field(default_factory=list)
    failed: bool = False
    failure_reason: Optional[str] = None
    failure_epoch: Optional[int] = None

    @model_validator(mode="after")
    def _failure_consistency(self) -> "RunResult":
        if self.failed != (self.failure_reason is not None):
            raise ValueError("failure_reason must be set exactly when the run failed")
        return self

    @property
    def epochs_completed(self) -> int:
        return len(self.diagnostics)


class FollowScore(BaseModel):
    """
    How closely the mean |Im W| trajectory tracks mean |Re W|.

    delta_correlation is None when either increment series is constant;
    convergence_lag is None when a series never settles.
    """

    delta_correlation: Optional[float] = Field(default=None, ge=-1, le=1)
    convergence_lag: Optional[int] = None

    @property
    def applicable(self) -> bool:
        return self.delta_correlation is not None


# =============================================================================
# Experiment Manifest
# =============================================================================

class ExperimentConfig(BaseModel):
    """
    Flat experiment manifest.

    Keys map one to one onto configs/experiments/*.yaml entries. Width mode
    "fixed" needs `width` (even), "budget" needs `budget`. include_bias picks
    the reported parameter total; train_bias decides whether biases learn.
    """

    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    dataset: DatasetKind = DatasetKind.SYNTHETIC_COMPLEX
    domain: DomainChoice = DomainChoice.BOTH
    k: int = Field(default=0, ge=0)
    width_mode: WidthMode = WidthMode.FIXED
    width: Optional[int] = Field(default=64, ge=1)
    budget: Optional[int] = Field(default=None, ge=1)
    activation: str = "relu"
    head: str = "softmax_intensity"
    loss: Optional[LossId] = None
    include_bias: bool = False
    train_bias: bool = True

    runs: int = Field(default_factory=lambda: config.runs, ge=1)
    epochs: int = Field(default_factory=lambda: config.epochs, ge=1)
    batch_size: int = Field(default_factory=lambda: config.batch_size, ge=1)
    learning_rate: float = Field(default_factory=lambda: config.learning_rate, gt=0)
    base_seed: int = Field(default_factory=lambda: config.base_seed, ge=0)

    init_complex_scheme: str = Field(default_factory=lambda: config.init_complex_scheme)
    init_real_scheme: str = Field(default_factory=lambda: config.init_real_scheme)
    fan_mode: str = Field(default_factory=lambda: config.fan_mode)

    # synthetic task
    n_samples: int = Field(default_factory=lambda: int(config.synthetic_defaults["n_samples"]), ge=10)
    d: int = Field(default_factory=lambda: int(config.synthetic_defaults["d"]), ge=1)
    sigma: float = Field(default_factory=lambda: float(config.synthetic_defaults["sigma"]), gt=0)
    origin_radius: float = Field(
        default_factory=lambda: float(config.synthetic_defaults["origin_radius"]), gt=0
    )
    test_fraction: float = Field(
        default_factory=lambda: float(config.synthetic_defaults["test_fraction"]), gt=0, lt=1
    )
    data_seed: int = Field(default_factory=lambda: int(config.synthetic_defaults["seed"]), ge=0)

    # mnist
    data_dir: Optional[Path] = None
    train_limit: Optional[int] = Field(default=None, ge=1)
    test_limit: Optional[int] = Field(default=None, ge=1)

    # dimension overrides for planning without a dataset
    input_dim: Optional[int] = Field(default=None, ge=1)
    output_dim: Optional[int] = Field(default=None, ge=1)

    output_dir: Path = Field(default_factory=lambda: config.output_dir)
    workers: int = Field(default_factory=lambda: config.workers, ge=1)

    @field_validator("k")
    @classmethod
    def _even_depth(cls, k: int) -> int:
        if k % 2:
            raise ValueError(f"k must be even, got {k}")
        return k

    @field_validator("activation")
    @classmethod
    def _hidden_activation(cls, name: str) -> str:
        try:
            get_hidden_activation(name)
        except ActivationError as e:
            raise ValueError(str(e))
        return name

    @field_validator("head")
    @classmethod
    def _output_head(cls, name: str) -> str:
        try:
            get_head(name)
        except ActivationError as e:
            raise ValueError(str(e))
        return name

    @field_validator("init_complex_scheme", "init_real_scheme", "fan_mode")
    @classmethod
    def _init_strings(cls, value: str, info) -> str:
        allowed = FanMode if info.field_name == "fan_mode" else InitScheme
        try:
            allowed(value)
        except ValueError:
            valid = ", ".join(v.value for v in allowed)
            raise ValueError(f"'{value}' is not one of: {valid}")
        if info.field_name == "init_real_scheme" and value == InitScheme.COMPLEX_VARIANCE_SCALED.value:
            raise ValueError("real-domain networks cannot use the complex initializer")
        return value

    @model_validator(mode="after")
    def _width_parameters(self) -> "ExperimentConfig":
        if self.width_mode is WidthMode.FIXED:
            if self.width is None or self.width < 2 or self.width % 2:
                raise ValueError("width: fixed width mode needs an even width >= 2")
        elif self.budget is None:
            raise ValueError("budget: budget width mode needs a positive budget")
        return self

    # -------------------------------------------------------------------------
    # Derived Settings
    # -------------------------------------------------------------------------

    @property
    def activation_id(self) -> ActivationId:
        return parse_activation(self.activation)

    @property
    def head_id(self) -> ActivationId:
        return parse_activation(self.head)

    @property
    def resolved_loss(self) -> LossId:
        return self.loss or default_loss_for_head(self.head_id)

    def train_config(self) -> TrainConfig:
        beta1, beta2 = config.adam_betas
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            beta1=beta1,
            beta2=beta2,
            epsilon=config.adam_epsilon,
            loss=self.resolved_loss,
            runs=self.runs,
            base_seed=self.base_seed,
        )


# =============================================================================
# Summaries
# =============================================================================

class DomainSummary(BaseModel):
    """One summary record: the outcome of all runs for one domain of an experiment."""

    experiment: str
    dataset: DatasetKind
    k: int
    activation: str
    domain: Domain
    width_mode: WidthMode
    widths: List[int]
    params_no_bias: int
    params_with_bias: int
    budget: Optional[int] = None
    runs: int
    failed_runs: int = 0
    best_seed: Optional[int] = None
    best_test_acc: Optional[float] = None
    best_train_acc: Optional[float] = None
    mean_test_acc: Optional[float] = None
    var_test_acc: Optional[float] = None
    best_of_n: List[float] = Field(default_factory=list)
    follow: Optional[FollowScore] = None

    @property
    def key(self) -> Tuple[str, int, str, str]:
        """Merge key (dataset, k, activation, domain)."""
        return (self.dataset.value, self.k, self.activation, self.domain.value)

    @property
    def all_failed(self) -> bool:
        return self.failed_runs >= self.runs


__all__ = [
    "DatasetKind",
    "DomainChoice",
    "default_loss_for_head",
    "TrainConfig",
    "EpochDiagnostics",
    "RunResult",
    "FollowScore",
    "ExperimentConfig",
    "DomainSummary",
]
