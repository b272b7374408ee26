"""
Weight Initialization
=====================
Seeded initializers for real and complex dense layers.

- complex_variance_scaled: magnitude ~ Rayleigh(s), s = sqrt(1/fan), phase
  uniform on (-pi, pi]; E|w|^2 = 2 s^2
- real_glorot: uniform on +-sqrt(6 / (fan_in + fan_out))
- zeros: both planes zero (default for biases)

Every layer draws from its own Philox stream derived from
SeedSequence(seed, spawn_key=(layer_index,)), so a (seed, layer, shape,
scheme) tuple fully determines the weights.
"""

from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.activations import get_activation, get_head, get_hidden_activation
from src.core.autodiff import DenseLayer, Model
from src.core.complex_core import ComplexTensor
from src.models.plan import Domain, NetworkPlan
from src.utils.logger import get_logger


logger = get_logger(__name__)


class InitScheme(str, Enum):
    COMPLEX_VARIANCE_SCALED = "complex_variance_scaled"
    REAL_GLOROT = "real_glorot"
    ZEROS = "zeros"


class FanMode(str, Enum):
    FAN_IN = "fan_in"
    FAN_AVG = "fan_avg"


class InitSpec(BaseModel):
    """Scheme, fan convention and seed of one initializer."""

    model_config = ConfigDict(frozen=True)

    scheme: InitScheme = InitScheme.COMPLEX_VARIANCE_SCALED
    fan_mode: FanMode = FanMode.FAN_IN
    seed: int = Field(default=0, ge=0, lt=2 ** 64)


Shape = Tuple[int, int]


def layer_rng(seed: int, layer_index: int = 0) -> np.random.Generator:
    """Independent Philox generator for one layer of one run."""
    sequence = np.random.SeedSequence(seed, spawn_key=(layer_index,))
    return np.random.Generator(np.random.Philox(sequence))


def _fan(shape: Shape, fan_mode: FanMode) -> float:
    fan_in, fan_out = shape
    if fan_in < 1 or fan_out < 1:
        raise ValueError(f"Weight shape must be positive, got {shape}")
    if FanMode(fan_mode) is FanMode.FAN_AVG:
        return (fan_in + fan_out) / 2.0
    return float(fan_in)


def init_complex(
    shape: Shape,
    spec: InitSpec,
    rng: Optional[np.random.Generator] = None,
) -> ComplexTensor:
    """Rayleigh magnitude with mode sqrt(1/fan), uniform phase."""
    if spec.scheme is not InitScheme.COMPLEX_VARIANCE_SCALED:
        raise ValueError(f"init_complex needs scheme complex_variance_scaled, got {spec.scheme.value}")
    rng = rng or layer_rng(spec.seed)
    mode = np.sqrt(1.0 / _fan(shape, spec.fan_mode))
    r = rng.rayleigh(scale=mode, size=shape)
    # uniform on [-pi, pi) mirrored to (-pi, pi]
    phi = -rng.uniform(-np.pi, np.pi, size=shape)
    return ComplexTensor(r * np.cos(phi), r * np.sin(phi))


def init_real(
    shape: Shape,
    spec: InitSpec,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Glorot uniform; the fan mode does not apply."""
    if spec.scheme is not InitScheme.REAL_GLOROT:
        raise ValueError(f"init_real needs scheme real_glorot, got {spec.scheme.value}")
    fan_in, fan_out = shape
    if fan_in < 1 or fan_out < 1:
        raise ValueError(f"Weight shape must be positive, got {shape}")
    rng = rng or layer_rng(spec.seed)
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_zeros(shape: Shape) -> ComplexTensor:
    return ComplexTensor.zeros(*shape)


def init_weights(
    shape: Shape,
    spec: InitSpec,
    layer_index: int = 0,
) -> ComplexTensor:
    """Dispatch on the scheme, drawing from the layer's own stream."""
    rng = layer_rng(spec.seed, layer_index)
    if spec.scheme is InitScheme.COMPLEX_VARIANCE_SCALED:
        return init_complex(shape, spec, rng)
    if spec.scheme is InitScheme.REAL_GLOROT:
        return ComplexTensor.from_real(init_real(shape, spec, rng))
    return init_zeros(shape)


def initialize_model(
    plan: NetworkPlan,
    activation: Union[str, object] = "relu",
    head: Union[str, object] = "softmax_intensity",
    complex_spec: Optional[InitSpec] = None,
    real_spec: Optional[InitSpec] = None,
    seed: Optional[int] = None,
    trainable_bias: bool = True,
) -> Model:
    """
    Build a freshly initialized model for a plan.

    Hidden layers use `activation`; the output layer is linear and feeds the
    head. Real-domain plans use the real scheme (imaginary planes stay zero),
    complex-domain plans the complex scheme. Biases start at zero and are
    trained unless trainable_bias is False. plan.include_bias only selects
    which parameter total the plan reports.

    Args:
        plan: Widths and domain
        activation: Hidden activation id or alias
        head: Output head id
        complex_spec: Initializer for complex plans
        real_spec: Initializer for real plans
        seed: Overrides the seed of whichever spec applies
        trainable_bias: False freezes every bias at zero
    """
    hidden = get_hidden_activation(activation) if isinstance(activation, str) else activation
    out_head = get_head(head) if isinstance(head, str) else head

    if plan.domain is Domain.COMPLEX:
        spec = complex_spec or InitSpec(scheme=InitScheme.COMPLEX_VARIANCE_SCALED)
    else:
        spec = real_spec or InitSpec(scheme=InitScheme.REAL_GLOROT)
    if seed is not None:
        spec = spec.model_copy(update={"seed": seed})
    if plan.domain is Domain.REAL and spec.scheme is InitScheme.COMPLEX_VARIANCE_SCALED:
        raise ValueError("A real-domain plan cannot use the complex initializer")

    layers = []
    shapes = plan.layer_shapes
    for index, shape in enumerate(shapes):
        act = hidden if index < len(shapes) - 1 else get_activation("identity")
        W = init_weights(shape, spec, index)
        b = init_zeros((1, shape[1]))
        layers.append(DenseLayer(W, b, act, plan.domain, trainable_bias=trainable_bias))

    logger.debug(
        f"Initialized {plan.domain.value} model {plan.input_dim}->{plan.hidden_widths}->"
        f"{plan.output_dim} ({spec.scheme.value}, {spec.fan_mode.value}, seed={spec.seed})"
    )
    return Model(layers, out_head, plan.domain)


__all__ = [
    "InitScheme",
    "FanMode",
    "InitSpec",
    "layer_rng",
    "init_complex",
    "init_real",
    "init_zeros",
    "init_weights",
    "initialize_model",
]
