"""
Activation Functions and Output Heads
=====================================
Hidden-layer activations (identity, tanh, split ReLU, intensity |z|^2,
magnitude |z|) and complex-to-real output heads (sigmoid(|z|^2),
softmax(|z|^2), plain softmax over the real plane).

Every activation is an object with:
    forward(z)          -> o
    backward(z, o, g)   -> gradient w.r.t. z

Gradients travel in the real-pair basis: a ComplexTensor whose re plane holds
dL/dRe and whose im plane holds dL/dIm.

Usage:
    from src.core.activations import get_activation

    act = get_activation("relu")        # CLI alias of split_relu
    o = act.forward(z)
    dz = act.backward(z, o, do)
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Dict, Union

import numpy as np

from src.core.complex_core import ComplexScalar, ComplexTensor


# -----------------------------------------------------------------------------
# Exceptions
# -----------------------------------------------------------------------------

class ActivationError(Exception):
    """Base class for activation errors."""
    pass


class PoleError(ActivationError):
    """Raised when tanh is evaluated at (or numerically at) one of its poles."""
    pass


class UnknownActivationError(ActivationError):
    """Raised for an activation name that is not registered."""
    pass


class HeadPlacementError(ActivationError):
    """Raised when an output head is used in a hidden position or vice versa."""
    pass


# -----------------------------------------------------------------------------
# Identifiers
# -----------------------------------------------------------------------------

class ActivationId(str, Enum):
    IDENTITY = "identity"
    TANH = "tanh"
    SPLIT_RELU = "split_relu"
    INTENSITY = "intensity"
    MAGNITUDE = "magnitude"
    SIGMOID_INTENSITY = "sigmoid_intensity"
    SOFTMAX_INTENSITY = "softmax_intensity"
    SOFTMAX = "softmax"


# Strings accepted in experiment manifests
ALIASES: Dict[str, ActivationId] = {
    "identity": ActivationId.IDENTITY,
    "tanh": ActivationId.TANH,
    "relu": ActivationId.SPLIT_RELU,
    "abs2": ActivationId.INTENSITY,
    "abs": ActivationId.MAGNITUDE,
}

HEADS = frozenset({
    ActivationId.SIGMOID_INTENSITY,
    ActivationId.SOFTMAX_INTENSITY,
    ActivationId.SOFTMAX,
})

# Denominator cosh(2x) + cos(2y) below this is treated as a pole hit
POLE_GUARD = 1e-12

# Beyond |2x| = 40, tanh(x + iy) equals sign(x) to double precision
_TANH_SATURATION = 40.0


def parse_activation(name: Union[str, ActivationId]) -> ActivationId:
    """
    Resolve a canonical id or CLI alias.

    Raises:
        UnknownActivationError: If the name is not registered
    """
    if isinstance(name, ActivationId):
        return name
    key = str(name).strip().lower()
    if key in ALIASES:
        return ALIASES[key]
    try:
        return ActivationId(key)
    except ValueError:
        valid = sorted(set(ALIASES) | {a.value for a in ActivationId})
        raise UnknownActivationError(f"Unknown activation '{name}'. Valid: {', '.join(valid)}")


def is_output_head(name: Union[str, ActivationId]) -> bool:
    return parse_activation(name) in HEADS


# -----------------------------------------------------------------------------
# Base Class
# -----------------------------------------------------------------------------

class Activation(ABC):
    """Elementwise (or row-wise, for heads) map on complex tensors."""

    id: ActivationId
    # True when the output imaginary plane is always zero
    real_output: bool = False

    @abstractmethod
    def forward(self, z: ComplexTensor) -> ComplexTensor:
        ...

    @abstractmethod
    def backward(self, z: ComplexTensor, o: ComplexTensor, g: ComplexTensor) -> ComplexTensor:
        ...

    def __call__(self, z: Union[ComplexTensor, ComplexScalar]):
        if isinstance(z, ComplexScalar):
            return self.forward(ComplexTensor.from_scalar(z)).scalar()
        return self.forward(z)

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


# -----------------------------------------------------------------------------
# Hidden Activations
# -----------------------------------------------------------------------------

class Identity(Activation):
    id = ActivationId.IDENTITY

    def forward(self, z: ComplexTensor) -> ComplexTensor:
        return z

    def backward(self, z, o, g):
        return g


class ComplexTanh(Activation):
    """
    Complex hyperbolic tangent.

    tanh(x + iy) = (sinh 2x + i sin 2y) / (cosh 2x + cos 2y)

    The denominator vanishes only at the poles z = i(pi/2 + k pi); inputs
    where it drops below POLE_GUARD raise PoleError.
    """

    id = ActivationId.TANH

    def forward(self, z: ComplexTensor) -> ComplexTensor:
        x2 = 2.0 * z.re
        y2 = 2.0 * z.im
        saturated = np.abs(x2) > _TANH_SATURATION
        x2_safe = np.where(saturated, 0.0, x2)
        denom = np.cosh(x2_safe) + np.cos(y2)
        pole = ~saturated & (np.abs(denom) < POLE_GUARD)
        if pole.any():
            idx = np.argwhere(pole)[0]
            at = complex(z.re[tuple(idx)], z.im[tuple(idx)])
            raise PoleError(f"tanh evaluated at a pole: z = {at} (denominator below {POLE_GUARD})")
        denom = np.where(saturated, 1.0, denom)
        re = np.where(saturated, np.sign(x2), np.sinh(x2_safe) / denom)
        im = np.where(saturated, 0.0, np.sin(y2) / denom)
        return ComplexTensor(re, im)

    def backward(self, z, o, g):
        # Holomorphic: f' = 1 - tanh^2; real-pair gradient is conj(f') * g
        d_re = 1.0 - (o.re * o.re - o.im * o.im)
        d_im = -2.0 * o.re * o.im
        return ComplexTensor(d_re * g.re + d_im * g.im, d_re * g.im - d_im * g.re)


class SplitReLU(Activation):
    """max(0, Re z) + i max(0, Im z); subgradient 0 at the kink."""

    id = ActivationId.SPLIT_RELU

    def forward(self, z: ComplexTensor) -> ComplexTensor:
        return ComplexTensor(np.maximum(z.re, 0.0), np.maximum(z.im, 0.0))

    def backward(self, z, o, g):
        return ComplexTensor(g.re * (z.re > 0.0), g.im * (z.im > 0.0))


class Intensity(Activation):
    """|z|^2 = x^2 + y^2 (real output)."""

    id = ActivationId.INTENSITY
    real_output = True

    def forward(self, z: ComplexTensor) -> ComplexTensor:
        return ComplexTensor.from_real(z.re * z.re + z.im * z.im)

    def backward(self, z, o, g):
        return ComplexTensor(2.0 * z.re * g.re, 2.0 * z.im * g.re)


class Magnitude(Activation):
    """|z| (real output); gradient at the origin is (0, 0)."""

    id = ActivationId.MAGNITUDE
    real_output = True

    def forward(self, z: ComplexTensor) -> ComplexTensor:
        return ComplexTensor.from_real(np.hypot(z.re, z.im))

    def backward(self, z, o, g):
        r = o.re
        nonzero = r > 0.0
        inv = np.divide(1.0, r, out=np.zeros_like(r), where=nonzero)
        return ComplexTensor(g.re * z.re * inv, g.re * z.im * inv)


# -----------------------------------------------------------------------------
# Output Heads
# -----------------------------------------------------------------------------

def _softmax_rows(s: np.ndarray) -> np.ndarray:
    shifted = s - s.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _sigmoid(s: np.ndarray) -> np.ndarray:
    # Branches keep exp() from overflowing for large |s|
    out = np.empty_like(s)
    pos = s >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-s[pos]))
    e = np.exp(s[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class SigmoidIntensity(Activation):
    """1 / (1 + exp(-|z|^2)) per entry."""

    id = ActivationId.SIGMOID_INTENSITY
    real_output = True

    def forward(self, z: ComplexTensor) -> ComplexTensor:
        return ComplexTensor.from_real(_sigmoid(z.re * z.re + z.im * z.im))

    def backward(self, z, o, g):
        p = o.re
        return self.score_backward(z, g.re * p * (1.0 - p))

    def score_backward(self, z: ComplexTensor, ds: np.ndarray) -> ComplexTensor:
        return ComplexTensor(2.0 * z.re * ds, 2.0 * z.im * ds)


class SoftmaxIntensity(Activation):
    """Row-wise exp(|z_j|^2) / sum_i exp(|z_i|^2)."""

    id = ActivationId.SOFTMAX_INTENSITY
    real_output = True

    def forward(self, z: ComplexTensor) -> ComplexTensor:
        return ComplexTensor.from_real(_softmax_rows(z.re * z.re + z.im * z.im))

    def backward(self, z, o, g):
        p = o.re
        return self.score_backward(z, p * (g.re - np.sum(g.re * p, axis=1, keepdims=True)))

    def score_backward(self, z: ComplexTensor, ds: np.ndarray) -> ComplexTensor:
        return ComplexTensor(2.0 * z.re * ds, 2.0 * z.im * ds)


class Softmax(Activation):
    """Row-wise softmax of the real plane; the imaginary plane is ignored."""

    id = ActivationId.SOFTMAX
    real_output = True

    def forward(self, z: ComplexTensor) -> ComplexTensor:
        return ComplexTensor.from_real(_softmax_rows(z.re))

    def backward(self, z, o, g):
        p = o.re
        return self.score_backward(z, p * (g.re - np.sum(g.re * p, axis=1, keepdims=True)))

    def score_backward(self, z: ComplexTensor, ds: np.ndarray) -> ComplexTensor:
        return ComplexTensor(ds, np.zeros_like(ds))


# -----------------------------------------------------------------------------
# Registry
# -----------------------------------------------------------------------------

_REGISTRY: Dict[ActivationId, Activation] = {
    act.id: act
    for act in (
        Identity(),
        ComplexTanh(),
        SplitReLU(),
        Intensity(),
        Magnitude(),
        SigmoidIntensity(),
        SoftmaxIntensity(),
        Softmax(),
    )
}


def get_activation(name: Union[str, ActivationId]) -> Activation:
    """Look up a (stateless, shared) activation instance by id or alias."""
    return _REGISTRY[parse_activation(name)]


def get_hidden_activation(name: Union[str, ActivationId]) -> Activation:
    """
    Look up an activation for a hidden position.

    Raises:
        HeadPlacementError: If name is an output head
    """
    act = get_activation(name)
    if act.id in HEADS:
        raise HeadPlacementError(f"'{act.id.value}' is only valid as an output head")
    return act


def get_head(name: Union[str, ActivationId]) -> Activation:
    """
    Look up an output head.

    Raises:
        HeadPlacementError: If name is a hidden-layer activation
    """
    act = get_activation(name)
    if act.id not in HEADS:
        raise HeadPlacementError(f"'{act.id.value}' is not an output head")
    return act


# -----------------------------------------------------------------------------
# Functional Forms
# -----------------------------------------------------------------------------

def identity(z):
    return _REGISTRY[ActivationId.IDENTITY](z)


def ctanh(z):
    """Complex tanh of a ComplexScalar or ComplexTensor."""
    return _REGISTRY[ActivationId.TANH](z)


def split_relu(z):
    return _REGISTRY[ActivationId.SPLIT_RELU](z)


def intensity(z):
    return _REGISTRY[ActivationId.INTENSITY](z)


def magnitude(z):
    return _REGISTRY[ActivationId.MAGNITUDE](z)


def sigmoid_intensity(z):
    return _REGISTRY[ActivationId.SIGMOID_INTENSITY](z)


def softmax_intensity(z: ComplexTensor) -> ComplexTensor:
    """Probability rows from complex logits (batch x classes)."""
    return _REGISTRY[ActivationId.SOFTMAX_INTENSITY].forward(z)


__all__ = [
    "ActivationError",
    "PoleError",
    "UnknownActivationError",
    "HeadPlacementError",
    "ActivationId",
    "ALIASES",
    "HEADS",
    "POLE_GUARD",
    "Activation",
    "parse_activation",
    "is_output_head",
    "get_activation",
    "get_hidden_activation",
    "get_head",
    "identity",
    "ctanh",
    "split_relu",
    "intensity",
    "magnitude",
    "sigmoid_intensity",
    "softmax_intensity",
]
