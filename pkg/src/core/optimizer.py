"""
Adam Optimizer
==============
Bias-corrected Adam applied independently to every trainable real plane.
The real and imaginary planes of a complex weight are separate parameters.
"""

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np


class TrainingError(Exception):
    """Base class for optimizer and training errors."""
    pass


class NonFiniteError(TrainingError):
    """Raised when a gradient (or loss) is NaN or infinite."""
    pass


@dataclass
class AdamState:
    """First and second moment estimates, one pair per parameter plane."""

    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def zeros_like(cls, params: Sequence[np.ndarray]) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    state: AdamState,
    t: int,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> AdamState:
    """
    One Adam update, applied in place to params and state.

    Args:
        params: Parameter planes (updated in place)
        grads: Gradients aligned with params
        state: Moments aligned with params (updated in place)
        t: Step number, starting at 1

    Returns:
        The updated state

    Raises:
        NonFiniteError: If any gradient is NaN or infinite; nothing is updated
        ValueError: On misaligned inputs or t < 1
    """
    if t < 1:
        raise ValueError(f"Adam step counter starts at 1, got {t}")
    if not (len(params) == len(grads) == len(state.m) == len(state.v)):
        raise ValueError(
            f"Parameter, gradient and moment counts differ: "
            f"{len(params)}, {len(grads)}, {len(state.m)}, {len(state.v)}"
        )
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            raise ValueError(f"Plane {i}: gradient shape {g.shape} does not match {p.shape}")
        if not np.isfinite(g).all():
            raise NonFiniteError(f"Non-finite gradient in parameter plane {i}")

    bc1 = 1.0 - beta1 ** t
    bc2 = 1.0 - beta2 ** t
    step_size = lr / bc1

    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        p -= step_size * m / (np.sqrt(v / bc2) + eps)
    return state


class Adam:
    """Stateful wrapper over adam_step for one list of parameter planes."""

    def __init__(
        self,
        params: Sequence[np.ndarray],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        if lr <= 0:
            raise ValueError(f"Learning rate must be positive, got {lr}")
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState.zeros_like(self.params)
        self.t = 0

    def step(self, grads: Sequence[np.ndarray]) -> None:
        adam_step(
            self.params, grads, self.state, self.t + 1,
            lr=self.lr, beta1=self.beta1, beta2=self.beta2, eps=self.eps,
        )
        self.t += 1

    def __repr__(self) -> str:
        return f"Adam(lr={self.lr}, betas=({self.beta1}, {self.beta2}), eps={self.eps}, t={self.t})"


__all__ = ["TrainingError", "NonFiniteError", "AdamState", "adam_step", "Adam"]
