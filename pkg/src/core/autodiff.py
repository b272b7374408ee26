"""
Dense Layers and Real-pair Backpropagation
==========================================
Forward and backward passes for complex dense MLPs.

Each complex parameter is treated as two real parameters (Re, Im). For a
layer z = xW + b with upstream gradient G = dL/dRe(z) + i dL/dIm(z):

    dL/dW = conj(x)^T G        dL/db = sum_rows(G)        dL/dx = G conj(W)^T

read plane-wise as real matrices. Wirtinger cogradients (dL/dz_bar) serve as
an independent numerical cross-check: for a real loss, 2 dL/dz_bar read in
the (Re, Im) basis equals the real-pair gradient.

Usage:
    from src.core.autodiff import forward, backward

    tape = forward(model, x)
    grads = backward(tape, model, dL_dprobs)
"""

from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Tuple, Union

import numpy as np

from src.core.activations import Activation, ActivationId
from src.core.complex_core import (
    ComplexScalar,
    ComplexTensor,
    DimensionError,
    EvaluationError,
    cmatmul,
)
from src.core.losses import categorical_ce, categorical_ce_grad
from src.models.plan import Domain


# -----------------------------------------------------------------------------
# Exceptions
# -----------------------------------------------------------------------------

class AutodiffError(Exception):
    """Base class for forward/backward errors."""
    pass


class TapeMismatchError(AutodiffError):
    """Raised when a tape does not belong to the model or the upstream gradient has the wrong shape."""
    pass


class SeamError(AutodiffError):
    """Raised when a gradient comparison lands on a non-differentiable seam; resample the inputs."""
    pass


# -----------------------------------------------------------------------------
# Model Types
# -----------------------------------------------------------------------------

@dataclass(eq=False)
class DenseLayer:
    """
    One dense layer o = act(xW + b).

    Attributes:
        W: Weights (n_in x n_out)
        b: Bias row (1 x n_out)
        activation: Elementwise activation
        domain: Real-domain layers keep all imaginary planes at zero
        trainable_bias: When False the bias stays at its initial value and
            contributes no parameters
    """

    W: ComplexTensor
    b: ComplexTensor
    activation: Activation
    domain: Domain = Domain.COMPLEX
    trainable_bias: bool = True

    def __post_init__(self) -> None:
        if self.b.rows != 1 or self.b.cols != self.W.cols:
            raise DimensionError(
                f"Bias shape {self.b.shape} does not match weight columns {self.W.cols}"
            )
        if self.domain is Domain.REAL and not (self.W.is_real and self.b.is_real):
            raise AutodiffError("Real-domain layer initialised with non-zero imaginary planes")

    @property
    def n_in(self) -> int:
        return self.W.rows

    @property
    def n_out(self) -> int:
        return self.W.cols

    def planes(self) -> List[Tuple[str, np.ndarray]]:
        """Trainable real planes; imaginary planes only for complex layers."""
        complex_layer = self.domain is Domain.COMPLEX
        items = [("W.re", self.W.re)]
        if complex_layer:
            items.append(("W.im", self.W.im))
        if self.trainable_bias:
            items.append(("b.re", self.b.re))
            if complex_layer:
                items.append(("b.im", self.b.im))
        return items


@dataclass(eq=False)
class Model:
    """Ordered dense layers followed by an output head."""

    layers: List[DenseLayer]
    head: Activation
    domain: Domain = Domain.COMPLEX

    def __post_init__(self) -> None:
        if not self.layers:
            raise AutodiffError("A model needs at least one layer")
        for prev, nxt in zip(self.layers[:-1], self.layers[1:]):
            if prev.n_out != nxt.n_in:
                raise DimensionError(
                    f"Layer widths do not chain: {prev.n_out} -> {nxt.n_in}"
                )

    @property
    def n_inputs(self) -> int:
        return self.layers[0].n_in

    @property
    def n_outputs(self) -> int:
        return self.layers[-1].n_out

    def weights(self) -> List[ComplexTensor]:
        return [layer.W for layer in self.layers]

    def parameters(self) -> List[np.ndarray]:
        """Trainable real planes in a fixed order (see GradientSet.planes)."""
        return [plane for layer in self.layers for _, plane in layer.planes()]

    def copy(self) -> "Model":
        layers = [
            DenseLayer(layer.W.copy(), layer.b.copy(), layer.activation, layer.domain, layer.trainable_bias)
            for layer in self.layers
        ]
        return Model(layers, self.head, self.domain)

    def predict(self, x: ComplexTensor) -> np.ndarray:
        return forward(self, x).output


@dataclass(eq=False)
class TapeEntry:
    x: ComplexTensor
    z: ComplexTensor
    o: ComplexTensor


@dataclass(eq=False)
class Tape:
    """Forward intermediates per layer plus the head output."""

    entries: List[TapeEntry] = field(default_factory=list)
    output: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(eq=False)
class LayerGradient:
    w_re: np.ndarray
    w_im: np.ndarray
    b_re: np.ndarray
    b_im: np.ndarray

    def __add__(self, other: "LayerGradient") -> "LayerGradient":
        return LayerGradient(
            self.w_re + other.w_re,
            self.w_im + other.w_im,
            self.b_re + other.b_re,
            self.b_im + other.b_im,
        )

    def arrays(self) -> Tuple[np.ndarray, ...]:
        return (self.w_re, self.w_im, self.b_re, self.b_im)


@dataclass(eq=False)
class GradientSet:
    """Per-layer gradients in the real-pair basis, optionally with dL/dx."""

    layers: List[LayerGradient]
    input: Optional[ComplexTensor] = None

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self) -> Iterator[LayerGradient]:
        return iter(self.layers)

    def __add__(self, other: "GradientSet") -> "GradientSet":
        return GradientSet([a + b for a, b in zip(self.layers, other.layers)])

    def planes(self, model: Model) -> List[np.ndarray]:
        """Gradients aligned with model.parameters()."""
        out = []
        for layer, grad in zip(model.layers, self.layers):
            by_name = {"W.re": grad.w_re, "W.im": grad.w_im, "b.re": grad.b_re, "b.im": grad.b_im}
            out += [by_name[name] for name, _ in layer.planes()]
        return out

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for g in self.layers for a in g.arrays())


# -----------------------------------------------------------------------------
# Forward
# -----------------------------------------------------------------------------

def dense_forward(x: ComplexTensor, layer: DenseLayer) -> Tuple[ComplexTensor, ComplexTensor]:
    """
    z = xW + b (bias broadcast over batch rows), o = activation(z).

    Raises:
        DimensionError: If x.cols != layer.W.rows
    """
    z = cmatmul(x, layer.W) + layer.b
    return z, layer.activation.forward(z)


def forward(model: Model, x: ComplexTensor) -> Tape:
    """Run every layer and the head, recording intermediates."""
    tape = Tape()
    h = x
    for layer in model.layers:
        z, o = dense_forward(h, layer)
        tape.entries.append(TapeEntry(h, z, o))
        h = o
    tape.output = model.head.forward(h).re
    return tape


# -----------------------------------------------------------------------------
# Backward
# -----------------------------------------------------------------------------

def _check_tape(tape: Tape, model: Model) -> None:
    if len(tape) != len(model.layers) or tape.output is None:
        raise TapeMismatchError(
            f"Tape has {len(tape)} entries but the model has {len(model.layers)} layers"
        )
    for i, (entry, layer) in enumerate(zip(tape.entries, model.layers)):
        if entry.x.cols != layer.n_in or entry.z.cols != layer.n_out:
            raise TapeMismatchError(
                f"Layer {i}: tape shapes {entry.x.shape} -> {entry.z.shape} do not match "
                f"weights {layer.W.shape}"
            )


def _layer_backward(
    entry: TapeEntry,
    layer: DenseLayer,
    g: ComplexTensor,
    need_input: bool,
) -> Tuple[LayerGradient, Optional[ComplexTensor]]:
    gz = layer.activation.backward(entry.z, entry.o, g)
    x = entry.x

    # dL/dW = conj(x)^T G, split into planes
    w_re = x.re.T @ gz.re
    w_im = x.re.T @ gz.im
    if not x.is_real:
        w_re += x.im.T @ gz.im
        w_im -= x.im.T @ gz.re
    b_re = gz.re.sum(axis=0, keepdims=True)
    b_im = gz.im.sum(axis=0, keepdims=True)

    if layer.domain is Domain.REAL:
        w_im = np.zeros_like(w_im)
        b_im = np.zeros_like(b_im)
    if not layer.trainable_bias:
        b_re = np.zeros_like(b_re)
        b_im = np.zeros_like(b_im)

    dx = None
    if need_input:
        # dL/dx = G conj(W)^T
        W = layer.W
        dx = ComplexTensor(
            gz.re @ W.re.T + gz.im @ W.im.T,
            gz.im @ W.re.T - gz.re @ W.im.T,
        )
    return LayerGradient(w_re, w_im, b_re, b_im), dx


def backward(
    tape: Tape,
    model: Model,
    dL_dout: Optional[np.ndarray] = None,
    *,
    dL_dscores: Optional[np.ndarray] = None,
    input_grad: bool = False,
) -> GradientSet:
    """
    Exact gradients of a real loss w.r.t. every Re/Im parameter plane.

    Args:
        tape: Result of forward(model, x)
        model: The model that produced the tape
        dL_dout: dL/d(head output), shape of tape.output
        dL_dscores: Alternative entry point, dL/d(head scores) for fused
            softmax/sigmoid + cross-entropy gradients
        input_grad: Also return dL/dx of the network input

    Returns:
        GradientSet aligned with model.layers

    Raises:
        TapeMismatchError: If tape and model disagree, or the upstream
            gradient has the wrong shape
    """
    _check_tape(tape, model)
    if (dL_dout is None) == (dL_dscores is None):
        raise TapeMismatchError("Pass exactly one of dL_dout or dL_dscores")
    upstream = dL_dout if dL_dout is not None else dL_dscores
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != tape.output.shape:
        raise TapeMismatchError(
            f"Upstream gradient shape {upstream.shape} does not match model output {tape.output.shape}"
        )

    last = tape.entries[-1].o
    if dL_dout is not None:
        g = model.head.backward(last, ComplexTensor.from_real(tape.output), ComplexTensor.from_real(upstream))
    else:
        g = model.head.score_backward(last, upstream)

    grads: List[LayerGradient] = []
    n_layers = len(model.layers)
    for i in reversed(range(n_layers)):
        need_input = i > 0 or input_grad
        grad, g = _layer_backward(tape.entries[i], model.layers[i], g, need_input)
        grads.append(grad)
    grads.reverse()
    return GradientSet(grads, input=g if input_grad else None)


# -----------------------------------------------------------------------------
# Numerical Oracles
# -----------------------------------------------------------------------------

LossFn = Callable[[np.ndarray, np.ndarray], float]


def _loss_at(model: Model, x: ComplexTensor, y: np.ndarray, loss_fn: LossFn) -> float:
    return loss_fn(forward(model, x).output, y)


def _central_difference(evaluate: Callable[[], float], plane: np.ndarray, index, h: float) -> float:
    original = plane[index]
    plane[index] = original + h
    f_plus = evaluate()
    plane[index] = original - h
    f_minus = evaluate()
    plane[index] = original
    return (f_plus - f_minus) / (2.0 * h)


def finite_difference_gradients(
    model: Model,
    x: ComplexTensor,
    y: np.ndarray,
    loss_fn: LossFn,
    h: float = 1e-6,
    input_grad: bool = False,
) -> GradientSet:
    """
    Central-difference gradient of loss_fn(forward(model, x).output, y).

    Parameter planes are perturbed in place and restored. Imaginary planes of
    real-domain layers are not parameters and report zero.
    """

    def evaluate() -> float:
        return _loss_at(model, x, y, loss_fn)

    grads = []
    for layer in model.layers:
        arrays = {
            "W.re": np.zeros_like(layer.W.re),
            "W.im": np.zeros_like(layer.W.im),
            "b.re": np.zeros_like(layer.b.re),
            "b.im": np.zeros_like(layer.b.im),
        }
        for name, plane in layer.planes():
            out = arrays[name]
            for index in np.ndindex(plane.shape):
                out[index] = _central_difference(evaluate, plane, index, h)
        grads.append(LayerGradient(arrays["W.re"], arrays["W.im"], arrays["b.re"], arrays["b.im"]))

    dx = None
    if input_grad:
        x_work = x.copy()

        def evaluate_input() -> float:
            return _loss_at(model, x_work, y, loss_fn)

        d_re = np.zeros_like(x_work.re)
        d_im = np.zeros_like(x_work.im)
        for index in np.ndindex(x_work.re.shape):
            d_re[index] = _central_difference(evaluate_input, x_work.re, index, h)
            d_im[index] = _central_difference(evaluate_input, x_work.im, index, h)
        dx = ComplexTensor(d_re, d_im)
    return GradientSet(grads, input=dx)


def relative_error(a: np.ndarray, b: np.ndarray, floor: float = 1e-4) -> float:
    """max |a - b| / max(|a|, |b|, floor), elementwise."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size == 0:
        return 0.0
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / denom))


def max_relative_error(a: GradientSet, b: GradientSet, floor: float = 1e-4) -> float:
    """Largest relative deviation over all planes (and dL/dx when both carry it)."""
    worst = 0.0
    for ga, gb in zip(a.layers, b.layers):
        for pa, pb in zip(ga.arrays(), gb.arrays()):
            worst = max(worst, relative_error(pa, pb, floor))
    if a.input is not None and b.input is not None:
        worst = max(worst, relative_error(a.input.re, b.input.re, floor))
        worst = max(worst, relative_error(a.input.im, b.input.im, floor))
    return worst


def near_seam(tape: Tape, model: Model, margin: float = 1e-3) -> bool:
    """
    True when a pre-activation sits within margin of a non-differentiable seam.

    Seams: the axes for split ReLU (imaginary axis checks only matter for
    complex-domain layers), the origin for |z|.
    """
    for entry, layer in zip(tape.entries, model.layers):
        act = layer.activation.id
        z = entry.z
        if act is ActivationId.SPLIT_RELU:
            if np.any(np.abs(z.re) < margin):
                return True
            if layer.domain is Domain.COMPLEX and np.any(np.abs(z.im) < margin):
                return True
        elif act is ActivationId.MAGNITUDE:
            if np.any(z.abs() < margin):
                return True
    return False


# -----------------------------------------------------------------------------
# Wirtinger Calculus
# -----------------------------------------------------------------------------

def wirtinger_grads(
    f: Callable[[complex], float],
    z: Union[ComplexScalar, complex],
    h: float = 1e-6,
) -> Tuple[ComplexScalar, ComplexScalar]:
    """
    Wirtinger derivatives of a real-valued f at z by central differences.

    df/dz = (df/dx - i df/dy) / 2, df/dz_bar = (df/dx + i df/dy) / 2

    Raises:
        EvaluationError: If f is non-finite at a probe point
    """
    if h <= 0:
        raise ValueError(f"Step must be positive, got {h}")
    z0 = z.to_complex() if isinstance(z, ComplexScalar) else complex(z)

    def value(point: complex) -> float:
        v = float(np.real(f(point)))
        if not np.isfinite(v):
            raise EvaluationError(f"Function is not finite at {point}: {v}")
        return v

    df_dx = (value(z0 + h) - value(z0 - h)) / (2.0 * h)
    df_dy = (value(z0 + 1j * h) - value(z0 - 1j * h)) / (2.0 * h)
    df_dz = ComplexScalar(0.5 * df_dx, -0.5 * df_dy)
    df_dzbar = ComplexScalar(0.5 * df_dx, 0.5 * df_dy)
    return df_dz, df_dzbar


def wirtinger_consistency(
    model: Model,
    x: ComplexTensor,
    y: np.ndarray,
    loss_fn: Optional[LossFn] = None,
    h: float = 1e-6,
    floor: float = 1e-4,
    seam_margin: float = 1e-3,
) -> float:
    """
    Compare backward() against 2 dL/dw_bar for every parameter entry.

    Args:
        model: Model under test
        x: Input batch
        y: Targets for loss_fn
        loss_fn: Real loss of the head output (default categorical cross entropy)
        h: Difference step for the Wirtinger oracle
        floor: Relative-error denominator floor

    Returns:
        Maximum relative deviation over all parameters

    Raises:
        SeamError: If a pre-activation lies on a non-differentiable seam
    """
    if loss_fn is None:
        loss_fn, loss_grad_fn = categorical_ce, categorical_ce_grad
    else:
        loss_grad_fn = None

    tape = forward(model, x)
    if near_seam(tape, model, seam_margin):
        raise SeamError("Sampled point lies on a non-differentiable seam; resample the inputs")

    if loss_grad_fn is not None:
        analytic = backward(tape, model, loss_grad_fn(tape.output, y))
    else:
        # Arbitrary loss: take dL/dout numerically on the (small) output only
        out = tape.output
        d_out = np.zeros_like(out)
        for index in np.ndindex(out.shape):
            bumped = out.copy()
            bumped[index] += h
            f_plus = loss_fn(bumped, y)
            bumped[index] -= 2.0 * h
            f_minus = loss_fn(bumped, y)
            d_out[index] = (f_plus - f_minus) / (2.0 * h)
        analytic = backward(tape, model, d_out)

    worst = 0.0
    for layer, grad in zip(model.layers, analytic.layers):
        groups = [(layer.W.re, layer.W.im, grad.w_re, grad.w_im)]
        if layer.trainable_bias:
            groups.append((layer.b.re, layer.b.im, grad.b_re, grad.b_im))
        for re_plane, im_plane, g_re, g_im in groups:
            for index in np.ndindex(re_plane.shape):
                w0 = complex(re_plane[index], im_plane[index])

                def loss_of(w: complex) -> float:
                    saved = (re_plane[index], im_plane[index])
                    re_plane[index] = w.real
                    if layer.domain is Domain.COMPLEX:
                        im_plane[index] = w.imag
                    try:
                        return _loss_at(model, x, y, loss_fn)
                    finally:
                        re_plane[index], im_plane[index] = saved

                _, cograd = wirtinger_grads(loss_of, w0, h)
                steepest_re = 2.0 * cograd.re
                steepest_im = 2.0 * cograd.im
                worst = max(worst, relative_error(g_re[index], steepest_re, floor))
                if layer.domain is Domain.COMPLEX:
                    worst = max(worst, relative_error(g_im[index], steepest_im, floor))
    return worst


__all__ = [
    "AutodiffError",
    "TapeMismatchError",
    "SeamError",
    "DenseLayer",
    "Model",
    "Tape",
    "TapeEntry",
    "LayerGradient",
    "GradientSet",
    "dense_forward",
    "forward",
    "backward",
    "finite_difference_gradients",
    "relative_error",
    "max_relative_error",
    "near_seam",
    "wirtinger_grads",
    "wirtinger_consistency",
]
