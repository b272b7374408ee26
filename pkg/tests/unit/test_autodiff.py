"""Tests for real-pair backpropagation against numerical oracles."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.core.autodiff import (
    AutodiffError,
    DenseLayer,
    Model,
    SeamError,
    TapeMismatchError,
    backward,
    finite_difference_gradients,
    forward,
    max_relative_error,
    near_seam,
    relative_error,
    wirtinger_consistency,
    wirtinger_grads,
)
from src.core.complex_core import ComplexTensor, DimensionError
from src.core.initializers import initialize_model
from src.core.losses import binary_ce, binary_ce_grad, categorical_ce, categorical_ce_grad
from src.models.plan import Domain
from tests.conftest import random_complex, random_labels, small_plan


GRAD_TOLERANCE = 1e-5
FD_STEP = 1e-5
HIDDEN = ["identity", "tanh", "relu", "abs2", "abs"]


def sample_off_seam(model, rng, rows=50, real_input=False):
    """Draw an input batch, row by row, whose pre-activations avoid every seam."""
    kept = []
    for _ in range(100 * rows):
        if real_input:
            x = ComplexTensor.from_real(0.3 * rng.normal(size=(1, model.n_inputs)))
        else:
            x = random_complex(rng, 1, model.n_inputs, scale=0.3)
        if not near_seam(forward(model, x), model):
            kept.append(x)
        if len(kept) == rows:
            return ComplexTensor(
                np.vstack([row.re for row in kept]), np.vstack([row.im for row in kept])
            )
    pytest.fail("could not sample inputs away from the seams")


def gradient_suite_model(domain, activation, head="softmax_intensity"):
    """k=2 network with 16-unit hidden layers."""
    return initialize_model(small_plan(domain, widths=(16, 16, 16)), activation, head, seed=11)


def to_complex_domain(model):
    layers = [
        DenseLayer(l.W.copy(), l.b.copy(), l.activation, Domain.COMPLEX, l.trainable_bias)
        for l in model.layers
    ]
    return Model(layers, model.head, Domain.COMPLEX)


class TestModel:

    def test_parameter_planes(self):
        complex_model = initialize_model(small_plan(include_bias=True), "relu", seed=0)
        assert len(complex_model.parameters()) == 4 * 4
        real_model = initialize_model(small_plan(Domain.REAL), "relu", seed=0, trainable_bias=False)
        assert len(real_model.parameters()) == 4

    def test_layers_must_chain(self):
        act = initialize_model(small_plan(), "relu", seed=0).layers[0].activation
        a = DenseLayer(ComplexTensor.zeros(3, 4), ComplexTensor.zeros(1, 4), act)
        b = DenseLayer(ComplexTensor.zeros(5, 2), ComplexTensor.zeros(1, 2), act)
        with pytest.raises(DimensionError):
            Model([a, b], initialize_model(small_plan(), seed=0).head)

    def test_real_layer_rejects_imaginary_weights(self):
        act = initialize_model(small_plan(), "relu", seed=0).layers[0].activation
        with pytest.raises(AutodiffError):
            DenseLayer(ComplexTensor(np.ones((2, 2)), np.ones((2, 2))), ComplexTensor.zeros(1, 2), act, Domain.REAL)

    def test_bias_shape(self):
        act = initialize_model(small_plan(), "relu", seed=0).layers[0].activation
        with pytest.raises(DimensionError):
            DenseLayer(ComplexTensor.zeros(2, 3), ComplexTensor.zeros(1, 2), act)

    def test_forward_records_every_layer(self, complex_model, rng):
        tape = forward(complex_model, random_complex(rng, 5, 3))
        assert len(tape) == 4
        assert tape.output.shape == (5, 3)
        assert_allclose(tape.output.sum(axis=1), 1.0)


class TestFiniteDifferences:

    @pytest.mark.parametrize("domain", [Domain.REAL, Domain.COMPLEX])
    @pytest.mark.parametrize("activation", HIDDEN)
    def test_matches_central_differences(self, rng, activation, domain):
        model = gradient_suite_model(domain, activation)
        x = sample_off_seam(model, rng, real_input=domain is Domain.REAL)
        y = random_labels(rng, x.rows, 3)
        tape = forward(model, x)
        analytic = backward(tape, model, categorical_ce_grad(tape.output, y))
        numeric = finite_difference_gradients(model, x, y, categorical_ce, h=FD_STEP)
        assert max_relative_error(analytic, numeric) < GRAD_TOLERANCE
        if domain is Domain.REAL:
            for grad in analytic:
                assert not grad.w_im.any() and not grad.b_im.any()

    def test_input_gradient(self, rng, complex_model):
        x = random_complex(rng, 6, 3, scale=0.5)
        y = random_labels(rng, 6, 3)
        tape = forward(complex_model, x)
        analytic = backward(tape, complex_model, categorical_ce_grad(tape.output, y), input_grad=True)
        numeric = finite_difference_gradients(complex_model, x, y, categorical_ce, h=FD_STEP, input_grad=True)
        assert analytic.input is not None
        assert max_relative_error(analytic, numeric) < GRAD_TOLERANCE

    def test_sigmoid_head_with_binary_loss(self, rng):
        model = initialize_model(small_plan(), "tanh", "sigmoid_intensity", seed=5)
        x = random_complex(rng, 8, 3, scale=0.5)
        y = random_labels(rng, 8, 3)
        tape = forward(model, x)
        analytic = backward(tape, model, binary_ce_grad(tape.output, y))
        numeric = finite_difference_gradients(model, x, y, binary_ce, h=FD_STEP)
        assert max_relative_error(analytic, numeric) < GRAD_TOLERANCE

    def test_frozen_bias_has_zero_gradient(self, rng):
        model = initialize_model(small_plan(), "tanh", seed=2, trainable_bias=False)
        x = random_complex(rng, 4, 3)
        y = random_labels(rng, 4, 3)
        tape = forward(model, x)
        grads = backward(tape, model, categorical_ce_grad(tape.output, y))
        for grad in grads:
            assert not grad.b_re.any() and not grad.b_im.any()


class TestBackwardEntryPoints:

    def test_fused_scores_match_chain_rule(self, rng, complex_model):
        x = random_complex(rng, 10, 3)
        y = random_labels(rng, 10, 3)
        tape = forward(complex_model, x)
        chained = backward(tape, complex_model, categorical_ce_grad(tape.output, y))
        fused = backward(tape, complex_model, dL_dscores=(tape.output - y) / x.rows)
        assert max_relative_error(chained, fused, floor=1e-8) < 1e-8

    def test_exactly_one_upstream(self, rng, complex_model):
        tape = forward(complex_model, random_complex(rng, 2, 3))
        with pytest.raises(TapeMismatchError):
            backward(tape, complex_model)
        with pytest.raises(TapeMismatchError):
            backward(tape, complex_model, np.zeros((2, 3)), dL_dscores=np.zeros((2, 3)))

    def test_upstream_shape(self, rng, complex_model):
        tape = forward(complex_model, random_complex(rng, 2, 3))
        with pytest.raises(TapeMismatchError):
            backward(tape, complex_model, np.zeros((3, 3)))

    def test_foreign_tape(self, rng, complex_model):
        other = initialize_model(small_plan(widths=(6,)), "tanh", seed=0)
        tape = forward(other, random_complex(rng, 2, 3))
        with pytest.raises(TapeMismatchError):
            backward(tape, complex_model, np.zeros((2, 3)))


class TestRealDegeneration:

    def test_zero_imaginary_model_matches_real_model(self, rng):
        real_model = initialize_model(small_plan(Domain.REAL), "relu", seed=4)
        complex_model = to_complex_domain(real_model)
        x = ComplexTensor.from_real(rng.normal(size=(12, 3)))
        y = random_labels(rng, 12, 3)

        real_tape = forward(real_model, x)
        complex_tape = forward(complex_model, x)
        assert_array_equal(real_tape.output, complex_tape.output)

        real_grads = backward(real_tape, real_model, categorical_ce_grad(real_tape.output, y))
        complex_grads = backward(complex_tape, complex_model, categorical_ce_grad(complex_tape.output, y))
        for r, c in zip(real_grads, complex_grads):
            assert_array_equal(r.w_re, c.w_re)
            assert not c.w_im.any()


class TestWirtinger:

    def test_squared_magnitude(self):
        df_dz, df_dzbar = wirtinger_grads(lambda z: abs(z) ** 2, 1 + 2j)
        assert df_dzbar.to_complex() == pytest.approx(1 + 2j, abs=1e-6)
        assert df_dz.to_complex() == pytest.approx(1 - 2j, abs=1e-6)

    @pytest.mark.parametrize("domain", [Domain.REAL, Domain.COMPLEX])
    @pytest.mark.parametrize("activation", HIDDEN)
    def test_backward_matches_cogradient(self, rng, activation, domain):
        model = gradient_suite_model(domain, activation)
        x = sample_off_seam(model, rng, real_input=domain is Domain.REAL)
        y = random_labels(rng, x.rows, 3)
        assert wirtinger_consistency(model, x, y, h=FD_STEP) < GRAD_TOLERANCE

    def test_custom_loss(self, rng):
        model = initialize_model(small_plan(widths=(4,)), "tanh", "sigmoid_intensity", seed=9)
        x = random_complex(rng, 10, 3, scale=0.5)
        y = random_labels(rng, 10, 3)
        assert wirtinger_consistency(model, x, y, loss_fn=binary_ce) < 1e-4

    def test_seam_is_reported(self):
        model = initialize_model(small_plan(widths=(4,)), "relu", seed=1)
        x = ComplexTensor.zeros(3, 3)
        y = np.eye(3)
        with pytest.raises(SeamError):
            wirtinger_consistency(model, x, y)


class TestRelativeError:

    def test_floor(self):
        assert relative_error(np.array([1e-9]), np.array([0.0])) == pytest.approx(1e-5)

    def test_symmetric_scale(self):
        assert relative_error(np.array([2.0]), np.array([1.0])) == pytest.approx(0.5)

    def test_empty(self):
        assert relative_error(np.array([]), np.array([])) == 0.0
