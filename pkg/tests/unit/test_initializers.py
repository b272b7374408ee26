"""Tests for weight initialization schemes and seed streams."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal
from pydantic import ValidationError
from scipy import stats

from src.core.autodiff import backward, forward
from src.core.complex_core import ComplexTensor
from src.core.initializers import (
    FanMode,
    InitScheme,
    InitSpec,
    init_complex,
    init_real,
    init_weights,
    init_zeros,
    initialize_model,
    layer_rng,
)
from src.core.losses import categorical_ce_grad
from src.core.optimizer import Adam
from src.models.plan import Domain
from tests.conftest import random_labels, small_plan


COMPLEX = InitSpec(scheme=InitScheme.COMPLEX_VARIANCE_SCALED, seed=42)
GLOROT = InitSpec(scheme=InitScheme.REAL_GLOROT, seed=42)


class TestComplexScheme:

    @pytest.mark.parametrize("shape, fan_mode", [
        ((1000, 1000), FanMode.FAN_IN),
        ((500, 1500), FanMode.FAN_AVG),
    ])
    def test_second_moment(self, shape, fan_mode):
        spec = COMPLEX.model_copy(update={"fan_mode": fan_mode})
        W = init_complex(shape, spec)
        # mode s = sqrt(1/1000) in both cases, E|w|^2 = 2 s^2
        expected = 2.0 / 1000
        assert np.mean(W.re ** 2 + W.im ** 2) == pytest.approx(expected, rel=0.05)
        assert abs(np.mean(W.re)) < 1e-3
        assert abs(np.mean(W.im)) < 1e-3

    def test_rayleigh_magnitudes(self):
        W = init_complex((1000, 1000), COMPLEX)
        scale = np.sqrt(1.0 / 1000)
        assert np.mean(W.abs()) == pytest.approx(scale * np.sqrt(np.pi / 2), rel=0.02)

    def test_phase_is_uniform(self):
        W = init_complex((400, 500), COMPLEX)
        phase = np.arctan2(W.im, W.re).ravel()
        counts, _ = np.histogram(phase, bins=16, range=(-np.pi, np.pi))
        assert stats.chisquare(counts).pvalue > 0.01

    def test_rejects_other_schemes(self):
        with pytest.raises(ValueError):
            init_complex((2, 2), GLOROT)


class TestRealScheme:

    def test_glorot_bounds_and_variance(self):
        W = init_real((1000, 1000), GLOROT)
        limit = np.sqrt(6.0 / 2000)
        assert np.abs(W).max() <= limit
        assert np.var(W) == pytest.approx(2.0 / 2000, rel=0.05)

    def test_rejects_other_schemes(self):
        with pytest.raises(ValueError):
            init_real((2, 2), COMPLEX)

    def test_zeros(self):
        W = init_zeros((3, 4))
        assert W.shape == (3, 4)
        assert not W.re.any() and not W.im.any()


class TestSeeding:

    def test_same_seed_same_weights(self):
        a = init_weights((8, 8), COMPLEX, layer_index=3)
        b = init_weights((8, 8), COMPLEX, layer_index=3)
        assert_array_equal(a.re, b.re)
        assert_array_equal(a.im, b.im)

    def test_layers_draw_independent_streams(self):
        for seed in range(100):
            spec = COMPLEX.model_copy(update={"seed": seed})
            first = init_weights((4, 4), spec, layer_index=0)
            second = init_weights((4, 4), spec, layer_index=1)
            assert not np.array_equal(first.re, second.re)

    def test_layer_rng_is_philox(self):
        assert isinstance(layer_rng(0, 0).bit_generator, np.random.Philox)

    def test_seed_range(self):
        with pytest.raises(ValidationError):
            InitSpec(seed=-1)
        with pytest.raises(ValidationError):
            InitSpec(seed=2 ** 64)


class TestInitializeModel:

    def test_real_plan(self):
        model = initialize_model(small_plan(Domain.REAL), "relu", seed=1)
        assert model.domain is Domain.REAL
        for layer in model.layers:
            assert layer.W.is_real
            assert not layer.b.re.any()
        assert model.layers[-1].activation.id.value == "identity"

    def test_complex_plan(self):
        model = initialize_model(small_plan(), "tanh", seed=1)
        assert all(layer.W.im.any() for layer in model.layers)
        assert model.layers[0].activation.id.value == "tanh"

    def test_seed_changes_weights(self):
        a = initialize_model(small_plan(), "tanh", seed=1)
        b = initialize_model(small_plan(), "tanh", seed=2)
        assert not np.array_equal(a.layers[0].W.re, b.layers[0].W.re)

    def test_real_plan_rejects_complex_scheme(self):
        with pytest.raises(ValueError):
            initialize_model(small_plan(Domain.REAL), real_spec=COMPLEX)

    def test_zero_imaginary_magnitude_net_stays_real(self, rng):
        real_model = initialize_model(small_plan(Domain.REAL, include_bias=False), "abs", seed=3)
        complex_model = real_model.copy()
        for layer in complex_model.layers:
            layer.domain = Domain.COMPLEX
        x = ComplexTensor.from_real(rng.normal(size=(16, 3)))
        y = random_labels(rng, 16, 3)

        optimizer = Adam(complex_model.parameters(), lr=0.01)
        tape = forward(complex_model, x)
        grads = backward(tape, complex_model, categorical_ce_grad(tape.output, y))
        optimizer.step(grads.planes(complex_model))

        for layer in complex_model.layers:
            assert not layer.W.im.any()
        assert not np.array_equal(complex_model.layers[0].W.re, real_model.layers[0].W.re)
