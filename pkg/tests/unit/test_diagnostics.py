"""Tests for weight statistics, follow scores and best-of-N selection."""

import numpy as np
import pytest

from src.core.autodiff import DenseLayer, Model
from src.core.activations import get_activation, get_head
from src.core.complex_core import ComplexTensor
from src.models.experiment import EpochDiagnostics, RunResult
from src.models.plan import Domain
from src.services.diagnostics import (
    DiagnosticsError,
    best_of_n_curve,
    follow_score,
    settle_epoch,
    weight_stats,
)
from src.services.training import AllRunsFailedError, best_of_runs


def trajectory(re, im):
    return [
        EpochDiagnostics(
            epoch=i + 1,
            train_loss=1.0,
            train_acc=0.5,
            test_acc=0.5,
            mean_abs_re=float(r),
            mean_abs_im=float(m),
            mean_magnitude=float(r + m),
        )
        for i, (r, m) in enumerate(zip(re, im))
    ]


def result(seed, acc, failed=False):
    if failed:
        return RunResult(seed=seed, domain=Domain.COMPLEX, failed=True, failure_reason="PoleError", failure_epoch=1)
    return RunResult(seed=seed, domain=Domain.COMPLEX, test_acc=acc, train_acc=acc)


class TestWeightStats:

    def test_constant_weights(self):
        W = ComplexTensor(np.full((2, 3), 3.0), np.full((2, 3), -4.0))
        layer = DenseLayer(W, ComplexTensor.zeros(1, 3), get_activation("identity"))
        stats = weight_stats(Model([layer], get_head("softmax_intensity")))
        assert stats == pytest.approx((3.0, 4.0, 5.0))

    def test_real_model_has_zero_imaginary_mean(self, rng):
        W = ComplexTensor.from_real(rng.normal(size=(4, 4)))
        layer = DenseLayer(W, ComplexTensor.zeros(1, 4), get_activation("relu"), Domain.REAL)
        stats = weight_stats(Model([layer], get_head("softmax_intensity"), Domain.REAL))
        assert stats.mean_abs_im == 0.0
        assert stats.mean_magnitude == pytest.approx(stats.mean_abs_re)

    def test_triangle_inequality(self, complex_model):
        stats = weight_stats(complex_model)
        assert stats.mean_magnitude <= stats.mean_abs_re + stats.mean_abs_im
        assert stats.mean_magnitude >= max(stats.mean_abs_re, stats.mean_abs_im)


class TestFollowScore:

    def test_affine_copy_correlates_perfectly(self):
        re = 1.0 - np.exp(-np.arange(1, 31, dtype=float))
        score = follow_score(trajectory(re, 0.3 * re + 0.1))
        assert score.delta_correlation == pytest.approx(1.0, abs=1e-9)
        assert score.convergence_lag == 0
        assert score.applicable

    def test_convergence_lag(self):
        re = [min(t, 10) for t in range(1, 31)]
        im = [min(t, 14) for t in range(1, 31)]
        assert settle_epoch(re, list(range(1, 31))) == 11
        assert settle_epoch(im, list(range(1, 31))) == 15
        assert follow_score(trajectory(re, im)).convergence_lag == 4

    def test_independent_walks(self):
        rng = np.random.default_rng(8)
        re = np.abs(np.cumsum(rng.normal(size=100))) + 1
        im = np.abs(np.cumsum(rng.normal(size=100))) + 1
        score = follow_score(trajectory(re, im))
        assert abs(score.delta_correlation) < 0.3

    def test_constant_series(self):
        score = follow_score(trajectory(np.linspace(0, 1, 12), np.zeros(12)))
        assert score.delta_correlation is None
        assert not score.applicable

    def test_too_few_epochs(self):
        with pytest.raises(DiagnosticsError):
            follow_score(trajectory(np.arange(9.0), np.arange(9.0)))

    def test_never_settles(self):
        assert settle_epoch(np.arange(20.0), list(range(1, 21))) is None


class TestBestOfN:

    def test_curve_is_running_max(self):
        results = [result(0, 0.3), result(1, 0.9), result(2, 0.7)]
        assert best_of_n_curve(results) == [0.3, 0.9, 0.9]

    def test_failed_runs_skipped(self):
        results = [result(0, None, failed=True), result(1, 0.4), result(2, None, failed=True)]
        assert best_of_n_curve(results) == [0.0, 0.4, 0.4]

    def test_best_run(self):
        best = best_of_runs([result(0, 0.3), result(1, 0.9), result(2, 0.7)])
        assert best.seed == 1

    def test_tie_goes_to_lower_seed(self):
        best = best_of_runs([result(5, 0.8), result(2, 0.8), result(7, 0.1)])
        assert best.seed == 2

    def test_all_failed(self):
        with pytest.raises(AllRunsFailedError) as info:
            best_of_runs([result(0, None, failed=True), result(1, None, failed=True)])
        assert len(info.value.results) == 2

    def test_failure_fields_must_agree(self):
        with pytest.raises(ValueError):
            RunResult(seed=0, domain=Domain.REAL, failed=True)
