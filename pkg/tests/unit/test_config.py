"""Tests for the configuration loader and the experiment manifest model."""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.models.experiment import DomainChoice, ExperimentConfig
from src.models.plan import Domain
from src.utils.config import ConfigLoader, InvalidConfigError, config, get_config


class TestConfigLoader:

    def test_singleton(self):
        assert get_config() is config
        assert ConfigLoader() is config

    def test_dot_notation(self):
        assert config.get("training.batch_size") == 128
        assert config.get("training.missing", default="x") == "x"

    def test_typed_properties(self):
        assert config.adam_betas == (0.9, 0.999)
        assert config.fd_step == pytest.approx(1e-6)
        assert config.fd_relative_floor == pytest.approx(1e-4)
        assert config.init_complex_scheme == "complex_variance_scaled"

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("TRAINING_EPOCHS", "7")
        assert config.get("training.epochs") == 7
        assert config.epochs == 7

    def test_data_dir_override(self, monkeypatch, tmp_path):
        monkeypatch.setenv("CVNN_DATA_DIR", str(tmp_path))
        assert config.data_dir == tmp_path

    def test_contains(self):
        assert "init.fan_mode" in config
        assert "init.nothing" not in config

    def test_invalid_config_error_names_field(self):
        error = InvalidConfigError("bad", field="k")
        assert error.field == "k"


class TestExperimentConfig:

    def test_defaults_from_config(self):
        experiment = ExperimentConfig()
        assert experiment.batch_size == config.batch_size
        assert isinstance(experiment.output_dir, Path)

    def test_odd_depth(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(k=3)

    def test_head_in_hidden_slot(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(activation="softmax_intensity")

    def test_budget_mode_needs_budget(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(width_mode="budget")

    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(learning_rat=0.1)

    def test_real_scheme_cannot_be_complex(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(init_real_scheme="complex_variance_scaled")

    def test_bias_defaults(self):
        experiment = ExperimentConfig()
        assert not experiment.include_bias
        assert experiment.train_bias

    def test_derived_settings(self):
        experiment = ExperimentConfig(activation="abs2", head="sigmoid_intensity", runs=3, base_seed=10)
        assert experiment.activation_id.value == "intensity"
        assert experiment.resolved_loss.value == "binary_ce"
        assert experiment.train_config().seeds() == [10, 11, 12]

    def test_domain_choice(self):
        assert DomainChoice.BOTH.domains() == [Domain.REAL, Domain.COMPLEX]
        assert DomainChoice.COMPLEX.domains() == [Domain.COMPLEX]
