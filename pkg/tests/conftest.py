"""
Shared pytest fixtures for CVNN Bench.

Slow reproduction tests are skipped unless pytest runs with --runslow.
"""

import numpy as np
import pytest

from src.core.capacity import build_matched_pair
from src.core.complex_core import ComplexTensor
from src.core.initializers import initialize_model
from src.models.experiment import TrainConfig
from src.models.plan import Domain, NetworkPlan
from src.services.datasets import SyntheticMode, SyntheticSpec, gen_synthetic
from src.utils.logger import setup_logger


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run long reproduction tests",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session", autouse=True)
def quiet_logger():
    setup_logger(console_level="WARNING", file_logging=False, colorize=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_complex(rng, rows, cols, scale=1.0):
    return ComplexTensor(scale * rng.normal(size=(rows, cols)), scale * rng.normal(size=(rows, cols)))


def random_labels(rng, rows, classes):
    return np.eye(classes)[rng.integers(0, classes, size=rows)]


def small_plan(domain=Domain.COMPLEX, input_dim=3, widths=(4, 4, 4), output_dim=3, include_bias=True):
    return NetworkPlan(
        domain=domain,
        input_dim=input_dim,
        hidden_widths=list(widths),
        output_dim=output_dim,
        include_bias=include_bias,
    )


@pytest.fixture
def complex_model():
    return initialize_model(small_plan(), "tanh", "softmax_intensity", seed=7)


@pytest.fixture
def fixed_pair():
    """Matched (real, complex) plans sized for synthetic_complex_small: n=4, c=5, k=2, m=8."""
    return build_matched_pair("fixed", input_dim=4, output_dim=5, k=2, width=8)


@pytest.fixture(scope="session")
def synthetic_complex_small():
    return gen_synthetic(SyntheticSpec(n_samples=300, d=4, sigma=0.1, seed=3))


@pytest.fixture(scope="session")
def synthetic_real_small():
    return gen_synthetic(
        SyntheticSpec(n_samples=300, d=4, sigma=0.1, mode=SyntheticMode.REAL_PROJECTION, seed=3)
    )


@pytest.fixture
def quick_config():
    return TrainConfig(
        epochs=3,
        batch_size=32,
        learning_rate=0.01,
        beta1=0.9,
        beta2=0.999,
        epsilon=1e-8,
        runs=2,
        base_seed=0,
    )
