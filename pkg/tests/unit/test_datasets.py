"""Tests for the IDX loader, the synthetic quadrant task and dataset helpers."""

import gzip
import struct

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_array_equal

from src.models.experiment import ExperimentConfig
from src.services.datasets import (
    DatasetNotFoundError,
    IDXFormatError,
    LabelRangeError,
    SyntheticMode,
    SyntheticSpec,
    SyntheticSpecError,
    draw_candidates,
    export_csv,
    gen_synthetic,
    load_dataset,
    load_mnist,
    mnist_available,
    one_hot,
    read_idx_images,
    read_idx_labels,
    region_label,
)
from src.services.datasets.idx_loader import IMAGE_MAGIC, LABEL_MAGIC, MNIST_FILES


def write_images(path, images, magic=IMAGE_MAGIC, compress=False):
    count, rows, cols = images.shape
    raw = struct.pack(">IIII", magic, count, rows, cols) + images.astype(np.uint8).tobytes()
    opener = gzip.open if compress else open
    with opener(path, "wb") as f:
        f.write(raw)
    return path


def write_labels(path, labels, magic=LABEL_MAGIC):
    raw = struct.pack(">II", magic, len(labels)) + np.asarray(labels, dtype=np.uint8).tobytes()
    path.write_bytes(raw)
    return path


@pytest.fixture
def mnist_dir(tmp_path):
    rng = np.random.default_rng(0)
    write_images(tmp_path / MNIST_FILES["train_images"], rng.integers(0, 256, size=(6, 28, 28)))
    write_labels(tmp_path / MNIST_FILES["train_labels"], [0, 1, 2, 3, 4, 9])
    write_images(
        tmp_path / f"{MNIST_FILES['test_images']}.gz",
        rng.integers(0, 256, size=(3, 28, 28)),
        compress=True,
    )
    write_labels(tmp_path / MNIST_FILES["test_labels"], [5, 6, 7])
    return tmp_path


def brute_force_label(row, mode, rho=1.0):
    """Region rule written out point by point."""
    s = complex(sum(row))
    if mode is SyntheticMode.REAL_PROJECTION:
        if abs(s.real) < rho:
            return 2
        return 0 if s.real > 0 else 1
    if abs(s) < rho:
        return 4
    if s.real > 0 and s.imag >= 0:
        return 0
    if s.real <= 0 and s.imag > 0:
        return 1
    if s.real < 0 and s.imag <= 0:
        return 2
    return 3


class TestOneHot:

    def test_rows(self):
        assert_array_equal(one_hot([2, 0], 3), [[0, 0, 1], [1, 0, 0]])

    @pytest.mark.parametrize("labels", [[3], [-1]])
    def test_out_of_range(self, labels):
        with pytest.raises(LabelRangeError):
            one_hot(labels, 3)


class TestIDX:

    def test_load_mnist(self, mnist_dir):
        data = load_mnist(mnist_dir)
        assert data.x_train.shape == (6, 784)
        assert data.x_test.shape == (3, 784)
        assert data.is_real
        assert 0.0 <= data.x_train.re.min() and data.x_train.re.max() <= 1.0
        assert_array_equal(data.labels("train"), [0, 1, 2, 3, 4, 9])
        assert_array_equal(data.labels("test"), [5, 6, 7])
        assert mnist_available(mnist_dir)

    def test_limits(self, mnist_dir):
        data = load_mnist(mnist_dir, train_limit=2, test_limit=1)
        assert data.n_train == 2 and data.n_test == 1

    def test_missing_files(self, tmp_path):
        assert not mnist_available(tmp_path)
        with pytest.raises(DatasetNotFoundError):
            load_mnist(tmp_path)

    def test_bad_magic(self, tmp_path):
        path = write_images(tmp_path / "images", np.zeros((1, 2, 2)), magic=0x0801)
        with pytest.raises(IDXFormatError) as info:
            read_idx_images(path)
        assert info.value.offset == 0
        assert info.value.path == path

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "labels"
        path.write_bytes(struct.pack(">II", LABEL_MAGIC, 10) + bytes(4))
        with pytest.raises(IDXFormatError) as info:
            read_idx_labels(path)
        assert info.value.offset == 12

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "images"
        path.write_bytes(bytes(6))
        with pytest.raises(IDXFormatError):
            read_idx_images(path)


class TestRegionLabel:

    def test_quadrants_and_origin(self):
        totals = np.array([2 + 0j, 2j, -2 + 0j, -2j, 0.5 + 0.5j, 3 - 1j])
        assert_array_equal(region_label(totals, "complex"), [0, 1, 2, 3, 4, 3])

    def test_real_projection(self):
        assert_array_equal(region_label(np.array([2.0, -2.0, 0.5]), "real_projection"), [0, 1, 2])


class TestSynthetic:

    @pytest.fixture(scope="class")
    def task(self):
        return gen_synthetic(SyntheticSpec(n_samples=2000, d=25, sigma=0.2, seed=0))

    def test_labels_follow_region_rule(self, task):
        for x, y in ((task.x_train, task.labels("train")), (task.x_test, task.labels("test"))):
            rows = x.to_complex()
            expected = [brute_force_label(row, SyntheticMode.COMPLEX) for row in rows]
            assert_array_equal(y, expected)

    def test_balanced_classes(self, task):
        labels = np.concatenate([task.labels("train"), task.labels("test")])
        counts = np.bincount(labels, minlength=5)
        assert_array_equal(counts, [400] * 5)

    def test_no_point_in_ambiguity_band(self, task):
        sums = np.abs(task.x_train.to_complex().sum(axis=1))
        assert not np.any(np.abs(sums - 1.0) < 0.1)

    def test_split(self, task):
        assert task.n_test == 400 and task.n_train == 1600
        ids = np.concatenate([task.train_ids, task.test_ids])
        assert_array_equal(np.sort(ids), np.arange(2000))
        assert 0.1 <= task.metadata["acceptance_rate"] <= 1.0

    def test_deterministic(self, task):
        again = gen_synthetic(SyntheticSpec(n_samples=2000, d=25, sigma=0.2, seed=0))
        assert_array_equal(again.x_train.re, task.x_train.re)
        assert_array_equal(again.y_test, task.y_test)

    def test_seed_matters(self, task):
        other = gen_synthetic(SyntheticSpec(n_samples=2000, d=25, sigma=0.2, seed=1))
        assert not np.array_equal(other.x_train.re, task.x_train.re)

    def test_real_projection(self):
        data = gen_synthetic(
            SyntheticSpec(n_samples=600, d=10, sigma=0.2, mode=SyntheticMode.REAL_PROJECTION, seed=2)
        )
        assert data.is_real
        assert data.n_classes == 3
        expected = [brute_force_label(row, SyntheticMode.REAL_PROJECTION) for row in data.x_train.re]
        assert_array_equal(data.labels("train"), expected)

    def test_projection_is_real_part_of_draws(self):
        spec = SyntheticSpec(d=6, seed=0)
        x_complex, classes = draw_candidates(spec, np.random.default_rng(5), 40)
        x_again, classes_again = draw_candidates(
            spec.model_copy(update={"mode": SyntheticMode.REAL_PROJECTION}), np.random.default_rng(5), 40
        )
        assert_array_equal(x_complex.real, x_again.real)
        assert_array_equal(classes, classes_again)

    def test_degenerate_geometry(self):
        with pytest.raises(SyntheticSpecError):
            gen_synthetic(SyntheticSpec(n_samples=200, d=25, sigma=50.0, seed=0))


class TestHelpers:

    def test_export_csv(self, tmp_path, synthetic_complex_small):
        path = export_csv(synthetic_complex_small, tmp_path / "out" / "task.csv")
        frame = pd.read_csv(path)
        assert len(frame) == 300
        assert list(frame.columns[:2]) == ["re_0", "re_1"]
        assert frame.shape[1] == 2 * 4 + 2
        assert set(frame["split"]) == {"train", "test"}

    def test_load_dataset_synthetic_real(self):
        experiment = ExperimentConfig(dataset="synthetic_real", n_samples=200, d=5, data_seed=4)
        data = load_dataset(experiment)
        assert data.name == "synthetic_real"
        assert data.n_features == 5 and data.n_classes == 3

    def test_base_seed_leaves_synthetic_data_alone(self):
        first = load_dataset(ExperimentConfig(dataset="synthetic_complex", n_samples=200, d=3, base_seed=0))
        second = load_dataset(ExperimentConfig(dataset="synthetic_complex", n_samples=200, d=3, base_seed=7))
        assert_array_equal(first.x_train.re, second.x_train.re)
        assert_array_equal(first.y_test, second.y_test)

    def test_data_seed_changes_synthetic_data(self):
        first = load_dataset(ExperimentConfig(dataset="synthetic_complex", n_samples=200, d=3, data_seed=0))
        second = load_dataset(ExperimentConfig(dataset="synthetic_complex", n_samples=200, d=3, data_seed=1))
        assert not np.array_equal(first.x_train.re, second.x_train.re)

    def test_load_dataset_mnist(self, mnist_dir):
        experiment = ExperimentConfig(dataset="mnist", data_dir=mnist_dir)
        assert load_dataset(experiment).n_classes == 10
