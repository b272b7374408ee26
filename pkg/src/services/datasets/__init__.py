"""
Datasets
========
Synthetic quadrant tasks, MNIST IDX ingestion and the shared Dataset type.

Usage:
    from src.services.datasets import load_dataset

    dataset = load_dataset(experiment_config)
"""

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from src.services.datasets.dataset import (
    Dataset,
    DatasetError,
    DatasetNotFoundError,
    IDXFormatError,
    LabelRangeError,
    SyntheticSpecError,
    one_hot,
)
from src.services.datasets.idx_loader import (
    load_mnist,
    mnist_available,
    read_idx_images,
    read_idx_labels,
)
from src.services.datasets.synthetic import (
    SyntheticMode,
    SyntheticSpec,
    draw_candidates,
    gen_synthetic,
    region_label,
)
from src.utils.logger import get_logger


logger = get_logger(__name__)


def export_csv(dataset: Dataset, path: Union[str, Path]) -> Path:
    """
    Write one row per sample: re_0..re_{d-1}, im_0..im_{d-1}, label, split.

    Train rows come first, then test rows.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    d = dataset.n_features

    frames = []
    for split, x in (("train", dataset.x_train), ("test", dataset.x_test)):
        frame = pd.DataFrame(
            np.hstack([x.re, x.im]),
            columns=[f"re_{i}" for i in range(d)] + [f"im_{i}" for i in range(d)],
        )
        frame["label"] = dataset.labels(split)
        frame["split"] = split
        frames.append(frame)

    pd.concat(frames, ignore_index=True).to_csv(path, index=False)
    logger.info(f"Exported {dataset.name} ({dataset.n_train + dataset.n_test} rows) to {path}")
    return path


def load_dataset(experiment) -> Dataset:
    """
    Build the dataset named by an ExperimentConfig.

    Raises:
        DatasetError: Missing MNIST files, malformed IDX data or a degenerate
            synthetic specification
    """
    kind = getattr(experiment.dataset, "value", experiment.dataset)
    if kind == "mnist":
        return load_mnist(experiment.data_dir, experiment.train_limit, experiment.test_limit)

    mode = SyntheticMode.COMPLEX if kind == "synthetic_complex" else SyntheticMode.REAL_PROJECTION
    spec = SyntheticSpec(
        n_samples=experiment.n_samples,
        d=experiment.d,
        sigma=experiment.sigma,
        mode=mode,
        origin_radius=experiment.origin_radius,
        test_fraction=experiment.test_fraction,
        seed=experiment.data_seed,
    )
    return gen_synthetic(spec)


__all__ = [
    "Dataset",
    "DatasetError",
    "DatasetNotFoundError",
    "IDXFormatError",
    "LabelRangeError",
    "SyntheticSpecError",
    "SyntheticMode",
    "SyntheticSpec",
    "one_hot",
    "draw_candidates",
    "region_label",
    "gen_synthetic",
    "read_idx_images",
    "read_idx_labels",
    "load_mnist",
    "mnist_available",
    "export_csv",
    "load_dataset",
]
