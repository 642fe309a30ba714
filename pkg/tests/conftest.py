"""Shared fixtures: handmade and planted bundles."""

from __future__ import annotations

import numpy as np
import pytest

from barlow.dataset import EvalRecord, load_bundle, save_bundle
from barlow.synth import SyntheticSpec, generate_suite

# Two planted classes plus a shared foil class. The foil never appears as
# a true label, so its label grouping is empty (exercising the no-data
# path), while its prediction grouping collects every failure.
PLANTED_SPECS = [
    SyntheticSpec(
        n_images=400,
        n_features=32,
        planted_feature=7,
        planted_threshold=2.0,
        p_high=0.7,
        p_low=0.05,
        class_index=3,
        class_name="purse",
        seed=11,
    ),
    SyntheticSpec(
        n_images=300,
        n_features=32,
        planted_feature=19,
        planted_threshold=1.0,
        p_high=0.6,
        p_low=0.1,
        class_index=5,
        class_name="rhodesian ridgeback",
        seed=12,
    ),
]


@pytest.fixture(scope="session")
def planted_specs():
    return PLANTED_SPECS


@pytest.fixture(scope="session")
def planted_bundle_dir(tmp_path_factory):
    features, records, classes = generate_suite(PLANTED_SPECS)
    return save_bundle(
        tmp_path_factory.mktemp("planted") / "bundle", features, records, classes
    )


@pytest.fixture(scope="session")
def planted_bundle(planted_bundle_dir):
    return load_bundle(planted_bundle_dir)


@pytest.fixture
def tiny_bundle(tmp_path):
    """8 images, 3 features, hand-checkable counts.

    Class 0: rows 0-4 (failures at rows 1 and 3); class 1: rows 5-7
    (failure at row 7, predicted class 0).
    """
    features = np.array(
        [
            [0.0, 5.0, 1.0],
            [1.0, 4.0, 1.0],
            [2.0, 3.0, 1.0],
            [3.0, 2.0, 1.0],
            [4.0, 1.0, 1.0],
            [5.0, 0.0, 1.0],
            [6.0, 2.5, 1.0],
            [7.0, 3.5, 1.0],
        ],
        dtype=np.float32,
    )
    records = [
        EvalRecord("img-0", 0, 0),
        EvalRecord("img-1", 0, 1),
        EvalRecord("img-2", 0, 0),
        EvalRecord("img-3", 0, 1),
        EvalRecord("img-4", 0, 0),
        EvalRecord("img-5", 1, 1),
        EvalRecord("img-6", 1, 1),
        EvalRecord("img-7", 1, 0),
    ]
    classes = {0: "cat", 1: "dog"}
    root = save_bundle(tmp_path / "tiny", features, records, classes)
    return load_bundle(root)
