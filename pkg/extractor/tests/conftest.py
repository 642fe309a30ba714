"""Shared fixtures: a seeded random-weight model and a small image tree.

The model is a ResNet-50 with deterministic random initialisation -- the
extraction and attack contracts (feature width, non-negativity, pooling
identity, gradient ascent within a pixel budget) hold for any weights, so
tests never download anything.
"""

from __future__ import annotations

import numpy as np
import pytest
import torch
from PIL import Image
from torchvision.models import resnet50

from extractor import Backbone, extract_bundle

WEIGHTS_SEED = 20

# (class directory, file name, image seed); class_0000 -> label 0, class_0007 -> 7.
IMAGE_PLAN = [
    ("class_0000", "apples.png", 101),
    ("class_0000", "mangos.png", 102),
    ("class_0000", "pears.png", 103),
    ("class_0007", "boots.png", 104),
    ("class_0007", "sandals.png", 105),
]


@pytest.fixture(scope="session")
def weights_file(tmp_path_factory):
    torch.manual_seed(WEIGHTS_SEED)
    model = resnet50(weights=None)
    path = tmp_path_factory.mktemp("weights") / "model.pt"
    torch.save(model.state_dict(), path)
    return path


@pytest.fixture(scope="session")
def model(weights_file):
    model = resnet50(weights=None)
    model.load_state_dict(torch.load(weights_file, map_location="cpu", weights_only=True))
    return model.eval()


@pytest.fixture(scope="session")
def image_tree(tmp_path_factory):
    """Two class directories, five readable PNGs, one garbage file."""
    root = tmp_path_factory.mktemp("images")
    for class_dir, name, seed in IMAGE_PLAN:
        rng = np.random.default_rng(seed)
        pixels = rng.integers(0, 256, size=(96, 96, 3), dtype=np.uint8)
        directory = root / class_dir
        directory.mkdir(exist_ok=True)
        Image.fromarray(pixels).save(directory / name)
    (root / "class_0000" / "broken.png").write_bytes(b"this is not an image")
    return root


@pytest.fixture(scope="session")
def bundle(model, image_tree, tmp_path_factory):
    """One full-resolution extraction, shared by the read-only tests."""
    out = tmp_path_factory.mktemp("bundles") / "main"
    backbone = Backbone(model)
    root, kept = extract_bundle(backbone, image_tree, out)
    return backbone, root, kept
