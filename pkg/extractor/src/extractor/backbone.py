"""ResNet-50 wrapper that maps raw pixel tensors to penultimate activations.

The inspected classifier is a torchvision ResNet-50.  Everything downstream
(feature vectors, feature maps, attacks) works on the output of the last
convolutional stage: a ``(2048, h, w)`` stack of post-ReLU activation maps.
The per-image feature vector is the spatial mean of each map, which is
exactly what the network's own global average pool feeds into the final
linear layer, so logits computed from our pooled features equal the model's
logits.

All public entry points take images as raw pixel tensors in ``[0, 255]``
(shape ``(3, H, W)`` or batched ``(B, 3, H, W)``, float32).  Normalisation
to the training distribution happens inside this module, so callers --
including the attack loop, whose perturbation budget is defined in raw
pixel units -- never deal with normalised coordinates.
"""

from __future__ import annotations

import logging
from pathlib import Path

import torch
from PIL import Image
from torchvision.models import resnet50

log = logging.getLogger(__name__)

FEATURE_WIDTH = 2048
DEFAULT_INPUT_SIZE = 224

# Channel statistics of the training distribution, in [0, 1] units.
_CHANNEL_MEAN = (0.485, 0.456, 0.406)
_CHANNEL_STD = (0.229, 0.224, 0.225)


class BackboneError(Exception):
    """Raised when the model or an input image cannot be used."""


class Backbone:
    """A ResNet-50 in eval mode, addressed in raw pixel coordinates."""

    def __init__(self, model: torch.nn.Module, input_size: int = DEFAULT_INPUT_SIZE):
        if input_size < 32 or input_size % 32 != 0:
            raise BackboneError(
                f"input size must be a positive multiple of 32, got {input_size}"
            )
        self.model = model.eval()
        self.input_size = input_size
        self._mean = torch.tensor(_CHANNEL_MEAN).view(1, 3, 1, 1)
        self._std = torch.tensor(_CHANNEL_STD).view(1, 3, 1, 1)

    @property
    def n_classes(self) -> int:
        return self.model.fc.out_features

    @property
    def map_size(self) -> int:
        """Spatial side length of the last-stage activation maps."""
        return self.input_size // 32

    def normalize(self, pixels: torch.Tensor) -> torch.Tensor:
        """Map raw [0, 255] pixels to the model's input distribution."""
        return (pixels / 255.0 - self._mean) / self._std

    def feature_maps(self, pixels: torch.Tensor) -> torch.Tensor:
        """Return the last convolutional stage's output, ``(B, 2048, h, w)``.

        Runs the stem and the four residual stages; the classifier head
        (global pool + linear) is deliberately not applied.
        """
        m = self.model
        x = self.normalize(pixels)
        x = m.conv1(x)
        x = m.bn1(x)
        x = m.relu(x)
        x = m.maxpool(x)
        x = m.layer1(x)
        x = m.layer2(x)
        x = m.layer3(x)
        x = m.layer4(x)
        return x

    def features(self, pixels: torch.Tensor) -> torch.Tensor:
        """Per-image feature vectors: spatial mean of each map, ``(B, 2048)``."""
        return self.feature_maps(pixels).mean(dim=(2, 3))

    def logits(self, pixels: torch.Tensor) -> torch.Tensor:
        """Class scores, ``(B, n_classes)``; equals the full model forward."""
        return self.model.fc(self.features(pixels))

    def activation_fn(self, feature_index: int):
        """A callable ``(3, H, W) pixels -> scalar feature activation``.

        This is the objective the feature attack ascends.
        """
        if not 0 <= feature_index < FEATURE_WIDTH:
            raise BackboneError(
                f"feature index out of range [0, {FEATURE_WIDTH}): {feature_index}"
            )

        def activation(pixels: torch.Tensor) -> torch.Tensor:
            return self.features(pixels.unsqueeze(0))[0, feature_index]

        return activation


def load_backbone(weights_path: str | Path, input_size: int = DEFAULT_INPUT_SIZE) -> Backbone:
    """Build a ResNet-50 and load its weights from a ``state_dict`` file."""
    model = resnet50(weights=None)
    path = Path(weights_path)
    if not path.is_file():
        raise BackboneError(f"weights file not found: {path}")
    try:
        state = torch.load(path, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
    except (RuntimeError, ValueError, KeyError) as exc:
        raise BackboneError(f"could not load weights from {path}: {exc}") from exc
    return Backbone(model, input_size=input_size)


def load_pixels(path: str | Path, input_size: int) -> torch.Tensor:
    """Decode an image file to a raw pixel tensor ``(3, S, S)`` in [0, 255].

    Raises :class:`BackboneError` if the file cannot be decoded.
    """
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB").resize((input_size, input_size), Image.BILINEAR)
    except (OSError, SyntaxError, ValueError) as exc:
        raise BackboneError(f"could not decode image {path}: {exc}") from exc
    raw = torch.frombuffer(bytearray(rgb.tobytes()), dtype=torch.uint8)
    return raw.view(input_size, input_size, 3).permute(2, 0, 1).to(torch.float32)
