"""Feature-map heatmaps: normalization, bilinear upsampling, PGM output.

A feature map is one channel's spatial activation grid for one image,
taken before global pooling. Rendering a heatmap is: min-max normalize
to [0, 1] (a constant map becomes all zeros), bilinearly upsample to the
display size with half-pixel-aligned sample centers and edge clamping,
then quantize to an 8-bit binary PGM (P5, maxval 255).

On disk a feature map is a tiny binary file: two little-endian uint32
(height, width) followed by height*width little-endian float32 values in
row-major order. Bundles store them under
``<feature_maps_dir>/f<feature>/i<row>.fmap``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FMAP_HEADER = struct.Struct("<II")


class FeatureMapError(Exception):
    """Raised when a feature-map file is malformed."""


@dataclass(frozen=True)
class FeatureMap:
    """A (height, width) activation grid, optionally tagged with its origin."""

    values: np.ndarray
    feature_index: int | None = None
    image_row: int | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"feature map must be a 2-d grid, got shape {values.shape}")
        if not np.isfinite(values).all():
            raise ValueError("feature map contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def replace(self, values: np.ndarray) -> "FeatureMap":
        return FeatureMap(
            values=values, feature_index=self.feature_index, image_row=self.image_row
        )


def normalize(fmap: FeatureMap) -> FeatureMap:
    """Min-max rescale to [0, 1]; a constant map maps to all zeros."""
    values = fmap.values
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return fmap.replace(np.zeros_like(values))
    return fmap.replace((values - lo) / (hi - lo))


def upsample_bilinear(fmap: FeatureMap, out_height: int, out_width: int) -> FeatureMap:
    """Bilinear resize with half-pixel sample centers and edge clamping.

    Output pixel (i, j) samples the source at
        y = (i + 0.5) * H_src / H_out - 0.5
        x = (j + 0.5) * W_src / W_out - 0.5
    interpolating the four clamped neighbours. Target dimensions must be
    at least the source dimensions.
    """
    src = fmap.values
    height, width = src.shape
    if out_height < height or out_width < width:
        raise ValueError(
            f"target {out_height}x{out_width} smaller than source {height}x{width}"
        )

    ys = (np.arange(out_height, dtype=np.float64) + 0.5) * (height / out_height) - 0.5
    xs = (np.arange(out_width, dtype=np.float64) + 0.5) * (width / out_width) - 0.5
    y0 = np.floor(ys)
    x0 = np.floor(xs)
    ty = ys - y0
    tx = xs - x0
    y0c = np.clip(y0.astype(np.int64), 0, height - 1)
    y1c = np.clip(y0.astype(np.int64) + 1, 0, height - 1)
    x0c = np.clip(x0.astype(np.int64), 0, width - 1)
    x1c = np.clip(x0.astype(np.int64) + 1, 0, width - 1)

    ty = ty[:, None]
    tx = tx[None, :]
    top = src[y0c[:, None], x0c[None, :]] * (1.0 - tx) + src[y0c[:, None], x1c[None, :]] * tx
    bottom = src[y1c[:, None], x0c[None, :]] * (1.0 - tx) + src[y1c[:, None], x1c[None, :]] * tx
    return fmap.replace(top * (1.0 - ty) + bottom * ty)


def pgm_bytes(fmap: FeatureMap) -> bytes:
    """Binary PGM (P5, maxval 255) for a [0, 1]-normalized map."""
    values = fmap.values
    if values.min() < 0.0 or values.max() > 1.0:
        raise ValueError("PGM rendering expects values in [0, 1]; normalize first")
    gray = np.rint(values * 255.0).astype(np.uint8)
    header = f"P5\n{fmap.width} {fmap.height}\n255\n".encode("ascii")
    return header + gray.tobytes()


def write_pgm(fmap: FeatureMap, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(pgm_bytes(fmap))
    return path


def fmap_path(
    feature_maps_dir: str | Path, feature_index: int, image_row: int
) -> Path:
    """Canonical location of one (feature, image) map inside a bundle."""
    return Path(feature_maps_dir) / f"f{feature_index}" / f"i{image_row}.fmap"


def write_fmap(path: str | Path, fmap: FeatureMap) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = FMAP_HEADER.pack(fmap.height, fmap.width) + np.ascontiguousarray(
        fmap.values, dtype="<f4"
    ).tobytes()
    path.write_bytes(payload)
    return path


def read_fmap(
    path: str | Path, feature_index: int | None = None, image_row: int | None = None
) -> FeatureMap:
    """Load and validate one feature-map file."""
    path = Path(path)
    if not path.is_file():
        raise FeatureMapError(f"{path}: missing feature map")
    raw = path.read_bytes()
    if len(raw) < FMAP_HEADER.size:
        raise FeatureMapError(f"{path.name}: truncated header")
    height, width = FMAP_HEADER.unpack_from(raw)
    if height < 1 or width < 1:
        raise FeatureMapError(f"{path.name}: invalid dimensions {height}x{width}")
    expected = FMAP_HEADER.size + height * width * 4
    if len(raw) != expected:
        raise FeatureMapError(
            f"{path.name}: expected {expected} bytes for {height}x{width}, "
            f"found {len(raw)}"
        )
    values = np.frombuffer(raw, dtype="<f4", offset=FMAP_HEADER.size).reshape(
        height, width
    )
    if not np.isfinite(values).all():
        raise FeatureMapError(f"{path.name}: non-finite activation values")
    return FeatureMap(
        values=values.astype(np.float64),
        feature_index=feature_index,
        image_row=image_row,
    )
