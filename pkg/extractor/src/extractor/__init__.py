"""Model-side adapter: features, spatial maps, and feature attacks.

Turns a classifier plus an image directory into the evaluation-bundle
files the analysis tool consumes, and runs pixel-budgeted attacks that
probe what drives an individual feature.
"""

from .attack import AttackConfig, AttackError, AttackResult, feature_attack
from .backbone import (
    DEFAULT_INPUT_SIZE,
    FEATURE_WIDTH,
    Backbone,
    BackboneError,
    load_backbone,
    load_pixels,
)
from .bundle_io import (
    FMAP_HEADER,
    ImageRecord,
    fmap_path,
    read_fmap,
    read_records,
    write_bundle,
    write_fmap,
)
from .extract import (
    ExtractionError,
    SourceImage,
    default_class_names,
    export_feature_maps,
    extract_bundle,
    load_class_names,
    scan_images,
)

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackError",
    "AttackResult",
    "Backbone",
    "BackboneError",
    "DEFAULT_INPUT_SIZE",
    "ExtractionError",
    "FEATURE_WIDTH",
    "FMAP_HEADER",
    "ImageRecord",
    "SourceImage",
    "default_class_names",
    "export_feature_maps",
    "extract_bundle",
    "feature_attack",
    "fmap_path",
    "load_backbone",
    "load_class_names",
    "load_pixels",
    "read_fmap",
    "read_records",
    "scan_images",
    "write_bundle",
    "write_fmap",
]
