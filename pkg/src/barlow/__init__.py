"""Failure-mode mining over per-image feature representations.

Given a table of per-image feature vectors together with true and predicted
labels, this package ranks human-readable failure modes: axis-aligned feature
rules ("feature[i] < t") whose matching images fail much more often than the
class baseline, found via mutual-information feature selection and shallow
decision trees trained on the failure indicator.
"""

__version__ = "0.1.0"

from barlow.dataset import DatasetBundle, EvalRecord, Grouping, load_bundle, save_bundle
from barlow.metrics import ClusterStats

__all__ = [
    "DatasetBundle",
    "EvalRecord",
    "Grouping",
    "load_bundle",
    "save_bundle",
    "ClusterStats",
    "__version__",
]
