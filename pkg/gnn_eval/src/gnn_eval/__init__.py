"""GCN evaluation harness for selection reports."""

from .data import Dataset, DatasetError, load_custom, load_planetoid
from .model import Gcn, GcnConfig, TrialResult, normalized_adjacency, train_gcn_trial

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetError",
    "Gcn",
    "GcnConfig",
    "TrialResult",
    "load_custom",
    "load_planetoid",
    "normalized_adjacency",
    "train_gcn_trial",
]
