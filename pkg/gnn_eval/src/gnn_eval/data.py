"""Dataset loading for the GCN harness.

Two sources are supported:

* the classic planetoid pickle distribution of the citation networks
  (ind.<name>.x / .tx / .allx / .y / .ty / .ally / .graph / .test.index),
  pointed at by --data-dir; and
* "custom" plain-text datasets: an edge list, a CSV or raw-binary feature
  matrix, "node<TAB>class" labels, and split files with one node id per line.

Datasets are never vendored; a missing named dataset produces explicit fetch
instructions.
"""

from __future__ import annotations

import pickle
import struct
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

PLANETOID_NAMES = ("cora", "citeseer", "pubmed")
PLANETOID_URL = "https://github.com/tkipf/gcn/tree/master/gcn/data"


class DatasetError(RuntimeError):
    pass


@dataclass
class Dataset:
    name: str
    adj: sp.csr_matrix          # raw adjacency, no self-loops
    features: np.ndarray        # N x d dense
    labels: np.ndarray          # length N, -1 for unlabeled
    val_ids: np.ndarray
    test_ids: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.adj.shape[0]

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1


def fetch_instructions(name: str, data_dir: Path) -> str:
    files = ", ".join(f"ind.{name}.{s}" for s in
                      ("x", "tx", "allx", "y", "ty", "ally", "graph", "test.index"))
    return (f"dataset {name!r} not found under {data_dir}.\n"
            f"Download the planetoid files ({files}) from {PLANETOID_URL} "
            f"and place them in {data_dir}.")


def _load_pickle(path: Path):
    with path.open("rb") as fh:
        return pickle.load(fh, encoding="latin1")


def load_planetoid(name: str, data_dir) -> Dataset:
    """Load a citation network in the planetoid pickle layout."""
    data_dir = Path(data_dir)
    suffixes = ("x", "tx", "allx", "y", "ty", "ally", "graph")
    paths = {s: data_dir / f"ind.{name}.{s}" for s in suffixes}
    test_index_path = data_dir / f"ind.{name}.test.index"
    missing = [p for p in [*paths.values(), test_index_path] if not p.exists()]
    if missing:
        raise DatasetError(fetch_instructions(name, data_dir))

    objs = {s: _load_pickle(paths[s]) for s in suffixes}
    test_idx = np.loadtxt(test_index_path, dtype=np.int64)
    test_sorted = np.sort(test_idx)

    allx, tx = sp.csr_matrix(objs["allx"]), sp.csr_matrix(objs["tx"])
    ally, ty = np.asarray(objs["ally"]), np.asarray(objs["ty"])

    if name == "citeseer":
        # citeseer has isolated test nodes missing from tx/ty; pad the range
        full = np.arange(test_sorted.min(), test_sorted.max() + 1)
        tx_full = sp.lil_matrix((full.size, tx.shape[1]))
        tx_full[test_sorted - full.min()] = tx
        tx = tx_full.tocsr()
        ty_full = np.zeros((full.size, ty.shape[1]))
        ty_full[test_sorted - full.min()] = ty
        ty = ty_full
        test_sorted = full

    features = sp.vstack([allx, tx]).toarray().astype(np.float64)
    onehot = np.vstack([ally, ty])
    # reorder the test block into its true positions
    features[test_idx] = features[test_sorted]
    onehot[test_idx] = onehot[test_sorted]

    labels = np.where(onehot.sum(axis=1) > 0, onehot.argmax(axis=1), -1)
    graph = objs["graph"]
    rows = np.concatenate([[u] * len(vs) for u, vs in graph.items()]) \
        if graph else np.empty(0, dtype=np.int64)
    cols = np.concatenate([list(vs) for vs in graph.values()]) \
        if graph else np.empty(0, dtype=np.int64)
    n = features.shape[0]
    adj = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n)).tocsr()
    adj = adj.maximum(adj.T)
    adj.setdiag(0)
    adj.eliminate_zeros()

    # standard split: 500 validation nodes after the train block, given test set
    val_ids = np.arange(ally.shape[0] - 500, ally.shape[0])
    return Dataset(name=name, adj=adj, features=features,
                   labels=labels.astype(np.int64),
                   val_ids=val_ids, test_ids=np.sort(test_idx))


_BIN_HEADER = struct.Struct("<II")


def _read_features(path: Path) -> np.ndarray:
    if path.suffix == ".bin":
        raw = path.read_bytes()
        n, d = _BIN_HEADER.unpack_from(raw)
        return np.frombuffer(raw, dtype="<f4",
                             offset=_BIN_HEADER.size).reshape(n, d).astype(np.float64)
    return np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)


def _read_ids(path: Path) -> np.ndarray:
    lines = [ln.split("#")[0].strip() for ln in path.read_text().splitlines()]
    return np.asarray([int(ln) for ln in lines if ln], dtype=np.int64)


def load_custom(graph_path, features_path, labels_path, splits_dir) -> Dataset:
    """Plain-text dataset in the selection tool's file formats."""
    for p in (graph_path, features_path, labels_path):
        if not Path(p).exists():
            raise DatasetError(f"missing dataset file {p}")
    features = _read_features(Path(features_path))
    n = features.shape[0]

    rows, cols, declared = [], [], None
    for raw in Path(graph_path).read_text().splitlines():
        line = raw.split("#")[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] in ("N", "n"):
            declared = int(parts[1])
            continue
        rows.append(int(parts[0]))
        cols.append(int(parts[1]))
    if declared is not None and declared != n:
        raise DatasetError(f"graph declares {declared} nodes, features have {n}")
    adj = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    adj = adj.maximum(adj.T)
    adj.setdiag(0)
    adj.eliminate_zeros()

    labels = np.full(n, -1, dtype=np.int64)
    for raw in Path(labels_path).read_text().splitlines():
        line = raw.split("#")[0].strip()
        if line:
            u, c = line.split()
            labels[int(u)] = int(c)

    splits_dir = Path(splits_dir)
    val_ids = _read_ids(splits_dir / "val.txt")
    test_ids = _read_ids(splits_dir / "test.txt")
    return Dataset(name="custom", adj=adj, features=features, labels=labels,
                   val_ids=val_ids, test_ids=test_ids)
