"""File formats: edge lists, feature matrices, labels and split files.

Edge list: UTF-8 text, one arc per line "u v [w]" (TAB or spaces), `#`
comments, optional header line "N <count>" to declare isolated nodes.
Features: CSV (one row per node) or raw little-endian binary with an 8-byte
header of two uint32 (N, d) followed by row-major float32 data.
Labels: "node_id<TAB>class_id" lines.  Splits: one node id per line.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .graph import GraphError, SparseGraph, from_edges


class ParseError(ValueError):
    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


def load_edge_list(path, symmetrize: bool = True):
    """Parse an edge-list file into a SparseGraph.

    Node ids must be nonnegative integers.  If the ids are not dense 0..N-1,
    they are remapped to a dense range and the mapping (original -> dense) is
    returned; otherwise the mapping is None.  Returns (graph, id_map).
    """
    path = Path(path)
    declared_n = None
    rows, cols, weights = [], [], []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] in ("N", "n") and len(parts) == 2:
                try:
                    declared_n = int(parts[1])
                except ValueError:
                    raise ParseError(path, lineno, f"bad node count {parts[1]!r}")
                continue
            if len(parts) not in (2, 3):
                raise ParseError(path, lineno, f"expected 'u v [w]', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(path, lineno, f"non-integer node id in {line!r}")
            if u < 0 or v < 0:
                raise GraphError(f"{path}:{lineno}: negative node id")
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ParseError(path, lineno, f"bad weight {parts[2]!r}")
            rows.append(u)
            cols.append(v)
            weights.append(w)

    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)

    id_map = None
    seen = np.unique(np.concatenate([rows, cols])) if rows.size else np.empty(0, dtype=np.int64)
    max_id = int(seen[-1]) if seen.size else -1
    if seen.size and seen.size != max_id + 1 and declared_n is None:
        # Sparse ids: remap to dense 0..N-1 preserving order.
        id_map = {int(orig): i for i, orig in enumerate(seen)}
        lut = np.full(max_id + 1, -1, dtype=np.int64)
        lut[seen] = np.arange(seen.size)
        rows, cols = lut[rows], lut[cols]
        n = seen.size
    else:
        n = max(max_id + 1, declared_n or 0)
    if n == 0:
        raise GraphError(f"{path}: no nodes (empty file without an 'N <count>' header)")
    graph = from_edges(n, rows, cols, weights, symmetrize=symmetrize)
    return graph, id_map


def save_edge_list(path, graph: SparseGraph):
    """Write the off-diagonal upper triangle of A_tilde as an edge list.

    Round-trips through load_edge_list for undirected graphs."""
    path = Path(path)
    a = graph.adjacency_without_loops().tocoo()
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"N {graph.num_nodes}\n")
        for u, v, w in zip(a.row, a.col, a.data):
            if u < v or graph.directed:
                if w == 1.0:
                    fh.write(f"{u}\t{v}\n")
                else:
                    fh.write(f"{u}\t{v}\t{float(w)!r}\n")


_BIN_HEADER = struct.Struct("<II")


def load_features(path) -> np.ndarray:
    """Load a dense N x d feature matrix from .csv/.txt or raw .bin."""
    path = Path(path)
    if path.suffix == ".bin":
        raw = path.read_bytes()
        if len(raw) < _BIN_HEADER.size:
            raise GraphError(f"{path}: truncated binary feature file")
        n, d = _BIN_HEADER.unpack_from(raw)
        body = np.frombuffer(raw, dtype="<f4", offset=_BIN_HEADER.size)
        if body.size != n * d:
            raise GraphError(f"{path}: expected {n * d} floats, found {body.size}")
        return body.reshape(n, d).astype(np.float64)
    try:
        feats = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise GraphError(f"{path}: {exc}") from exc
    return feats


def save_features(path, features: np.ndarray):
    path = Path(path)
    features = np.asarray(features)
    if path.suffix == ".bin":
        n, d = features.shape
        with path.open("wb") as fh:
            fh.write(_BIN_HEADER.pack(n, d))
            fh.write(features.astype("<f4").tobytes(order="C"))
    else:
        np.savetxt(path, features, delimiter=",")


def load_labels(path, num_nodes: int) -> np.ndarray:
    """Load "node<TAB>class" lines into an int array of length num_nodes.

    Unlabeled nodes get -1."""
    path = Path(path)
    labels = np.full(num_nodes, -1, dtype=np.int64)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(path, lineno, f"expected 'node class', got {line!r}")
            try:
                u, c = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(path, lineno, f"non-integer field in {line!r}")
            if not 0 <= u < num_nodes:
                raise GraphError(f"{path}:{lineno}: node id {u} out of range")
            labels[u] = c
    return labels


def save_labels(path, labels: np.ndarray):
    with Path(path).open("w", encoding="utf-8") as fh:
        for u, c in enumerate(labels):
            fh.write(f"{u}\t{c}\n")


def load_split(path, num_nodes: int | None = None) -> np.ndarray:
    """One node id per line; returns a sorted unique id array."""
    path = Path(path)
    ids = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                ids.append(int(line))
            except ValueError:
                raise ParseError(path, lineno, f"non-integer node id {line!r}")
    ids = np.unique(np.asarray(ids, dtype=np.int64))
    if num_nodes is not None and ids.size and (ids[0] < 0 or ids[-1] >= num_nodes):
        raise GraphError(f"{path}: split node id out of range")
    return ids


def save_split(path, ids):
    with Path(path).open("w", encoding="utf-8") as fh:
        for u in ids:
            fh.write(f"{int(u)}\n")
