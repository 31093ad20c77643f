"""Two-layer GCN trainer.

Defaults: hidden size 128, dropout 0.85, weight decay 5e-4, 200 epochs,
learning rate 0.01 (the reference GCN implementation's default, echoed in
the summary since it is a free parameter here).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import torch
import torch.nn.functional as F
from torch import nn


@dataclass(frozen=True)
class GcnConfig:
    hidden_size: int = 128
    dropout: float = 0.85
    l2: float = 5e-4
    epochs: int = 200
    layers: int = 2
    learning_rate: float = 0.01


def normalized_adjacency(adj: sp.csr_matrix) -> torch.Tensor:
    """Sparse D^-1/2 (A + I) D^-1/2 as a torch COO tensor."""
    n = adj.shape[0]
    a = adj + sp.identity(n, format="csr")
    deg = np.asarray(a.sum(axis=1)).ravel()
    half = sp.diags(1.0 / np.sqrt(deg))
    norm = (half @ a @ half).tocoo()
    idx = torch.tensor(np.vstack([norm.row, norm.col]), dtype=torch.long)
    vals = torch.tensor(norm.data, dtype=torch.float32)
    return torch.sparse_coo_tensor(idx, vals, (n, n)).coalesce()


class Gcn(nn.Module):
    def __init__(self, in_dim: int, hidden: int, out_dim: int, dropout: float):
        super().__init__()
        self.lin1 = nn.Linear(in_dim, hidden)
        self.lin2 = nn.Linear(hidden, out_dim)
        self.dropout = dropout

    def forward(self, x, adj_norm):
        x = F.dropout(x, self.dropout, training=self.training)
        x = torch.sparse.mm(adj_norm, self.lin1(x))
        x = F.relu(x)
        x = F.dropout(x, self.dropout, training=self.training)
        return torch.sparse.mm(adj_norm, self.lin2(x))


@dataclass
class TrialResult:
    test_accuracy: float
    best_val_accuracy: float
    seed: int


def train_gcn_trial(adj_norm: torch.Tensor, features: np.ndarray,
                    labels: np.ndarray, train_ids, val_ids, test_ids,
                    config: GcnConfig, seed: int) -> TrialResult:
    """One training run with a fixed torch seed; the test accuracy is taken
    at the epoch with the best validation accuracy (final epoch if the
    validation set is empty)."""
    torch.manual_seed(seed)
    x = torch.tensor(features, dtype=torch.float32)
    y = torch.tensor(labels, dtype=torch.long)
    train_ids = torch.tensor(np.asarray(train_ids, dtype=np.int64))
    val_ids = torch.tensor(np.asarray(val_ids, dtype=np.int64))
    test_ids = torch.tensor(np.asarray(test_ids, dtype=np.int64))
    n_classes = int(labels.max()) + 1

    model = Gcn(x.shape[1], config.hidden_size, n_classes, config.dropout)
    opt = torch.optim.Adam(model.parameters(), lr=config.learning_rate,
                           weight_decay=config.l2)

    def accuracy(ids):
        model.eval()
        with torch.no_grad():
            pred = model(x, adj_norm)[ids].argmax(dim=1)
        return float((pred == y[ids]).float().mean())

    best_val, best_test = -1.0, 0.0
    for _ in range(config.epochs):
        model.train()
        opt.zero_grad()
        out = model(x, adj_norm)
        loss = F.cross_entropy(out[train_ids], y[train_ids])
        loss.backward()
        opt.step()
        if len(val_ids):
            va = accuracy(val_ids)
            if va > best_val:
                best_val = va
                best_test = accuracy(test_ids)
    if not len(val_ids):
        best_test = accuracy(test_ids)
    return TrialResult(test_accuracy=best_test, best_val_accuracy=best_val,
                       seed=seed)
