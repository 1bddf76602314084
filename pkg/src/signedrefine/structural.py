"""Membership reassignment from local sign structure and global embeddings.

Each node gets a per-community score combining two signals: the fraction of
its signed neighborhood pointing into the community (N-Score) and the inner
product between its embedding and the community centroid (C-Score). The
weighted sum passes through a temperature softmax and every node is
reassigned at once from the OLD partition, either to the argmax community or
to a categorical sample.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import (
    check_node_id,
    check_positive,
    check_probability,
    check_same_nodes,
)
from .graph import Partition, SignedGraph


@dataclass(frozen=True)
class StructuralConfig:
    alpha: float = 0.5
    softmax_temp: float = 0.1
    mode: str = "argmax"
    rng_seed: int = 0

    def __post_init__(self):
        check_probability(self.alpha, "alpha")
        check_positive(self.softmax_temp, "softmax_temp")
        if self.mode not in ("argmax", "sample"):
            raise ValueError(f"mode must be 'argmax' or 'sample', got {self.mode!r}")


@dataclass(frozen=True)
class ScoreTable:
    """Per-node, per-community scores behind one refinement pass."""

    n_scores: np.ndarray
    c_scores: np.ndarray
    probs: np.ndarray


def n_score(g: SignedGraph, p: Partition, v: int, k: int) -> float:
    """Degree-normalized signed count of v's neighbors inside community k."""
    check_same_nodes(g, p)
    v = check_node_id(v, g.num_nodes)
    k = check_node_id(k, p.num_communities, name="community id")
    ids, signs = g.neighbor_arrays(v)
    if ids.size == 0:
        return 0.0
    inside = p.assignment[ids] == k
    return float(signs[inside].sum()) / ids.size


def c_score(emb: np.ndarray, centroid_rows: np.ndarray, v: int, k: int) -> float:
    """Inner product between node v's embedding and community k's centroid."""
    emb = np.asarray(emb, dtype=float)
    centroid_rows = np.asarray(centroid_rows, dtype=float)
    if emb.ndim != 2 or centroid_rows.ndim != 2:
        raise ValueError("embeddings and centroids must be 2-dimensional")
    if emb.shape[1] != centroid_rows.shape[1]:
        raise ValueError(
            f"dimension mismatch: embeddings have {emb.shape[1]} columns, "
            f"centroids have {centroid_rows.shape[1]}"
        )
    v = check_node_id(v, emb.shape[0])
    k = check_node_id(k, centroid_rows.shape[0], name="community id")
    return float(emb[v] @ centroid_rows[k])


def centroids(emb: np.ndarray, p: Partition) -> np.ndarray:
    """K x d matrix of L2-normalized community means; empty community -> zero row."""
    emb = np.asarray(emb, dtype=float)
    if emb.ndim != 2:
        raise ValueError("embeddings must be 2-dimensional")
    if emb.shape[0] != p.num_nodes:
        raise ValueError(
            f"embeddings cover {emb.shape[0]} nodes, partition has {p.num_nodes}"
        )
    k = p.num_communities
    sums = np.zeros((k, emb.shape[1]))
    np.add.at(sums, p.assignment, emb)
    counts = p.community_sizes()
    out = np.zeros_like(sums)
    occupied = counts > 0
    out[occupied] = sums[occupied] / counts[occupied, None]
    norms = np.linalg.norm(out, axis=1)
    positive = norms > 0
    out[positive] /= norms[positive, None]
    return out


def _all_n_scores(g: SignedGraph, p: Partition) -> np.ndarray:
    n, k = g.num_nodes, p.num_communities
    table = np.zeros((n, k))
    if g.num_edges:
        a = p.assignment
        np.add.at(table, (g.edge_u, a[g.edge_v]), g.edge_sign)
        np.add.at(table, (g.edge_v, a[g.edge_u]), g.edge_sign)
        deg = g.degree
        nz = deg > 0
        table[nz] /= deg[nz, None]
    return table


def _softmax_rows(m: np.ndarray) -> np.ndarray:
    shifted = m - m.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def refine_structural(
    g: SignedGraph, p: Partition, emb: np.ndarray, cfg: StructuralConfig
):
    """One synchronous reassignment pass; returns (new partition, ScoreTable)."""
    check_same_nodes(g, p)
    n_table = _all_n_scores(g, p)
    c_table = np.asarray(emb, dtype=float) @ centroids(emb, p).T
    combined = cfg.alpha * n_table + (1.0 - cfg.alpha) * c_table
    probs = _softmax_rows(combined / cfg.softmax_temp)
    if cfg.mode == "argmax":
        # np.argmax takes the first maximum, i.e. the lowest community id
        new_assignment = np.argmax(probs, axis=1)
    else:
        rng = np.random.default_rng(cfg.rng_seed)
        draws = rng.random((g.num_nodes, 1))
        cumulative = np.cumsum(probs, axis=1)
        cumulative[:, -1] = 1.0
        new_assignment = (draws > cumulative).sum(axis=1)
    new_part = Partition(
        assignment=new_assignment.astype(np.int64),
        num_communities=p.num_communities,
    )
    table = ScoreTable(n_scores=n_table, c_scores=c_table, probs=probs)
    return new_part, table
