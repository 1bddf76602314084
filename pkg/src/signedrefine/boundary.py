"""Boundary refinement driven by balance theory.

Inside a community, a (+,-,-) triangle points at one node: the endpoint of
both negative edges. Such nodes, plus triangle-free nodes whose incident
edges mostly violate community consistency, become purge candidates and are
reassigned one by one (ascending node id, against the evolving partition) to
whichever community gives them the most all-positive triangles. Ties go to
the higher N-Score, then the lower community id. A candidate whose current
community already wins simply stays.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_node_id, check_probability, check_same_nodes
from .graph import Partition, SignedGraph


@dataclass(frozen=True)
class BoundaryConfig:
    purge_threshold: float = 0.5
    max_candidates_fraction: float = 1.0

    def __post_init__(self):
        check_probability(self.purge_threshold, "purge_threshold")
        frac = float(self.max_candidates_fraction)
        if not 0.0 < frac <= 1.0:
            raise ValueError(
                f"max_candidates_fraction must be in (0, 1], got {frac}"
            )


@dataclass(frozen=True)
class PurgeReport:
    """Who was flagged, why, and where each flagged node ended up."""

    triangle_candidates: frozenset
    likelihood_candidates: dict
    reassignments: tuple

    def reason(self, v: int) -> str:
        if v in self.triangle_candidates:
            return "triangle"
        if v in self.likelihood_candidates:
            return "likelihood"
        raise KeyError(f"node {v} is not a purge candidate")


def triangle_purge_candidates(g: SignedGraph, p: Partition) -> set:
    """Nodes sitting on both negative edges of an intra-community (+,-,-) triangle."""
    check_same_nodes(g, p)
    a = p.assignment
    out = set()
    for tri in g.triangles():
        na, nb, nc = tri.nodes
        if not (a[na] == a[nb] == a[nc]):
            continue
        s_ab, s_ac, s_bc = tri.signs
        if s_ab + s_ac + s_bc != -1:
            continue  # exactly two negative edges
        if s_ab < 0 and s_ac < 0:
            out.add(na)
        elif s_ab < 0 and s_bc < 0:
            out.add(nb)
        else:
            out.add(nc)
    return out


def _likelihood(g: SignedGraph, assignment: np.ndarray, v: int) -> float:
    ids, signs = g.neighbor_arrays(v)
    if ids.size == 0:
        return 0.0
    intra = assignment[ids] == assignment[v]
    violating = (intra & (signs < 0)) | (~intra & (signs > 0))
    return float(np.count_nonzero(violating)) / ids.size


def purge_likelihood(g: SignedGraph, p: Partition, v: int) -> float:
    """Fraction of v's incident edges that violate community consistency."""
    check_same_nodes(g, p)
    v = check_node_id(v, g.num_nodes)
    return _likelihood(g, p.assignment, v)


def _gain(g: SignedGraph, assignment: np.ndarray, v: int, k: int) -> int:
    ids, signs = g.neighbor_arrays(v)
    anchors = ids[(signs > 0) & (assignment[ids] == k)]
    if anchors.size < 2:
        return 0
    gain = 0
    for j in anchors.tolist():
        j_ids, j_signs = g.neighbor_arrays(j)
        closing = np.intersect1d(j_ids[j_signs > 0], anchors, assume_unique=True)
        gain += int(np.count_nonzero(closing > j))
    return gain


def plus_triangle_gain(g: SignedGraph, p: Partition, v: int, k: int) -> int:
    """All-positive triangles through v lying inside community k if v joined k."""
    check_same_nodes(g, p)
    v = check_node_id(v, g.num_nodes)
    k = check_node_id(k, p.num_communities, name="community id")
    return _gain(g, p.assignment, v, k)


def _n_score(g: SignedGraph, assignment: np.ndarray, v: int, k: int) -> float:
    ids, signs = g.neighbor_arrays(v)
    if ids.size == 0:
        return 0.0
    return float(signs[assignment[ids] == k].sum()) / ids.size


def refine_boundary(g: SignedGraph, p: Partition, cfg: BoundaryConfig):
    """Detect purge candidates and greedily reassign them; returns (partition, report)."""
    check_same_nodes(g, p)
    assignment = p.assignment.copy()
    num_k = p.num_communities

    tri_candidates = triangle_purge_candidates(g, p)
    in_any_triangle = set()
    for tri in g.triangles():
        in_any_triangle.update(tri.nodes)
    likelihoods = {}
    for v in range(g.num_nodes):
        if v in in_any_triangle:
            continue
        lik = _likelihood(g, assignment, v)
        if lik >= cfg.purge_threshold:
            likelihoods[v] = lik

    chosen = sorted(tri_candidates | likelihoods.keys())
    cap = math.ceil(cfg.max_candidates_fraction * g.num_nodes)
    if len(chosen) > cap:
        # keep the most violating candidates, breaking ties toward low ids
        ranked = sorted(chosen, key=lambda v: (-_likelihood(g, assignment, v), v))
        chosen = sorted(ranked[:cap])

    kept = set(chosen)
    reassignments = []
    for v in chosen:
        gains = [_gain(g, assignment, v, k) for k in range(num_k)]
        best_gain = max(gains)
        tied = [k for k, gain in enumerate(gains) if gain == best_gain]
        if len(tied) > 1:
            scores = [_n_score(g, assignment, v, k) for k in tied]
            best_score = max(scores)
            target = next(k for k, s in zip(tied, scores) if s == best_score)
        else:
            target = tied[0]
        old = int(assignment[v])
        assignment[v] = target
        reassignments.append((v, old, target, best_gain))

    report = PurgeReport(
        triangle_candidates=frozenset(tri_candidates & kept),
        likelihood_candidates={v: likelihoods[v] for v in likelihoods if v in kept},
        reassignments=tuple(reassignments),
    )
    return Partition(assignment=assignment, num_communities=num_k), report
