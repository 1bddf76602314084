"""Partition quality metrics: ARI, modularity, and the misaligned-edge ratio.

ARI uses the pair-counting contingency formula. Modularity defaults to
Newman's Q on the positive-edge subgraph; a signed variant (positive-subgraph
Q minus negative-subgraph Q) is available behind the ``variant`` switch.
The misaligned-edge ratio is the fraction of edges that violate community
consistency under a partition but are not flagged as injected noise.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import check_same_nodes
from .exceptions import UndefinedMetricError
from .graph import Partition, SignedGraph, violating_edges


def _comb2(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1.0) / 2.0


def ari(p1: Partition, p2: Partition) -> float:
    """Adjusted Rand index between two partitions of the same node set.

    1.0 for identical partitions up to relabeling; 0 in expectation for
    independent partitions. Degenerate contingencies where the expected and
    maximum index coincide return 1.0.
    """
    if p1.num_nodes != p2.num_nodes:
        raise ValueError(
            f"partition sizes differ: {p1.num_nodes} vs {p2.num_nodes}"
        )
    n = p1.num_nodes
    if n == 0:
        return 1.0
    cont = np.zeros((p1.num_communities, p2.num_communities), dtype=np.int64)
    np.add.at(cont, (p1.assignment, p2.assignment), 1)
    index = _comb2(cont).sum()
    sum_a = _comb2(cont.sum(axis=1)).sum()
    sum_b = _comb2(cont.sum(axis=0)).sum()
    total = _comb2(n)
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return float((index - expected) / (max_index - expected))


def _newman_q(g: SignedGraph, p: Partition, want_sign: int) -> float:
    """Newman modularity of the subgraph restricted to edges of one sign."""
    sel = g.edge_sign == want_sign
    m = int(np.count_nonzero(sel))
    if m == 0:
        return 0.0
    a = p.assignment
    eu = g.edge_u[sel]
    ev = g.edge_v[sel]
    k = p.num_communities
    intra = np.zeros(k, dtype=np.int64)
    same = a[eu] == a[ev]
    np.add.at(intra, a[eu[same]], 1)
    deg = np.zeros(k, dtype=np.int64)
    np.add.at(deg, a[eu], 1)
    np.add.at(deg, a[ev], 1)
    q = intra / m - (deg / (2.0 * m)) ** 2
    return float(q.sum())


def modularity(g: SignedGraph, p: Partition, variant: str = "positive") -> float:
    """Modularity of a partition on a signed graph.

    ``variant="positive"`` (default) is Newman's Q on the positive subgraph;
    ``variant="signed"`` subtracts the negative subgraph's Q. Both require at
    least one positive edge.
    """
    check_same_nodes(g, p)
    if variant not in ("positive", "signed"):
        raise ValueError(f"unknown modularity variant {variant!r}")
    if int(np.count_nonzero(g.edge_sign > 0)) == 0:
        raise UndefinedMetricError("modularity is undefined without positive edges")
    q = _newman_q(g, p, 1)
    if variant == "signed":
        q -= _newman_q(g, p, -1)
    return q


def misaligned_ratio(g: SignedGraph, p: Partition, noise_flags) -> float:
    """Fraction of edges violating community consistency that are not noisy.

    Violations are negative intra-community or positive inter-community
    edges; flagged noisy edges are excluded from the numerator. Returns 0.0
    for an edgeless graph.
    """
    check_same_nodes(g, p)
    flags = np.asarray(noise_flags, dtype=bool)
    if flags.shape != (g.num_edges,):
        raise ValueError(
            f"noise_flags length {flags.shape} does not match edge count {g.num_edges}"
        )
    if g.num_edges == 0:
        return 0.0
    bad = np.zeros(g.num_edges, dtype=bool)
    bad[violating_edges(g, p)] = True
    return float(np.count_nonzero(bad & ~flags) / g.num_edges)


def aggregate(values) -> tuple:
    """Mean and sample standard deviation (ddof=1; 0.0 for a single value)."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("cannot aggregate an empty value list")
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


@dataclass
class MetricReport:
    """Per-seed metric values with mean and standard deviation on demand."""

    ari_values: list = field(default_factory=list)
    modularity_values: list = field(default_factory=list)
    misaligned_values: list = field(default_factory=list)

    def _series(self, name):
        return {
            "ari": self.ari_values,
            "modularity": self.modularity_values,
            "misaligned_ratio": self.misaligned_values,
        }[name]

    def mean(self, name) -> Optional[float]:
        vals = self._series(name)
        return aggregate(vals)[0] if vals else None

    def std(self, name) -> Optional[float]:
        vals = self._series(name)
        return aggregate(vals)[1] if vals else None

    def merge(self, other: "MetricReport") -> "MetricReport":
        return MetricReport(
            ari_values=self.ari_values + other.ari_values,
            modularity_values=self.modularity_values + other.modularity_values,
            misaligned_values=self.misaligned_values + other.misaligned_values,
        )
