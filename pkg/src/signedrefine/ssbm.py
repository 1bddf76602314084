"""Signed stochastic block model generator.

Plants equal-size communities (block-contiguous node ids, the first
``n mod k`` blocks one node larger), draws each unordered pair as an edge
with probability ``p``, signs it +1 within a block and -1 across blocks,
then flips each edge sign independently with probability ``mu`` and flags
the flipped edges as noisy.

Randomness comes from numpy's PCG64 generator, so a given seed reproduces
the same sample bit for bit on any platform. The stream is consumed in two
fixed phases: one uniform per node pair in lexicographic ``(i, j)`` order
for edge existence, then one uniform per realized edge (same order) for the
sign flip.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_count, check_probability
from .graph import Partition, SignedGraph


@dataclass(frozen=True)
class SsbmParams:
    num_nodes: int
    num_communities: int
    edge_prob: float
    noise_ratio: float
    seed: int = 0

    def __post_init__(self):
        check_count(self.num_nodes, "num_nodes")
        check_count(self.num_communities, "num_communities")
        if self.num_nodes < self.num_communities:
            raise ValueError("num_nodes must be >= num_communities")
        check_probability(self.edge_prob, "edge_prob")
        check_probability(self.noise_ratio, "noise_ratio")
        if int(self.seed) < 0:
            raise ValueError("seed must be a non-negative integer")

    @property
    def name(self) -> str:
        """Dataset label in the `SSBM-<n>-<k>-<p>-<mu>` convention."""
        return (
            f"SSBM-{self.num_nodes}-{self.num_communities}"
            f"-{self.edge_prob:g}-{self.noise_ratio:.2f}"
        )


@dataclass(frozen=True)
class SsbmSample:
    graph: SignedGraph
    ground_truth: Partition
    noise_flags: np.ndarray

    def __post_init__(self):
        flags = np.asarray(self.noise_flags, dtype=bool).copy()
        flags.setflags(write=False)
        object.__setattr__(self, "noise_flags", flags)


def planted_assignment(num_nodes: int, num_communities: int) -> np.ndarray:
    """Block-contiguous community ids, sizes as equal as possible."""
    base, extra = divmod(num_nodes, num_communities)
    sizes = [base + 1 if k < extra else base for k in range(num_communities)]
    return np.repeat(np.arange(num_communities, dtype=np.int64), sizes)


def generate(params: SsbmParams) -> SsbmSample:
    """Draw one sample; fully reproducible from ``params.seed``."""
    n = params.num_nodes
    membership = planted_assignment(n, params.num_communities)
    rng = np.random.default_rng(params.seed)

    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < params.edge_prob
    u = iu[keep]
    v = ju[keep]
    clean = np.where(membership[u] == membership[v], 1, -1).astype(np.int64)
    flips = rng.random(u.size) < params.noise_ratio
    signs = np.where(flips, -clean, clean)

    graph = SignedGraph(n, zip(u.tolist(), v.tolist(), signs.tolist()))
    truth = Partition(assignment=membership, num_communities=params.num_communities)
    return SsbmSample(graph=graph, ground_truth=truth, noise_flags=flips)


def expected_edge_count(params: SsbmParams) -> float:
    n = params.num_nodes
    return params.edge_prob * n * (n - 1) / 2.0
