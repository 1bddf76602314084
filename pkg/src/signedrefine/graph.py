"""Signed graph and partition primitives.

A :class:`SignedGraph` is an undirected graph whose edges carry a +1 or -1
label. Edges are stored once per unordered pair under a canonical
``(min, max)`` key and kept in sorted order, so iteration is deterministic
regardless of input order. A :class:`Partition` maps every node to one of
``K`` community ids. Both are immutable after construction and safe to share
across workers.
"""

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from ._validation import check_node_id, check_same_nodes


class Triangle(NamedTuple):
    """A 3-clique ``(a, b, c)`` with ``a < b < c`` and its edge signs.

    ``signs`` is ordered ``(s_ab, s_ac, s_bc)``.
    """

    nodes: tuple
    signs: tuple


class EdgeConsistency(NamedTuple):
    """Counts of unordered edges split by sign and community placement."""

    pos_intra: int
    neg_intra: int
    pos_inter: int
    neg_inter: int

    @property
    def total(self):
        return self.pos_intra + self.neg_intra + self.pos_inter + self.neg_inter


class SignedGraph:
    """Undirected signed graph over nodes ``0 .. num_nodes-1``.

    Parameters
    ----------
    num_nodes : int
        Number of nodes; isolated nodes are legal.
    edges : iterable of (u, v, sign)
        Unordered edges with sign +1 or -1. Self-loops and duplicate
        unordered pairs are rejected.
    """

    def __init__(self, num_nodes: int, edges: Iterable[tuple]):
        num_nodes = int(num_nodes)
        if num_nodes < 0:
            raise ValueError("num_nodes must be >= 0")
        self.num_nodes = num_nodes

        canon = []
        for u, v, s in edges:
            u, v, s = int(u), int(v), int(s)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise ValueError(f"edge ({u}, {v}) references node out of range")
            if s not in (1, -1):
                raise ValueError(f"edge ({u}, {v}) has invalid sign {s}")
            if u > v:
                u, v = v, u
            canon.append((u, v, s))
        canon.sort()
        for i in range(1, len(canon)):
            if canon[i][:2] == canon[i - 1][:2]:
                raise ValueError(f"duplicate edge ({canon[i][0]}, {canon[i][1]})")

        self.edges = tuple(canon)
        self.num_edges = len(canon)
        self._sign = {(u, v): s for u, v, s in canon}

        if canon:
            arr = np.asarray(canon, dtype=np.int64)
            self.edge_u = arr[:, 0].copy()
            self.edge_v = arr[:, 1].copy()
            self.edge_sign = arr[:, 2].copy()
        else:
            self.edge_u = np.empty(0, dtype=np.int64)
            self.edge_v = np.empty(0, dtype=np.int64)
            self.edge_sign = np.empty(0, dtype=np.int64)
        for a in (self.edge_u, self.edge_v, self.edge_sign):
            a.setflags(write=False)

        nbrs = [[] for _ in range(num_nodes)]
        for u, v, s in canon:
            nbrs[u].append((v, s))
            nbrs[v].append((u, s))
        self._nbr_ids = []
        self._nbr_signs = []
        for lst in nbrs:
            lst.sort()
            ids = np.asarray([x[0] for x in lst], dtype=np.int64)
            sgs = np.asarray([x[1] for x in lst], dtype=np.int64)
            ids.setflags(write=False)
            sgs.setflags(write=False)
            self._nbr_ids.append(ids)
            self._nbr_signs.append(sgs)

        self.degree = np.asarray([len(ids) for ids in self._nbr_ids], dtype=np.int64)
        self.degree.setflags(write=False)

    def neighbors(self, v: int) -> list:
        """Adjacency of ``v`` as ``[(neighbor, sign), ...]`` in ascending id order."""
        v = check_node_id(v, self.num_nodes)
        return list(zip(self._nbr_ids[v].tolist(), self._nbr_signs[v].tolist()))

    def neighbor_arrays(self, v: int):
        """Adjacency of ``v`` as a pair of read-only arrays (ids, signs)."""
        v = check_node_id(v, self.num_nodes)
        return self._nbr_ids[v], self._nbr_signs[v]

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self._sign

    def sign(self, u: int, v: int) -> int:
        """Sign of edge {u, v}; raises KeyError when the edge is absent."""
        if u > v:
            u, v = v, u
        return self._sign[(u, v)]

    def edge_index(self, u: int, v: int) -> int:
        """Position of edge {u, v} within :attr:`edges`."""
        if u > v:
            u, v = v, u
        lo = int(np.searchsorted(self.edge_u, u))
        hi = int(np.searchsorted(self.edge_u, u, side="right"))
        k = lo + int(np.searchsorted(self.edge_v[lo:hi], v))
        if k >= hi or self.edge_v[k] != v:
            raise KeyError(f"no edge ({u}, {v})")
        return k

    def triangles(self) -> list:
        """All 3-cliques, each once, in ascending ``(a, b, c)`` order.

        Uses sorted-adjacency intersection over canonical edges, so the
        output order is deterministic.
        """
        out = []
        for u, v, s_uv in self.edges:
            ids_u = self._nbr_ids[u]
            ids_v = self._nbr_ids[v]
            common = np.intersect1d(ids_u, ids_v, assume_unique=True)
            for w in common[common > v].tolist():
                out.append(
                    Triangle(
                        nodes=(u, v, w),
                        signs=(s_uv, self._sign[(u, w)], self._sign[(v, w)]),
                    )
                )
        return out

    def __repr__(self):
        return f"SignedGraph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to a community id in ``[0, K)``.

    Community ids need not all be occupied; ``occupancy()`` reports which are.
    """

    assignment: np.ndarray
    num_communities: int

    def __post_init__(self):
        arr = np.asarray(self.assignment, dtype=np.int64).copy()
        k = int(self.num_communities)
        if k < 1:
            raise ValueError("num_communities must be >= 1")
        if arr.ndim != 1:
            raise ValueError("assignment must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= k):
            raise ValueError("community ids must lie in [0, num_communities)")
        arr.setflags(write=False)
        object.__setattr__(self, "assignment", arr)
        object.__setattr__(self, "num_communities", k)

    @property
    def num_nodes(self):
        return int(self.assignment.size)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == k)

    def community_sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.num_communities)

    def occupancy(self) -> int:
        """Number of community ids with at least one member."""
        return int(np.count_nonzero(self.community_sizes()))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.num_communities == other.num_communities and np.array_equal(
            self.assignment, other.assignment
        )


def neighbors(g: SignedGraph, v: int) -> list:
    """Module-level alias for :meth:`SignedGraph.neighbors`."""
    return g.neighbors(v)


def enumerate_triangles(g: SignedGraph) -> list:
    """Module-level alias for :meth:`SignedGraph.triangles`."""
    return g.triangles()


def edge_consistency(g: SignedGraph, p: Partition) -> EdgeConsistency:
    """Count edges by sign and by whether both endpoints share a community."""
    check_same_nodes(g, p)
    if g.num_edges == 0:
        return EdgeConsistency(0, 0, 0, 0)
    a = p.assignment
    intra = a[g.edge_u] == a[g.edge_v]
    pos = g.edge_sign > 0
    return EdgeConsistency(
        pos_intra=int(np.count_nonzero(pos & intra)),
        neg_intra=int(np.count_nonzero(~pos & intra)),
        pos_inter=int(np.count_nonzero(pos & ~intra)),
        neg_inter=int(np.count_nonzero(~pos & ~intra)),
    )


def violating_edges(g: SignedGraph, p: Partition) -> list:
    """Indices of edges that are negative inside a community or positive across.

    These are the edges inconsistent with the usual signed-community reading
    (positive within, negative between).
    """
    check_same_nodes(g, p)
    if g.num_edges == 0:
        return []
    a = p.assignment
    intra = a[g.edge_u] == a[g.edge_v]
    pos = g.edge_sign > 0
    bad = (intra & ~pos) | (~intra & pos)
    return np.flatnonzero(bad).tolist()
