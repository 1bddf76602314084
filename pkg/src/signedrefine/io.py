"""Readers and writers for the plain-text graph, partition, and flag formats.

Edge-list format: one `u v s` triple per line, whitespace separated, with
s in {+1, -1, 1} (a bare `1` means +1). Lines starting with `#` are comments;
an optional `# nodes: N` header pins the node count, otherwise it is
max id + 1. Partition files hold `node community` lines, one per node.
Noise-flag files hold `u v flag` lines with flag in {0, 1}.
"""

import re

import numpy as np

from .exceptions import GraphParseError
from .graph import Partition, SignedGraph

_NODES_HEADER = re.compile(r"^#\s*nodes\s*:\s*(\d+)\s*$")


def _parse_int(tok, path, line_no, what):
    try:
        return int(tok)
    except ValueError:
        raise GraphParseError(f"{what} is not an integer: {tok!r}", line=line_no, path=path) from None


def read_edge_list(path) -> SignedGraph:
    """Load a signed graph from an edge-list file."""
    edges = []
    declared_nodes = None
    max_id = -1
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _NODES_HEADER.match(line)
                if m:
                    declared_nodes = int(m.group(1))
                continue
            parts = line.split()
            if len(parts) != 3:
                raise GraphParseError(
                    f"expected 'u v s', got {len(parts)} fields", line=line_no, path=path
                )
            u = _parse_int(parts[0], path, line_no, "node id")
            v = _parse_int(parts[1], path, line_no, "node id")
            s = _parse_int(parts[2], path, line_no, "sign")
            if u < 0 or v < 0:
                raise GraphParseError("node ids must be non-negative", line=line_no, path=path)
            if s not in (1, -1):
                raise GraphParseError(f"sign must be +1 or -1, got {s}", line=line_no, path=path)
            edges.append((u, v, s))
            max_id = max(max_id, u, v)

    num_nodes = declared_nodes if declared_nodes is not None else max_id + 1
    try:
        return SignedGraph(num_nodes, edges)
    except ValueError as exc:
        raise GraphParseError(str(exc), path=path) from exc


def write_edge_list(g: SignedGraph, path) -> None:
    """Write a graph in the edge-list format, with a node-count header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes: {g.num_nodes}\n")
        for u, v, s in g.edges:
            fh.write(f"{u} {v} {'+1' if s > 0 else '-1'}\n")


def read_partition(path, expected_nodes: int) -> Partition:
    """Load a partition file covering exactly ``expected_nodes`` nodes.

    Every node 0..expected_nodes-1 must appear exactly once; the community
    count is max community id + 1.
    """
    seen = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphParseError(
                    f"expected 'node community', got {len(parts)} fields",
                    line=line_no,
                    path=path,
                )
            node = _parse_int(parts[0], path, line_no, "node id")
            comm = _parse_int(parts[1], path, line_no, "community id")
            if comm < 0:
                raise GraphParseError("community ids must be non-negative", line=line_no, path=path)
            if node in seen:
                raise GraphParseError(f"duplicate node {node}", line=line_no, path=path)
            if not 0 <= node < expected_nodes:
                raise GraphParseError(
                    f"node {node} out of range [0, {expected_nodes})", line=line_no, path=path
                )
            seen[node] = comm

    missing = [v for v in range(expected_nodes) if v not in seen]
    if missing:
        raise GraphParseError(f"missing node {missing[0]}", path=path)
    assignment = np.asarray([seen[v] for v in range(expected_nodes)], dtype=np.int64)
    k = int(assignment.max()) + 1 if expected_nodes else 1
    return Partition(assignment=assignment, num_communities=k)


# A partition produced elsewhere is imported with the same rules.
import_partition = read_partition


def write_partition(p: Partition, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for node, comm in enumerate(p.assignment.tolist()):
            fh.write(f"{node} {comm}\n")


def read_noise_flags(path, g: SignedGraph) -> np.ndarray:
    """Load per-edge noise flags keyed by edge endpoints.

    The file must flag exactly the edges of ``g``.
    """
    flags = np.zeros(g.num_edges, dtype=bool)
    covered = np.zeros(g.num_edges, dtype=bool)
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise GraphParseError(
                    f"expected 'u v flag', got {len(parts)} fields", line=line_no, path=path
                )
            u = _parse_int(parts[0], path, line_no, "node id")
            v = _parse_int(parts[1], path, line_no, "node id")
            f = _parse_int(parts[2], path, line_no, "flag")
            if f not in (0, 1):
                raise GraphParseError(f"flag must be 0 or 1, got {f}", line=line_no, path=path)
            try:
                idx = g.edge_index(u, v)
            except KeyError:
                raise GraphParseError(f"edge ({u}, {v}) not in graph", line=line_no, path=path) from None
            if covered[idx]:
                raise GraphParseError(f"duplicate edge ({u}, {v})", line=line_no, path=path)
            covered[idx] = True
            flags[idx] = bool(f)
    if not covered.all():
        first = int(np.flatnonzero(~covered)[0])
        u, v, _ = g.edges[first]
        raise GraphParseError(f"missing flag for edge ({u}, {v})", path=path)
    return flags


def write_noise_flags(g: SignedGraph, flags, path) -> None:
    flags = np.asarray(flags, dtype=bool)
    if flags.shape != (g.num_edges,):
        raise ValueError("flags length must equal the edge count")
    with open(path, "w", encoding="utf-8") as fh:
        for (u, v, _), f in zip(g.edges, flags.tolist()):
            fh.write(f"{u} {v} {1 if f else 0}\n")
