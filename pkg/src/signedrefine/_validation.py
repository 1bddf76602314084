"""Small input-validation helpers shared by the public API."""

import numpy as np


def check_node_id(v, num_nodes, name="node id"):
    v = int(v)
    if not 0 <= v < num_nodes:
        raise ValueError(f"{name} {v} out of range [0, {num_nodes})")
    return v


def check_probability(x, name):
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {x}")
    return x


def check_positive(x, name):
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"{name} must be > 0, got {x}")
    return x


def check_count(x, name, minimum=1):
    x = int(x)
    if x < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {x}")
    return x


def check_same_nodes(graph, partition):
    if partition.num_nodes != graph.num_nodes:
        raise ValueError(
            f"partition covers {partition.num_nodes} nodes, "
            f"graph has {graph.num_nodes}"
        )


def check_matrix(x, name, ndim=2):
    x = np.asarray(x, dtype=float)
    if x.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x
