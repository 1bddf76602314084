"""Lloyd k-means with kmeans++ or Forgy seeding and best-of-restarts.

Distances are squared Euclidean, which on unit-norm rows induces the same
ordering as cosine similarity. Empty clusters are repaired by stealing the
point currently farthest from its assigned centroid. Everything is driven
by a seeded PCG64 generator, so results are reproducible.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_count, check_matrix, check_positive
from .graph import Partition


@dataclass(frozen=True)
class KmeansConfig:
    k: int
    max_iters: int = 100
    tol: float = 1e-6
    init: str = "kmeanspp"
    seed: int = 0
    restarts: int = 5

    def __post_init__(self):
        check_count(self.k, "k")
        check_count(self.max_iters, "max_iters")
        check_positive(self.tol, "tol")
        check_count(self.restarts, "restarts")
        if self.init not in ("kmeanspp", "forgy"):
            raise ValueError(f"init must be 'kmeanspp' or 'forgy', got {self.init!r}")


@dataclass(frozen=True)
class KmeansResult:
    partition: Partition
    inertia: float
    n_iters: int
    inertia_trace: tuple


def _sq_dists(points, centroids):
    # (n, k) matrix of squared Euclidean distances
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _init_kmeanspp(points, k, rng):
    n = points.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    d2 = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining mass at already-chosen points; pick an unused index
            used = np.zeros(n, dtype=bool)
            used[chosen[:i]] = True
            candidates = np.flatnonzero(~used)
            chosen[i] = candidates[rng.integers(candidates.size)] if candidates.size else chosen[0]
        else:
            chosen[i] = rng.choice(n, p=d2 / total)
        d2 = np.minimum(d2, np.sum((points - points[chosen[i]]) ** 2, axis=1))
    return points[chosen].copy()


def _init_forgy(points, k, rng):
    idx = rng.choice(points.shape[0], size=k, replace=False)
    return points[idx].copy()


def _repair_empty(points, labels, centroids, dists):
    # Steal the point farthest from its centroid for each empty cluster.
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    own = dists[np.arange(points.shape[0]), labels].copy()
    for empty in np.flatnonzero(counts == 0):
        donor = int(np.argmax(own))
        labels[donor] = empty
        centroids[empty] = points[donor]
        own[donor] = -np.inf
        counts[empty] += 1
    return labels, centroids


def _lloyd(points, k, cfg, rng, centers=None):
    if centers is None:
        init = _init_kmeanspp if cfg.init == "kmeanspp" else _init_forgy
        centroids = init(points, k, rng)
    else:
        centroids = centers.copy()
    labels = np.zeros(points.shape[0], dtype=np.int64)
    trace = []
    n_iters = 0
    for n_iters in range(1, cfg.max_iters + 1):
        dists = _sq_dists(points, centroids)
        labels = np.argmin(dists, axis=1)
        labels, centroids = _repair_empty(points, labels, centroids, dists)
        trace.append(float(_sq_dists(points, centroids)[np.arange(points.shape[0]), labels].sum()))
        new_centroids = centroids.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new_centroids[j] = points[members].mean(axis=0)
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < cfg.tol:
            break
    inertia = float(_sq_dists(points, centroids)[np.arange(points.shape[0]), labels].sum())
    trace.append(inertia)
    return labels, inertia, n_iters, tuple(trace)


def kmeans(points, cfg: KmeansConfig, init_centers=None) -> KmeansResult:
    """Cluster rows of ``points`` into ``cfg.k`` groups, keeping the best restart.

    When ``init_centers`` (a k x d matrix) is given, Lloyd runs once from
    those centers and the configured init and restart count are ignored;
    the result is then deterministic with no generator draws. Callers use
    this to refine an existing grouping instead of reclustering from
    scratch.
    """
    points = check_matrix(points, "points")
    n = points.shape[0]
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the number of points {n}")
    if init_centers is not None:
        init_centers = check_matrix(init_centers, "init_centers")
        if init_centers.shape != (cfg.k, points.shape[1]):
            raise ValueError(
                f"init_centers must have shape ({cfg.k}, {points.shape[1]}), "
                f"got {init_centers.shape}"
            )
        labels, inertia, n_iters, trace = _lloyd(
            points, cfg.k, cfg, None, centers=init_centers
        )
        part = Partition(assignment=labels, num_communities=cfg.k)
        return KmeansResult(
            partition=part, inertia=inertia, n_iters=n_iters, inertia_trace=trace
        )
    rng = np.random.default_rng(cfg.seed)
    best = None
    for _ in range(cfg.restarts):
        labels, inertia, n_iters, trace = _lloyd(points, cfg.k, cfg, rng)
        if best is None or inertia < best[1]:
            best = (labels, inertia, n_iters, trace)
    labels, inertia, n_iters, trace = best
    part = Partition(assignment=labels, num_communities=cfg.k)
    return KmeansResult(partition=part, inertia=inertia, n_iters=n_iters, inertia_trace=trace)
