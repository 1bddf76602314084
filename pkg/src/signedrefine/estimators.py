"""scikit-learn style estimators wrapping detection and refinement.

Both estimators accept either a :class:`SignedGraph` or a plain (m, 3) array
of ``(u, v, sign)`` edge rows, follow the fit/fit_predict protocol, and keep
constructor arguments untouched so ``get_params``/``set_params`` round-trip.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .graph import Partition, SignedGraph
from .boundary import BoundaryConfig
from .contrastive import ContrastiveConfig
from .kmeans import KmeansConfig
from .pipeline import RefineConfig, refine
from .spectral import SpectralConfig, baseline_detect
from .structural import StructuralConfig


def as_signed_graph(X, num_nodes=None) -> SignedGraph:
    """Coerce estimator input into a SignedGraph.

    Accepts a SignedGraph (returned unchanged, num_nodes must then be None or
    match) or an (m, 3) integer array of (u, v, sign) rows. Without an
    explicit num_nodes the node count is inferred as max id + 1.
    """
    if isinstance(X, SignedGraph):
        if num_nodes is not None and num_nodes != X.num_nodes:
            raise ValueError(
                f"num_nodes={num_nodes} does not match graph with "
                f"{X.num_nodes} nodes"
            )
        return X
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(
            f"expected a SignedGraph or an (m, 3) edge array, got shape {arr.shape}"
        )
    if not np.all(arr == arr.astype(np.int64)):
        raise ValueError("edge array entries must be integers")
    arr = arr.astype(np.int64)
    if num_nodes is None:
        num_nodes = int(arr[:, :2].max()) + 1 if arr.size else 0
    return SignedGraph(num_nodes=num_nodes, edges=[tuple(row) for row in arr])


class SpectralCommunityClusterer(ClusterMixin, BaseEstimator):
    """Signed-Laplacian spectral embedding followed by k-means.

    Parameters
    ----------
    n_clusters : int, default=2
        Number of communities.
    laplacian : {"reg", "sym", "plain"}, default="reg"
        Laplacian normalization variant.
    num_nodes : int or None, default=None
        Node count when fitting from an edge array; inferred if omitted.
    random_state : int, default=0
        Seed for the k-means stage.
    """

    def __init__(self, n_clusters=2, laplacian="reg", num_nodes=None, random_state=0):
        self.n_clusters = n_clusters
        self.laplacian = laplacian
        self.num_nodes = num_nodes
        self.random_state = random_state

    def fit(self, X, y=None):
        g = as_signed_graph(X, self.num_nodes)
        cfg = SpectralConfig(
            embed_dim=self.n_clusters, laplacian_variant=self.laplacian
        )
        part = baseline_detect(g, self.n_clusters, cfg, seed=self.random_state)
        self.graph_ = g
        self.partition_ = part
        self.labels_ = part.assignment.copy()
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class CommunityRefiner(ClusterMixin, BaseEstimator):
    """Full refinement pipeline behind a flat scikit-learn parameter surface.

    When ``initial_labels`` is None the built-in spectral detector provides
    the starting partition with ``n_clusters`` communities; otherwise the
    given labels are refined and ``n_clusters`` is ignored.

    ``random_state`` seeds every stochastic stage (structural sampling,
    view augmentation, k-means restarts).
    """

    def __init__(
        self,
        n_clusters=2,
        initial_labels=None,
        alpha=0.5,
        softmax_temp=0.1,
        sr_mode="argmax",
        purge_threshold=0.5,
        max_candidates_fraction=1.0,
        embed_dim=32,
        tau_n=0.5,
        tau_c=0.5,
        omega_n=1.0,
        omega_c=1.0,
        feat_mask_prob=0.2,
        comm_mask_prob=0.2,
        epochs=100,
        learning_rate=0.05,
        max_rounds=3,
        convergence="assignment-stable",
        enable_sr=True,
        enable_br=True,
        enable_cl=True,
        num_nodes=None,
        random_state=0,
    ):
        self.n_clusters = n_clusters
        self.initial_labels = initial_labels
        self.alpha = alpha
        self.softmax_temp = softmax_temp
        self.sr_mode = sr_mode
        self.purge_threshold = purge_threshold
        self.max_candidates_fraction = max_candidates_fraction
        self.embed_dim = embed_dim
        self.tau_n = tau_n
        self.tau_c = tau_c
        self.omega_n = omega_n
        self.omega_c = omega_c
        self.feat_mask_prob = feat_mask_prob
        self.comm_mask_prob = comm_mask_prob
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.max_rounds = max_rounds
        self.convergence = convergence
        self.enable_sr = enable_sr
        self.enable_br = enable_br
        self.enable_cl = enable_cl
        self.num_nodes = num_nodes
        self.random_state = random_state

    def _refine_config(self):
        return RefineConfig(
            structural=StructuralConfig(
                alpha=self.alpha,
                softmax_temp=self.softmax_temp,
                mode=self.sr_mode,
                rng_seed=self.random_state,
            ),
            boundary=BoundaryConfig(
                purge_threshold=self.purge_threshold,
                max_candidates_fraction=self.max_candidates_fraction,
            ),
            contrastive=ContrastiveConfig(
                embed_dim=self.embed_dim,
                tau_n=self.tau_n,
                tau_c=self.tau_c,
                omega_n=self.omega_n,
                omega_c=self.omega_c,
                feat_mask_prob=self.feat_mask_prob,
                comm_mask_prob=self.comm_mask_prob,
                epochs=self.epochs,
                learning_rate=self.learning_rate,
                rng_seed=self.random_state,
            ),
            kmeans=KmeansConfig(k=1, seed=self.random_state),
            max_rounds=self.max_rounds,
            convergence=self.convergence,
            enable_sr=self.enable_sr,
            enable_br=self.enable_br,
            enable_cl=self.enable_cl,
        )

    def fit(self, X, y=None):
        g = as_signed_graph(X, self.num_nodes)
        if self.initial_labels is not None:
            labels = np.asarray(self.initial_labels, dtype=np.int64)
            if labels.shape != (g.num_nodes,):
                raise ValueError(
                    f"initial_labels must have shape ({g.num_nodes},), "
                    f"got {labels.shape}"
                )
            initial = Partition(
                assignment=labels, num_communities=int(labels.max()) + 1
            )
        else:
            initial = baseline_detect(g, self.n_clusters, seed=self.random_state)
        final, emb, trace = refine(g, initial, self._refine_config())
        self.graph_ = g
        self.initial_partition_ = initial
        self.partition_ = final
        self.labels_ = final.assignment.copy()
        self.embedding_ = emb
        self.trace_ = trace
        self.n_rounds_ = len(trace)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
