"""Two-view contrastive embedding learning over a signed graph.

Each epoch draws two stochastic views (feature masking + pooling-membership
masking), encodes both with a two-stage aggregation encoder, and minimizes a
weighted sum of node-level and community-level InfoNCE terms by full-batch
gradient descent. All gradients are computed analytically in closed form; a
finite-difference oracle in the test suite checks every parameter entry.

Encoder, per view:
  stage 1:  t_i = x_i + mean over same-community neighbors j of s_ij * x_j
            h_i = relu(W1 t_i + b1)
  stage 2:  u_k = mean of h_i over the community's pooling-included members
            z_i = relu(W2 [h_i ; u_{a(i)}] + b2)
Node rows Z and community rows Y = u are L2-normalized; rows with norm under
the epsilon floor are pinned to the first basis vector (zero gradient there).
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_count, check_matrix, check_positive
from .exceptions import NumericError
from .graph import Partition, SignedGraph

EPS = 1e-12


@dataclass(frozen=True)
class ContrastiveConfig:
    embed_dim: int = 32
    tau_n: float = 0.5
    tau_c: float = 0.5
    omega_n: float = 1.0
    omega_c: float = 1.0
    feat_mask_prob: float = 0.2
    comm_mask_prob: float = 0.2
    epochs: int = 100
    learning_rate: float = 0.05
    rng_seed: int = 0

    def __post_init__(self):
        check_count(self.embed_dim, "embed_dim")
        check_positive(self.tau_n, "tau_n")
        check_positive(self.tau_c, "tau_c")
        check_count(self.epochs, "epochs", minimum=0)
        check_positive(self.learning_rate, "learning_rate")
        if self.omega_n < 0 or self.omega_c < 0:
            raise ValueError("omega_n and omega_c must be >= 0")
        if self.omega_n + self.omega_c <= 0:
            raise ValueError("omega_n + omega_c must be > 0")
        for name in ("feat_mask_prob", "comm_mask_prob"):
            val = getattr(self, name)
            if not 0.0 <= val < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {val}")


@dataclass(frozen=True)
class View:
    features: np.ndarray
    pool_mask: np.ndarray


@dataclass(frozen=True)
class EncoderParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def entries(self):
        return (("w1", self.w1), ("b1", self.b1), ("w2", self.w2), ("b2", self.b2))


@dataclass(frozen=True)
class ViewEmbeddings:
    Z: np.ndarray
    Y: np.ndarray


def init_params(num_features: int, cfg: ContrastiveConfig) -> EncoderParams:
    """Uniform Glorot-style init, reproducible from cfg.rng_seed.

    Biases are drawn from the same per-layer ranges as the weights, not
    zeroed: with zero biases some relu rows start all-negative and never
    recover, and a node whose first-layer output is mostly dead turns into
    a k-means outlier after normalization.
    """
    check_count(num_features, "num_features")
    d = cfg.embed_dim
    rng = np.random.default_rng([cfg.rng_seed])
    limit1 = np.sqrt(6.0 / (num_features + d))
    w1 = rng.uniform(-limit1, limit1, size=(num_features, d))
    b1 = rng.uniform(-limit1, limit1, size=d)
    limit2 = np.sqrt(6.0 / (2 * d + d))
    w2 = rng.uniform(-limit2, limit2, size=(2 * d, d))
    b2 = rng.uniform(-limit2, limit2, size=d)
    return EncoderParams(w1=w1, b1=b1, w2=w2, b2=b2)


def augment(
    g: SignedGraph,
    p: Partition,
    base_features: np.ndarray,
    cfg: ContrastiveConfig,
    view_index: int,
    epoch: int = 0,
) -> View:
    """Randomly mask feature entries and pooling membership for one view.

    The RNG substream is keyed by (rng_seed, epoch, view_index) so the two
    views of one epoch are independent and every draw is reproducible. A
    community whose members were all masked out of pooling keeps its single
    highest-degree member (ties to the lowest id).
    """
    base_features = check_matrix(base_features, "base_features")
    if base_features.shape[0] != g.num_nodes:
        raise ValueError(
            f"base_features has {base_features.shape[0]} rows, "
            f"graph has {g.num_nodes} nodes"
        )
    if view_index not in (1, 2):
        raise ValueError(f"view_index must be 1 or 2, got {view_index}")
    rng = np.random.default_rng([cfg.rng_seed, int(epoch), view_index])
    drop = rng.random(base_features.shape) < cfg.feat_mask_prob
    features = np.where(drop, 0.0, base_features)
    pool_mask = rng.random(g.num_nodes) >= cfg.comm_mask_prob
    for k in range(p.num_communities):
        members = p.members(k)
        if members.size and not pool_mask[members].any():
            keep = members[int(np.argmax(g.degree[members]))]
            pool_mask[keep] = True
    return View(features=features, pool_mask=pool_mask)


def _normalize_rows(raw: np.ndarray):
    """Unit rows plus the floor flag; floored rows become the first basis vector."""
    norms = np.linalg.norm(raw, axis=1)
    floored = norms <= EPS
    out = np.empty_like(raw)
    safe = ~floored
    out[safe] = raw[safe] / norms[safe, None]
    out[floored] = 0.0
    out[floored, 0] = 1.0
    return out, norms, floored


def _forward(g: SignedGraph, p: Partition, view: View, params: EncoderParams):
    a = p.assignment
    x = view.features
    n = g.num_nodes

    msum = np.zeros_like(x)
    cnt = np.zeros(n)
    if g.num_edges:
        intra = a[g.edge_u] == a[g.edge_v]
        eu, ev = g.edge_u[intra], g.edge_v[intra]
        es = g.edge_sign[intra].astype(float)
        np.add.at(msum, eu, es[:, None] * x[ev])
        np.add.at(msum, ev, es[:, None] * x[eu])
        np.add.at(cnt, eu, 1.0)
        np.add.at(cnt, ev, 1.0)
    m = np.zeros_like(x)
    has = cnt > 0
    m[has] = msum[has] / cnt[has, None]

    t = x + m
    a1 = t @ params.w1 + params.b1
    h = np.maximum(a1, 0.0)

    num_k = p.num_communities
    d = params.w1.shape[1]
    pooled = view.pool_mask.astype(bool)
    pool_counts = np.bincount(a[pooled], minlength=num_k).astype(float)
    usum = np.zeros((num_k, d))
    np.add.at(usum, a[pooled], h[pooled])
    u = np.zeros((num_k, d))
    occ = pool_counts > 0
    u[occ] = usum[occ] / pool_counts[occ, None]

    b = np.concatenate([h, u[a]], axis=1)
    a2 = b @ params.w2 + params.b2
    r = np.maximum(a2, 0.0)

    z, z_norms, z_floored = _normalize_rows(r)
    y, y_norms, y_floored = _normalize_rows(u)
    return {
        "t": t,
        "a1": a1,
        "h": h,
        "u": u,
        "pool_counts": pool_counts,
        "pooled": pooled,
        "b": b,
        "a2": a2,
        "z": z,
        "z_norms": z_norms,
        "z_floored": z_floored,
        "y": y,
        "y_norms": y_norms,
        "y_floored": y_floored,
    }


def encode(
    g: SignedGraph, p: Partition, view: View, params: EncoderParams
) -> ViewEmbeddings:
    """Node and community embeddings of one view; all rows unit-norm."""
    if view.features.shape[0] != g.num_nodes:
        raise ValueError("view features must have one row per node")
    if view.features.shape[1] != params.w1.shape[0]:
        raise ValueError(
            f"feature width {view.features.shape[1]} does not match "
            f"encoder input width {params.w1.shape[0]}"
        )
    cache = _forward(g, p, view, params)
    return ViewEmbeddings(Z=cache["z"], Y=cache["y"])


def _logsumexp_rows(s: np.ndarray) -> np.ndarray:
    top = s.max(axis=1, keepdims=True)
    return (top + np.log(np.exp(s - top).sum(axis=1, keepdims=True)))[:, 0]


def _infonce(e1: np.ndarray, e2: np.ndarray, tau: float):
    """Symmetrized InfoNCE over unit rows; returns (loss, gradient wrt S)."""
    m = e1.shape[0]
    s = (e1 @ e2.T) / tau
    diag = np.diagonal(s)
    loss = float(
        (_logsumexp_rows(s).sum() + _logsumexp_rows(s.T).sum() - 2.0 * diag.sum())
        / (2.0 * m)
    )
    p_row = np.exp(s - s.max(axis=1, keepdims=True))
    p_row /= p_row.sum(axis=1, keepdims=True)
    p_col = np.exp(s - s.max(axis=0, keepdims=True))
    p_col /= p_col.sum(axis=0, keepdims=True)
    grad_s = (p_row + p_col - 2.0 * np.eye(m)) / (2.0 * m)
    return loss, grad_s


def _check_pair(e1, e2, what):
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    if e1.ndim != 2 or e1.shape != e2.shape:
        raise ValueError(f"{what} views must share one 2-d shape")
    return e1, e2


def node_loss(z1: np.ndarray, z2: np.ndarray, tau_n: float) -> float:
    """Cross-view InfoNCE over nodes, averaged over both directions."""
    z1, z2 = _check_pair(z1, z2, "node")
    return _infonce(z1, z2, check_positive(tau_n, "tau_n"))[0]


def community_loss(y1: np.ndarray, y2: np.ndarray, tau_c: float) -> float:
    """Cross-view InfoNCE over communities, averaged over both directions."""
    y1, y2 = _check_pair(y1, y2, "community")
    return _infonce(y1, y2, check_positive(tau_c, "tau_c"))[0]


def total_loss(l_n: float, l_c: float, cfg: ContrastiveConfig) -> float:
    return cfg.omega_n * float(l_n) + cfg.omega_c * float(l_c)


def _backward_view(g, p, cache, params, d_z, d_y):
    a = p.assignment
    d = params.w1.shape[1]

    # row normalization of Z
    z, norms, floored = cache["z"], cache["z_norms"], cache["z_floored"]
    d_r = np.zeros_like(d_z)
    safe = ~floored
    inner = (z[safe] * d_z[safe]).sum(axis=1, keepdims=True)
    d_r[safe] = (d_z[safe] - z[safe] * inner) / norms[safe, None]

    d_a2 = d_r * (cache["a2"] > 0)
    d_w2 = cache["b"].T @ d_a2
    d_b2 = d_a2.sum(axis=0)
    d_b = d_a2 @ params.w2.T
    d_h = d_b[:, :d].copy()
    d_u_assign = d_b[:, d:]

    # community embeddings receive gradient both from Y and from stage 2
    y, y_norms, y_floored = cache["y"], cache["y_norms"], cache["y_floored"]
    d_u = np.zeros_like(cache["u"])
    y_safe = ~y_floored
    inner_y = (y[y_safe] * d_y[y_safe]).sum(axis=1, keepdims=True)
    d_u[y_safe] = (d_y[y_safe] - y[y_safe] * inner_y) / y_norms[y_safe, None]
    np.add.at(d_u, a, d_u_assign)

    # mean pooling
    counts = cache["pool_counts"]
    pooled = cache["pooled"]
    scale = np.zeros_like(counts)
    occ = counts > 0
    scale[occ] = 1.0 / counts[occ]
    d_h[pooled] += d_u[a[pooled]] * scale[a[pooled], None]

    d_a1 = d_h * (cache["a1"] > 0)
    d_w1 = cache["t"].T @ d_a1
    d_b1 = d_a1.sum(axis=0)
    return EncoderParams(w1=d_w1, b1=d_b1, w2=d_w2, b2=d_b2)


def loss_and_gradients(
    g: SignedGraph,
    p: Partition,
    view1: View,
    view2: View,
    params: EncoderParams,
    cfg: ContrastiveConfig,
):
    """Total loss of one epoch plus analytic parameter gradients.

    Returns (total, node_term, community_term, grads) where grads is an
    EncoderParams holding dL/d(parameter) for the weighted total.
    """
    c1 = _forward(g, p, view1, params)
    c2 = _forward(g, p, view2, params)

    l_n, gs_n = _infonce(c1["z"], c2["z"], cfg.tau_n)
    l_c, gs_c = _infonce(c1["y"], c2["y"], cfg.tau_c)
    total = total_loss(l_n, l_c, cfg)

    d_z1 = cfg.omega_n * (gs_n @ c2["z"]) / cfg.tau_n
    d_z2 = cfg.omega_n * (gs_n.T @ c1["z"]) / cfg.tau_n
    d_y1 = cfg.omega_c * (gs_c @ c2["y"]) / cfg.tau_c
    d_y2 = cfg.omega_c * (gs_c.T @ c1["y"]) / cfg.tau_c

    g1 = _backward_view(g, p, c1, params, d_z1, d_y1)
    g2 = _backward_view(g, p, c2, params, d_z2, d_y2)
    grads = EncoderParams(
        w1=g1.w1 + g2.w1,
        b1=g1.b1 + g2.b1,
        w2=g1.w2 + g2.w2,
        b2=g1.b2 + g2.b2,
    )
    return total, l_n, l_c, grads


def train(
    g: SignedGraph,
    p: Partition,
    base_features: np.ndarray,
    cfg: ContrastiveConfig,
):
    """Gradient-descend the two-view objective; returns (Z, params, loss_trace).

    The returned Z is the encoding of the unmasked input under the trained
    parameters, not of the final epoch's stochastic views.
    """
    base_features = check_matrix(base_features, "base_features")
    params = init_params(base_features.shape[1], cfg)
    lr = cfg.learning_rate
    trace = []
    for epoch in range(cfg.epochs):
        v1 = augment(g, p, base_features, cfg, view_index=1, epoch=epoch)
        v2 = augment(g, p, base_features, cfg, view_index=2, epoch=epoch)
        total, _, _, grads = loss_and_gradients(g, p, v1, v2, params, cfg)
        if not np.isfinite(total):
            raise NumericError(f"non-finite loss at epoch {epoch}")
        trace.append(total)
        params = EncoderParams(
            w1=params.w1 - lr * grads.w1,
            b1=params.b1 - lr * grads.b1,
            w2=params.w2 - lr * grads.w2,
            b2=params.b2 - lr * grads.b2,
        )
    full = View(
        features=base_features,
        pool_mask=np.ones(g.num_nodes, dtype=bool),
    )
    z_final = encode(g, p, full, params).Z
    return z_final, params, tuple(trace)
