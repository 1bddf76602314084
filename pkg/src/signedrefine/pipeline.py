"""Iterative refinement loop: structural pass, boundary pass, contrastive
training, clustering.

The structural pass scores nodes against the spectral embedding in every
round; the learned embeddings feed the clustering stage and are what the
loop ultimately returns. (Feeding each round's learned embeddings back into
the structural pass was tried and measurably hurts: the encoder conditions
on the current assignment, so its embeddings ratify that assignment and the
structural pass stops moving nodes.) Iteration still compounds because every
stage reads the partition the previous round produced. The clustering stage
warm-starts k-means from the current partition's centroids in embedding
space, so it adjusts labels where the embeddings disagree instead of
reclustering from scratch and discarding the earlier passes' work. When
contrastive learning is disabled there are no learned embeddings to cluster,
so the clustering stage is skipped and the boundary output stands as the
round result. K is taken from the initial partition and never changes.

Cluster labels coming out of k-means are arbitrary, so they are aligned to
the pre-clustering partition with a maximum-overlap matching before the
round's result is recorded; without that, assignment-stable convergence would
never fire.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._validation import check_count, check_same_nodes
from .boundary import BoundaryConfig, PurgeReport, refine_boundary
from .contrastive import ContrastiveConfig, train
from .graph import Partition, SignedGraph
from .kmeans import KmeansConfig, kmeans
from .metrics import MetricReport, ari
from .spectral import SpectralConfig, spectral_embed
from .structural import StructuralConfig, refine_structural

_CONVERGENCE_MODES = ("fixed-rounds", "assignment-stable")

# row order of the 2^3 ablation table: none, single steps, pairs, full
ABLATION_ROWS = (
    (False, False, False),
    (True, False, False),
    (False, True, False),
    (False, False, True),
    (True, True, False),
    (True, False, True),
    (False, True, True),
    (True, True, True),
)


@dataclass(frozen=True)
class RefineConfig:
    structural: StructuralConfig = field(default_factory=StructuralConfig)
    boundary: BoundaryConfig = field(default_factory=BoundaryConfig)
    contrastive: ContrastiveConfig = field(default_factory=ContrastiveConfig)
    kmeans: KmeansConfig = field(default_factory=lambda: KmeansConfig(k=1))
    max_rounds: int = 3
    convergence: str = "assignment-stable"
    enable_sr: bool = True
    enable_br: bool = True
    enable_cl: bool = True

    def __post_init__(self):
        check_count(self.max_rounds, "max_rounds")
        if self.convergence not in _CONVERGENCE_MODES:
            raise ValueError(
                f"convergence must be one of {_CONVERGENCE_MODES}, "
                f"got {self.convergence!r}"
            )
        if not (self.enable_sr or self.enable_br or self.enable_cl):
            raise ValueError("at least one refinement step must be enabled")


@dataclass(frozen=True)
class RoundRecord:
    round_index: int
    partition: Partition
    loss_trace: tuple
    ari: float
    purge: PurgeReport
    wall_time: float


@dataclass(frozen=True)
class RefineTrace:
    rounds: tuple

    def __len__(self):
        return len(self.rounds)


@dataclass(frozen=True)
class AblationRow:
    enable_sr: bool
    enable_br: bool
    enable_cl: bool
    report: MetricReport


def align_labels(p: Partition, reference: Partition) -> Partition:
    """Relabel p's communities to maximally overlap the reference partition."""
    if p.num_nodes != reference.num_nodes:
        raise ValueError("partitions must cover the same nodes")
    k = max(p.num_communities, reference.num_communities)
    overlap = np.zeros((k, k), dtype=np.int64)
    np.add.at(overlap, (p.assignment, reference.assignment), 1)
    rows, cols = linear_sum_assignment(-overlap)
    mapping = np.empty(k, dtype=np.int64)
    mapping[rows] = cols
    return Partition(assignment=mapping[p.assignment], num_communities=k)


def _run_stage(round_index, label, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        lead = str(exc.args[0]) if exc.args else exc.__class__.__name__
        exc.args = (f"[round {round_index}, stage {label}] {lead}",) + exc.args[1:]
        raise


def _partition_centers(points: np.ndarray, p: Partition) -> np.ndarray:
    """Mean embedding row per community; empty communities get zero rows."""
    centers = np.zeros((p.num_communities, points.shape[1]))
    np.add.at(centers, p.assignment, points)
    counts = p.community_sizes()
    occupied = counts > 0
    centers[occupied] /= counts[occupied, None]
    return centers


def refine(
    g: SignedGraph,
    initial: Partition,
    cfg: RefineConfig,
    ground_truth: Partition = None,
):
    """Run the refinement loop; returns (partition, embeddings, trace)."""
    check_same_nodes(g, initial)
    if ground_truth is not None:
        check_same_nodes(g, ground_truth)
    num_k = initial.num_communities

    # one regularized spectral embedding serves both the structural scores
    # and the encoder input; keeping a few modes beyond K and regularizing
    # the Laplacian stops the structural pass from moving nodes on instances
    # it should leave alone
    emb = spectral_embed(
        g,
        SpectralConfig(
            embed_dim=min(max(num_k, 8), g.num_nodes),
            laplacian_variant="reg",
        ),
    )
    base_features = emb

    current = initial
    learned = emb
    records = []
    for round_index in range(1, cfg.max_rounds + 1):
        previous = current
        started = time.perf_counter()
        loss_trace = ()
        purge = None
        if cfg.enable_sr:
            current, _ = _run_stage(
                round_index, "structural", refine_structural,
                g, current, emb, cfg.structural,
            )
        if cfg.enable_br:
            current, purge = _run_stage(
                round_index, "boundary", refine_boundary, g, current, cfg.boundary
            )
        if cfg.enable_cl:
            z, _, loss_trace = _run_stage(
                round_index, "contrastive", train,
                g, current, base_features, cfg.contrastive,
            )
            result = _run_stage(
                round_index, "clustering", kmeans,
                z, replace(cfg.kmeans, k=num_k),
                init_centers=_partition_centers(z, current),
            )
            current = align_labels(result.partition, current)
            learned = z
        records.append(
            RoundRecord(
                round_index=round_index,
                partition=current,
                loss_trace=loss_trace,
                ari=ari(current, ground_truth) if ground_truth is not None else None,
                purge=purge,
                wall_time=time.perf_counter() - started,
            )
        )
        if cfg.convergence == "assignment-stable" and current == previous:
            break
    return current, learned, RefineTrace(rounds=tuple(records))


def ablation_matrix(
    g: SignedGraph,
    initial: Partition,
    cfg: RefineConfig,
    ground_truth: Partition,
) -> list:
    """ARI of every on/off combination of the three steps, fixed row order.

    The all-off row is the untouched initial partition; refine() itself
    rejects that combination, so it is evaluated directly.
    """
    if ground_truth is None:
        raise ValueError("ablation requires a ground-truth partition")
    rows = []
    for sr, br, cl in ABLATION_ROWS:
        if not (sr or br or cl):
            final = initial
        else:
            run_cfg = replace(cfg, enable_sr=sr, enable_br=br, enable_cl=cl)
            final, _, _ = refine(g, initial, run_cfg, ground_truth)
        report = MetricReport(ari_values=[ari(final, ground_truth)])
        rows.append(AblationRow(enable_sr=sr, enable_br=br, enable_cl=cl, report=report))
    return rows
