"""Community detection post-processing for signed networks.

The package refines an initial community partition of a signed graph through
three steps (structural reassignment, balance-theory boundary purging, and
two-view contrastive embedding learning followed by k-means), and ships the
surrounding tooling: a planted-community benchmark generator, a spectral
baseline detector, metrics, and a CSV experiment harness.
"""

from .boundary import (
    BoundaryConfig,
    PurgeReport,
    plus_triangle_gain,
    purge_likelihood,
    refine_boundary,
    triangle_purge_candidates,
)
from .contrastive import (
    ContrastiveConfig,
    EncoderParams,
    View,
    ViewEmbeddings,
    augment,
    community_loss,
    encode,
    init_params,
    loss_and_gradients,
    node_loss,
    total_loss,
    train,
)
from .estimators import CommunityRefiner, SpectralCommunityClusterer, as_signed_graph
from .exceptions import GraphParseError, NumericError, UndefinedMetricError
from .experiments import (
    ExperimentResult,
    ExperimentSpec,
    compare,
    compare_files,
    noise_sweep,
    run_experiment,
)
from .experiments import ablation as ablation_experiment
from .graph import (
    EdgeConsistency,
    Partition,
    SignedGraph,
    Triangle,
    edge_consistency,
    enumerate_triangles,
    neighbors,
    violating_edges,
)
from .io import (
    import_partition,
    read_edge_list,
    read_noise_flags,
    read_partition,
    write_edge_list,
    write_noise_flags,
    write_partition,
)
from .kmeans import KmeansConfig, KmeansResult, kmeans
from .metrics import (
    MetricReport,
    aggregate,
    ari,
    misaligned_ratio,
    modularity,
)
from .pipeline import (
    ABLATION_ROWS,
    AblationRow,
    RefineConfig,
    RefineTrace,
    RoundRecord,
    ablation_matrix,
    align_labels,
    refine,
)
from .config import load_refine_config, load_toml, refine_config_from_mapping
from .spectral import (
    SpectralConfig,
    baseline_detect,
    eigenpairs,
    signed_laplacian,
    spectral_embed,
)
from .ssbm import SsbmParams, SsbmSample, expected_edge_count, generate, planted_assignment
from .structural import (
    ScoreTable,
    StructuralConfig,
    c_score,
    centroids,
    n_score,
    refine_structural,
)

__version__ = "0.1.0"

__all__ = [
    "ABLATION_ROWS",
    "AblationRow",
    "BoundaryConfig",
    "CommunityRefiner",
    "ContrastiveConfig",
    "EdgeConsistency",
    "EncoderParams",
    "ExperimentResult",
    "ExperimentSpec",
    "GraphParseError",
    "KmeansConfig",
    "KmeansResult",
    "MetricReport",
    "NumericError",
    "Partition",
    "PurgeReport",
    "RefineConfig",
    "RefineTrace",
    "RoundRecord",
    "ScoreTable",
    "SignedGraph",
    "SpectralCommunityClusterer",
    "SpectralConfig",
    "SsbmParams",
    "SsbmSample",
    "StructuralConfig",
    "Triangle",
    "UndefinedMetricError",
    "View",
    "ViewEmbeddings",
    "ablation_experiment",
    "ablation_matrix",
    "aggregate",
    "align_labels",
    "ari",
    "as_signed_graph",
    "augment",
    "baseline_detect",
    "c_score",
    "centroids",
    "community_loss",
    "compare",
    "compare_files",
    "edge_consistency",
    "eigenpairs",
    "encode",
    "enumerate_triangles",
    "expected_edge_count",
    "generate",
    "import_partition",
    "init_params",
    "kmeans",
    "load_refine_config",
    "load_toml",
    "loss_and_gradients",
    "misaligned_ratio",
    "modularity",
    "n_score",
    "neighbors",
    "node_loss",
    "noise_sweep",
    "planted_assignment",
    "plus_triangle_gain",
    "purge_likelihood",
    "read_edge_list",
    "read_noise_flags",
    "read_partition",
    "refine",
    "refine_boundary",
    "refine_config_from_mapping",
    "refine_structural",
    "run_experiment",
    "signed_laplacian",
    "spectral_embed",
    "total_loss",
    "train",
    "triangle_purge_candidates",
    "violating_edges",
    "write_edge_list",
    "write_noise_flags",
    "write_partition",
]
