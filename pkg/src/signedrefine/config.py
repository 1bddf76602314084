"""TOML configuration loading for the refinement pipeline and experiments.

A config file holds up to six sections; every key is optional and falls back
to the library default:

    [structural]   alpha, softmax_temp, sr_mode, rng_seed
    [boundary]     purge_threshold, max_candidates_fraction
    [contrastive]  embed_dim, tau_n, tau_c, omega_n, omega_c,
                   feat_mask_prob, comm_mask_prob, epochs, learning_rate,
                   rng_seed
    [kmeans]       max_iters, tol, init, seed, restarts
    [pipeline]     max_rounds, convergence, enable_sr, enable_br, enable_cl
    [experiment]   num_nodes, num_communities, edge_prob, noise, seeds,
                   output_dir (list-valued keys accept scalars too)

Unknown sections or keys are rejected so typos fail loudly. CLI flags are
merged on top of the file through :func:`merge_mapping`.
"""

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .boundary import BoundaryConfig
from .contrastive import ContrastiveConfig
from .kmeans import KmeansConfig
from .pipeline import RefineConfig
from .structural import StructuralConfig

_SECTION_KEYS = {
    "structural": {"alpha", "softmax_temp", "sr_mode", "rng_seed"},
    "boundary": {"purge_threshold", "max_candidates_fraction"},
    "contrastive": {
        "embed_dim",
        "tau_n",
        "tau_c",
        "omega_n",
        "omega_c",
        "feat_mask_prob",
        "comm_mask_prob",
        "epochs",
        "learning_rate",
        "rng_seed",
    },
    "kmeans": {"max_iters", "tol", "init", "seed", "restarts"},
    "pipeline": {
        "max_rounds",
        "convergence",
        "enable_sr",
        "enable_br",
        "enable_cl",
    },
    "experiment": {
        "num_nodes",
        "num_communities",
        "edge_prob",
        "noise",
        "seeds",
        "output_dir",
    },
}


def load_toml(path) -> dict:
    """Parse a TOML file into a mapping, validating sections and keys."""
    with open(path, "rb") as fh:
        try:
            mapping = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ValueError(f"{path}: invalid config: {exc}") from exc
    validate_mapping(mapping, where=str(path))
    return mapping


def validate_mapping(mapping: dict, where: str = "config"):
    for section, body in mapping.items():
        if section not in _SECTION_KEYS:
            raise ValueError(f"{where}: unknown section [{section}]")
        if not isinstance(body, dict):
            raise ValueError(f"{where}: section [{section}] must be a table")
        stray = set(body) - _SECTION_KEYS[section]
        if stray:
            raise ValueError(
                f"{where}: unknown key(s) in [{section}]: {', '.join(sorted(stray))}"
            )


def merge_mapping(base: dict, updates: dict) -> dict:
    """Two-level merge of config mappings; update values win."""
    merged = {section: dict(body) for section, body in base.items()}
    for section, body in updates.items():
        merged.setdefault(section, {}).update(body)
    return merged


def refine_config_from_mapping(mapping: dict) -> RefineConfig:
    """Build a RefineConfig from a validated mapping; missing keys default."""
    validate_mapping(mapping)
    structural = dict(mapping.get("structural", {}))
    if "sr_mode" in structural:
        structural["mode"] = structural.pop("sr_mode")
    kmeans_body = dict(mapping.get("kmeans", {}))
    kmeans_body.setdefault("k", 1)  # replaced by the data's K inside refine()
    return RefineConfig(
        structural=StructuralConfig(**structural),
        boundary=BoundaryConfig(**mapping.get("boundary", {})),
        contrastive=ContrastiveConfig(**mapping.get("contrastive", {})),
        kmeans=KmeansConfig(**kmeans_body),
        **mapping.get("pipeline", {}),
    )


def load_refine_config(path=None, overrides: dict = None) -> RefineConfig:
    """Refine config from an optional file plus an optional override mapping."""
    mapping = load_toml(path) if path is not None else {}
    if overrides:
        validate_mapping(overrides, where="overrides")
        mapping = merge_mapping(mapping, overrides)
    return refine_config_from_mapping(mapping)
