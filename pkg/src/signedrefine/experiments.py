"""Batch experiment drivers with CSV output.

Three experiment kinds are supported:

* ``noise-sweep``: detection quality of the built-in spectral baseline as the
  sign-flip ratio grows; emits per-run and per-noise-level aggregate files.
* ``ablation``: ARI of every on/off combination of the three refinement
  steps on one benchmark instance.
* ``compare``: initial vs refined metrics (with relative gain) across a
  benchmark grid, or across user-supplied real-world edge lists.

Each (dataset, seed) run is independent; runs are scheduled on a bounded
thread pool (``SIGNEDREFINE_MAX_WORKERS`` caps the size) and rows are sorted
before writing, so output bytes do not depend on scheduling order. The run
seed drives the generator and every stochastic stage. Failures do not abort
the batch; they are collected per (dataset, seed) for the caller to report.
"""

import csv
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from pathlib import Path

from .io import read_edge_list
from .metrics import aggregate, ari, misaligned_ratio, modularity
from .exceptions import UndefinedMetricError
from .pipeline import ABLATION_ROWS, RefineConfig, ablation_matrix, refine
from .spectral import baseline_detect, import_partition
from .ssbm import SsbmParams, generate

_KINDS = ("noise-sweep", "ablation", "compare")

_DEFAULT_NOISE_GRID = tuple(round(0.01 * i, 2) for i in range(21))


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    num_nodes: tuple = (1000,)
    num_communities: tuple = (5,)
    edge_prob: tuple = (0.01,)
    noise: tuple = _DEFAULT_NOISE_GRID
    seeds: tuple = (0, 1, 2, 3, 4)
    refine: RefineConfig = field(default_factory=RefineConfig)
    output_dir: str = "results"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        for name in ("num_nodes", "num_communities", "edge_prob", "noise", "seeds"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"{name} must be non-empty")
            object.__setattr__(self, name, values)

    def grid(self):
        """All (n, k, p, mu) combinations, lexicographic."""
        return [
            (n, k, p, mu)
            for n in self.num_nodes
            for k in self.num_communities
            for p in self.edge_prob
            for mu in self.noise
        ]


@dataclass(frozen=True)
class ExperimentResult:
    paths: tuple
    failures: tuple  # (dataset, seed, message) triples

    @property
    def ok(self):
        return not self.failures


def spec_from_mapping(kind: str, mapping: dict, refine_cfg: RefineConfig,
                      output_dir=None) -> ExperimentSpec:
    """Build a spec from a config file's [experiment] section.

    Scalar values are promoted to one-element lists. Defaults depend on the
    kind: the sweep keeps the full noise grid, the other kinds pin noise to
    the benchmark value 0.02 unless the mapping says otherwise.
    """
    body = dict(mapping.get("experiment", {}))

    def listy(key, default):
        value = body.get(key, default)
        if isinstance(value, (int, float)):
            value = [value]
        return tuple(value)

    default_noise = _DEFAULT_NOISE_GRID if kind == "noise-sweep" else (0.02,)
    out = output_dir if output_dir is not None else body.get("output_dir", "results")
    return ExperimentSpec(
        kind=kind,
        num_nodes=tuple(int(x) for x in listy("num_nodes", [1000])),
        num_communities=tuple(int(x) for x in listy("num_communities", [5])),
        edge_prob=tuple(float(x) for x in listy("edge_prob", [0.01])),
        noise=tuple(float(x) for x in listy("noise", default_noise)),
        seeds=tuple(int(x) for x in listy("seeds", [0, 1, 2, 3, 4])),
        refine=refine_cfg,
        output_dir=str(out),
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".6g")


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) if not isinstance(cell, str) else cell
                             for cell in row])
    return path


def _worker_count(num_tasks: int) -> int:
    env = os.environ.get("SIGNEDREFINE_MAX_WORKERS")
    if env is None:
        cap = min(4, os.cpu_count() or 1)
    else:
        cap = int(env)
        if cap < 1:
            raise ValueError("SIGNEDREFINE_MAX_WORKERS must be >= 1")
    return max(1, min(cap, num_tasks))


def _run_tasks(fn, tasks):
    """Run (key, args) tasks on the pool; returns ({key: result}, [failures])."""
    results = {}
    failures = []
    workers = _worker_count(len(tasks))
    if workers <= 1:
        for key, args in tasks:
            try:
                results[key] = fn(*args)
            except Exception as exc:
                failures.append((key, f"{type(exc).__name__}: {exc}"))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pending = {pool.submit(fn, *args): key for key, args in tasks}
            for fut in as_completed(pending):
                key = pending[fut]
                try:
                    results[key] = fut.result()
                except Exception as exc:
                    failures.append((key, f"{type(exc).__name__}: {exc}"))
    return results, sorted(failures)


def _reseed(cfg: RefineConfig, seed: int) -> RefineConfig:
    """Point every stochastic stage of a refine config at the run seed."""
    return replace(
        cfg,
        structural=replace(cfg.structural, rng_seed=seed),
        contrastive=replace(cfg.contrastive, rng_seed=seed),
        kmeans=replace(cfg.kmeans, seed=seed),
    )


def _safe_modularity(g, p):
    try:
        return modularity(g, p)
    except UndefinedMetricError:
        return None


def _single(values, what):
    if len(values) != 1:
        raise ValueError(f"{what} requires exactly one value, got {list(values)}")
    return values[0]


def _dataset_name(n, k, p, mu) -> str:
    # same convention as SsbmParams.name, but usable for labeling failures
    # of combinations the generator itself rejects
    return f"SSBM-{n}-{k}-{p:g}-{mu:.2f}"


# --- noise sweep -----------------------------------------------------------


def _sweep_run(n, k, p, mu, seed):
    sample = generate(SsbmParams(n, k, p, mu, seed))
    detected = baseline_detect(sample.graph, k, seed=seed)
    return (
        ari(detected, sample.ground_truth),
        misaligned_ratio(sample.graph, detected, sample.noise_flags),
    )


def noise_sweep(spec: ExperimentSpec) -> ExperimentResult:
    """Baseline accuracy and misalignment across the noise grid."""
    n = _single(spec.num_nodes, "noise-sweep num_nodes")
    k = _single(spec.num_communities, "noise-sweep num_communities")
    p = _single(spec.edge_prob, "noise-sweep edge_prob")
    tasks = [
        ((mu, seed), (n, k, p, mu, seed))
        for mu in spec.noise
        for seed in spec.seeds
    ]
    results, failures = _run_tasks(_sweep_run, tasks)

    rows = [
        (mu, seed, *results[(mu, seed)])
        for mu, seed in sorted(results)
    ]
    out = Path(spec.output_dir)
    paths = [
        _write_csv(out / "noise_sweep.csv",
                   ["mu", "seed", "ari", "misaligned_ratio"], rows)
    ]

    agg_rows = []
    for mu in sorted(set(mu for mu, _ in results)):
        aris = [results[(m, s)][0] for m, s in sorted(results) if m == mu]
        miss = [results[(m, s)][1] for m, s in sorted(results) if m == mu]
        ari_mean, ari_std = aggregate(aris)
        mis_mean, mis_std = aggregate(miss)
        agg_rows.append((mu, ari_mean, ari_std, mis_mean, mis_std))
    paths.append(
        _write_csv(
            out / "noise_sweep_agg.csv",
            ["mu", "ari_mean", "ari_std", "misaligned_mean", "misaligned_std"],
            agg_rows,
        )
    )
    fail_triples = tuple(
        (_dataset_name(n, k, p, mu), seed, msg)
        for (mu, seed), msg in failures
    )
    return ExperimentResult(paths=tuple(paths), failures=fail_triples)


# --- ablation --------------------------------------------------------------


def _ablation_run(n, k, p, mu, seed, cfg):
    sample = generate(SsbmParams(n, k, p, mu, seed))
    initial = baseline_detect(sample.graph, k, seed=seed)
    rows = ablation_matrix(
        sample.graph, initial, _reseed(cfg, seed), sample.ground_truth
    )
    return [row.report for row in rows]


def ablation(spec: ExperimentSpec) -> ExperimentResult:
    """Per-step on/off study on a single benchmark instance, seeds aggregated."""
    n = _single(spec.num_nodes, "ablation num_nodes")
    k = _single(spec.num_communities, "ablation num_communities")
    p = _single(spec.edge_prob, "ablation edge_prob")
    mu = _single(spec.noise, "ablation noise")
    tasks = [((seed,), (n, k, p, mu, seed, spec.refine)) for seed in spec.seeds]
    results, failures = _run_tasks(_ablation_run, tasks)

    merged = [  # one report per ablation row, across seeds in sorted order
        None for _ in ABLATION_ROWS
    ]
    for key in sorted(results):
        for i, report in enumerate(results[key]):
            merged[i] = report if merged[i] is None else merged[i].merge(report)

    rows = []
    for flags, report in zip(ABLATION_ROWS, merged):
        if report is None:
            continue  # every seed failed; failures carry the reason
        sr, br, cl = flags
        rows.append(
            (sr, br, cl, report.mean("ari"), report.std("ari"))
        )
    out = Path(spec.output_dir)
    path = _write_csv(
        out / "ablation.csv", ["sr", "br", "cl", "ari_mean", "ari_std"], rows
    )
    name = _dataset_name(n, k, p, mu)
    fail_triples = tuple((name, key[0], msg) for key, msg in failures)
    return ExperimentResult(paths=(path,), failures=fail_triples)


# --- compare ---------------------------------------------------------------

_COMPARE_HEADER = [
    "dataset",
    "seeds",
    "initial_ari_mean",
    "initial_ari_std",
    "refined_ari_mean",
    "refined_ari_std",
    "ari_gain_pct",
    "initial_modularity_mean",
    "initial_modularity_std",
    "refined_modularity_mean",
    "refined_modularity_std",
    "modularity_gain_pct",
]


def _gain_pct(before, after):
    if before is None or after is None or before == 0:
        return None
    return (after - before) / abs(before) * 100.0


def _compare_run(n, k, p, mu, seed, cfg):
    sample = generate(SsbmParams(n, k, p, mu, seed))
    initial = baseline_detect(sample.graph, k, seed=seed)
    refined, _, _ = refine(
        sample.graph, initial, _reseed(cfg, seed), sample.ground_truth
    )
    return {
        "ari_initial": ari(initial, sample.ground_truth),
        "ari_refined": ari(refined, sample.ground_truth),
        "mod_initial": _safe_modularity(sample.graph, initial),
        "mod_refined": _safe_modularity(sample.graph, refined),
    }


def _aggregate_compare_rows(per_dataset):
    """per_dataset: {name: [run dict, ...]} -> sorted compare CSV rows."""
    rows = []
    for name in sorted(per_dataset):
        runs = per_dataset[name]
        row = [name, len(runs)]
        for metric in ("ari", "mod"):
            pairs = [
                (r[f"{metric}_initial"], r[f"{metric}_refined"])
                for r in runs
                if r[f"{metric}_initial"] is not None
                and r[f"{metric}_refined"] is not None
            ]
            if pairs:
                before_mean, before_std = aggregate([b for b, _ in pairs])
                after_mean, after_std = aggregate([a for _, a in pairs])
                row += [
                    before_mean,
                    before_std,
                    after_mean,
                    after_std,
                    _gain_pct(before_mean, after_mean),
                ]
            else:
                row += [None] * 5
        rows.append(tuple(row))
    return rows


def compare(spec: ExperimentSpec) -> ExperimentResult:
    """Initial vs refined metrics over the benchmark grid."""
    tasks = [
        ((_dataset_name(n, k, p, mu), seed), (n, k, p, mu, seed, spec.refine))
        for (n, k, p, mu) in spec.grid()
        for seed in spec.seeds
    ]
    results, failures = _run_tasks(_compare_run, tasks)
    per_dataset = {}
    for (name, seed) in sorted(results):
        per_dataset.setdefault(name, []).append(results[(name, seed)])
    path = _write_csv(
        Path(spec.output_dir) / "compare.csv",
        _COMPARE_HEADER,
        _aggregate_compare_rows(per_dataset),
    )
    fail_triples = tuple((name, seed, msg) for (name, seed), msg in failures)
    return ExperimentResult(paths=(path,), failures=fail_triples)


def _compare_file_run(graph, initial_path, k, seed, cfg):
    if initial_path is not None:
        initial = import_partition(initial_path, expected_nodes=graph.num_nodes)
    else:
        initial = baseline_detect(graph, k, seed=seed)
    refined, _, _ = refine(graph, initial, _reseed(cfg, seed))
    return {
        "ari_initial": None,
        "ari_refined": None,
        "mod_initial": _safe_modularity(graph, initial),
        "mod_refined": _safe_modularity(graph, refined),
    }


def compare_files(
    graph_paths,
    cfg: RefineConfig,
    output_dir,
    seeds=(0, 1, 2, 3, 4),
    k: int = None,
    initial_paths=None,
) -> ExperimentResult:
    """Compare on user-supplied edge lists (no ground truth: modularity only).

    ``initial_paths`` optionally maps each graph (by position) to an imported
    starting partition; otherwise the built-in detector needs ``k``.
    """
    graph_paths = [str(p) for p in graph_paths]
    if initial_paths is None:
        initial_paths = [None] * len(graph_paths)
    if len(initial_paths) != len(graph_paths):
        raise ValueError("initial_paths must pair up with graph_paths")
    if any(ip is None for ip in initial_paths) and k is None:
        raise ValueError("k is required when no initial partition is supplied")

    tasks = []
    read_failures = []
    for path, initial_path in zip(graph_paths, initial_paths):
        name = Path(path).stem
        try:
            graph = read_edge_list(path)
        except Exception as exc:
            for seed in seeds:
                read_failures.append(((name, seed), f"{type(exc).__name__}: {exc}"))
            continue
        for seed in seeds:
            tasks.append(((name, seed), (graph, initial_path, k, seed, cfg)))
    results, failures = _run_tasks(_compare_file_run, tasks)
    failures = sorted(failures + read_failures)

    per_dataset = {}
    for (name, seed) in sorted(results):
        per_dataset.setdefault(name, []).append(results[(name, seed)])
    path = _write_csv(
        Path(output_dir) / "compare.csv",
        _COMPARE_HEADER,
        _aggregate_compare_rows(per_dataset),
    )
    fail_triples = tuple((name, seed, msg) for (name, seed), msg in failures)
    return ExperimentResult(paths=(path,), failures=fail_triples)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    if spec.kind == "noise-sweep":
        return noise_sweep(spec)
    if spec.kind == "ablation":
        return ablation(spec)
    return compare(spec)
