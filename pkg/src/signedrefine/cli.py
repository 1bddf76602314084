"""Command-line interface.

Subcommands: generate (benchmark graphs), detect (built-in spectral
detector), refine (the full pipeline), eval (metric rows), and experiment
(noise-sweep / ablation / compare batches). Configuration comes from an
optional TOML file; any flag given on the command line wins over the file.
Runs are reproducible from the config plus seeds; the environment variable
SIGNEDREFINE_MAX_WORKERS caps the experiment worker pool.
"""

import argparse
import csv
import sys

from . import experiments
from .config import load_refine_config, load_toml, refine_config_from_mapping
from .io import (
    import_partition,
    read_edge_list,
    read_noise_flags,
    write_edge_list,
    write_noise_flags,
    write_partition,
)
from .kmeans import KmeansConfig, kmeans
from .metrics import aggregate, ari, misaligned_ratio, modularity
from .exceptions import UndefinedMetricError
from .pipeline import refine
from .spectral import SpectralConfig, baseline_detect, spectral_embed
from .ssbm import SsbmParams, generate


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".6g")


def _csv_ints(text):
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def _csv_floats(text):
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


# --- generate ---------------------------------------------------------------


def _cmd_generate(args) -> int:
    params = SsbmParams(
        num_nodes=args.nodes,
        num_communities=args.communities,
        edge_prob=args.edge_prob,
        noise_ratio=args.noise,
        seed=args.seed,
    )
    sample = generate(params)
    write_edge_list(sample.graph, args.out_graph)
    written = [args.out_graph]
    if args.out_partition:
        write_partition(sample.ground_truth, args.out_partition)
        written.append(args.out_partition)
    if args.out_noise:
        write_noise_flags(sample.graph, sample.noise_flags, args.out_noise)
        written.append(args.out_noise)
    print(f"{params.name}: {sample.graph.num_edges} edges -> {', '.join(written)}")
    return 0


# --- detect -----------------------------------------------------------------


def _cmd_detect(args) -> int:
    g = read_edge_list(args.graph)
    dim = args.embed_dim if args.embed_dim is not None else args.k
    cfg = SpectralConfig(embed_dim=dim, laplacian_variant=args.laplacian)
    emb = spectral_embed(g, cfg)
    part = kmeans(emb, KmeansConfig(k=args.k, seed=args.seed)).partition
    write_partition(part, args.out)
    print(f"detected {part.occupancy()} occupied of {args.k} communities -> {args.out}")
    return 0


# --- refine -----------------------------------------------------------------


def _collect_overrides(args) -> dict:
    """Nested config overrides from explicitly-set refine flags."""
    overrides = {}

    def put(section, key, value):
        if value is not None:
            overrides.setdefault(section, {})[key] = value

    put("structural", "alpha", args.alpha)
    put("structural", "softmax_temp", args.softmax_temp)
    put("structural", "sr_mode", args.sr_mode)
    put("boundary", "purge_threshold", args.purge_threshold)
    put("boundary", "max_candidates_fraction", args.max_candidates_fraction)
    put("contrastive", "embed_dim", args.embed_dim)
    put("contrastive", "tau_n", args.tau_n)
    put("contrastive", "tau_c", args.tau_c)
    put("contrastive", "omega_n", args.omega_n)
    put("contrastive", "omega_c", args.omega_c)
    put("contrastive", "feat_mask_prob", args.feat_mask_prob)
    put("contrastive", "comm_mask_prob", args.comm_mask_prob)
    put("contrastive", "epochs", args.epochs)
    put("contrastive", "learning_rate", args.learning_rate)
    put("pipeline", "max_rounds", args.max_rounds)
    put("pipeline", "convergence", args.convergence)
    if args.disable_sr:
        put("pipeline", "enable_sr", False)
    if args.disable_br:
        put("pipeline", "enable_br", False)
    if args.disable_cl:
        put("pipeline", "enable_cl", False)
    if args.seed is not None:
        put("structural", "rng_seed", args.seed)
        put("contrastive", "rng_seed", args.seed)
        put("kmeans", "seed", args.seed)
    return overrides


def _write_trace(path, trace):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["round", "ari", "occupancy", "loss_first", "loss_last", "wall_time"]
        )
        for rec in trace.rounds:
            loss_first = rec.loss_trace[0] if rec.loss_trace else None
            loss_last = rec.loss_trace[-1] if rec.loss_trace else None
            writer.writerow(
                [
                    rec.round_index,
                    _fmt(rec.ari),
                    rec.partition.occupancy(),
                    _fmt(loss_first),
                    _fmt(loss_last),
                    _fmt(rec.wall_time),
                ]
            )


def _write_purge_report(path, trace):
    # rows from every round, concatenated in round order
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "old", "new", "gain", "reason"])
        for rec in trace.rounds:
            if rec.purge is None:
                continue
            for node, old, new, gain in rec.purge.reassignments:
                writer.writerow([node, old, new, gain, rec.purge.reason(node)])


def _write_embeddings(path, emb):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node"] + [f"e{i}" for i in range(emb.shape[1])])
        for v, row in enumerate(emb):
            writer.writerow([v] + [_fmt(x) for x in row])


def _cmd_refine(args) -> int:
    g = read_edge_list(args.graph)
    cfg = load_refine_config(args.config, _collect_overrides(args))
    if args.initial == "detect:spectral":
        if args.k is None:
            raise ValueError("--k is required with --initial detect:spectral")
        initial = baseline_detect(g, args.k, seed=args.seed or 0)
    else:
        initial = import_partition(args.initial, expected_nodes=g.num_nodes)
    ground_truth = None
    if args.ground_truth:
        ground_truth = import_partition(args.ground_truth, expected_nodes=g.num_nodes)

    final, emb, trace = refine(g, initial, cfg, ground_truth)
    write_partition(final, args.out)
    if args.trace:
        _write_trace(args.trace, trace)
    if args.purge_report:
        _write_purge_report(args.purge_report, trace)
    if args.emit_embeddings:
        _write_embeddings(args.emit_embeddings, emb)

    note = f"refined in {len(trace)} round(s) -> {args.out}"
    if ground_truth is not None:
        note += f" (ARI {_fmt(ari(final, ground_truth))})"
    print(note)
    return 0


# --- eval -------------------------------------------------------------------

_EVAL_HEADER = [
    "dataset",
    "method",
    "seeds",
    "ari_mean",
    "ari_std",
    "modularity_mean",
    "modularity_std",
    "misaligned_mean",
    "misaligned_std",
]


def _cmd_eval(args) -> int:
    g = read_edge_list(args.graph)
    parts = [import_partition(p, expected_nodes=g.num_nodes) for p in args.partition]
    ground_truth = None
    if args.ground_truth:
        ground_truth = import_partition(args.ground_truth, expected_nodes=g.num_nodes)
    flags = read_noise_flags(args.noise_flags, g) if args.noise_flags else None

    aris, mods, miss = [], [], []
    for part in parts:
        if ground_truth is not None:
            aris.append(ari(part, ground_truth))
        try:
            mods.append(modularity(g, part, variant=args.modularity_variant))
        except UndefinedMetricError:
            pass
        if flags is not None:
            miss.append(misaligned_ratio(g, part, flags))

    def pair(values):
        if not values:
            return ["", ""]
        mean, std = aggregate(values)
        return [_fmt(mean), _fmt(std)]

    row = [args.dataset, args.method, str(len(parts))]
    row += pair(aris) + pair(mods) + pair(miss)
    writer = csv.writer(sys.stdout)
    if args.header:
        writer.writerow(_EVAL_HEADER)
    writer.writerow(row)
    return 0


# --- experiment -------------------------------------------------------------


def _cmd_experiment(args) -> int:
    mapping = load_toml(args.config) if args.config else {}
    refine_cfg = refine_config_from_mapping(
        {k: v for k, v in mapping.items() if k != "experiment"}
    )

    if args.kind == "compare" and args.graph:
        result = experiments.compare_files(
            args.graph,
            refine_cfg,
            output_dir=args.out_dir or "results",
            seeds=tuple(_csv_ints(args.seeds)) if args.seeds else (0, 1, 2, 3, 4),
            k=args.k,
            initial_paths=args.initial or None,
        )
    else:
        body = dict(mapping.get("experiment", {}))
        if args.nodes:
            body["num_nodes"] = _csv_ints(args.nodes)
        if args.communities:
            body["num_communities"] = _csv_ints(args.communities)
        if args.edge_prob:
            body["edge_prob"] = _csv_floats(args.edge_prob)
        if args.noise:
            body["noise"] = _csv_floats(args.noise)
        if args.seeds:
            body["seeds"] = _csv_ints(args.seeds)
        spec = experiments.spec_from_mapping(
            args.kind, {"experiment": body}, refine_cfg, output_dir=args.out_dir
        )
        result = experiments.run_experiment(spec)

    for path in result.paths:
        print(f"wrote {path}")
    for dataset, seed, message in result.failures:
        print(f"FAILED dataset={dataset} seed={seed}: {message}", file=sys.stderr)
    return 0 if result.ok else 1


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signedrefine",
        description="Community detection post-processing on signed networks.",
        epilog="SIGNEDREFINE_MAX_WORKERS caps the experiment worker pool.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a benchmark graph")
    p.add_argument("--nodes", type=int, required=True, help="number of nodes")
    p.add_argument("--communities", type=int, required=True,
                   help="number of planted communities")
    p.add_argument("--edge-prob", type=float, required=True,
                   help="edge probability p")
    p.add_argument("--noise", type=float, default=0.0,
                   help="sign-flip ratio mu (default 0)")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--out-graph", required=True, help="edge list output path")
    p.add_argument("--out-partition", help="ground-truth partition output path")
    p.add_argument("--out-noise", help="noise-flag output path")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("detect", help="run the built-in spectral detector")
    p.add_argument("--graph", required=True, help="edge list path")
    p.add_argument("--k", type=int, required=True, help="number of communities")
    p.add_argument("--embed-dim", type=int,
                   help="embedding dimension (default: k)")
    p.add_argument("--laplacian", choices=["plain", "sym", "reg"], default="reg",
                   help="Laplacian variant (default reg)")
    p.add_argument("--seed", type=int, default=0, help="k-means seed (default 0)")
    p.add_argument("--out", required=True, help="partition output path")
    p.set_defaults(fn=_cmd_detect)

    p = sub.add_parser("refine", help="refine a partition with the full pipeline")
    p.add_argument("--graph", required=True, help="edge list path")
    p.add_argument("--initial", required=True,
                   help="initial partition path, or detect:spectral")
    p.add_argument("--k", type=int,
                   help="community count for --initial detect:spectral")
    p.add_argument("--config", help="TOML config path")
    p.add_argument("--ground-truth", help="ground-truth partition path")
    p.add_argument("--out", required=True, help="refined partition output path")
    p.add_argument("--trace", help="per-round trace CSV path")
    p.add_argument("--purge-report", help="boundary purge report CSV path")
    p.add_argument("--emit-embeddings", help="final embeddings CSV path")
    p.add_argument("--seed", type=int,
                   help="seed for every stochastic stage (overrides config)")
    p.add_argument("--alpha", type=float, help="structural score weight (default 0.5)")
    p.add_argument("--softmax-temp", type=float,
                   help="structural softmax temperature (default 0.1)")
    p.add_argument("--sr-mode", choices=["argmax", "sample"],
                   help="structural reassignment mode (default argmax)")
    p.add_argument("--purge-threshold", type=float,
                   help="boundary purge likelihood threshold (default 0.5)")
    p.add_argument("--max-candidates-fraction", type=float,
                   help="cap on purge candidates as a fraction of nodes (default 1.0)")
    p.add_argument("--embed-dim", type=int,
                   help="contrastive embedding dimension (default 32)")
    p.add_argument("--tau-n", type=float, help="node temperature (default 0.5)")
    p.add_argument("--tau-c", type=float, help="community temperature (default 0.5)")
    p.add_argument("--omega-n", type=float, help="node loss weight (default 1)")
    p.add_argument("--omega-c", type=float, help="community loss weight (default 1)")
    p.add_argument("--feat-mask-prob", type=float,
                   help="feature masking probability (default 0.2)")
    p.add_argument("--comm-mask-prob", type=float,
                   help="pooling masking probability (default 0.2)")
    p.add_argument("--epochs", type=int, help="training epochs (default 100)")
    p.add_argument("--learning-rate", type=float,
                   help="gradient descent step size (default 0.05)")
    p.add_argument("--max-rounds", type=int, help="pipeline rounds (default 3)")
    p.add_argument("--convergence", choices=["fixed-rounds", "assignment-stable"],
                   help="stopping rule (default assignment-stable)")
    p.add_argument("--disable-sr", action="store_true",
                   help="skip the structural step")
    p.add_argument("--disable-br", action="store_true",
                   help="skip the boundary step")
    p.add_argument("--disable-cl", action="store_true",
                   help="skip contrastive learning and clustering")
    p.set_defaults(fn=_cmd_refine)

    p = sub.add_parser("eval", help="print a metric CSV row for partitions")
    p.add_argument("--graph", required=True, help="edge list path")
    p.add_argument("--partition", action="append", required=True,
                   help="partition path (repeatable; aggregated as runs)")
    p.add_argument("--ground-truth", help="ground-truth partition path")
    p.add_argument("--noise-flags", help="noise-flag path")
    p.add_argument("--modularity-variant", choices=["positive", "signed"],
                   default="positive", help="modularity variant (default positive)")
    p.add_argument("--dataset", default="dataset", help="dataset label")
    p.add_argument("--method", default="method", help="method label")
    p.add_argument("--header", action="store_true", help="also print the header row")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("experiment", help="run a batch experiment")
    p.add_argument("kind", choices=["noise-sweep", "ablation", "compare"])
    p.add_argument("--config", help="TOML config path")
    p.add_argument("--out-dir", help="output directory (default results)")
    p.add_argument("--nodes", help="comma-separated node counts")
    p.add_argument("--communities", help="comma-separated community counts")
    p.add_argument("--edge-prob", help="comma-separated edge probabilities")
    p.add_argument("--noise", help="comma-separated noise ratios")
    p.add_argument("--seeds", help="comma-separated seeds")
    p.add_argument("--graph", action="append",
                   help="real-world edge list for compare (repeatable)")
    p.add_argument("--initial", action="append",
                   help="imported initial partition per --graph (repeatable)")
    p.add_argument("--k", type=int,
                   help="community count for detection on real-world graphs")
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
