"""End-to-end acceptance checks.

Every test prints one verdict line with its measured numbers and enforces an
explicit tolerance and wall-clock budget. The benchmark instances here are
the package's reference workloads; the per-module suites cover the same code
at unit granularity.
"""

import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import spearmanr

from signedrefine import (
    ABLATION_ROWS,
    ContrastiveConfig,
    EncoderParams,
    ExperimentSpec,
    KmeansConfig,
    Partition,
    RefineConfig,
    SignedGraph,
    SsbmParams,
    ari,
    augment,
    baseline_detect,
    compare_files,
    encode,
    generate,
    import_partition,
    init_params,
    kmeans,
    loss_and_gradients,
    modularity,
    node_loss,
    noise_sweep,
    refine,
    spectral_embed,
    write_edge_list,
    write_partition,
)
from signedrefine.experiments import _reseed
from signedrefine.graph import enumerate_triangles
from signedrefine.pipeline import ablation_matrix
from signedrefine.spectral import SpectralConfig
from signedrefine.structural import _softmax_rows, n_score

BENCH_SEEDS = (0, 1, 2, 3, 4)
BENCH_ROUNDS = 12  # deep enough for the contrastive step's gains to compound


def _verdict(capsys, num: int, ok: bool, detail: str):
    line = f"acceptance {num}: {'PASS' if ok else 'FAIL'} ({detail})"
    with capsys.disabled():
        print(f"\n{line}", flush=True)


@pytest.fixture(scope="module")
def benchmark_ablation():
    """All eight step combinations on the reference benchmark, five seeds."""
    start = time.perf_counter()
    per_row = {combo: [] for combo in ABLATION_ROWS}
    initial_aris = []
    for seed in BENCH_SEEDS:
        sample = generate(SsbmParams(1000, 5, 0.01, 0.02, seed))
        initial = baseline_detect(sample.graph, 5, seed=seed)
        cfg = replace(_reseed(RefineConfig(), seed), max_rounds=BENCH_ROUNDS)
        rows = ablation_matrix(sample.graph, initial, cfg, sample.ground_truth)
        initial_aris.append(ari(initial, sample.ground_truth))
        for row in rows:
            combo = (row.enable_sr, row.enable_br, row.enable_cl)
            per_row[combo].append(row.report.ari_values[0])
    return {
        "per_row": per_row,
        "initial": initial_aris,
        "elapsed": time.perf_counter() - start,
    }


def _brute_pair_ari(a1, a2) -> float:
    together_both = together_first = together_second = apart_both = 0
    n = len(a1)
    for i in range(n):
        for j in range(i + 1, n):
            same1 = a1[i] == a1[j]
            same2 = a2[i] == a2[j]
            if same1 and same2:
                together_both += 1
            elif same1:
                together_first += 1
            elif same2:
                together_second += 1
            else:
                apart_both += 1
    a, b, c, d = together_both, together_first, together_second, apart_both
    den = (a + b) * (b + d) + (a + c) * (c + d)
    if den == 0:
        return 1.0
    return 2.0 * (a * d - b * c) / den


def test_acceptance_1_ari_pair_oracle(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 13))
        k1 = int(rng.integers(1, n + 1))
        k2 = int(rng.integers(1, n + 1))
        a1 = rng.integers(0, k1, size=n)
        a2 = rng.integers(0, k2, size=n)
        got = ari(
            Partition(a1.astype(np.int64), num_communities=k1),
            Partition(a2.astype(np.int64), num_communities=k2),
        )
        want = _brute_pair_ari(a1.tolist(), a2.tolist())
        worst = max(worst, abs(got - want))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 5.0
    _verdict(capsys, 1, ok, f"200 pairs, max |diff| {worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-12
    assert elapsed < 5.0


def test_acceptance_2_analytic_gradients(capsys):
    start = time.perf_counter()
    g = SignedGraph(
        6,
        [
            (0, 1, 1), (0, 2, 1), (1, 2, -1),
            (3, 4, 1), (3, 5, 1), (4, 5, 1),
            (0, 3, -1), (2, 4, -1), (1, 5, 1),
        ],
    )
    p = Partition(np.array([0, 0, 0, 1, 1, 1]), num_communities=2)
    cfg = ContrastiveConfig(embed_dim=4, tau_n=0.5, tau_c=0.5, rng_seed=7)
    feats = np.random.default_rng(42).normal(size=(6, 5))
    params = init_params(5, cfg)
    v1 = augment(g, p, feats, cfg, view_index=1, epoch=0)
    v2 = augment(g, p, feats, cfg, view_index=2, epoch=0)
    _, _, _, grads = loss_and_gradients(g, p, v1, v2, params, cfg)

    step = 1e-5
    base = {name: arr for name, arr in params.entries()}
    worst = 0.0
    checked = 0
    for name, arr in params.entries():
        analytic = getattr(grads, name)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            halves = []
            for sign in (1.0, -1.0):
                bumped = {k: a.copy() for k, a in base.items()}
                bumped[name][idx] += sign * step
                halves.append(
                    loss_and_gradients(g, p, v1, v2, EncoderParams(**bumped), cfg)[0]
                )
            numeric = (halves[0] - halves[1]) / (2.0 * step)
            a_val = float(analytic[idx])
            if abs(a_val) <= 1e-9 and abs(numeric) <= 1e-9:
                checked += 1
                continue  # dead relu path: both sides vanish
            rel = abs(a_val - numeric) / max(abs(a_val), abs(numeric), 1e-8)
            worst = max(worst, rel)
            checked += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed < 10.0
    _verdict(capsys, 2, ok, f"{checked} entries, max rel err {worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-4
    assert elapsed < 10.0


def test_acceptance_3_noise_sweep(tmp_path, capsys):
    start = time.perf_counter()
    spec = ExperimentSpec(
        kind="noise-sweep",
        num_nodes=(1000,),
        num_communities=(5,),
        edge_prob=(0.01,),
        noise=(0.0, 0.05, 0.10, 0.15, 0.20),
        seeds=BENCH_SEEDS,
        output_dir=str(tmp_path),
    )
    result = noise_sweep(spec)
    assert result.ok, result.failures
    rows = (tmp_path / "noise_sweep_agg.csv").read_text().strip().splitlines()[1:]
    mus, ari_means, mis_means = [], [], []
    for row in rows:
        cells = row.split(",")
        mus.append(float(cells[0]))
        ari_means.append(float(cells[1]))
        mis_means.append(float(cells[3]))

    gap_pts = (ari_means[0] - ari_means[-1]) * 100.0
    rho = float(spearmanr(mus, ari_means).statistic)
    dips = [
        mis_means[i] - mis_means[i + 1]
        for i in range(len(mis_means) - 1)
        if mis_means[i + 1] < mis_means[i]
    ]
    mono_ok = len(dips) <= 1 and all(d * 100.0 <= 0.5 for d in dips)
    elapsed = time.perf_counter() - start
    ok = gap_pts >= 20.0 and rho <= -0.8 and mono_ok and elapsed < 600.0
    _verdict(
        capsys,
        3,
        ok,
        f"gap {gap_pts:.1f} pts, spearman {rho:.2f}, "
        f"{len(dips)} dip(s) max {max([d * 100 for d in dips], default=0.0):.2f} pts, "
        f"{elapsed:.0f}s",
    )
    assert gap_pts >= 20.0
    assert rho <= -0.8
    assert mono_ok
    assert elapsed < 600.0


def test_acceptance_4_full_pipeline_gain(benchmark_ablation, capsys):
    data = benchmark_ablation
    initial_mean = float(np.mean(data["initial"]))
    full_mean = float(np.mean(data["per_row"][(True, True, True)]))
    gain_pct = (full_mean - initial_mean) / initial_mean * 100.0
    elapsed = data["elapsed"]
    ok = gain_pct >= 15.0 and elapsed < 900.0
    _verdict(
        capsys,
        4,
        ok,
        f"initial {initial_mean:.4f} -> full {full_mean:.4f}, "
        f"gain {gain_pct:.1f}%, {elapsed:.0f}s",
    )
    assert gain_pct >= 15.0
    assert elapsed < 900.0


def test_acceptance_5_ablation_dominance(benchmark_ablation, capsys):
    data = benchmark_ablation
    means = {
        combo: float(np.mean(values)) for combo, values in data["per_row"].items()
    }
    full = means[(True, True, True)]
    sr_only = means[(True, False, False)]
    br_only = means[(False, True, False)]
    cl_only = means[(False, False, True)]
    none_rows = data["per_row"][(False, False, False)]
    none_exact = all(a == b for a, b in zip(none_rows, data["initial"]))
    elapsed = data["elapsed"]
    ok = (
        full >= sr_only
        and full >= br_only
        and full >= cl_only
        and none_exact
        and elapsed < 2700.0
    )
    _verdict(
        capsys,
        5,
        ok,
        f"full {full:.4f} vs sr {sr_only:.4f} / br {br_only:.4f} / "
        f"cl {cl_only:.4f}, none==initial {none_exact}, {elapsed:.0f}s",
    )
    assert full >= sr_only
    assert full >= br_only
    assert full >= cl_only
    assert none_exact
    assert elapsed < 2700.0


def test_acceptance_6_clean_instance_stability(capsys):
    start = time.perf_counter()
    purge_candidates = 0
    final_aris = []
    for seed in BENCH_SEEDS:
        sample = generate(SsbmParams(300, 3, 0.05, 0.0, seed))
        cfg = _reseed(RefineConfig(), seed)
        final, _, trace = refine(
            sample.graph, sample.ground_truth, cfg, sample.ground_truth
        )
        final_aris.append(ari(final, sample.ground_truth))
        for rec in trace.rounds:
            if rec.purge is not None:
                purge_candidates += len(rec.purge.triangle_candidates)
                purge_candidates += len(rec.purge.likelihood_candidates)
    elapsed = time.perf_counter() - start
    all_perfect = all(a == 1.0 for a in final_aris)
    ok = all_perfect and purge_candidates == 0 and elapsed < 120.0
    _verdict(
        capsys,
        6,
        ok,
        f"{len(BENCH_SEEDS)} seeds, min ARI {min(final_aris):.4f}, "
        f"{purge_candidates} purge candidate(s), {elapsed:.0f}s",
    )
    assert all_perfect
    assert purge_candidates == 0
    assert elapsed < 120.0


def test_acceptance_7_property_suite(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(1)

    # softmax rows sum to one
    for _ in range(20):
        m = rng.normal(size=(30, int(rng.integers(2, 8)))) * rng.choice([1, 1e8])
        probs = _softmax_rows(m)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    # neighborhood score against direct counting
    for seed in range(10):
        local = np.random.default_rng(seed)
        n = int(local.integers(5, 15))
        edges = []
        seen = set()
        for _ in range(3 * n):
            u, v = local.integers(0, n, size=2)
            if u == v or (min(u, v), max(u, v)) in seen:
                continue
            seen.add((min(u, v), max(u, v)))
            edges.append((int(u), int(v), int(local.choice([-1, 1]))))
        g = SignedGraph(n, edges)
        p = Partition(local.integers(0, 3, size=n).astype(np.int64), num_communities=3)
        for v in range(n):
            for k in range(3):
                signed = sum(
                    s for u2, v2, s in edges
                    if (u2 == v and p.assignment[v2] == k)
                    or (v2 == v and p.assignment[u2] == k)
                )
                deg = sum(1 for u2, v2, _ in edges if v in (u2, v2))
                want = signed / deg if deg else 0.0
                assert abs(n_score(g, p, v, k) - want) <= 1e-12

    # triangle enumeration against cubic brute force on n = 30
    local = np.random.default_rng(7)
    n = 30
    edges = []
    seen = set()
    for _ in range(6 * n):
        u, v = local.integers(0, n, size=2)
        if u == v or (min(u, v), max(u, v)) in seen:
            continue
        seen.add((min(u, v), max(u, v)))
        edges.append((int(min(u, v)), int(max(u, v)), int(local.choice([-1, 1]))))
    g = SignedGraph(n, edges)
    sign = {(u, v): s for u, v, s in edges}
    brute = set()
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if (i, j) in sign and (i, k) in sign and (j, k) in sign:
                    brute.add(((i, j, k), (sign[(i, j)], sign[(i, k)], sign[(j, k)])))
    got = {(t.nodes, t.signs) for t in enumerate_triangles(g)}
    assert got == brute

    # k-means inertia never increases along one run
    pts = rng.normal(size=(90, 4))
    res = kmeans(pts, KmeansConfig(k=4, seed=0, restarts=1))
    assert np.all(np.diff(np.asarray(res.inertia_trace)) <= 1e-9)

    # spectral and contrastive embeddings have unit rows
    sample = generate(SsbmParams(80, 3, 0.2, 0.1, seed=2))
    emb = spectral_embed(sample.graph, SpectralConfig(embed_dim=3))
    assert np.allclose(np.linalg.norm(emb, axis=1), 1.0, atol=1e-9)

    # generator is bitwise reproducible per seed
    p1 = SsbmParams(120, 3, 0.1, 0.1, seed=9)
    s1, s2 = generate(p1), generate(p1)
    assert np.array_equal(s1.graph.edge_u, s2.graph.edge_u)
    assert np.array_equal(s1.graph.edge_v, s2.graph.edge_v)
    assert np.array_equal(s1.graph.edge_sign, s2.graph.edge_sign)
    assert np.array_equal(s1.noise_flags, s2.noise_flags)
    assert s1.ground_truth == s2.ground_truth

    # swapping the two views leaves the loss unchanged
    z1 = rng.normal(size=(10, 5))
    z2 = rng.normal(size=(10, 5))
    z1 /= np.linalg.norm(z1, axis=1, keepdims=True)
    z2 /= np.linalg.norm(z2, axis=1, keepdims=True)
    assert abs(node_loss(z1, z2, 0.5) - node_loss(z2, z1, 0.5)) <= 1e-12

    # one community: no structure beyond chance, modularity exactly zero
    g1 = SignedGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    whole = Partition(np.zeros(4, dtype=np.int64), num_communities=1)
    assert modularity(g1, whole) == 0.0

    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    _verdict(capsys, 7, ok, f"8 property groups, {elapsed:.1f}s")
    assert elapsed < 60.0


def test_acceptance_8_scope_documented(tmp_path, capsys):
    readme = Path(__file__).resolve().parent.parent / "README.md"
    assert readme.exists(), "README.md missing"
    text = readme.read_text().lower()
    has_section = "exclusion" in text
    mentions = all(
        needle in text
        for needle in ("external", "real-world", "visualization", "imported")
    )

    # the harness accepts partitions produced elsewhere
    sample = generate(SsbmParams(50, 2, 0.25, 0.02, seed=1))
    graph_path = tmp_path / "toy.edges"
    part_path = tmp_path / "toy.part"
    write_edge_list(sample.graph, graph_path)
    write_partition(sample.ground_truth, part_path)
    imported = import_partition(part_path, expected_nodes=50)
    assert imported == sample.ground_truth
    result = compare_files(
        [graph_path],
        RefineConfig(contrastive=ContrastiveConfig(epochs=10)),
        output_dir=str(tmp_path),
        seeds=(0,),
        initial_paths=[part_path],
    )
    ok = has_section and mentions and result.ok
    _verdict(
        capsys,
        8,
        ok,
        f"exclusions documented {has_section and mentions}, "
        f"imported partition accepted {result.ok}",
    )
    assert has_section
    assert mentions
    assert result.ok
