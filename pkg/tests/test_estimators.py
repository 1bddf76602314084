"""Estimator API tests: input coercion, the fit/fit_predict protocol,
parameter round-trips, and cloning."""

import numpy as np
import pytest
from sklearn.base import clone

from signedrefine import (
    CommunityRefiner,
    Partition,
    SignedGraph,
    SpectralCommunityClusterer,
    SsbmParams,
    ari,
    as_signed_graph,
    generate,
)


def two_cliques():
    edges = []
    for i in range(4):
        for j in range(i + 1, 4):
            edges.append((i, j, 1))
            edges.append((i + 4, j + 4, 1))
    edges.append((0, 4, -1))
    return SignedGraph(8, edges), np.array([0, 0, 0, 0, 1, 1, 1, 1])


class TestAsSignedGraph:
    def test_graph_passthrough(self):
        g, _ = two_cliques()
        assert as_signed_graph(g) is g
        with pytest.raises(ValueError, match="does not match"):
            as_signed_graph(g, num_nodes=9)

    def test_edge_array_with_inferred_nodes(self):
        g = as_signed_graph(np.array([[0, 1, 1], [1, 2, -1]]))
        assert g.num_nodes == 3
        assert g.num_edges == 2

    def test_explicit_num_nodes_keeps_isolated_tail(self):
        g = as_signed_graph([[0, 1, 1]], num_nodes=5)
        assert g.num_nodes == 5

    def test_rejects_bad_shapes_and_floats(self):
        with pytest.raises(ValueError, match="shape"):
            as_signed_graph(np.zeros((3, 2)))
        with pytest.raises(ValueError, match="integers"):
            as_signed_graph(np.array([[0.0, 1.0, 0.5]]))

    def test_empty_edge_array(self):
        g = as_signed_graph(np.zeros((0, 3)))
        assert g.num_nodes == 0 and g.num_edges == 0


class TestSpectralCommunityClusterer:
    def test_fit_separates_cliques(self):
        g, want = two_cliques()
        est = SpectralCommunityClusterer(n_clusters=2)
        got = est.fit_predict(g)
        assert np.array_equal(got, est.labels_)
        assert ari(
            est.partition_, Partition(want, num_communities=2)
        ) == pytest.approx(1.0)

    def test_fit_from_edge_array(self):
        g, want = two_cliques()
        rows = np.stack([g.edge_u, g.edge_v, g.edge_sign], axis=1)
        est = SpectralCommunityClusterer(n_clusters=2).fit(rows)
        assert ari(
            est.partition_, Partition(want, num_communities=2)
        ) == pytest.approx(1.0)

    def test_params_round_trip_and_clone(self):
        est = SpectralCommunityClusterer(n_clusters=3, laplacian="plain")
        params = est.get_params()
        assert params["n_clusters"] == 3
        assert params["laplacian"] == "plain"
        est.set_params(n_clusters=4)
        assert est.n_clusters == 4
        twin = clone(est)
        assert twin.get_params() == est.get_params()

    def test_invalid_laplacian_fails_at_fit(self):
        g, _ = two_cliques()
        est = SpectralCommunityClusterer(n_clusters=2, laplacian="nope")
        with pytest.raises(ValueError, match="nope"):
            est.fit(g)


class TestCommunityRefiner:
    def test_fit_sets_attributes(self):
        g, want = two_cliques()
        est = CommunityRefiner(n_clusters=2, epochs=20).fit(g)
        assert ari(
            est.partition_, Partition(want, num_communities=2)
        ) == pytest.approx(1.0)
        assert est.n_rounds_ == len(est.trace_.rounds)
        assert est.embedding_.shape == (8, est.embed_dim)
        assert np.array_equal(est.labels_, est.partition_.assignment)

    def test_initial_labels_respected(self):
        g, want = two_cliques()
        est = CommunityRefiner(initial_labels=want, epochs=20).fit(g)
        assert np.array_equal(est.initial_partition_.assignment, want)
        assert ari(
            est.partition_, Partition(want, num_communities=2)
        ) == pytest.approx(1.0)

    def test_initial_labels_define_community_count(self):
        g, _ = two_cliques()
        labels = np.array([0, 0, 0, 2, 1, 1, 1, 2])
        est = CommunityRefiner(initial_labels=labels, epochs=10).fit(g)
        assert est.initial_partition_.num_communities == 3
        assert est.partition_.num_communities == 3

    def test_initial_labels_shape_checked(self):
        g, _ = two_cliques()
        est = CommunityRefiner(initial_labels=np.zeros(5, dtype=int))
        with pytest.raises(ValueError, match="shape"):
            est.fit(g)

    def test_fit_predict_matches_labels(self):
        g, _ = two_cliques()
        est = CommunityRefiner(n_clusters=2, epochs=10)
        assert np.array_equal(est.fit_predict(g), est.labels_)

    def test_reproducible_under_random_state(self):
        s = generate(SsbmParams(80, 2, 0.2, 0.1, seed=3))
        a = CommunityRefiner(n_clusters=2, random_state=5).fit(s.graph)
        b = CommunityRefiner(n_clusters=2, random_state=5).fit(s.graph)
        assert np.array_equal(a.labels_, b.labels_)

    def test_params_round_trip_and_clone(self):
        est = CommunityRefiner(n_clusters=3, alpha=0.7, epochs=12)
        params = est.get_params()
        assert params["alpha"] == 0.7 and params["epochs"] == 12
        est.set_params(tau_n=0.25)
        twin = clone(est)
        assert twin.get_params() == est.get_params()
        assert twin.tau_n == 0.25

    def test_invalid_flat_params_fail_at_fit(self):
        g, _ = two_cliques()
        with pytest.raises(ValueError, match="alpha"):
            CommunityRefiner(alpha=1.5).fit(g)
        with pytest.raises(ValueError, match="at least one"):
            CommunityRefiner(
                enable_sr=False, enable_br=False, enable_cl=False
            ).fit(g)
