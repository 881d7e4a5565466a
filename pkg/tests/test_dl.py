import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from cluster_connectivity.core.dl import (
    BlockStats,
    DlConfig,
    SbmModel,
    beta_sweep,
    block_stats,
    compare_reports,
    compute_dl,
    degree_prior,
    edge_matrix_prior,
    likelihood_dc,
    likelihood_ndc,
    partition_prior,
    relative_dl,
)
from cluster_connectivity.core.errors import (
    ConfigError,
    ContractViolationError,
    GraphDomainError,
    InfeasiblePartitionError,
)
from cluster_connectivity.core.graph import Graph, Partition
from cluster_connectivity.core.synthgen import CliqueFixtureSpec, gen_cliques
from cluster_connectivity.core.treatments import treat_cc
from graph_helpers import (
    all_graphs,
    dc_pairing_likelihood,
    graph_from_edges,
    ndc_graph_count,
    partition_of,
    set_partitions,
)

NDC = DlConfig(SbmModel.NDC)


@st.composite
def clustered_graphs(draw, max_nodes=10):
    n = draw(st.integers(1, max_nodes))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, max_size=3 * n))
    labels = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    return graph_from_edges(edges, n), labels


class TestConfig:
    @pytest.mark.parametrize("text,model", [("dc", SbmModel.DC), ("DC-Flat", SbmModel.DC), ("ndc", SbmModel.NDC), ("non_dc", SbmModel.NDC)])
    def test_model_aliases(self, text, model):
        assert SbmModel.parse(text) is model

    @pytest.mark.parametrize("model", list(SbmModel))
    def test_parse_accepts_members(self, model):
        assert SbmModel.parse(model) is model
        assert DlConfig(model).model is model

    def test_unknown_model(self):
        with pytest.raises(ConfigError):
            SbmModel.parse("pp")

    @pytest.mark.parametrize("beta", [-0.1, 1.5])
    def test_beta_range(self, beta):
        with pytest.raises(ConfigError):
            DlConfig(SbmModel.DC, beta)

    def test_from_dict(self):
        cfg = DlConfig.from_dict({"model": "ndc", "beta": 0.5, "edges_dl": False})
        assert cfg == DlConfig(SbmModel.NDC, 0.5, False)


class TestBlockStats:
    def test_triangle_one_block(self, triangle):
        stats = block_stats(triangle, Partition.one_block(3))
        assert stats.num_blocks == 1
        assert stats.block_sizes.tolist() == [3]
        assert stats.degrees.tolist() == [2, 2, 2]
        assert stats.edge_count(0, 0) == 6
        assert stats.block_degrees.tolist() == [6]
        assert stats.num_edges == 3

    def test_two_internal_edges(self):
        stats = block_stats(graph_from_edges([(0, 1), (2, 3)]), partition_of([0, 0, 1, 1]))
        assert (stats.edge_count(0, 0), stats.edge_count(1, 1), stats.edge_count(0, 1)) == (2, 2, 0)

    def test_edge_between_singletons(self):
        stats = block_stats(graph_from_edges([(0, 1)]), Partition.singletons(2))
        assert stats.edge_count(0, 1) == stats.edge_count(1, 0) == 1
        assert stats.block_degrees.tolist() == [1, 1]

    def test_coverage_mismatch(self, triangle):
        with pytest.raises(GraphDomainError):
            block_stats(triangle, Partition.one_block(2))

    @given(clustered_graphs())
    def test_aggregate_invariants(self, case):
        g, labels = case
        stats = block_stats(g, partition_of(labels))
        dense = stats.edge_counts.toarray()
        assert stats.num_nodes == g.num_nodes
        assert stats.block_degrees.sum() == 2 * g.num_edges
        assert np.array_equal(dense, dense.T)
        assert np.array_equal(dense.sum(axis=1), stats.block_degrees)
        assert np.all(np.diag(dense) % 2 == 0)


class TestTerms:
    @pytest.mark.parametrize("B,E,expected", [(1, 0, 0.0), (1, 3, 0.0), (2, 3, math.log(10)), (3, 10, math.log(3003))])
    def test_edge_matrix_prior_examples(self, B, E, expected):
        assert edge_matrix_prior(B, E) == pytest.approx(expected, abs=1e-9)

    def test_edge_matrix_prior_grid(self):
        for E in [0, 1, 2, 5, 10, 100, 1000, 10**4, 10**5, 10**6]:
            values = []
            for B in range(1, 51):
                pairs = B * (B + 1) // 2
                exact = math.log(math.comb(pairs + E - 1, E)) if pairs + E - 1 >= E else 0.0
                values.append(edge_matrix_prior(B, E))
                assert values[-1] == pytest.approx(exact, rel=1e-10, abs=1e-9)
            if E >= 1:
                assert all(b > a for a, b in zip(values, values[1:]))

    def test_partition_prior_examples(self):
        assert partition_prior(3, [3]) == pytest.approx(math.log(3))
        assert partition_prior(2, [1, 1]) == pytest.approx(2 * math.log(2))
        assert partition_prior(1, [1]) == pytest.approx(0.0)

    def test_degree_prior_examples(self, triangle):
        assert degree_prior(block_stats(triangle, Partition.one_block(3))) == pytest.approx(math.log(28))
        assert degree_prior(block_stats(Graph.empty(1), Partition.one_block(1))) == pytest.approx(0.0)
        edge = graph_from_edges([(0, 1)])
        assert degree_prior(block_stats(edge, Partition.one_block(2))) == pytest.approx(math.log(3))

    def test_likelihood_dc_examples(self, triangle):
        assert likelihood_dc(triangle, block_stats(triangle, Partition.one_block(3))) == pytest.approx(math.log(15 / 8))
        edge = graph_from_edges([(0, 1)])
        assert likelihood_dc(edge, block_stats(edge, Partition.one_block(2))) == pytest.approx(0.0)
        empty = Graph.empty(3)
        assert likelihood_dc(empty, block_stats(empty, Partition.one_block(3))) == pytest.approx(0.0)

    def test_likelihood_ndc_examples(self, triangle, path3):
        assert likelihood_ndc(triangle, block_stats(triangle, Partition.one_block(3))) == pytest.approx(0.0)
        edge = graph_from_edges([(0, 1)])
        assert likelihood_ndc(edge, block_stats(edge, Partition.singletons(2))) == pytest.approx(0.0)
        assert likelihood_ndc(path3, block_stats(path3, Partition.one_block(3))) == pytest.approx(math.log(3))

    def test_odd_diagonal_rejected(self, triangle):
        stats = BlockStats(1, np.array([3]), np.array([2, 2, 2]), np.array([5]), sp.csr_matrix(np.array([[5]])), 3)
        with pytest.raises(ContractViolationError):
            likelihood_dc(triangle, stats)

    def test_overfull_block_rejected(self):
        g = graph_from_edges([(0, 1)])
        stats = BlockStats(1, np.array([2]), np.array([1, 1]), np.array([4]), sp.csr_matrix(np.array([[4]])), 2)
        with pytest.raises(InfeasiblePartitionError):
            likelihood_ndc(g, stats)


ENUMERATED_SIZES = [2, 3, 4, pytest.param(5, marks=pytest.mark.slow)]


class TestEnumerationOracles:
    @pytest.mark.parametrize("n", ENUMERATED_SIZES)
    def test_ndc_likelihood_counts_graphs(self, n):
        partitions = list(set_partitions(n))
        for edges in all_graphs(n):
            g = graph_from_edges(edges, n)
            for labels in partitions:
                expected = math.log(ndc_graph_count(edges, labels, n))
                assert likelihood_ndc(g, block_stats(g, partition_of(labels))) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("n", ENUMERATED_SIZES)
    def test_dc_likelihood_counts_pairings(self, n):
        # 2E <= 10 keeps the stub pairings enumerable
        partitions = list(set_partitions(n))
        for edges in all_graphs(n, max_edges=5):
            g = graph_from_edges(edges, n)
            for labels in partitions:
                expected = dc_pairing_likelihood(edges, labels, n)
                assert likelihood_dc(g, block_stats(g, partition_of(labels))) == pytest.approx(expected, abs=1e-9)


class TestComputeDl:
    def test_triangle_dc(self, triangle):
        report = compute_dl(triangle, Partition.one_block(3))
        assert report.likelihood == pytest.approx(0.628609, abs=1e-6)
        assert report.degree_prior == pytest.approx(3.332205, abs=1e-6)
        assert report.partition_prior == pytest.approx(1.098612, abs=1e-6)
        assert report.edge_matrix_prior == pytest.approx(0.0, abs=1e-9)
        assert report.total == pytest.approx(5.059426, abs=1e-6)

    def test_triangle_ndc(self, triangle):
        report = compute_dl(triangle, Partition.one_block(3), NDC)
        assert report.degree_prior == 0.0
        assert report.total == pytest.approx(1.098612, abs=1e-6)

    def test_beta_zero_is_likelihood_only(self, two_k5_bridge):
        report = compute_dl(two_k5_bridge, Partition.singletons(10), DlConfig(SbmModel.DC, 0.0))
        assert report.total == report.likelihood

    def test_json_keys(self, triangle):
        assert list(compute_dl(triangle, Partition.one_block(3)).to_dict()) == [
            "model", "beta", "edges_dl", "num_nodes", "num_edges", "num_blocks",
            "likelihood", "degree_prior", "partition_prior", "edge_matrix_prior", "total",
        ]

    @given(clustered_graphs(), st.sampled_from([SbmModel.DC, SbmModel.NDC]), st.floats(0, 1), st.booleans())
    def test_additivity(self, case, model, beta, edges_dl):
        g, labels = case
        r = compute_dl(g, partition_of(labels), DlConfig(model, beta, edges_dl))
        expected = r.likelihood + beta * (r.degree_prior + r.partition_prior + (r.edge_matrix_prior if edges_dl else 0))
        assert r.total == pytest.approx(expected, abs=1e-9)
        for term in (r.likelihood, r.degree_prior, r.partition_prior, r.edge_matrix_prior):
            assert term >= -1e-9

    @given(clustered_graphs(), st.randoms(use_true_random=False))
    def test_label_invariance(self, case, random):
        g, labels = case
        n = g.num_nodes
        perm = list(range(n))
        random.shuffle(perm)
        u, v = g.edge_arrays()
        inverse = np.argsort(perm)
        h = Graph.from_edges(n, inverse[u], inverse[v])
        relabeled = [labels[perm[i]] + 100 for i in range(n)]
        for cfg in (DlConfig(), NDC):
            before = compute_dl(g, partition_of(labels), cfg).total
            after = compute_dl(h, partition_of(relabeled), cfg).total
            assert after == pytest.approx(before, abs=1e-9)


def merged_pairs(num_cliques, clique_size):
    return partition_of(np.arange(num_cliques * clique_size) // (2 * clique_size))


class TestComparisons:
    def test_compare_reports(self, triangle):
        one = compute_dl(triangle, Partition.one_block(3))
        singles = compute_dl(triangle, Partition.singletons(3))
        diff = compare_reports(singles, one)
        assert diff["total"] == pytest.approx(singles.total - one.total)
        assert diff["total_without_edge_matrix_prior"] == pytest.approx(
            diff["likelihood"] + diff["degree_prior"] + diff["partition_prior"]
        )

    def test_relative_dl(self, triangle):
        one = compute_dl(triangle, Partition.one_block(3))
        assert relative_dl(one, one) == pytest.approx(1.0)
        zero = compute_dl(Graph.empty(1), Partition.one_block(1))
        with pytest.raises(GraphDomainError):
            relative_dl(one, zero)

    def test_beta_sweep(self, two_k5_bridge):
        p = Partition.one_block(10)
        reports = beta_sweep(two_k5_bridge, p, betas=(0.0, 0.5, 1.0))
        assert [r.config.beta for r in reports] == [0.0, 0.5, 1.0]
        assert reports[0].total == pytest.approx(reports[0].likelihood)
        assert reports[0].total < reports[1].total < reports[2].total

    @pytest.mark.parametrize("num_cliques,clique_size", [(m, c) for m in (4, 6, 8, 10, 12) for c in (3, 4, 5, 8)])
    def test_cc_sign_pattern(self, num_cliques, clique_size):
        g, _ = gen_cliques(CliqueFixtureSpec(num_cliques, clique_size))
        merged = merged_pairs(num_cliques, clique_size)
        untreated = compute_dl(g, merged)
        treated = compute_dl(g, treat_cc(g, merged))
        diff = compare_reports(treated, untreated)
        assert diff["likelihood"] < 0
        assert diff["degree_prior"] <= 1e-9
        assert diff["partition_prior"] > 0
        assert diff["edge_matrix_prior"] > 0
        assert diff["total_without_edge_matrix_prior"] <= 0
