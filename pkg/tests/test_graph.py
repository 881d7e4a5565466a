import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cluster_connectivity.core.errors import EdgeListParseError, GraphDomainError
from cluster_connectivity.core.graph import (
    Graph,
    Partition,
    as_node_set,
    connected_components,
    edgelist_lines,
    induced_subgraph,
    is_connected,
    load_edgelist,
)
from graph_helpers import graph_from_edges, to_networkx


@st.composite
def small_graphs(draw, max_nodes=12):
    n = draw(st.integers(1, max_nodes))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, max_size=3 * n))
    return graph_from_edges(edges, n)


class TestGraph:
    def test_self_loops_and_duplicates_dropped(self):
        g = Graph.from_edges(3, [0, 1, 1, 2], [1, 0, 1, 2])
        assert g.num_edges == 1
        assert g.degrees.tolist() == [1, 1, 0]

    def test_neighbours_sorted_and_symmetric(self, k4):
        for u in range(4):
            assert g_list(k4, u) == [v for v in range(4) if v != u]

    def test_endpoint_out_of_range(self):
        with pytest.raises(GraphDomainError):
            Graph.from_edges(2, [0], [2])

    def test_with_isolated_nodes(self, triangle):
        g = triangle.with_isolated_nodes(["1", "x", "y", "x"])
        assert g.num_nodes == 5
        assert g.external_ids[3:] == ("x", "y")
        assert g.num_edges == 3
        assert triangle.with_isolated_nodes(["0"]) is triangle


def g_list(g, u):
    return g.neighbors(u).tolist()


class TestPartition:
    def test_labels_normalized_by_first_member(self):
        assert Partition.from_labels(["x", "y", "x", "z"]).assignment.tolist() == [0, 1, 0, 2]
        assert Partition.from_labels([5, 5, 3]).assignment.tolist() == [0, 0, 1]

    def test_equal_regardless_of_labels(self):
        assert Partition.from_labels([7, 7, 1]) == Partition.from_labels(["a", "a", "b"])

    def test_clusters_and_sizes(self):
        p = Partition.from_labels([1, 0, 1, 2])
        assert [c.tolist() for c in p.clusters] == [[0, 2], [1], [3]]
        assert p.sizes.tolist() == [2, 1, 1]

    def test_refines(self):
        fine = Partition.from_labels([0, 1, 2, 2])
        coarse = Partition.from_labels([0, 0, 1, 1])
        assert fine.refines(coarse)
        assert not coarse.refines(fine)

    def test_from_clusters_rejects_overlap(self):
        with pytest.raises(GraphDomainError):
            Partition.from_clusters(3, [[0, 1], [1, 2]])
        with pytest.raises(GraphDomainError):
            Partition.from_clusters(3, [[0, 1]])


def test_as_node_set_validates(triangle):
    assert as_node_set(triangle, {2, 0}).tolist() == [0, 2]
    with pytest.raises(GraphDomainError):
        as_node_set(triangle, [3])


class TestLoadEdgelist:
    def test_labels_in_first_appearance_order(self, edgelist_file):
        g = load_edgelist(edgelist_file(["a\tb", "b a", "", "# comment", "c c", "b c"]))
        assert g.external_ids == ("a", "b", "c")
        assert g.num_edges == 2
        assert g.degrees.tolist() == [1, 2, 1]

    def test_self_loop_only_label_is_isolated_node(self, edgelist_file):
        g = load_edgelist(edgelist_file(["1 2", "3 3"]))
        assert g.num_nodes == 3
        assert g.degrees.tolist() == [1, 1, 0]

    def test_malformed_line(self, edgelist_file):
        with pytest.raises(EdgeListParseError) as info:
            load_edgelist(edgelist_file(["1 2", "1 2 3"]))
        assert info.value.line_no == 2

    def test_empty_file(self, edgelist_file):
        g = load_edgelist(edgelist_file([]))
        assert g.num_nodes == 0 and g.num_edges == 0

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_edgelist(tmp_path / "absent.tsv")

    def test_isolated_nodes_survive_round_trip(self, tmp_path):
        g = graph_from_edges([(0, 2)], 4)
        path = tmp_path / "g.tsv"
        path.write_text("".join(line + "\n" for line in edgelist_lines(g)))
        assert load_edgelist(path) == g

    @given(g=small_graphs())
    def test_round_trip(self, tmp_path_factory, g):
        path = tmp_path_factory.mktemp("edges") / "g.tsv"
        path.write_text("".join(line + "\n" for line in edgelist_lines(g)))
        assert load_edgelist(path) == g


class TestSubgraphsAndComponents:
    def test_induced_subgraph(self, two_k5_bridge):
        h = induced_subgraph(two_k5_bridge, [3, 4, 5, 6])
        assert h.num_edges == 3
        assert h.parent_ids.tolist() == [3, 4, 5, 6]
        assert h.external_ids == ("3", "4", "5", "6")

    def test_components_ordered_by_smallest_member(self):
        g = graph_from_edges([(2, 3), (0, 1)], 5)
        assert [c.tolist() for c in connected_components(g)] == [[0, 1], [2, 3], [4]]

    def test_components_of_node_subset(self, two_k5_bridge):
        parts = connected_components(two_k5_bridge, [0, 1, 8, 9])
        assert [c.tolist() for c in parts] == [[0, 1], [8, 9]]

    def test_is_connected(self, two_k5_bridge):
        assert is_connected(two_k5_bridge)
        assert not is_connected(graph_from_edges([(0, 1)], 3))
        assert not is_connected(Graph.empty(0))

    @given(small_graphs())
    def test_components_match_networkx(self, g):
        ours = {frozenset(c.tolist()) for c in connected_components(g)}
        theirs = {frozenset(c) for c in nx.connected_components(to_networkx(g))}
        assert ours == theirs

    @given(small_graphs(), st.data())
    def test_induced_subgraph_matches_networkx(self, g, data):
        nodes = data.draw(st.sets(st.integers(0, g.num_nodes - 1), min_size=1))
        h = induced_subgraph(g, nodes)
        expected = to_networkx(g).subgraph(nodes)
        assert h.num_edges == expected.number_of_edges()
        assert np.array_equal(h.parent_ids, np.array(sorted(nodes)))
