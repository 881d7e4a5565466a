import json

import pytest

from cluster_connectivity.core.errors import ClusteringParseError
from cluster_connectivity.core.graph import Partition, load_edgelist
from cluster_connectivity.reports.clustering_file import attach_clustering, load_clustering, read_clustering
from cluster_connectivity.reports.report_writer import ReportWriter
from graph_helpers import graph_from_edges, write_lines


class TestReadClustering:
    def test_entries_in_file_order(self, tmp_path):
        path = write_lines(tmp_path / "c.tsv", ["# header", "b\tx", "", "a\ty"])
        assert list(read_clustering(path).items()) == [("b", "x"), ("a", "y")]

    def test_duplicate_node(self, tmp_path):
        path = write_lines(tmp_path / "c.tsv", ["a 1", "b 1", "a 2"])
        with pytest.raises(ClusteringParseError) as info:
            read_clustering(path)
        assert info.value.line_no == 3

    def test_wrong_field_count(self, tmp_path):
        with pytest.raises(ClusteringParseError):
            read_clustering(write_lines(tmp_path / "c.tsv", ["a"]))


class TestAttachClustering:
    def test_missing_nodes_become_singletons(self, triangle):
        attached = attach_clustering(triangle, {"0": "c", "1": "c"})
        assert attached.partition.assignment.tolist() == [0, 0, 1]
        assert attached.missing_nodes == ("2",)
        assert attached.cluster_labels == ("c", None)

    def test_unknown_nodes_are_added_as_isolated(self, triangle):
        attached = attach_clustering(triangle, {"0": "a", "1": "a", "2": "a", "9": "b"})
        assert attached.added_nodes == ("9",)
        assert attached.graph.num_nodes == 4
        assert attached.graph.degrees.tolist() == [2, 2, 2, 0]
        assert attached.partition.assignment.tolist() == [0, 0, 0, 1]
        assert attached.cluster_labels == ("a", "b")

    def test_each_missing_node_gets_its_own_cluster(self):
        g = graph_from_edges([(0, 1), (2, 3)])
        attached = attach_clustering(g, {"1": "k"})
        assert attached.partition.num_clusters == 4

    def test_load_clustering(self, tmp_path, edgelist_file):
        g = load_edgelist(edgelist_file(["u v", "v w"]))
        attached = load_clustering(g, write_lines(tmp_path / "c.tsv", ["u 7", "v 7", "w 8"]))
        assert attached.partition.assignment.tolist() == [0, 0, 1]
        assert attached.cluster_labels == ("7", "8")


class TestReportWriter:
    def test_json_and_no_leftover_temp_files(self, tmp_path):
        writer = ReportWriter()
        path = writer.write_json(tmp_path / "out" / "report.json", {"total": 1.5, "model": "dc"})
        assert json.loads(path.read_text()) == {"total": 1.5, "model": "dc"}
        assert [p.name for p in path.parent.iterdir()] == ["report.json"]
        assert writer.written == [path]

    def test_csv_blank_for_missing_values(self, tmp_path):
        path = ReportWriter().write_csv(tmp_path / "t.csv", [{"a": 1, "b": None}, {"a": 2}], ("a", "b"))
        assert path.read_text() == "a,b\n1,\n2,\n"

    def test_clustering_with_integer_labels_has_no_sidecar(self, tmp_path, triangle):
        out = tmp_path / "c.tsv"
        ReportWriter().write_clustering(out, triangle, Partition.from_labels([0, 0, 1]), ("4", "9"))
        assert out.read_text() == "0\t0\n1\t0\n2\t1\n"
        assert not (tmp_path / "c.tsv.labels.tsv").exists()

    def test_string_labels_get_a_sidecar(self, tmp_path, triangle):
        out = tmp_path / "c.tsv"
        ReportWriter().write_clustering(out, triangle, Partition.from_labels([0, 0, 1]), ("left", None))
        assert (tmp_path / "c.tsv.labels.tsv").read_text() == "0\tleft\n1\t\n"

    def test_sidecar_can_be_disabled(self, tmp_path, triangle):
        out = tmp_path / "c.tsv"
        ReportWriter({"label_sidecar": False}).write_clustering(out, triangle, Partition.one_block(3), ("x",))
        assert not (tmp_path / "c.tsv.labels.tsv").exists()

    def test_edgelist_round_trip(self, tmp_path):
        g = graph_from_edges([(0, 3), (1, 2)], 5)
        path = ReportWriter().write_edgelist(tmp_path / "g.tsv", g)
        assert load_edgelist(path) == g
