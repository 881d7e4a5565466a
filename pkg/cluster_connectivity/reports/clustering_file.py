"""
Clustering File Module
======================
Reads "node<TAB>cluster" files and aligns them with a graph.

Architecture:
- read_clustering parses the file into ordered (node, cluster) entries
- attach_clustering adds nodes known only to the clustering as isolated
  nodes, puts graph nodes missing from the file into their own singleton
  clusters (flagged), and builds the Partition

Data Flow:
  Clustering file → entries → (Graph with extra nodes, Partition, labels)
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cluster_connectivity.core.errors import ClusteringParseError
from cluster_connectivity.core.graph import Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttachedClustering:
    """
    A clustering aligned with a graph.

    Attributes:
        graph: Input graph, extended with isolated nodes named only by the file
        partition: Normalized partition of graph's nodes
        cluster_labels: Original label of every normalized cluster (None for
            singletons created for missing nodes)
        missing_nodes: Labels of graph nodes absent from the file
        added_nodes: Labels of nodes added as isolated nodes
    """

    graph: object
    partition: Partition
    cluster_labels: tuple
    missing_nodes: tuple
    added_nodes: tuple


def read_clustering(path):
    """
    Parse a clustering file.

    Blank lines and lines starting with '#' are skipped.

    Args:
        path: Path to clustering file

    Returns:
        dict node label → cluster label, in file order

    Raises:
        ClusteringParseError: On a line without exactly two fields or a repeated node
    """
    path = Path(path)
    entries = {}
    with open(path, "r") as f:
        for line_no, line in enumerate(f, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if len(tokens) != 2:
                raise ClusteringParseError(path, line_no, f"expected 2 fields, found {len(tokens)}")
            node, cluster = tokens
            if node in entries:
                raise ClusteringParseError(path, line_no, f"node '{node}' is assigned twice")
            entries[node] = cluster
    logger.info(f"Loaded {path.name}: {len(entries)} nodes in {len(set(entries.values()))} clusters")
    return entries


def attach_clustering(g, entries):
    """
    Align clustering entries with a graph.

    Args:
        g: Graph
        entries: dict node label → cluster label

    Returns:
        AttachedClustering
    """
    before = g.num_nodes
    g = g.with_isolated_nodes(entries)
    added = g.external_ids[before:]

    codes = {}
    labels = np.empty(g.num_nodes, dtype=np.int64)
    missing = []
    for i, node in enumerate(g.external_ids):
        cluster = entries.get(node)
        if cluster is None:
            missing.append(node)
            labels[i] = -1 - len(missing)
        else:
            labels[i] = codes.setdefault(cluster, len(codes))

    partition = Partition.from_labels(labels)
    by_code = {code: label for label, code in codes.items()}
    cluster_labels = [None] * partition.num_clusters
    for cid, members in enumerate(partition.clusters):
        code = int(labels[members[0]])
        cluster_labels[cid] = by_code.get(code)

    if missing:
        logger.warning(f"{len(missing)} graph nodes are missing from the clustering; treated as singletons")
    if added:
        logger.info(f"{len(added)} clustered nodes are absent from the edge list; added as isolated nodes")
    return AttachedClustering(g, partition, tuple(cluster_labels), tuple(missing), tuple(added))


def load_clustering(g, path):
    """Read a clustering file and align it with g."""
    return attach_clustering(g, read_clustering(path))
