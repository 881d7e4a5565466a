"""
Graph Core Module
=================
Immutable graph and partition data model.

Architecture:
- Graph stores a symmetric CSR adjacency (sorted neighbour lists, no
  self-loops, no duplicate edges) plus the external label of every node
- Partition stores one normalized cluster id per node
- Induced subgraphs keep a reverse mapping to their parent's node ids
- Connected components are computed with scipy.sparse.csgraph

Data Flow:
  Edge-list file → load_edgelist → Graph → induced_subgraph / components
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from cluster_connectivity.core.errors import EdgeListParseError, GraphDomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Undirected, unweighted, simple graph over dense ids 0..num_nodes-1.

    Attributes:
        indptr: CSR row pointers (length num_nodes + 1)
        indices: concatenated sorted neighbour lists
        external_ids: original label of every node
        parent_ids: ids in the parent graph (induced subgraphs only)
    """

    indptr: np.ndarray
    indices: np.ndarray
    external_ids: tuple
    parent_ids: np.ndarray = None

    @classmethod
    def from_edges(cls, num_nodes, sources, targets, external_ids=None, parent_ids=None):
        """
        Build a simple graph from endpoint arrays.

        Self-loops and duplicate edges (in either orientation) are dropped.

        Args:
            num_nodes: Number of nodes
            sources: First endpoint of every edge
            targets: Second endpoint of every edge
            external_ids: Labels (defaults to the stringified ids)

        Returns:
            Graph
        """
        u = np.asarray(sources, dtype=np.int64).ravel()
        v = np.asarray(targets, dtype=np.int64).ravel()
        if u.shape != v.shape:
            raise GraphDomainError("Endpoint arrays differ in length")
        if u.size and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= num_nodes):
            raise GraphDomainError(f"Edge endpoint outside 0..{num_nodes - 1}")

        keep = u != v
        lo = np.minimum(u[keep], v[keep])
        hi = np.maximum(u[keep], v[keep])
        keys = np.unique(lo * max(num_nodes, 1) + hi)
        lo, hi = keys // max(num_nodes, 1), keys % max(num_nodes, 1)

        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]

        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=num_nodes), out=indptr[1:])

        if external_ids is None:
            external_ids = tuple(str(i) for i in range(num_nodes))
        elif len(external_ids) != num_nodes:
            raise GraphDomainError("external_ids must name every node")

        return cls(indptr, cols.astype(np.int64), tuple(external_ids), parent_ids)

    @classmethod
    def empty(cls, num_nodes=0, external_ids=None):
        return cls.from_edges(num_nodes, [], [], external_ids)

    @property
    def num_nodes(self):
        return len(self.indptr) - 1

    @property
    def num_edges(self):
        return len(self.indices) // 2

    @cached_property
    def degrees(self):
        return np.diff(self.indptr)

    def neighbors(self, node):
        return self.indices[self.indptr[node]:self.indptr[node + 1]]

    def edge_arrays(self):
        """Return (u, v) arrays listing every edge once with u < v."""
        rows = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees)
        upper = rows < self.indices
        return rows[upper], self.indices[upper]

    @cached_property
    def label_index(self):
        return {label: i for i, label in enumerate(self.external_ids)}

    @cached_property
    def csr(self):
        """Adjacency as a scipy CSR matrix of ones."""
        data = np.ones(len(self.indices), dtype=np.int8)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.num_nodes, self.num_nodes))

    def with_isolated_nodes(self, labels):
        """
        Append isolated nodes for labels not already present.

        Args:
            labels: Iterable of external labels

        Returns:
            Graph (self when nothing is added)
        """
        extra = []
        seen = set(self.label_index)
        for label in labels:
            if label not in seen:
                seen.add(label)
                extra.append(label)
        if not extra:
            return self
        indptr = np.concatenate([self.indptr, np.full(len(extra), self.indptr[-1], dtype=np.int64)])
        return Graph(indptr, self.indices, self.external_ids + tuple(extra), None)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.external_ids == other.external_ids
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Partition:
    """
    Assignment of every node to exactly one cluster.

    Cluster ids are normalized to 0..num_clusters-1 in order of the
    smallest node id of each cluster, so equal partitions compare equal
    regardless of the labels they were built from.
    """

    assignment: np.ndarray

    @classmethod
    def from_labels(cls, labels):
        """
        Normalize arbitrary per-node cluster labels.

        Args:
            labels: Sequence of hashable labels, one per node

        Returns:
            Partition
        """
        labels = np.asarray(labels)
        if labels.size == 0:
            return cls(np.zeros(0, dtype=np.int64))
        if labels.dtype == object:
            labels = labels.astype(str)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        return cls(rank[inverse.ravel()])

    @classmethod
    def from_clusters(cls, num_nodes, clusters):
        """
        Build a partition from disjoint member arrays covering all nodes.

        Raises:
            GraphDomainError: If the clusters overlap or miss nodes
        """
        labels = np.full(num_nodes, -1, dtype=np.int64)
        for cid, members in enumerate(clusters):
            members = np.asarray(members, dtype=np.int64)
            if members.size and (np.any(labels[members] >= 0)):
                raise GraphDomainError("Clusters overlap")
            labels[members] = cid
        if np.any(labels < 0):
            raise GraphDomainError("Clusters do not cover every node")
        return cls.from_labels(labels)

    @classmethod
    def singletons(cls, num_nodes):
        return cls(np.arange(num_nodes, dtype=np.int64))

    @classmethod
    def one_block(cls, num_nodes):
        return cls(np.zeros(num_nodes, dtype=np.int64))

    @property
    def num_nodes(self):
        return len(self.assignment)

    @property
    def num_clusters(self):
        return int(self.assignment.max()) + 1 if self.assignment.size else 0

    @cached_property
    def sizes(self):
        return np.bincount(self.assignment, minlength=self.num_clusters)

    @cached_property
    def clusters(self):
        """Sorted member arrays, indexed by cluster id."""
        order = np.argsort(self.assignment, kind="stable")
        return np.split(order, np.cumsum(self.sizes)[:-1]) if self.num_nodes else []

    def refines(self, other):
        """True when every cluster of self lies inside one cluster of other."""
        if self.num_nodes != other.num_nodes:
            return False
        pairs = np.unique(np.stack([self.assignment, other.assignment]), axis=1)
        return pairs.shape[1] == self.num_clusters

    def restricted(self, mask):
        """Partition induced on the nodes selected by a boolean mask."""
        return Partition.from_labels(self.assignment[mask])

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    __hash__ = None


def as_node_set(g, nodes):
    """
    Validate a node collection and return it as a sorted unique int array.

    Raises:
        GraphDomainError: If any node is outside 0..num_nodes-1
    """
    if nodes is None:
        return np.arange(g.num_nodes, dtype=np.int64)
    if isinstance(nodes, (set, frozenset)):
        nodes = sorted(nodes)
    members = np.unique(np.asarray(nodes, dtype=np.int64))
    if members.size and (members[0] < 0 or members[-1] >= g.num_nodes):
        raise GraphDomainError(f"Node ids must lie in 0..{g.num_nodes - 1}")
    return members


def load_edgelist(path):
    """
    Load a tab- or whitespace-separated edge list.

    Labels are mapped to dense ids in order of first appearance. Blank lines
    and lines starting with '#' are skipped; self-loops and duplicate edges
    are dropped (a label seen only on a self-loop still becomes a node).

    Args:
        path: Path to edge-list file

    Returns:
        Graph

    Raises:
        EdgeListParseError: If a line does not hold exactly two labels
    """
    path = Path(path)
    index = {}
    sources, targets = [], []
    with open(path, "r") as f:
        for line_no, line in enumerate(f, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if len(tokens) != 2:
                raise EdgeListParseError(path, line_no, f"expected 2 fields, found {len(tokens)}")
            a = index.setdefault(tokens[0], len(index))
            b = index.setdefault(tokens[1], len(index))
            sources.append(a)
            targets.append(b)

    g = Graph.from_edges(len(index), sources, targets, tuple(index))
    dropped = len(sources) - g.num_edges
    logger.info(f"Loaded {path.name}: {g.num_nodes} nodes, {g.num_edges} edges ({dropped} self-loops/duplicates dropped)")
    return g


def edgelist_lines(g):
    """
    Yield tab-separated edge lines that reload into exactly this graph.

    Lines are ordered so labels reappear in internal id order; nodes
    without an earlier neighbour or an edge to their successor are
    introduced with a self-loop line, which loading drops.
    """
    ids = g.external_ids
    introduced = np.zeros(g.num_nodes, dtype=bool)
    intro_edges = set()
    for u in range(g.num_nodes):
        if introduced[u]:
            continue
        nbrs = g.neighbors(u)
        earlier = nbrs[nbrs < u]
        if earlier.size:
            yield f"{ids[earlier[0]]}\t{ids[u]}"
            intro_edges.add((int(earlier[0]), u))
        elif u + 1 < g.num_nodes and not introduced[u + 1] and np.any(nbrs == u + 1):
            yield f"{ids[u]}\t{ids[u + 1]}"
            intro_edges.add((u, u + 1))
            introduced[u + 1] = True
        else:
            yield f"{ids[u]}\t{ids[u]}"
        introduced[u] = True

    for a, b in zip(*g.edge_arrays()):
        if (int(a), int(b)) not in intro_edges:
            yield f"{ids[a]}\t{ids[b]}"


def induced_subgraph(g, nodes):
    """
    Subgraph on a node set, keeping only edges with both endpoints inside.

    Args:
        g: Parent graph
        nodes: Node ids of the parent

    Returns:
        Graph whose node i is parent node parent_ids[i]
    """
    members = as_node_set(g, nodes)
    k = len(members)
    local = np.full(g.num_nodes, -1, dtype=np.int64)
    local[members] = np.arange(k, dtype=np.int64)

    starts = g.indptr[members]
    counts = g.indptr[members + 1] - starts
    total = int(counts.sum())
    offsets = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(total, dtype=np.int64)
    rows = np.repeat(np.arange(k, dtype=np.int64), counts)
    cols = local[g.indices[offsets]]
    keep = cols >= 0
    rows, cols = rows[keep], cols[keep]

    # local ids are monotone in parent ids, so rows stay grouped and sorted
    indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=k), out=indptr[1:])
    labels = tuple(g.external_ids[i] for i in members)
    return Graph(indptr, cols, labels, members)


def component_labels(g):
    """Component label of every node of g (scipy numbering)."""
    if g.num_nodes == 0:
        return 0, np.zeros(0, dtype=np.int64)
    count, labels = csgraph.connected_components(g.csr, directed=False)
    return count, labels


def connected_components(g, nodes=None):
    """
    Connected components of the subgraph induced by a node set.

    Args:
        g: Graph
        nodes: Node ids (default: all nodes)

    Returns:
        list of sorted member arrays (parent ids), ordered by smallest member
    """
    members = as_node_set(g, nodes)
    if members.size == 0:
        return []
    h = g if len(members) == g.num_nodes else induced_subgraph(g, members)
    count, labels = component_labels(h)
    order = np.argsort(labels, kind="stable")
    sizes = np.bincount(labels, minlength=count)
    groups = [members[chunk] for chunk in np.split(order, np.cumsum(sizes)[:-1])]
    groups.sort(key=lambda c: int(c[0]))
    return groups


def is_connected(g):
    return g.num_nodes > 0 and component_labels(g)[0] == 1
