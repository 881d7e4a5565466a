"""
Treatments Module
=================
Connectivity post-processing (CC, WCC) and connectivity profiles.

Architecture:
- CC replaces every cluster with its connected components
- WCC additionally splits connected clusters along a global minimum cut
  until each cluster's min cut is strictly greater than a threshold
  (log10 of the cluster size by default)
- Clusters are independent work items, optionally spread over processes;
  output partitions are normalized so scheduling never changes the result

Data Flow:
  Graph + Partition → per-cluster subgraphs → split / classify → Partition
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from cluster_connectivity.core.errors import ConfigError, GraphDomainError
from cluster_connectivity.core.graph import Partition, as_node_set, connected_components, induced_subgraph
from cluster_connectivity.core.mincut import degree_one_shortcut, global_min_cut
from cluster_connectivity.core.parallel import ordered_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdRule:
    """
    Well-connectedness threshold as a function of cluster size.

    Kinds:
    - 'log10': log10(n)
    - 'constant': a fixed value c >= 0
    - 'none': 0, so every connected cluster passes
    """

    kind: str = "log10"
    constant: float = 0.0

    def __post_init__(self):
        if self.kind not in ("log10", "constant", "none"):
            raise ConfigError(f"Unknown threshold rule: {self.kind}")
        if self.kind == "constant" and not self.constant >= 0:
            raise ConfigError(f"Threshold constant must be >= 0, got {self.constant}")

    def __call__(self, n):
        if self.kind == "log10":
            return math.log10(n)
        if self.kind == "constant":
            return float(self.constant)
        return 0.0

    @classmethod
    def parse(cls, text):
        """
        Parse 'log10', 'none', 'constant:<c>' or a bare number.

        Raises:
            ConfigError: On anything else
        """
        text = str(text).strip().lower()
        if text in ("log10", "none"):
            return cls(text)
        value = text.split(":", 1)[1] if text.startswith("constant:") else text
        try:
            return cls("constant", float(value))
        except ValueError:
            raise ConfigError(f"Cannot parse threshold rule '{text}'") from None

    def __str__(self):
        return f"constant:{self.constant:g}" if self.kind == "constant" else self.kind


class ClusterClass(str, enum.Enum):
    SINGLETON = "singleton"
    DISCONNECTED = "disconnected"
    POORLY_CONNECTED = "poorly_connected"
    WELL_CONNECTED = "well_connected"


NON_SINGLETON_CLASSES = (ClusterClass.DISCONNECTED, ClusterClass.POORLY_CONNECTED, ClusterClass.WELL_CONNECTED)


@dataclass(frozen=True)
class ClusterConnectivity:
    cluster_id: int
    size: int
    cluster_class: ClusterClass
    min_cut: int = None


@dataclass(frozen=True)
class ConnectivityProfile:
    """
    Per-cluster classification with aggregates over non-singleton clusters.

    percentages is None when there are no non-singleton clusters.
    """

    rule: ThresholdRule
    clusters: tuple
    counts: dict
    percentages: dict

    def to_dict(self):
        return {
            "threshold_rule": str(self.rule),
            "num_clusters": len(self.clusters),
            "num_non_singleton": sum(self.counts[c.value] for c in NON_SINGLETON_CLASSES),
            "counts": dict(self.counts),
            "percentages": None if self.percentages is None else dict(self.percentages),
            "clusters": [
                {
                    "cluster": row.cluster_id,
                    "size": row.size,
                    "class": row.cluster_class.value,
                    "min_cut": row.min_cut,
                }
                for row in self.clusters
            ],
        }


def _check_coverage(g, p):
    if p.num_nodes != g.num_nodes:
        raise GraphDomainError(f"Partition covers {p.num_nodes} nodes but the graph has {g.num_nodes}")


def treat_cc(g, p):
    """
    Replace every cluster with its connected components.

    Args:
        g: Graph
        p: Partition of g's nodes

    Returns:
        Partition refining p whose clusters are all connected
    """
    _check_coverage(g, p)
    if g.num_nodes == 0:
        return p
    u, v = g.edge_arrays()
    internal = p.assignment[u] == p.assignment[v]
    ones = np.ones(int(internal.sum()), dtype=np.int8)
    adjacency = sp.coo_matrix((ones, (u[internal], v[internal])), shape=(g.num_nodes, g.num_nodes))
    _, labels = csgraph.connected_components(adjacency, directed=False)
    treated = Partition.from_labels(labels)
    logger.info(f"CC: {p.num_clusters} clusters in, {treated.num_clusters} out")
    return treated


def _split_until_well_connected(args):
    """
    WCC on one cluster subgraph.

    Args:
        args: (subgraph, rule)

    Returns:
        list of local member arrays
    """
    sub, rule = args
    done = []
    stack = [np.arange(sub.num_nodes, dtype=np.int64)]
    while stack:
        local = stack.pop()
        if len(local) == 1:
            done.append(local)
            continue
        h = sub if len(local) == sub.num_nodes else induced_subgraph(sub, local)
        components = connected_components(h)
        if len(components) > 1:
            stack.extend(local[c] for c in components)
            continue

        threshold = rule(len(local))
        cut = degree_one_shortcut(h) if threshold >= 1 else None
        if cut is None:
            cut = global_min_cut(h)
            if cut.cut_size > threshold:
                done.append(local)
                continue
        stack.append(local[cut.side_b])
        stack.append(local[cut.side_a])
    return done


def _cluster_subgraphs(g, p, min_size=2):
    for cid, members in enumerate(p.clusters):
        if len(members) >= min_size:
            yield cid, members


def treat_wcc(g, p, rule=None, num_processors=1):
    """
    Split clusters until every cluster is well-connected.

    Args:
        g: Graph
        p: Partition of g's nodes
        rule: ThresholdRule (default log10)
        num_processors: Worker processes for per-cluster work

    Returns:
        Partition refining p; every cluster of size n >= 2 has min cut > rule(n)
    """
    _check_coverage(g, p)
    rule = rule or ThresholdRule()
    work = list(_cluster_subgraphs(g, p))
    pieces = ordered_map(
        _split_until_well_connected,
        ((induced_subgraph(g, members), rule) for _, members in work),
        num_processors,
    )

    labels = np.full(g.num_nodes, -1, dtype=np.int64)
    next_label = 0
    split_count = 0
    for (cid, members), parts in zip(work, pieces):
        if len(parts) > 1:
            split_count += 1
            logger.debug(f"WCC: cluster {cid} (n={len(members)}) split into {len(parts)}")
        for local in parts:
            labels[members[local]] = next_label
            next_label += 1
    singles = labels < 0
    labels[singles] = next_label + np.arange(int(singles.sum()))

    treated = Partition.from_labels(labels)
    logger.info(f"WCC ({rule}): {p.num_clusters} clusters in, {treated.num_clusters} out, {split_count} split")
    return treated


def _classify_subgraph(args):
    """Return (class, min cut or None) for one cluster subgraph of size >= 2."""
    h, rule = args
    if len(connected_components(h)) > 1:
        return ClusterClass.DISCONNECTED, None
    shortcut = degree_one_shortcut(h)
    cut_size = 1 if shortcut is not None else global_min_cut(h).cut_size
    if cut_size > rule(h.num_nodes):
        return ClusterClass.WELL_CONNECTED, cut_size
    return ClusterClass.POORLY_CONNECTED, cut_size


def classify_cluster(g, members, rule=None):
    """
    Classify one cluster as singleton, disconnected, poorly or well connected.

    Raises:
        GraphDomainError: If members is empty
    """
    members = as_node_set(g, members)
    if members.size == 0:
        raise GraphDomainError("Cannot classify an empty cluster")
    if members.size == 1:
        return ClusterClass.SINGLETON
    return _classify_subgraph((induced_subgraph(g, members), rule or ThresholdRule()))[0]


def profile(g, p, rule=None, num_processors=1):
    """
    Connectivity profile of a clustering.

    Args:
        g: Graph
        p: Partition of g's nodes
        rule: ThresholdRule (default log10)
        num_processors: Worker processes for per-cluster work

    Returns:
        ConnectivityProfile
    """
    _check_coverage(g, p)
    rule = rule or ThresholdRule()
    work = list(_cluster_subgraphs(g, p))
    results = dict(zip(
        (cid for cid, _ in work),
        ordered_map(_classify_subgraph, ((induced_subgraph(g, m), rule) for _, m in work), num_processors),
    ))

    rows = []
    counts = {c.value: 0 for c in ClusterClass}
    for cid, size in enumerate(p.sizes):
        cluster_class, cut_size = results.get(cid, (ClusterClass.SINGLETON, None))
        counts[cluster_class.value] += 1
        rows.append(ClusterConnectivity(cid, int(size), cluster_class, cut_size))

    non_singleton = sum(counts[c.value] for c in NON_SINGLETON_CLASSES)
    percentages = None
    if non_singleton:
        percentages = {c.value: 100.0 * counts[c.value] / non_singleton for c in NON_SINGLETON_CLASSES}
        logger.info(
            f"Profile ({rule}): {non_singleton} non-singleton clusters, "
            f"{percentages['disconnected']:.1f}% disconnected, "
            f"{percentages['poorly_connected']:.1f}% poorly connected"
        )
    else:
        logger.info("Profile: no non-singleton clusters")
    return ConnectivityProfile(rule, tuple(rows), counts, percentages)


class ConnectivityTreatment:
    """
    Treatment service configured from the `treatment` config section.

    Responsibilities:
    - Hold the criterion, threshold rule and worker count
    - Apply CC or WCC to a clustering
    - Profile a clustering under the same threshold rule
    """

    CRITERIA = ("cc", "wcc")

    def __init__(self, config=None):
        """
        Args:
            config: Configuration with:
                - criterion: 'cc' or 'wcc' (default 'wcc')
                - threshold_rule: log10, none, constant:<c> or a number
                - num_processors: Worker processes for per-cluster work
        """
        config = config or {}
        self.criterion = str(config.get("criterion", "wcc")).lower()
        if self.criterion not in self.CRITERIA:
            raise ConfigError(f"Unknown connectedness criterion '{self.criterion}'")
        self.rule = ThresholdRule.parse(config.get("threshold_rule", "log10"))
        self.num_processors = int(config.get("num_processors", 1))
        if self.num_processors < 1:
            raise ConfigError(f"num_processors must be >= 1, got {self.num_processors}")

    def treat(self, g, p):
        if self.criterion == "cc":
            return treat_cc(g, p)
        return treat_wcc(g, p, self.rule, self.num_processors)

    def profile(self, g, p):
        return profile(g, p, self.rule, self.num_processors)
