"""
Metrics Module
==============
Clustering accuracy against a ground truth and density-filtered evaluation.

Architecture:
- ContingencyTable (sparse, scipy) is the shared basis of ARI, NMI and AMI
- Pair counts (TP/FP/FN/TN) come from the contingency table in closed form,
  using Python integers so large graphs cannot overflow
- Expected mutual information is summed over the hypergeometric model,
  grouped by distinct marginal values
- Density filtering keeps ground-truth clusters above a density threshold
  (everything at threshold 0.0) and restricts both clusterings to them

Data Flow:
  Partition pair → ContingencyTable → ARI / NMI / AMI / precision / recall
  Graph + ground truth → densities → DensityFilter → restricted metrics → EvalRow
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from cluster_connectivity.core.errors import ConfigError, GraphDomainError
from cluster_connectivity.core.graph import as_node_set, induced_subgraph

logger = logging.getLogger(__name__)

AVERAGE_METHODS = ("arithmetic", "geometric", "min", "max")


def _check_universe(gt, est):
    if gt.num_nodes != est.num_nodes:
        raise GraphDomainError(f"Clusterings cover different node sets ({gt.num_nodes} vs {est.num_nodes} nodes)")


def _generalized_average(u, v, average_method):
    if average_method == "arithmetic":
        return (u + v) / 2.0
    if average_method == "geometric":
        return math.sqrt(u * v)
    if average_method == "min":
        return min(u, v)
    if average_method == "max":
        return max(u, v)
    raise ConfigError(f"average_method must be one of {AVERAGE_METHODS}, got '{average_method}'")


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """
    Overlap counts between ground-truth clusters (rows) and estimated clusters (columns).

    Attributes:
        counts: Sparse CSR matrix n_ij
        row_sums: a_i
        col_sums: b_j
        total: N
    """

    counts: sp.csr_matrix
    row_sums: np.ndarray
    col_sums: np.ndarray
    total: int

    @classmethod
    def from_partitions(cls, gt, est):
        _check_universe(gt, est)
        shape = (gt.num_clusters, est.num_clusters)
        counts = sp.coo_matrix(
            (np.ones(gt.num_nodes, dtype=np.int64), (gt.assignment, est.assignment)), shape=shape
        ).tocsr()
        counts.sum_duplicates()
        return cls(
            counts,
            np.ravel(counts.sum(axis=1)).astype(np.int64),
            np.ravel(counts.sum(axis=0)).astype(np.int64),
            gt.num_nodes,
        )


@dataclass(frozen=True)
class PairConfusion:
    """Pair counts over all unordered node pairs."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self):
        # no predicted pairs at all counts as perfect precision
        if self.tp + self.fp == 0:
            return 1.0
        return self.tp / (self.tp + self.fp)

    @property
    def recall(self):
        if self.tp + self.fn == 0:
            return 1.0
        return self.tp / (self.tp + self.fn)

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


def pair_confusion(gt, est):
    """
    Pair confusion counts of est against gt.

    Returns:
        PairConfusion (TP: together in both, FP: together only in est,
        FN: together only in gt)
    """
    table = ContingencyTable.from_partitions(gt, est)

    def pairs(values):
        return sum(int(x) * (int(x) - 1) // 2 for x in values)

    n = table.total
    tp = pairs(table.counts.data)
    together_gt = pairs(table.row_sums)
    together_est = pairs(table.col_sums)
    fp = together_est - tp
    fn = together_gt - tp
    tn = n * (n - 1) // 2 - tp - fp - fn
    return PairConfusion(tp, fp, fn, tn)


def ari(gt, est):
    """Adjusted Rand index in [-1, 1]; identical or both-degenerate clusterings give 1.0."""
    c = pair_confusion(gt, est)
    if c.fn == 0 and c.fp == 0:
        return 1.0
    tp, fp, fn, tn = c.tp, c.fp, c.fn, c.tn
    return 2.0 * (tp * tn - fn * fp) / ((tp + fn) * (fn + tn) + (tp + fp) * (fp + tn))


def _entropy(sizes):
    sizes = np.asarray(sizes, dtype=np.float64)
    sizes = sizes[sizes > 0]
    if sizes.size <= 1:
        return 0.0
    total = sizes.sum()
    return float(-np.sum((sizes / total) * (np.log(sizes) - math.log(total))))


def mutual_information(table):
    """Mutual information (nats) of a contingency table."""
    if table.row_sums.size <= 1 or table.col_sums.size <= 1:
        return 0.0
    rows, cols, values = sp.find(table.counts)
    n = float(table.total)
    values = values.astype(np.float64)
    outer = table.row_sums[rows].astype(np.float64) * table.col_sums[cols]
    mi = (values / n) * (np.log(values) + math.log(n) - np.log(outer))
    return max(float(mi.sum()), 0.0)


def expected_mutual_information(table):
    """
    E[MI] under the hypergeometric model with both marginals fixed.

    Cells are grouped by distinct (a_i, b_j) marginal pairs.
    """
    n = int(table.total)
    if n <= 1:
        return 0.0
    a_values, a_counts = np.unique(table.row_sums, return_counts=True)
    b_values, b_counts = np.unique(table.col_sums, return_counts=True)
    log_n = math.log(n)
    lg_n = gammaln(n + 1)
    emi = 0.0
    for a, ca in zip(a_values.tolist(), a_counts.tolist()):
        for b, cb in zip(b_values.tolist(), b_counts.tolist()):
            lo, hi = max(1, a + b - n), min(a, b)
            if lo > hi:
                continue
            nij = np.arange(lo, hi + 1, dtype=np.float64)
            log_p = (
                gammaln(a + 1) + gammaln(b + 1) + gammaln(n - a + 1) + gammaln(n - b + 1)
                - lg_n - gammaln(nij + 1) - gammaln(a - nij + 1) - gammaln(b - nij + 1)
                - gammaln(n - a - b + nij + 1)
            )
            term = (nij / n) * (np.log(nij) + log_n - math.log(a) - math.log(b)) * np.exp(log_p)
            emi += ca * cb * float(term.sum())
    return emi


def nmi(gt, est, average_method="arithmetic"):
    """
    Normalized mutual information in [0, 1].

    Two single-cluster clusterings give 1.0; if only one entropy is zero the score is 0.0.
    """
    table = ContingencyTable.from_partitions(gt, est)
    h_gt, h_est = _entropy(table.row_sums), _entropy(table.col_sums)
    if h_gt == 0.0 and h_est == 0.0:
        return 1.0
    normalizer = _generalized_average(h_gt, h_est, average_method)
    if normalizer == 0.0:
        return 0.0
    return min(mutual_information(table) / normalizer, 1.0)


def ami(gt, est, average_method="arithmetic"):
    """
    Adjusted mutual information.

    A vanishing denominator gives 1.0 for identical clusterings and 0.0 otherwise.
    """
    table = ContingencyTable.from_partitions(gt, est)
    if table.row_sums.size == table.col_sums.size == 1 or table.total == 0:
        return 1.0
    mi = mutual_information(table)
    emi = expected_mutual_information(table)
    h_gt, h_est = _entropy(table.row_sums), _entropy(table.col_sums)
    denominator = _generalized_average(h_gt, h_est, average_method) - emi
    if abs(denominator) < 1e-15:
        return 1.0 if gt == est else 0.0
    return (mi - emi) / denominator


def density(g, members):
    """
    Internal edges over C(n, 2); singletons have density 0.0.

    Raises:
        GraphDomainError: For an empty node set
    """
    members = as_node_set(g, members)
    n = members.size
    if n == 0:
        raise GraphDomainError("Density of an empty node set is undefined")
    if n == 1:
        return 0.0
    return induced_subgraph(g, members).num_edges / (n * (n - 1) / 2.0)


def cluster_densities(g, p):
    """Density of every cluster of p, indexed by cluster id."""
    if p.num_nodes != g.num_nodes:
        raise GraphDomainError(f"Partition covers {p.num_nodes} nodes but the graph has {g.num_nodes}")
    u, v = g.edge_arrays()
    internal = p.assignment[u] == p.assignment[v]
    edges = np.bincount(p.assignment[u[internal]], minlength=p.num_clusters).astype(np.float64)
    n = p.sizes.astype(np.float64)
    pairs = n * (n - 1) / 2.0
    return np.divide(edges, pairs, out=np.zeros_like(edges), where=pairs > 0)


DEFAULT_BIN_EDGES = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))


def density_bins(g, p, edges=DEFAULT_BIN_EDGES):
    """
    Cluster distribution over density intervals.

    The first row is the singleton bin; the others are (lo, hi] intervals over
    non-singleton clusters, the first interval also taking density 0.0.

    Returns:
        list of dicts: bin, lo, hi, clusters, median_size, node_percent
    """
    edges = np.asarray(edges, dtype=np.float64)
    if edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ConfigError("Density bin edges must be strictly increasing with at least two values")
    dens = cluster_densities(g, p)
    sizes = p.sizes
    total = max(p.num_nodes, 1)
    singles = sizes == 1

    rows = [{
        "bin": "singleton",
        "lo": None,
        "hi": None,
        "clusters": int(singles.sum()),
        "median_size": None,
        "node_percent": 100.0 * float(sizes[singles].sum()) / total,
    }]
    index = np.clip(np.searchsorted(edges, dens, side="left") - 1, 0, len(edges) - 2)
    for i in range(len(edges) - 1):
        chosen = (~singles) & (index == i)
        rows.append({
            "bin": f"({edges[i]:g}, {edges[i + 1]:g}]",
            "lo": float(edges[i]),
            "hi": float(edges[i + 1]),
            "clusters": int(chosen.sum()),
            "median_size": float(np.median(sizes[chosen])) if chosen.any() else None,
            "node_percent": 100.0 * float(sizes[chosen].sum()) / total,
        })
    return rows


@dataclass(frozen=True)
class DensityFilter:
    """Keep ground-truth clusters whose density exceeds `threshold` (all of them at 0.0)."""

    threshold: float = 0.0
    min_size: int = 1

    def __post_init__(self):
        if not 0.0 <= float(self.threshold) <= 1.0:
            raise ConfigError(f"Density threshold must lie in [0, 1], got {self.threshold}")
        if int(self.min_size) < 1:
            raise ConfigError(f"min_size must be >= 1, got {self.min_size}")

    def keep(self, densities, sizes):
        mask = np.asarray(sizes) >= self.min_size
        if self.threshold > 0:
            mask &= np.asarray(densities) > self.threshold
        return mask


@dataclass(frozen=True)
class EvalRow:
    """Metrics at one density threshold; metric fields are None when nothing is retained."""

    threshold: float
    retained_nodes: int
    retained_clusters: int
    ari: float = None
    nmi: float = None
    ami: float = None
    precision: float = None
    recall: float = None

    def to_dict(self):
        return asdict(self)


EVAL_COLUMNS = ("threshold", "retained_nodes", "retained_clusters", "ari", "nmi", "ami", "precision", "recall")


def evaluate(gt, est, average_method="arithmetic"):
    """All metrics of est against gt as a dict."""
    confusion = pair_confusion(gt, est)
    return {
        "ari": ari(gt, est),
        "nmi": nmi(gt, est, average_method),
        "ami": ami(gt, est, average_method),
        "precision": confusion.precision,
        "recall": confusion.recall,
    }


def filtered_eval(g, gt, est, thresholds=(0.0,), min_size=1, average_method="arithmetic"):
    """
    Metrics of est against the dense part of gt, one row per threshold.

    Args:
        g: Graph
        gt: Ground-truth partition
        est: Estimated partition
        thresholds: Ascending density thresholds in [0, 1]
        min_size: Ground-truth clusters smaller than this are never retained
        average_method: Entropy mean used by NMI and AMI

    Returns:
        list of EvalRow
    """
    _check_universe(gt, est)
    thresholds = [float(t) for t in thresholds]
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ConfigError(f"Thresholds must be ascending, got {thresholds}")
    densities = cluster_densities(g, gt)

    rows = []
    for t in thresholds:
        keep = DensityFilter(t, min_size).keep(densities, gt.sizes)
        mask = keep[gt.assignment]
        retained = int(mask.sum())
        if retained == 0:
            rows.append(EvalRow(t, 0, 0))
            logger.info(f"Threshold {t:g}: no ground-truth clusters retained")
            continue
        gt_r, est_r = gt.restricted(mask), est.restricted(mask)
        scores = evaluate(gt_r, est_r, average_method)
        rows.append(EvalRow(t, retained, int(keep.sum()), **scores))
        logger.info(f"Threshold {t:g}: {retained} nodes, ARI {scores['ari']:.4f}, NMI {scores['nmi']:.4f}")
    return rows
