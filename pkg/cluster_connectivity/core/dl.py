"""
Description Length Module
=========================
Description length of a clustered graph under flat microcanonical SBMs.

Architecture:
- BlockStats aggregates block sizes, degree sums and block-pair edge counts
- Four terms, all in nats:
    likelihood          -log p(A | b, e, k)   (DC)  or  -log p(A | b, e) (NDC)
    degree_prior        -log p(k | b, e)      (DC only, uniform variant)
    partition_prior     -log p(b)
    edge_matrix_prior   -log p(e)
- total = likelihood + beta * (degree_prior + partition_prior
                               + [edges_dl] * edge_matrix_prior)
- Factorials and binomials go through log-gamma, so counts up to 1e9 are safe

Data Flow:
  Graph + Partition → BlockStats → term functions → DlReport (JSON)
"""

import enum
import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from cluster_connectivity.core.errors import ConfigError, ContractViolationError, GraphDomainError, InfeasiblePartitionError

logger = logging.getLogger(__name__)

LN2 = float(np.log(2.0))


def lbinom(n, k):
    """ln C(n, k) for arrays or scalars (0 <= k <= n)."""
    n = np.asarray(n, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def log_double_factorial_even(x):
    """ln(x!!) for even x, using (2m)!! = 2^m m!."""
    half = np.asarray(x, dtype=np.float64) / 2.0
    return half * LN2 + gammaln(half + 1)


class SbmModel(str, enum.Enum):
    DC = "dc"
    NDC = "ndc"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-")
        aliases = {"dc": cls.DC, "dc-flat": cls.DC, "ndc": cls.NDC, "non-dc": cls.NDC, "ndc-flat": cls.NDC}
        if key not in aliases:
            raise ConfigError(f"Unknown SBM model '{text}' (expected dc or ndc)")
        return aliases[key]


@dataclass(frozen=True)
class DlConfig:
    """
    Description-length settings.

    Attributes:
        model: SbmModel.DC or SbmModel.NDC
        beta: Prior weight in [0, 1]
        edges_dl: Include the edge-count-matrix prior
    """

    model: SbmModel = SbmModel.DC
    beta: float = 1.0
    edges_dl: bool = True

    def __post_init__(self):
        if not isinstance(self.model, SbmModel):
            object.__setattr__(self, "model", SbmModel.parse(self.model))
        if not 0.0 <= float(self.beta) <= 1.0:
            raise ConfigError(f"beta must lie in [0, 1], got {self.beta}")

    @classmethod
    def from_dict(cls, config):
        return cls(
            model=SbmModel.parse(config.get("model", "dc")),
            beta=float(config.get("beta", 1.0)),
            edges_dl=bool(config.get("edges_dl", True)),
        )


@dataclass(frozen=True, eq=False)
class BlockStats:
    """
    Partition aggregates.

    Attributes:
        num_blocks: B, nonempty blocks only
        block_sizes: n_r
        degrees: k_i per node
        block_degrees: e_r = sum_s e_rs
        edge_counts: symmetric B x B CSR matrix e_rs, diagonal = 2 x internal edges
        num_edges: E
    """

    num_blocks: int
    block_sizes: np.ndarray
    degrees: np.ndarray
    block_degrees: np.ndarray
    edge_counts: sp.csr_matrix
    num_edges: int

    @property
    def num_nodes(self):
        return int(self.block_sizes.sum())

    def edge_count(self, r, s):
        return int(self.edge_counts[r, s])


def block_stats(g, p):
    """
    Aggregate block sizes, degree sums and block-pair edge counts.

    Raises:
        GraphDomainError: If the partition does not cover the graph
    """
    if p.num_nodes != g.num_nodes:
        raise GraphDomainError(f"Partition covers {p.num_nodes} nodes but the graph has {g.num_nodes}")
    B = p.num_clusters
    k = g.degrees.astype(np.int64)
    u, v = g.edge_arrays()
    bu, bv = p.assignment[u], p.assignment[v]
    ones = np.ones(2 * len(u), dtype=np.int64)
    e_rs = sp.coo_matrix(
        (ones, (np.concatenate([bu, bv]), np.concatenate([bv, bu]))), shape=(B, B)
    ).tocsr()
    e_rs.sum_duplicates()
    return BlockStats(
        num_blocks=B,
        block_sizes=p.sizes.astype(np.int64),
        degrees=k,
        block_degrees=np.bincount(p.assignment, weights=k, minlength=B).astype(np.int64),
        edge_counts=e_rs,
        num_edges=g.num_edges,
    )


def _split_counts(stats):
    """(off-diagonal r<s counts with their row/col, diagonal counts)."""
    coo = stats.edge_counts.tocoo()
    upper = coo.row < coo.col
    diag = stats.edge_counts.diagonal().astype(np.int64)
    if np.any(diag % 2):
        raise ContractViolationError("Diagonal edge counts must be even")
    return coo.row[upper], coo.col[upper], coo.data[upper].astype(np.int64), diag


def edge_matrix_prior(B, E):
    """-log p(e) = ln C(B(B+1)/2 + E - 1, E)."""
    pairs = B * (B + 1) / 2.0
    return float(lbinom(pairs + E - 1, E))


def partition_prior(N, block_sizes):
    """-log p(b) = ln N + ln C(N-1, B-1) + ln(N! / prod n_r!)."""
    sizes = np.asarray(block_sizes, dtype=np.float64)
    if N == 0:
        return 0.0
    B = len(sizes)
    return float(np.log(N) + lbinom(N - 1, B - 1) + gammaln(N + 1) - gammaln(sizes + 1).sum())


def degree_prior(stats):
    """-log p(k | b, e), uniform variant: sum_r ln C(n_r + e_r - 1, e_r)."""
    return float(lbinom(stats.block_sizes + stats.block_degrees - 1, stats.block_degrees).sum())


def likelihood_dc(g, stats):
    """
    Degree-corrected microcanonical likelihood term.

    sum_r ln e_r! - sum_{r<s} ln e_rs! - sum_r ln e_rr!! - sum_i ln k_i!
    """
    _, _, off, diag = _split_counts(stats)
    value = (
        gammaln(stats.block_degrees + 1.0).sum()
        - gammaln(off + 1.0).sum()
        - log_double_factorial_even(diag).sum()
        - gammaln(stats.degrees + 1.0).sum()
    )
    return float(value)


def likelihood_ndc(g, stats):
    """
    Non-degree-corrected microcanonical likelihood term.

    sum_{r<s} ln C(n_r n_s, e_rs) + sum_r ln C(C(n_r, 2), e_rr / 2)

    Raises:
        InfeasiblePartitionError: If a count exceeds the available pairs
    """
    rows, cols, off, diag = _split_counts(stats)
    n = stats.block_sizes.astype(np.float64)
    between = n[rows] * n[cols]
    within = n * (n - 1) / 2.0
    internal = diag / 2
    if np.any(off > between) or np.any(internal > within):
        raise InfeasiblePartitionError("Block edge counts exceed the number of node pairs")
    return float(lbinom(between, off).sum() + lbinom(within, internal).sum())


@dataclass(frozen=True)
class DlReport:
    """Description-length components (nats) and their weighted total."""

    config: DlConfig
    num_nodes: int
    num_edges: int
    num_blocks: int
    likelihood: float
    degree_prior: float
    partition_prior: float
    edge_matrix_prior: float
    total: float

    @property
    def total_without_edge_matrix_prior(self):
        return self.likelihood + self.config.beta * (self.degree_prior + self.partition_prior)

    def to_dict(self):
        return {
            "model": self.config.model.value,
            "beta": self.config.beta,
            "edges_dl": self.config.edges_dl,
            "num_nodes": self.num_nodes,
            "num_edges": self.num_edges,
            "num_blocks": self.num_blocks,
            "likelihood": self.likelihood,
            "degree_prior": self.degree_prior,
            "partition_prior": self.partition_prior,
            "edge_matrix_prior": self.edge_matrix_prior,
            "total": self.total,
        }


def compute_dl(g, p, cfg=None):
    """
    Description length of (g, p).

    Args:
        g: Graph
        p: Partition of g's nodes
        cfg: DlConfig (default: DC, beta 1, edge prior on)

    Returns:
        DlReport
    """
    cfg = cfg or DlConfig()
    stats = block_stats(g, p)
    if cfg.model is SbmModel.DC:
        likelihood = likelihood_dc(g, stats)
        deg = degree_prior(stats)
    else:
        likelihood = likelihood_ndc(g, stats)
        deg = 0.0
    part = partition_prior(g.num_nodes, stats.block_sizes)
    edges = edge_matrix_prior(stats.num_blocks, stats.num_edges) if stats.num_blocks else 0.0
    total = likelihood + cfg.beta * (deg + part + (edges if cfg.edges_dl else 0.0))
    return DlReport(cfg, g.num_nodes, g.num_edges, stats.num_blocks, likelihood, deg, part, edges, total)


COMPONENTS = ("likelihood", "degree_prior", "partition_prior", "edge_matrix_prior", "total")


def compare_reports(treated, untreated):
    """
    Component-wise differences treated - untreated.

    Positive values favour the untreated clustering.
    """
    diff = {name: getattr(treated, name) - getattr(untreated, name) for name in COMPONENTS}
    diff["total_without_edge_matrix_prior"] = (
        treated.total_without_edge_matrix_prior - untreated.total_without_edge_matrix_prior
    )
    return diff


def relative_dl(report, baseline):
    """Ratio of totals; values below 1 mean a lower description length than the baseline."""
    if baseline.total == 0:
        raise GraphDomainError("Baseline description length is zero; relative DL is undefined")
    return report.total / baseline.total


def beta_sweep(g, p, model=SbmModel.DC, betas=(0.0, 0.25, 0.5, 0.75, 1.0), edges_dl=True):
    """One report per prior weight for a fixed partition."""
    return [compute_dl(g, p, DlConfig(model, beta, edges_dl)) for beta in betas]
