"""
Synthetic Graph Module
======================
Seeded fixture generators with ground-truth clusterings.

Architecture:
- gen_cliques: disjoint cliques plus optional random inter-clique bridges
- gen_planted: planted-partition sampler; for every block (pair) the edge
  count is drawn from a binomial and that many distinct node pairs are
  chosen uniformly, which is equivalent to independent Bernoulli edges
- All randomness comes from numpy's default_rng(seed)

Data Flow:
  Spec → default_rng(seed) → edge arrays → (Graph, Partition)
"""

import logging
from dataclasses import dataclass

import numpy as np

from cluster_connectivity.core.errors import ConfigError
from cluster_connectivity.core.graph import Graph, Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CliqueFixtureSpec:
    """m disjoint c-cliques plus `bridges` random inter-clique edges."""

    num_cliques: int
    clique_size: int
    bridges: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.num_cliques < 1:
            raise ConfigError(f"num_cliques must be >= 1, got {self.num_cliques}")
        if self.clique_size < 2:
            raise ConfigError(f"clique_size must be >= 2, got {self.clique_size}")
        if self.bridges < 0:
            raise ConfigError(f"bridges must be >= 0, got {self.bridges}")

    @property
    def num_nodes(self):
        return self.num_cliques * self.clique_size

    @property
    def available_bridges(self):
        n, c = self.num_nodes, self.clique_size
        return n * (n - 1) // 2 - self.num_cliques * c * (c - 1) // 2


@dataclass(frozen=True)
class PlantedSpec:
    """Blocks of the given sizes; edges with probability p_in inside blocks, p_out between."""

    blocks: tuple
    p_in: float
    p_out: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        if not self.blocks or min(self.blocks) < 1:
            raise ConfigError(f"Block sizes must be >= 1, got {self.blocks}")
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise ConfigError(f"Need 0 <= p_out <= p_in <= 1, got p_in={self.p_in}, p_out={self.p_out}")

    @property
    def num_nodes(self):
        return sum(self.blocks)


def _upper_pairs(n, index):
    """Decode row-major indices of the strict upper triangle of an n x n matrix."""
    index = np.asarray(index, dtype=np.int64)
    i = n - 2 - np.floor(np.sqrt(-8.0 * index + 4.0 * n * (n - 1) - 7) / 2.0 - 0.5).astype(np.int64)
    j = index + i + 1 - n * (n - 1) // 2 + (n - i) * (n - i - 1) // 2
    return i, j


def _bernoulli_within(rng, n, offset, p):
    total = n * (n - 1) // 2
    count = int(rng.binomial(total, p)) if total else 0
    if count == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    i, j = _upper_pairs(n, np.sort(rng.choice(total, size=count, replace=False)))
    return i + offset, j + offset


def _bernoulli_between(rng, n_a, offset_a, n_b, offset_b, p):
    total = n_a * n_b
    count = int(rng.binomial(total, p))
    if count == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    index = np.sort(rng.choice(total, size=count, replace=False))
    return index // n_b + offset_a, index % n_b + offset_b


def _ground_truth(sizes):
    return Partition.from_labels(np.repeat(np.arange(len(sizes)), sizes))


def gen_cliques(spec):
    """
    Disjoint cliques with random bridges.

    Args:
        spec: CliqueFixtureSpec

    Returns:
        (Graph, Partition) with one ground-truth cluster per clique

    Raises:
        ConfigError: If more bridges are requested than inter-clique pairs exist
    """
    if spec.bridges > spec.available_bridges:
        raise ConfigError(f"{spec.bridges} bridges requested but only {spec.available_bridges} inter-clique pairs exist")
    m, c = spec.num_cliques, spec.clique_size
    n = spec.num_nodes
    rng = np.random.default_rng(spec.seed)

    i, j = _upper_pairs(c, np.arange(c * (c - 1) // 2))
    offsets = np.repeat(np.arange(m, dtype=np.int64) * c, len(i))
    sources = [np.tile(i, m) + offsets]
    targets = [np.tile(j, m) + offsets]

    if spec.bridges:
        clique_of = np.arange(n) // c
        if spec.bridges * 2 > spec.available_bridges:
            u, v = _upper_pairs(n, np.arange(n * (n - 1) // 2))
            cross = clique_of[u] != clique_of[v]
            picks = np.sort(rng.choice(int(cross.sum()), size=spec.bridges, replace=False))
            sources.append(u[cross][picks])
            targets.append(v[cross][picks])
        else:
            chosen = {}
            while len(chosen) < spec.bridges:
                u, v = rng.integers(n, size=(2, spec.bridges))
                for a, b in zip(u.tolist(), v.tolist()):
                    if clique_of[a] != clique_of[b] and len(chosen) < spec.bridges:
                        chosen.setdefault((min(a, b), max(a, b)), None)
            bridge = np.array(list(chosen), dtype=np.int64)
            sources.append(bridge[:, 0])
            targets.append(bridge[:, 1])

    g = Graph.from_edges(n, np.concatenate(sources), np.concatenate(targets))
    logger.info(f"Generated {m} cliques of size {c} with {spec.bridges} bridges: {g.num_nodes} nodes, {g.num_edges} edges")
    return g, _ground_truth([c] * m)


def gen_planted(spec):
    """
    Planted-partition graph.

    Args:
        spec: PlantedSpec

    Returns:
        (Graph, Partition) with one ground-truth cluster per block
    """
    rng = np.random.default_rng(spec.seed)
    sizes = spec.blocks
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    sources, targets = [], []

    for r, n_r in enumerate(sizes):
        u, v = _bernoulli_within(rng, n_r, offsets[r], spec.p_in)
        sources.append(u)
        targets.append(v)
    if spec.p_out > 0:
        for r in range(len(sizes)):
            for s in range(r + 1, len(sizes)):
                u, v = _bernoulli_between(rng, sizes[r], offsets[r], sizes[s], offsets[s], spec.p_out)
                sources.append(u)
                targets.append(v)

    g = Graph.from_edges(spec.num_nodes, np.concatenate(sources), np.concatenate(targets))
    logger.info(
        f"Generated planted partition ({len(sizes)} blocks, p_in={spec.p_in}, p_out={spec.p_out}): "
        f"{g.num_nodes} nodes, {g.num_edges} edges"
    )
    return g, _ground_truth(sizes)
