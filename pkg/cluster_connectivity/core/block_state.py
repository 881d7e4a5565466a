"""
Block State Module
==================
Mutable block bookkeeping for description-length minimization.

Architecture:
- Dense B x B edge-count matrix plus block sizes and degree sums
- The description length splits into per-block terms, per-pair terms and
  a term that depends on B only; a node move or a block merge touches the
  rows of at most two blocks, so deltas are evaluated on those rows only
- Move deltas are vectorized over every candidate target block of a node,
  merge deltas over a batch of candidate block pairs
- Block ids stay compact (0..B-1); emptying or opening a block relabels
  blocks in order of their smallest node

Data Flow:
  Graph + labels → BlockState → move / merge deltas → apply → labels
"""

import logging

import numpy as np
from scipy.special import gammaln

from cluster_connectivity.core.dl import DlConfig, SbmModel, lbinom, log_double_factorial_even
from cluster_connectivity.core.graph import Partition

logger = logging.getLogger(__name__)

MERGE_CHUNK_CELLS = 1 << 22


def pair_terms(model, m, n_a, n_b):
    """Description-length contribution of block pairs with m edges between them."""
    m = np.asarray(m, dtype=np.float64)
    if model is SbmModel.DC:
        return -gammaln(m + 1.0)
    return lbinom(np.asarray(n_a, dtype=np.float64) * n_b, m)


def block_terms(model, beta, n, er, diag):
    """
    Per-block contribution: likelihood diagonal part, degree prior and the
    -ln n_r! part of the partition prior. Empty blocks contribute 0.
    """
    n = np.asarray(n, dtype=np.float64)
    er = np.asarray(er, dtype=np.float64)
    diag = np.asarray(diag, dtype=np.float64)
    value = -beta * gammaln(n + 1.0)
    if model is SbmModel.DC:
        value = value + gammaln(er + 1.0) - log_double_factorial_even(diag)
        value = value + beta * lbinom(np.maximum(n, 1.0) + er - 1.0, er)
    else:
        value = value + lbinom(n * (n - 1.0) / 2.0, diag / 2.0)
    return np.where(n > 0, value, 0.0)


class BlockState:
    """
    Block assignment with the aggregates needed for incremental updates.

    Attributes:
        labels: Block id per node (compact 0..B-1)
        sizes: n_r
        block_degrees: e_r
        edge_counts: Dense symmetric e_rs, diagonal = 2 x internal edges
    """

    def __init__(self, g, labels, dl_config=None):
        self.g = g
        self.dl_config = dl_config or DlConfig()
        self.model = self.dl_config.model
        self.beta = float(self.dl_config.beta)
        self.degrees = g.degrees.astype(np.int64)
        self._edges = g.edge_arrays()
        self._global = self._global_table(g.num_nodes, g.num_edges)
        self._load(Partition.from_labels(labels).assignment)

    def _global_table(self, N, E):
        """Terms depending on B only, indexed by B (entry 0 unused)."""
        B = np.arange(N + 1, dtype=np.float64)
        table = np.zeros(N + 1)
        if N == 0:
            return table
        B1 = np.maximum(B, 1.0)
        prior = np.log(N) + lbinom(N - 1.0, B1 - 1.0) + gammaln(N + 1.0)
        if self.dl_config.edges_dl:
            prior = prior + lbinom(B1 * (B1 + 1.0) / 2.0 + E - 1.0, E)
        table = self.beta * prior
        if self.model is SbmModel.DC:
            table = table - gammaln(self.degrees + 1.0).sum()
        table[0] = 0.0
        return table

    def _load(self, labels):
        self.labels = np.asarray(labels, dtype=np.int64).copy()
        B = int(self.labels.max()) + 1 if self.labels.size else 0
        self.sizes = np.bincount(self.labels, minlength=B).astype(np.int64)
        self.block_degrees = np.bincount(self.labels, weights=self.degrees, minlength=B).astype(np.int64)
        u, v = self._edges
        bu, bv = self.labels[u], self.labels[v]
        flat = np.concatenate([bu * B + bv, bv * B + bu])
        self.edge_counts = np.bincount(flat, minlength=B * B).reshape(B, B).astype(np.int64)

    @property
    def num_blocks(self):
        return len(self.sizes)

    def partition(self):
        return Partition.from_labels(self.labels)

    def _pair_matrix(self):
        n = self.sizes.astype(np.float64)
        pm = pair_terms(self.model, self.edge_counts, n[:, None], n[None, :])
        np.fill_diagonal(pm, 0.0)
        return pm

    def _block_vector(self):
        return block_terms(self.model, self.beta, self.sizes, self.block_degrees, np.diag(self.edge_counts))

    def total(self):
        """Description length of the current state; equals compute_dl(...).total."""
        pairs = np.triu(self._pair_matrix(), 1).sum()
        return float(self._block_vector().sum() + pairs + self._global[self.num_blocks])

    # ---- node moves ----

    def move_deltas(self, node, allow_new_block=True):
        """
        Description-length change for moving `node` to each candidate block.

        Candidates are the blocks of its neighbours plus, when allowed and the
        node is not alone, a new empty block with id B.

        Returns:
            (candidates, deltas), candidates ascending
        """
        B = self.num_blocks
        r = int(self.labels[node])
        nbr_blocks = self.labels[self.g.neighbors(node)]
        kvec = np.bincount(nbr_blocks, minlength=B + 1).astype(np.int64)
        candidates = np.unique(nbr_blocks)
        if allow_new_block and self.sizes[r] > 1:
            candidates = np.append(candidates, B)
        candidates = candidates[candidates != r]
        if candidates.size == 0:
            return candidates, np.zeros(0)

        S = candidates
        k = int(self.degrees[node])
        n = np.append(self.sizes, 0).astype(np.float64)
        er = np.append(self.block_degrees, 0)
        diag = np.append(np.diag(self.edge_counts), 0)
        row_r = np.append(self.edge_counts[r], 0)
        rows_s = np.zeros((len(S), B + 1), dtype=np.int64)
        real = S < B
        rows_s[real, :B] = self.edge_counts[S[real]]
        n_r, n_s = n[r], n[S]
        kr, ks = kvec[r], kvec[S]
        picks = np.arange(len(S))

        old_r = pair_terms(self.model, row_r, n_r, n)
        new_r = pair_terms(self.model, row_r - kvec, n_r - 1, n)
        old_r_sum = old_r.sum() - old_r[r] - old_r[S]
        new_r_sum = new_r.sum() - new_r[r] - new_r[S]

        old_s = pair_terms(self.model, rows_s, n_s[:, None], n[None, :])
        new_s = pair_terms(self.model, rows_s + kvec[None, :], (n_s + 1)[:, None], n[None, :])
        old_s_sum = old_s.sum(axis=1) - old_s[picks, r] - old_s[picks, S]
        new_s_sum = new_s.sum(axis=1) - new_s[picks, r] - new_s[picks, S]

        old_rs = pair_terms(self.model, row_r[S], n_r, n_s)
        new_rs = pair_terms(self.model, row_r[S] + kr - ks, n_r - 1, n_s + 1)

        old_local = (
            block_terms(self.model, self.beta, n_r, er[r], diag[r])
            + block_terms(self.model, self.beta, n_s, er[S], diag[S])
        )
        new_local = (
            block_terms(self.model, self.beta, n_r - 1, er[r] - k, diag[r] - 2 * kr)
            + block_terms(self.model, self.beta, n_s + 1, er[S] + k, diag[S] + 2 * ks)
        )

        new_B = B - int(n_r == 1) + (S == B).astype(np.int64)
        d_global = self._global[new_B] - self._global[B]
        deltas = (new_local + new_r_sum + new_s_sum + new_rs) - (old_local + old_r_sum + old_s_sum + old_rs) + d_global
        return S, deltas

    def move(self, node, target):
        B = self.num_blocks
        r = int(self.labels[node])
        if target == r:
            return
        if target >= B or self.sizes[r] == 1:
            labels = self.labels.copy()
            labels[node] = target
            self._load(Partition.from_labels(labels).assignment)
            return
        kvec = np.bincount(self.labels[self.g.neighbors(node)], minlength=B).astype(np.int64)
        k = self.degrees[node]
        self.sizes[r] -= 1
        self.sizes[target] += 1
        self.block_degrees[r] -= k
        self.block_degrees[target] += k
        self.edge_counts[r, :] -= kvec
        self.edge_counts[:, r] -= kvec
        self.edge_counts[target, :] += kvec
        self.edge_counts[:, target] += kvec
        self.labels[node] = target

    def sweep(self, order, allow_new_block=True, tolerance=1e-9):
        """
        One pass of best-improvement moves over `order`.

        Returns:
            Number of accepted moves
        """
        moved = 0
        for node in order:
            candidates, deltas = self.move_deltas(int(node), allow_new_block)
            if candidates.size == 0:
                continue
            best = int(np.argmin(deltas))
            if deltas[best] < -tolerance:
                self.move(int(node), int(candidates[best]))
                moved += 1
        return moved

    # ---- block merges ----

    def candidate_pairs(self, all_pairs_max_blocks=64, per_block=8, rng=None):
        """
        Block pairs (r < s) worth evaluating for a merge.

        All pairs when B <= all_pairs_max_blocks; otherwise, for every block,
        up to `per_block` neighbouring blocks (largest edge counts first, or a
        random sample when rng is given). Blocks with no neighbours are paired
        with the next blocks in id order.
        """
        B = self.num_blocks
        if B < 2:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        if B <= all_pairs_max_blocks:
            r, s = np.triu_indices(B, 1)
            return r.astype(np.int64), s.astype(np.int64)

        firsts, seconds = [], []
        for r in range(B):
            row = self.edge_counts[r]
            nbrs = np.flatnonzero(row)
            nbrs = nbrs[nbrs != r]
            if nbrs.size == 0:
                nbrs = (r + 1 + np.arange(min(per_block, B - 1))) % B
            elif nbrs.size > per_block:
                if rng is None:
                    nbrs = nbrs[np.argsort(-row[nbrs], kind="stable")[:per_block]]
                else:
                    nbrs = rng.choice(nbrs, size=per_block, replace=False)
            firsts.append(np.full(len(nbrs), r, dtype=np.int64))
            seconds.append(np.asarray(nbrs, dtype=np.int64))
        a = np.concatenate(firsts)
        b = np.concatenate(seconds)
        keys = np.unique(np.minimum(a, b) * B + np.maximum(a, b))
        return keys // B, keys % B

    def merge_deltas(self, r, s):
        """Description-length change for merging each pair (r[i], s[i])."""
        r = np.asarray(r, dtype=np.int64)
        s = np.asarray(s, dtype=np.int64)
        B = self.num_blocks
        if r.size == 0:
            return np.zeros(0)
        n = self.sizes.astype(np.float64)
        diag = np.diag(self.edge_counts)
        pm = self._pair_matrix()
        row_sums = pm.sum(axis=1)
        local = self._block_vector()
        old = local[r] + local[s] + row_sums[r] + row_sums[s] - pm[r, s]

        new = np.empty(len(r))
        step = max(1, MERGE_CHUNK_CELLS // max(B, 1))
        for start in range(0, len(r), step):
            rr, ss = r[start:start + step], s[start:start + step]
            picks = np.arange(len(rr))
            n_sum = n[rr] + n[ss]
            q = pair_terms(self.model, self.edge_counts[rr] + self.edge_counts[ss], n_sum[:, None], n[None, :])
            pairs = q.sum(axis=1) - q[picks, rr] - q[picks, ss]
            merged_diag = diag[rr] + diag[ss] + 2 * self.edge_counts[rr, ss]
            block = block_terms(
                self.model, self.beta, n_sum, self.block_degrees[rr] + self.block_degrees[ss], merged_diag
            )
            new[start:start + step] = block + pairs
        return new - old + (self._global[B - 1] - self._global[B])

    def merge(self, pairs):
        """Apply disjoint merges; each (r, s) folds s into r."""
        target = np.arange(self.num_blocks, dtype=np.int64)
        for r, s in pairs:
            target[s] = r
        self._load(Partition.from_labels(target[self.labels]).assignment)
