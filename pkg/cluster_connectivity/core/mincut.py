"""
Minimum Cut Module
==================
Exact global minimum edge cut of a connected graph.

Architecture:
- Maximum-adjacency (MA) orderings over a contracted weighted multigraph
- Each ordering certifies a lower bound on the connectivity of every
  scanned edge (Nagamochi-Ibaraki); edges whose bound reaches the best
  cut found so far are contracted together with the last ordered pair
- Every vertex of every contracted graph is a candidate cut; among the
  candidates of minimum value the most balanced one is kept
- Degree-one shortcut isolates a leaf without running the full algorithm

Data Flow:
  Connected Graph → MA ordering → candidate cuts → contraction → CutResult
"""

import heapq
import logging
from dataclasses import dataclass

import numpy as np

from cluster_connectivity.core.errors import ContractViolationError, GraphDomainError
from cluster_connectivity.core.graph import is_connected

logger = logging.getLogger(__name__)

BRUTEFORCE_MAX_NODES = 20


@dataclass(frozen=True)
class CutResult:
    """
    A bipartition of a connected graph.

    Attributes:
        cut_size: Number of edges with one endpoint on each side
        side_a: Sorted node ids of the first side
        side_b: Sorted node ids of the second side
    """

    cut_size: int
    side_a: np.ndarray
    side_b: np.ndarray

    @classmethod
    def from_side(cls, g, side):
        """Build the cut separating `side` from the rest of g."""
        mask = np.zeros(g.num_nodes, dtype=bool)
        mask[np.asarray(side, dtype=np.int64)] = True
        u, v = g.edge_arrays()
        cut_size = int(np.count_nonzero(mask[u] != mask[v]))
        return cls(cut_size, np.flatnonzero(mask), np.flatnonzero(~mask))


def _require_cuttable(g):
    if g.num_nodes < 2:
        raise GraphDomainError("A cut needs at least two nodes")
    if not is_connected(g):
        raise ContractViolationError("Min-cut input must be connected; split components first")


def degree_one_shortcut(g):
    """
    Cut isolating the smallest-id node of degree one, if any.

    Args:
        g: Connected graph with at least two nodes

    Returns:
        CutResult with cut_size 1, or None when the minimum degree exceeds 1
    """
    _require_cuttable(g)
    leaves = np.flatnonzero(g.degrees == 1)
    if leaves.size == 0:
        return None
    leaf = int(leaves[0])
    rest = np.delete(np.arange(g.num_nodes, dtype=np.int64), leaf)
    return CutResult(1, np.array([leaf], dtype=np.int64), rest)


class _ContractedGraph:
    """Weighted multigraph whose vertices are disjoint groups of original nodes."""

    def __init__(self, g):
        self.n = g.num_nodes
        self.adj = {}
        for u in range(g.num_nodes):
            self.adj[u] = {int(v): 1 for v in g.neighbors(u)}
        self.members = {u: [u] for u in range(g.num_nodes)}

    def weighted_degree(self, v):
        return sum(self.adj[v].values())

    def ma_ordering(self, bound):
        """
        One maximum-adjacency scan.

        Args:
            bound: Current best cut value

        Returns:
            (order, contractible) where contractible lists vertex pairs whose
            connectivity is certified to be at least `bound`
        """
        start = min(self.adj)
        attach = dict.fromkeys(self.adj, 0)
        scanned = set()
        heap = [(0, start)]
        order, contractible = [], []
        while heap:
            neg, x = heapq.heappop(heap)
            if x in scanned or -neg != attach[x]:
                continue
            scanned.add(x)
            order.append(x)
            for y, w in self.adj[x].items():
                if y in scanned:
                    continue
                attach[y] += w
                if attach[y] >= bound:
                    contractible.append((x, y))
                heapq.heappush(heap, (-attach[y], y))
        return order, contractible

    def contract(self, pairs):
        parent = {v: v for v in self.adj}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                if rb < ra:
                    ra, rb = rb, ra
                parent[rb] = ra

        adj, members = {}, {}
        for v in self.adj:
            r = find(v)
            members.setdefault(r, []).extend(self.members[v])
            row = adj.setdefault(r, {})
            for y, w in self.adj[v].items():
                ry = find(y)
                if ry != r:
                    row[ry] = row.get(ry, 0) + w
        self.adj, self.members = adj, members


def _is_better(candidate, best, n):
    """Order cuts by value, then balance, then lexicographic side_a."""
    value, side = candidate
    best_value, best_side = best
    if value != best_value:
        return value < best_value
    balance = min(len(side), n - len(side))
    best_balance = min(len(best_side), n - len(best_side))
    if balance != best_balance:
        return balance > best_balance
    return tuple(side) < tuple(best_side)


def _side_with_first(side, n):
    """Express a side as the one containing node 0."""
    side = np.sort(np.asarray(side, dtype=np.int64))
    if side[0] == 0:
        return side
    mask = np.ones(n, dtype=bool)
    mask[side] = False
    return np.flatnonzero(mask)


def global_min_cut(g):
    """
    Exact global minimum edge cut, preferring balanced sides.

    Args:
        g: Connected graph with at least two nodes

    Returns:
        CutResult whose side_a contains node 0

    Raises:
        GraphDomainError: Fewer than two nodes
        ContractViolationError: Disconnected input
    """
    _require_cuttable(g)
    n = g.num_nodes
    cg = _ContractedGraph(g)
    best = None
    passes = 0

    while len(cg.adj) > 1:
        for v in cg.adj:
            candidate = (cg.weighted_degree(v), cg.members[v])
            if best is None or candidate[0] <= best[0]:
                candidate = (candidate[0], tuple(_side_with_first(candidate[1], n)))
                if best is None or _is_better(candidate, best, n):
                    best = candidate
        if len(cg.adj) == 2:
            break
        order, contractible = cg.ma_ordering(best[0])
        contractible.append((order[-2], order[-1]))
        cg.contract(contractible)
        passes += 1

    value, side = best
    side_a = np.asarray(side, dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    mask[side_a] = False
    logger.debug(f"Min cut {value} on {n} nodes after {passes} passes (sides {len(side_a)}/{n - len(side_a)})")
    return CutResult(int(value), side_a, np.flatnonzero(mask))


def min_cut_value_bruteforce(g):
    """
    Minimum cut value by enumerating every proper bipartition.

    Args:
        g: Connected graph with 2..20 nodes

    Returns:
        int
    """
    n = g.num_nodes
    if n > BRUTEFORCE_MAX_NODES:
        raise GraphDomainError(f"Brute force refused for {n} > {BRUTEFORCE_MAX_NODES} nodes")
    _require_cuttable(g)

    # node 0 always on side 0; bit i-1 of the mask places node i
    masks = np.arange(1, 1 << (n - 1), dtype=np.int64)
    sides = np.zeros((n, masks.size), dtype=np.int8)
    for i in range(1, n):
        sides[i] = (masks >> (i - 1)) & 1
    crossing = np.zeros(masks.size, dtype=np.int64)
    for a, b in zip(*g.edge_arrays()):
        crossing += sides[a] != sides[b]
    return int(crossing.min())
