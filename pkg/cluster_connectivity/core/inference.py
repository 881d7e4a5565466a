"""
Inference Module
================
Flat SBM fitting by description-length minimization.

Architecture:
- Every restart starts from all-singleton blocks and agglomerates down to
  a single block, interleaving greedy node-move sweeps, and keeps the best
  partition seen along the way; a final sweep (new blocks allowed) polishes it
- Restart 0 is fully greedy; later restarts draw sweep orders and pick
  among the few best merges with their own seeded generator
- Restarts are independent work items (ordered_map), with seeds spawned
  from the master seed, so results do not depend on the worker count
- 'chosen' fits DC and NDC and keeps the lower total (ties go to DC and
  are flagged)

Data Flow:
  Graph → restarts (agglomerate → sweep) → best per model → model choice → FitResult
"""

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from cluster_connectivity.core.block_state import BlockState
from cluster_connectivity.core.dl import DlConfig, SbmModel, compute_dl
from cluster_connectivity.core.errors import ConfigError, GraphDomainError
from cluster_connectivity.core.graph import Partition
from cluster_connectivity.core.parallel import ordered_map

logger = logging.getLogger(__name__)

MODELS = ("dc", "ndc", "chosen")
IMPROVEMENT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class InferenceConfig:
    """
    Fitting settings.

    Attributes:
        model: 'dc', 'ndc' or 'chosen'
        beta: Prior weight in [0, 1]
        edges_dl: Include the edge-count-matrix prior
        seed: Master seed; fully determines the run
        restarts: Independent restarts per model (>= 1)
        move_sweep_limit: Maximum sweeps of the final polishing phase
        sweeps_per_merge: Move sweeps interleaved after every merge step
        merge_batch_fraction: Share of blocks merged per step while B is large
        merge_candidates_per_block: Neighbour blocks considered per block while B is large
        all_pairs_max_blocks: Evaluate every block pair at or below this B
        random_top_k: Randomized restarts pick among this many best merges
    """

    model: str = "dc"
    beta: float = 1.0
    edges_dl: bool = True
    seed: int = 0
    restarts: int = 1
    move_sweep_limit: int = 10
    sweeps_per_merge: int = 1
    merge_batch_fraction: float = 0.1
    merge_candidates_per_block: int = 8
    all_pairs_max_blocks: int = 64
    random_top_k: int = 3

    def __post_init__(self):
        model = str(self.model).strip().lower()
        if model not in MODELS:
            model = SbmModel.parse(model).value
        object.__setattr__(self, "model", model)
        if int(self.restarts) < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if int(self.move_sweep_limit) < 0 or int(self.sweeps_per_merge) < 0:
            raise ConfigError("Sweep limits must be >= 0")
        if not 0.0 < float(self.merge_batch_fraction) <= 1.0:
            raise ConfigError(f"merge_batch_fraction must lie in (0, 1], got {self.merge_batch_fraction}")
        if int(self.merge_candidates_per_block) < 1 or int(self.random_top_k) < 1:
            raise ConfigError("merge_candidates_per_block and random_top_k must be >= 1")
        # validates beta
        DlConfig(SbmModel.DC, self.beta, self.edges_dl)

    @classmethod
    def from_dict(cls, config):
        defaults = cls()
        return cls(**{name: config.get(name, getattr(defaults, name)) for name in cls.__dataclass_fields__})

    @property
    def models(self):
        if self.model == "chosen":
            return (SbmModel.DC, SbmModel.NDC)
        return (SbmModel(self.model),)

    def dl_config(self, model=None):
        if model is None:
            if self.model == "chosen":
                raise ConfigError("A concrete model (dc or ndc) is needed here, not 'chosen'")
            model = self.model
        return DlConfig(SbmModel.parse(model), float(self.beta), bool(self.edges_dl))


@dataclass
class FitResult:
    """
    Outcome of fit().

    Attributes:
        partition: Best partition of the selected model
        report: compute_dl(g, partition) under the selected model
        model_selected: SbmModel
        restarts_log: Best total of every restart of the selected model
        accepted: Best-so-far totals of the winning restart (non-increasing)
        candidate_totals: Best total per fitted model
        tie: True when 'chosen' saw exactly equal DC and NDC totals
    """

    partition: Partition
    report: object
    model_selected: SbmModel
    restarts_log: list
    accepted: list
    candidate_totals: dict = field(default_factory=dict)
    tie: bool = False

    def to_dict(self):
        data = self.report.to_dict()
        data.update({
            "model_selected": self.model_selected.value,
            "candidate_models": list(self.candidate_totals),
            "candidate_totals": dict(self.candidate_totals),
            "chosen_tie": self.tie,
            "restarts_log": list(self.restarts_log),
        })
        return data


def _sweep_order(n, rng):
    if rng is None:
        return np.arange(n, dtype=np.int64)
    return rng.permutation(n)


def greedy_move_sweep(g, p, cfg=None, rng=None, allow_new_blocks=True, state=None):
    """
    Relocate single nodes while the description length decreases.

    Each node may move to a block of one of its neighbours or to a new empty
    block; the move with the largest decrease wins (lowest block id on ties).

    Args:
        g: Graph
        p: Starting partition
        cfg: InferenceConfig with a concrete model
        rng: Generator for the sweep order (None: node id order)
        allow_new_blocks: Allow moves into a new empty block

    Returns:
        Partition with description length <= that of p
    """
    cfg = cfg or InferenceConfig()
    state = state or BlockState(g, p.assignment, cfg.dl_config())
    for sweep in range(cfg.move_sweep_limit):
        moved = state.sweep(_sweep_order(g.num_nodes, rng), allow_new_blocks, IMPROVEMENT_TOLERANCE)
        logger.debug(f"Sweep {sweep}: {moved} moves, B={state.num_blocks}")
        if moved == 0:
            break
    return state.partition()


def _select_merges(state, pairs, deltas, count, rng, top_k):
    """Pick up to `count` disjoint merges, best first (lowest pair on ties)."""
    r, s = pairs
    order = np.lexsort((s, r, deltas))
    if rng is not None and top_k > 1:
        head = min(top_k, len(order))
        first = int(rng.integers(head))
        order = np.concatenate([[order[first]], np.delete(order, first)])

    used = np.zeros(state.num_blocks, dtype=bool)
    chosen = []
    for idx in order:
        a, b = int(r[idx]), int(s[idx])
        if used[a] or used[b]:
            continue
        used[a] = used[b] = True
        chosen.append((a, b))
        if len(chosen) == count:
            break
    return chosen


def agglomerate(g, p, cfg=None, rng=None, trace=None):
    """
    Merge blocks down to a single block and return the best state seen.

    While B exceeds all_pairs_max_blocks, sampled neighbour-block pairs are
    scored and a batch of disjoint merges is applied per step; below it every
    pair is scored and one merge is applied per step. Move sweeps (no new
    blocks) follow every step.

    Args:
        g: Graph
        p: Starting partition
        cfg: InferenceConfig with a concrete model
        rng: Generator for randomized merge choice and sweep order
        trace: Optional list receiving best-so-far totals

    Returns:
        Partition with the lowest description length along the descent
    """
    cfg = cfg or InferenceConfig()
    state = BlockState(g, p.assignment, cfg.dl_config())
    best_total = state.total()
    best_labels = state.labels.copy()
    if trace is not None:
        trace.append(best_total)

    while state.num_blocks > 1:
        B = state.num_blocks
        pairs = state.candidate_pairs(cfg.all_pairs_max_blocks, cfg.merge_candidates_per_block, rng)
        deltas = state.merge_deltas(*pairs)
        if B > cfg.all_pairs_max_blocks:
            count = max(1, min(int(B * cfg.merge_batch_fraction), B - cfg.all_pairs_max_blocks))
        else:
            count = 1
        merges = _select_merges(state, pairs, deltas, count, rng, cfg.random_top_k)
        state.merge(merges)
        for _ in range(cfg.sweeps_per_merge):
            if state.sweep(_sweep_order(g.num_nodes, rng), False, IMPROVEMENT_TOLERANCE) == 0:
                break

        total = state.total()
        if total < best_total - IMPROVEMENT_TOLERANCE:
            best_total = total
            best_labels = state.labels.copy()
        if trace is not None:
            trace.append(best_total)
        logger.debug(f"Merged {len(merges)} pairs: B {B} -> {state.num_blocks}, DL {total:.4f} (best {best_total:.4f})")

    return Partition.from_labels(best_labels)


def _run_restart(args):
    """
    One restart for one model.

    Args:
        args: (graph, InferenceConfig with concrete model, restart index, SeedSequence)

    Returns:
        (labels, total, trace)
    """
    g, cfg, index, seed_seq = args
    rng = None if index == 0 else np.random.default_rng(seed_seq)
    trace = []
    p = agglomerate(g, Partition.singletons(g.num_nodes), cfg, rng, trace)
    best = BlockState(g, p.assignment, cfg.dl_config())
    best_total = best.total()

    polished = BlockState(g, p.assignment, cfg.dl_config())
    greedy_move_sweep(g, p, cfg, rng, True, state=polished)
    polished_total = polished.total()
    if polished_total < best_total - IMPROVEMENT_TOLERANCE:
        best, best_total = polished, polished_total
    trace.append(min(trace[-1], best_total))
    return best.partition().assignment, best_total, trace


def fit(g, cfg=None, num_processors=1):
    """
    Fit a flat SBM by description-length minimization.

    Args:
        g: Graph with at least one node
        cfg: InferenceConfig
        num_processors: Worker processes for independent restarts

    Returns:
        FitResult
    """
    if g.num_nodes == 0:
        raise GraphDomainError("Cannot fit an SBM to an empty graph")
    cfg = cfg or InferenceConfig()
    started = time.time()
    seeds = np.random.SeedSequence(int(cfg.seed)).spawn(int(cfg.restarts))
    models = cfg.models
    jobs = [
        (g, replace(cfg, model=model.value), index, seeds[index])
        for model in models
        for index in range(cfg.restarts)
    ]
    outcomes = ordered_map(_run_restart, jobs, num_processors)

    fits = {}
    for i, model in enumerate(models):
        runs = outcomes[i * cfg.restarts:(i + 1) * cfg.restarts]
        totals = [float(total) for _, total, _ in runs]
        winner = int(np.argmin(totals))
        labels, _, trace = runs[winner]
        partition = Partition.from_labels(labels)
        report = compute_dl(g, partition, cfg.dl_config(model))
        fits[model] = (partition, report, totals, trace)
        logger.info(f"{model.value.upper()}-Flat: B={report.num_blocks}, DL={report.total:.4f} nats (best of {cfg.restarts})")

    selected = models[0]
    tie = False
    if len(models) == 2:
        dc_total, ndc_total = fits[SbmModel.DC][1].total, fits[SbmModel.NDC][1].total
        tie = dc_total == ndc_total
        selected = SbmModel.DC if dc_total <= ndc_total else SbmModel.NDC
        logger.info(f"Chosen-Flat selected {selected.value.upper()}{' (tie)' if tie else ''}")

    partition, report, totals, trace = fits[selected]
    logger.info(f"Fit finished in {time.time() - started:.2f}s")
    return FitResult(
        partition=partition,
        report=report,
        model_selected=selected,
        restarts_log=totals,
        accepted=list(trace),
        candidate_totals={model.value: fits[model][1].total for model in models},
        tie=tie,
    )
