"""Fixture-scale runs of the treatment guarantees and the WCC performance smoke test."""

import math
import time

import numpy as np
import pytest

from cluster_connectivity.core.dl import DlConfig, compare_reports, compute_dl
from cluster_connectivity.core.graph import Partition, induced_subgraph, is_connected, load_edgelist
from cluster_connectivity.core.mincut import global_min_cut, min_cut_value_bruteforce
from cluster_connectivity.core.synthgen import CliqueFixtureSpec, PlantedSpec, gen_cliques, gen_planted
from cluster_connectivity.core.treatments import treat_cc, treat_wcc
from cluster_connectivity.reports.report_writer import ReportWriter

pytestmark = pytest.mark.slow

NUM_FIXTURES = 100


def planted_fixture(seed):
    rng = np.random.default_rng(seed)
    blocks = tuple(int(x) for x in rng.integers(5, 41, size=rng.integers(2, 9)))
    p_in = float(rng.uniform(0.15, 0.8))
    spec = PlantedSpec(blocks, p_in, float(rng.uniform(0.01, 0.05)), seed)
    g, truth = gen_planted(spec)
    return g, Partition.from_labels(truth.assignment // 2)


def bridged_fixture(seed):
    rng = np.random.default_rng(10_000 + seed)
    m, c = int(rng.integers(3, 11)), int(rng.integers(3, 13))
    sizing = CliqueFixtureSpec(m, c)
    bridges = int(rng.integers(0, min(3 * m, sizing.available_bridges) + 1))
    g, truth = gen_cliques(CliqueFixtureSpec(m, c, bridges, seed))
    return g, Partition.from_labels(truth.assignment // 3)


def assert_well_connected(g, p):
    for members in p.clusters:
        n = len(members)
        if n == 1:
            continue
        sub = induced_subgraph(g, members)
        assert is_connected(sub)
        cut = min_cut_value_bruteforce(sub) if n <= 12 else global_min_cut(sub).cut_size
        assert cut > math.log10(n), f"cluster of {n} nodes has min cut {cut}"


@pytest.mark.parametrize("seed", range(NUM_FIXTURES))
@pytest.mark.parametrize("make_fixture", [planted_fixture, bridged_fixture], ids=["planted", "bridged"])
def test_wcc_guarantee(make_fixture, seed):
    g, p = make_fixture(seed)
    treated = treat_wcc(g, p)
    assert treated.refines(p)
    assert_well_connected(g, treated)
    assert treat_wcc(g, treated) == treated


@pytest.mark.parametrize("seed", range(NUM_FIXTURES))
@pytest.mark.parametrize("make_fixture", [planted_fixture, bridged_fixture], ids=["planted", "bridged"])
def test_cc_guarantee(make_fixture, seed):
    g, p = make_fixture(seed)
    treated = treat_cc(g, p)
    assert treated.refines(p)
    for members in treated.clusters:
        if len(members) > 1:
            assert is_connected(induced_subgraph(g, members))
    assert treat_cc(g, treated) == treated


def test_cc_sign_pattern_on_random_groupings():
    lower_without_edge_prior = 0
    num_fixtures = 30
    for seed in range(num_fixtures):
        rng = np.random.default_rng(seed)
        m, c = int(rng.integers(6, 21)), int(rng.integers(3, 9))
        g, truth = gen_cliques(CliqueFixtureSpec(m, c, seed=seed))

        # groups of 2-4 cliques, every cluster holds at least two components
        order = rng.permutation(m)
        group_of = np.empty(m, dtype=np.int64)
        start, gid = 0, 0
        while start < m:
            size = int(rng.integers(2, 5))
            if m - (start + size) < 2:
                size = m - start
            group_of[order[start:start + size]] = gid
            start, gid = start + size, gid + 1
        merged = Partition.from_labels(group_of[truth.assignment])

        diff = compare_reports(compute_dl(g, treat_cc(g, merged)), compute_dl(g, merged))
        assert diff["likelihood"] < 0
        assert diff["degree_prior"] <= 1e-9
        assert diff["partition_prior"] > 0
        assert diff["edge_matrix_prior"] > 0
        without = DlConfig(edges_dl=False)
        treated_total = compute_dl(g, treat_cc(g, merged), without).total
        lower_without_edge_prior += treated_total <= compute_dl(g, merged, without).total
    assert lower_without_edge_prior >= 0.95 * num_fixtures


def test_wcc_performance_smoke(tmp_path, record_property):
    g, truth = gen_planted(PlantedSpec((200,) * 500, 0.1, 2e-6, seed=0))
    assert 900_000 < g.num_edges < 1_100_000
    path = ReportWriter().write_edgelist(tmp_path / "large.tsv", g)

    started = time.perf_counter()
    loaded = load_edgelist(path)
    load_seconds = time.perf_counter() - started

    started = time.perf_counter()
    treated = treat_wcc(loaded, truth, num_processors=4)
    treatment_seconds = time.perf_counter() - started

    record_property("load_seconds", round(load_seconds, 2))
    record_property("treatment_seconds", round(treatment_seconds, 2))
    assert treated.refines(truth)
    assert treatment_seconds < 300
