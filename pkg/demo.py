#!/usr/bin/env python3
"""
End-to-End Toolkit Demo
=======================
Demonstrates the resolution limit and its repair on 64 disjoint 8-cliques.

Flow:
  cliques → DC-Flat fit → connectivity profile → CC / WCC → ARI before/after
"""

import logging
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from cluster_connectivity.core.dl import compute_dl
from cluster_connectivity.core.inference import InferenceConfig, fit
from cluster_connectivity.core.metrics import ari
from cluster_connectivity.core.synthgen import CliqueFixtureSpec, gen_cliques
from cluster_connectivity.core.treatments import profile, treat_cc, treat_wcc

logging.basicConfig(
    level=logging.WARNING,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)


def main():
    """Run end-to-end demo."""
    print("=" * 70)
    print(" " * 18 + "CLUSTER CONNECTIVITY TOOLKIT")
    print(" " * 24 + "End-to-End Demo")
    print("=" * 70)

    print("\n1. Generating 64 disjoint cliques of size 8...")
    g, truth = gen_cliques(CliqueFixtureSpec(num_cliques=64, clique_size=8, seed=0))
    print(f"   ✓ {g.num_nodes} nodes, {g.num_edges} edges, {truth.num_clusters} components")

    print("\n2. Fitting a DC-Flat SBM (3 restarts)...")
    result = fit(g, InferenceConfig(model="dc", restarts=3, seed=0))
    print(f"   ✓ B={result.report.num_blocks}, DL={result.report.total:.2f} nats")
    truth_dl = compute_dl(g, truth, result.report.config)
    print(f"   Planted cliques would cost DL={truth_dl.total:.2f} nats (higher: resolution limit)")

    print("\n3. Connectivity profile of the fitted clustering...")
    prof = profile(g, result.partition)
    if prof.percentages:
        print(f"   {prof.percentages['disconnected']:.1f}% of non-singleton clusters are disconnected")

    print("\n4. Treatments...")
    print(f"   ARI before treatment: {ari(truth, result.partition):.4f}")
    for name, treated in (("CC", treat_cc(g, result.partition)), ("WCC", treat_wcc(g, result.partition))):
        print(f"   {name:3s}: {treated.num_clusters} clusters, ARI {ari(truth, treated):.4f}")

    print("\n" + "=" * 70)
    print("DEMO COMPLETE")
    print("=" * 70)
    print("\nKey Observations:")
    print("  ✓ The fitted SBM merges cliques into disconnected blocks")
    print("  ✓ Splitting clusters into connected components recovers every clique")
    print("\n" + "=" * 70)


if __name__ == "__main__":
    main()
