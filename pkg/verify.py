#!/usr/bin/env python3
"""
System Verification Script
==========================
Checks dependencies, configuration and toolkit modules.
"""

import sys
from pathlib import Path


def check_python_version():
    """Check Python version."""
    version = sys.version_info
    print(f"Python version: {version.major}.{version.minor}.{version.micro}")

    if version < (3, 9):
        print("  ❌ Python 3.9+ required")
        return False
    print("  ✅ Python version OK")
    return True


def check_dependencies():
    """Check if required packages are installed."""
    print("\nChecking dependencies...")

    dependencies = {
        "numpy": "Array computation",
        "scipy": "Sparse graphs, log-gamma",
        "yaml": "Configuration (PyYAML)",
    }

    test_dependencies = {
        "pytest": "Test runner",
        "hypothesis": "Property tests",
        "networkx": "Test oracles",
    }

    all_ok = True

    for package, description in dependencies.items():
        try:
            __import__(package)
            print(f"  ✅ {package:15s} - {description}")
        except ImportError:
            print(f"  ❌ {package:15s} - {description} (NOT INSTALLED)")
            all_ok = False

    print("\nTest dependencies:")
    for package, description in test_dependencies.items():
        try:
            __import__(package)
            print(f"  ✅ {package:15s} - {description}")
        except ImportError:
            print(f"  ⚠️  {package:15s} - {description} (tests unavailable)")

    return all_ok


def check_config():
    """Check if configuration file exists."""
    print("\nChecking configuration...")

    config_path = Path("cluster_connectivity/config/config.yaml")

    if not config_path.exists():
        print(f"  ❌ Configuration file not found: {config_path}")
        return False
    print("  ✅ Configuration file found")
    try:
        import yaml

        with open(config_path) as f:
            config = yaml.safe_load(f)
        print(f"     Config sections: {', '.join(config.keys())}")
        return True
    except Exception as e:
        print(f"  ❌ Configuration file invalid: {e}")
        return False


def check_modules():
    """Check if all toolkit modules can be imported."""
    print("\nChecking toolkit modules...")

    modules = [
        "cluster_connectivity.core.graph",
        "cluster_connectivity.core.mincut",
        "cluster_connectivity.core.treatments",
        "cluster_connectivity.core.dl",
        "cluster_connectivity.core.block_state",
        "cluster_connectivity.core.inference",
        "cluster_connectivity.core.metrics",
        "cluster_connectivity.core.synthgen",
        "cluster_connectivity.reports.clustering_file",
        "cluster_connectivity.reports.report_writer",
        "cluster_connectivity.utils.config_loader",
        "cluster_connectivity.utils.logger",
        "cluster_connectivity.main",
    ]

    all_ok = True
    for module in modules:
        try:
            __import__(module)
            print(f"  ✅ {module.split('.')[-1]}")
        except Exception as e:
            print(f"  ❌ {module.split('.')[-1]}: {e}")
            all_ok = False

    return all_ok


def check_smoke():
    """Triangle description length and a bridged-clique WCC split."""
    print("\nRunning smoke checks...")
    try:
        from cluster_connectivity.core.dl import compute_dl
        from cluster_connectivity.core.graph import Graph, Partition
        from cluster_connectivity.core.synthgen import CliqueFixtureSpec, gen_cliques
        from cluster_connectivity.core.treatments import treat_wcc

        triangle = Graph.from_edges(3, [0, 1, 0], [1, 2, 2])
        total = compute_dl(triangle, Partition.one_block(3)).total
        if abs(total - 5.059426) > 1e-5:
            print(f"  ❌ Triangle DL {total:.6f}, expected 5.059426")
            return False
        print(f"  ✅ Triangle DL {total:.6f} nats")

        g, truth = gen_cliques(CliqueFixtureSpec(2, 5, bridges=1))
        treated = treat_wcc(g, Partition.one_block(g.num_nodes))
        if treated != truth:
            print(f"  ❌ WCC left {treated.num_clusters} clusters, expected 2")
            return False
        print("  ✅ WCC splits two bridged 5-cliques")
        return True
    except Exception as e:
        print(f"  ❌ Smoke check failed: {e}")
        return False


def main():
    """Run all verification checks."""
    print("=" * 70)
    print(" " * 15 + "SYSTEM VERIFICATION")
    print("=" * 70)

    checks = {
        "Python version": check_python_version(),
        "Dependencies": check_dependencies(),
        "Configuration": check_config(),
        "Modules": check_modules(),
        "Smoke": check_smoke(),
    }

    print("\n" + "=" * 70)
    print("VERIFICATION SUMMARY")
    print("=" * 70)

    for check_name, result in checks.items():
        status = "✅ PASS" if result else "❌ FAIL"
        print(f"{check_name:20s}: {status}")

    print("\n" + "=" * 70)

    if all(checks.values()):
        print("✅ ALL CHECKS PASSED - Toolkit ready!")
        print("\nNext steps:")
        print("  python -m cluster_connectivity --help   # Command-line interface")
        print("  python demo.py                          # Resolution-limit demo")
        print("  pytest -m 'not slow'                    # Fast test suite")
        return 0

    print("❌ SOME CHECKS FAILED - Please fix issues above")
    print("\nCommon fixes:")
    print("  pip install -r requirements.txt         # Install dependencies")
    print("  python setup.py                         # Run setup script")
    return 1


if __name__ == "__main__":
    sys.exit(main())
