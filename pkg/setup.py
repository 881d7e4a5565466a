"""
Quick Setup Script
==================
Bootstraps a virtual environment and a small sample fixture.

Steps:
  venv → requirements → data directories → sample clique fixture
"""

import argparse
import os
import subprocess
import sys
from pathlib import Path

VENV = Path("venv")
DATA_DIRS = ("data/fixtures", "data/results", "data/logs")


def venv_python():
    if sys.platform == "win32":
        return VENV / "Scripts" / "python.exe"
    return VENV / "bin" / "python"


def create_venv():
    """Create virtual environment unless one exists."""
    if venv_python().exists():
        print("✓ Reusing existing virtual environment")
        return
    print("Creating virtual environment...")
    subprocess.run([sys.executable, "-m", "venv", str(VENV)], check=True)
    print("✓ Virtual environment created")


def install_dependencies():
    print("\nInstalling dependencies...")
    subprocess.run([str(venv_python()), "-m", "pip", "install", "-r", "requirements.txt"], check=True)
    print("✓ Dependencies installed")


def create_directories():
    print("\nCreating data directories...")
    for directory in DATA_DIRS:
        Path(directory).mkdir(parents=True, exist_ok=True)
    print("✓ Directories created")


def generate_sample_fixture(python):
    """Write 16 disjoint 8-cliques with 4 bridges to data/fixtures."""
    print("\nGenerating sample fixture...")
    result = subprocess.run(
        [
            str(python), "-m", "cluster_connectivity", "gen", "cliques",
            "--num-cliques", "16", "--clique-size", "8", "--bridges", "4",
            "--output-edgelist", "data/fixtures/sample.tsv",
            "--output-clustering", "data/fixtures/sample.truth.tsv",
            "--log-level", "WARNING",
        ],
        env={**os.environ, "PYTHONPATH": str(Path.cwd())},
    )
    if result.returncode == 0:
        print("✓ data/fixtures/sample.tsv written")
    else:
        print(f"⚠ Fixture generation failed (exit {result.returncode})")


def main():
    parser = argparse.ArgumentParser(description="Set up the Cluster Connectivity Toolkit")
    parser.add_argument("--skip-install", action="store_true", help="Only create directories and the sample fixture")
    args = parser.parse_args()

    print("=" * 60)
    print("Cluster Connectivity Toolkit - Setup")
    print("=" * 60)

    if not args.skip_install:
        create_venv()
        install_dependencies()
    create_directories()
    generate_sample_fixture(sys.executable if args.skip_install else venv_python())

    print("\n" + "=" * 60)
    print("Setup complete!")
    print("=" * 60)
    print("\nNext steps:")
    activate = "venv\\Scripts\\activate" if sys.platform == "win32" else "source venv/bin/activate"
    print(f"  1. Activate virtual environment: {activate}")
    print("  2. Profile the sample fixture against its ground truth:")
    print("     python -m cluster_connectivity profile --edgelist data/fixtures/sample.tsv \\")
    print("         --existing-clustering data/fixtures/sample.truth.tsv --output-file data/results/sample.profile.json")
    print()


if __name__ == "__main__":
    main()
