import os

import hypothesis
import numpy as np
import pytest

from graph_helpers import clique_edges, graph_from_edges

np.seterr(all="ignore")

hypothesis.settings.register_profile("dev", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture
def triangle():
    return graph_from_edges([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return graph_from_edges([(0, 1), (1, 2)])


@pytest.fixture
def k4():
    return graph_from_edges(clique_edges(range(4)))


@pytest.fixture
def two_k5_bridge():
    """Two K5s (0-4, 5-9) joined by the single edge 4-5."""
    return graph_from_edges(clique_edges(range(5)) + clique_edges(range(5, 10)) + [(4, 5)])


@pytest.fixture
def two_k4_bridge():
    return graph_from_edges(clique_edges(range(4)) + clique_edges(range(4, 8)) + [(3, 4)])


@pytest.fixture
def edgelist_file(tmp_path):
    def write(lines, name="graph.tsv"):
        path = tmp_path / name
        path.write_text("".join(f"{line}\n" for line in lines))
        return path

    return write
