import os

import numpy as np
import pytest

from densebandits.graph import Graph

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


@pytest.fixture
def lollipop() -> Graph:
    # triangle 0-1-2 with a pendant vertex 3 hanging off vertex 0
    return Graph.from_edges([(0, 1), (0, 2), (1, 2), (0, 3)], 4)


@pytest.fixture
def star4() -> Graph:
    return Graph.from_edges([(0, 1), (0, 2), (0, 3)], 4)


@pytest.fixture
def k4() -> Graph:
    return Graph.from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 4)


@pytest.fixture
def karate() -> Graph:
    from densebandits.graph import load_edge_list

    return load_edge_list(data_path("karate.txt"))


def random_graph(rng: np.random.Generator, n: int, p: float = 0.5) -> Graph:
    """Erdos-Renyi draw that always has at least one edge."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = rng.random(len(pairs)) < p
    edges = [pair for pair, k in zip(pairs, keep) if k]
    if not edges:
        edges = [pairs[int(rng.integers(len(pairs)))]]
    return Graph.from_edges(edges, n)
