import numpy as np
import pytest

from custard import Graph


@pytest.fixture
def toy_eight():
    """Fixed 8-node connected graph: seed side {0,1,2}, far side {4..7},
    node 3 bridging the two regions."""
    edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4),
             (4, 5), (4, 6), (5, 6), (5, 7), (6, 7)]
    return Graph.from_edges(8, edges)


@pytest.fixture
def two_community():
    """20 nodes: dense community A = 0..9, dense community B = 10..19,
    bridged through node 9 and node 10."""
    rng = np.random.default_rng(7)
    edges = set()
    for block in (range(0, 10), range(10, 20)):
        nodes = list(block)
        for i in range(len(nodes) - 1):
            edges.add((nodes[i], nodes[i + 1]))
        for _ in range(12):
            a, b = rng.choice(nodes, size=2, replace=False)
            edges.add((min(int(a), int(b)), max(int(a), int(b))))
    edges.add((9, 10))
    labels = {node: 0 for node in range(10)}
    labels.update({node: 1 for node in range(10, 20)})
    return Graph.from_edges(20, sorted(edges), labels=labels)
