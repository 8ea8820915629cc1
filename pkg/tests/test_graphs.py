import math

import numpy as np
import pytest

from logpart import Graph, SpanningTree, ValidationError, generate_graph, petersen_graph


def test_edges_canonicalized():
    g = Graph(3, [(2, 1), (1, 0), (2, 0)])
    assert g.edges == ((0, 1), (0, 2), (1, 2))


def test_self_loop_rejected():
    with pytest.raises(ValidationError):
        Graph(3, [(1, 1)])


def test_duplicate_rejected():
    with pytest.raises(ValidationError):
        Graph(3, [(0, 1), (1, 0)])


def test_out_of_range_rejected():
    with pytest.raises(ValidationError):
        Graph(2, [(0, 2)])


def test_connectivity_flag():
    assert Graph(2, [(0, 1)]).connected
    assert not Graph(3, [(0, 1)]).connected
    assert Graph(1, []).connected


def test_adjacency_and_degrees():
    g = Graph(4, [(0, 1), (0, 2), (2, 3)])
    assert g.adjacency[0] == ((1, 0), (2, 1))
    assert list(g.degrees) == [2, 1, 2, 1]


def test_spanning_tree_validation(triangle):
    t = SpanningTree(triangle, [0, 1])
    assert 0 in t and 2 not in t
    with pytest.raises(ValidationError):
        SpanningTree(triangle, [0, 1, 2])
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    with pytest.raises(ValidationError):
        SpanningTree(g, [0, 1])  # only 3 edges span 4 vertices
    SpanningTree(g, [0, 1, 2])


def test_generate_cycle():
    g = generate_graph("cycle", n=4)
    assert g.edges == ((0, 1), (0, 3), (1, 2), (2, 3))


def test_generate_complete():
    assert generate_graph("complete", n=5).edge_count == 10


def test_generate_grid():
    g = generate_graph("grid", rows=2, cols=3)
    assert g.node_count == 6
    assert g.edge_count == 7  # 4 horizontal + 3 vertical
    assert g.connected


def test_generate_tree_is_tree():
    for seed in range(5):
        g = generate_graph("tree", n=9, seed=seed)
        assert g.edge_count == 8
        assert g.connected


def test_generate_deterministic():
    a = generate_graph("random_regular", n=10, degree=3, seed=7)
    b = generate_graph("random_regular", n=10, degree=3, seed=7)
    assert a.edges == b.edges
    assert all(d == 3 for d in a.degrees)
    assert a.connected


def test_generate_regular_infeasible():
    with pytest.raises(ValidationError):
        generate_graph("random_regular", n=5, degree=3, seed=0)  # odd n*d


def test_generate_erdos_renyi_connected():
    g = generate_graph("erdos_renyi", n=12, p=0.3, seed=3)
    assert g.connected
    assert g == generate_graph("erdos_renyi", n=12, p=0.3, seed=3)


def test_unknown_family():
    with pytest.raises(ValidationError):
        generate_graph("torus", n=4)


def test_girth():
    assert generate_graph("complete", n=3).girth == 3
    assert generate_graph("cycle", n=6).girth == 6
    assert generate_graph("tree", n=8, seed=0).girth == math.inf
    assert petersen_graph().girth == 5
    assert generate_graph("grid", rows=3, cols=3).girth == 4
