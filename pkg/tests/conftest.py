import numpy as np
import pytest

from logpart import Graph, PairwiseModel, generate_graph, petersen_graph


def random_connected_graph(rng, n, m):
    """Random connected graph: a random spanning tree plus random extra edges."""
    perm = [int(x) for x in rng.permutation(n)]
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        u, v = perm[i], perm[j]
        edges.add((min(u, v), max(u, v)))
    spare = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
    order = rng.permutation(len(spare))
    for k in order[: max(0, m - len(edges))]:
        edges.add(spare[int(k)])
    return Graph(n, sorted(edges))


def random_model(rng, graph, q, theta_hi=5.0, phi_hi=2.0):
    m = graph.edge_count
    theta = rng.uniform(0.0, theta_hi, m)
    pots = rng.uniform(0.0, phi_hi, (m, q, q))
    return PairwiseModel(graph, q, theta, pots)


def equality_model(graph, q=2, theta=1.0):
    """Weight theta on every edge, potential = 1 when endpoints agree."""
    m = graph.edge_count
    return PairwiseModel(graph, q, np.full(m, float(theta)), np.stack([np.eye(q)] * m))


@pytest.fixture(scope="session")
def triangle():
    return generate_graph("complete", n=3)


@pytest.fixture(scope="session")
def corpus_graphs():
    """The standard desk-scale corpus, as (name, graph) pairs."""
    graphs = [
        ("triangle", generate_graph("complete", n=3)),
        ("path_4", generate_graph("grid", rows=1, cols=4)),
        ("cycle_6", generate_graph("cycle", n=6)),
        ("complete_4", generate_graph("complete", n=4)),
        ("complete_5", generate_graph("complete", n=5)),
        ("grid_4x4", generate_graph("grid", rows=4, cols=4)),
        ("petersen", petersen_graph()),
    ]
    for s in range(5):
        graphs.append(
            (f"regular_10_3_s{s}", generate_graph("random_regular", n=10, degree=3, seed=s))
        )
    return graphs


@pytest.fixture(scope="session")
def fig_dense_graph():
    """Five vertices: a 4-vertex, 5-edge dense core (K4 minus an edge) plus a
    pendant vertex; the core realizes (|S|-1)/|E(S)| = 3/5."""
    return Graph(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (3, 4)])
