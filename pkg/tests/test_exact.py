import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from logpart import (
    CapExceeded,
    Graph,
    PairwiseModel,
    SpanningTree,
    ValidationError,
    enumerate_spanning_trees,
    generate_graph,
    max_weight_spanning_tree,
    phi_brute_force,
    phi_components,
    phi_tree,
    spanning_tree_count,
)

from conftest import equality_model, random_connected_graph, random_model


def phi_by_hand(model):
    """Independent oracle: literal sum over all labelings, no log-sum-exp."""
    g = model.graph
    q = model.alphabet_size
    z = 0.0
    for x in itertools.product(range(q), repeat=g.node_count):
        e = 0.0
        for i, (u, v) in enumerate(g.edges):
            e += model.theta[i] * model.potentials[i][x[u], x[v]]
        z += math.exp(e)
    return math.log(z)


def test_two_node_equality():
    g = Graph(2, [(0, 1)])
    m = equality_model(g, q=2, theta=1.0)
    # hand enumeration of the 4 labelings: two agree (e^1), two disagree (e^0)
    expect = math.log(2 * math.e + 2)
    assert abs(phi_brute_force(m).phi - expect) < 1e-12


def test_zero_theta_gives_n_log_q():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        g = random_connected_graph(rng, n, n + 2)
        q = int(rng.integers(2, 5))
        m = random_model(rng, g, q).with_theta(np.zeros(g.edge_count))
        assert abs(phi_brute_force(m).phi - n * math.log(q)) < 1e-12


def test_triangle_equality(triangle):
    m = equality_model(triangle, q=2, theta=1.0)
    # 2 all-equal labelings score e^3, the other 6 score e^1
    expect = math.log(2 * math.e**3 + 6 * math.e)
    assert abs(phi_brute_force(m).phi - expect) < 1e-12


def test_brute_force_matches_hand_oracle():
    rng = np.random.default_rng(17)
    for _ in range(15):
        n = int(rng.integers(2, 6))
        g = random_connected_graph(rng, n, n + int(rng.integers(0, 3)))
        m = random_model(rng, g, q=int(rng.integers(2, 4)))
        assert abs(phi_brute_force(m).phi - phi_by_hand(m)) < 1e-10


def test_brute_force_large_weights_no_overflow(triangle):
    m = equality_model(triangle, q=2, theta=500.0)
    # dominant term is 2 e^{1500}; log-sum-exp must not overflow
    phi = phi_brute_force(m).phi
    assert abs(phi - (1500.0 + math.log(2.0))) < 1e-9


def test_brute_force_cap():
    g = generate_graph("grid", rows=5, cols=5)
    m = equality_model(g, q=4)
    with pytest.raises(CapExceeded):
        phi_brute_force(m)  # 4^25 > 2^24


def test_brute_force_chunked_path_matches():
    # force multi-chunk accumulation by lowering the chunk threshold via big n
    g = generate_graph("grid", rows=3, cols=4)  # 2^12 configs, q=3 -> 3^12
    rng = np.random.default_rng(3)
    m = random_model(rng, g, q=3, theta_hi=2.0, phi_hi=1.0)
    assert abs(phi_brute_force(m).phi - phi_by_hand(m)) < 1e-9


def test_phi_tree_two_nodes():
    g = Graph(2, [(0, 1)])
    m = equality_model(g, q=2, theta=1.0)
    assert abs(phi_tree(m).phi - phi_brute_force(m).phi) <= 1e-10


def test_phi_tree_star_random():
    g = Graph(4, [(0, 1), (0, 2), (0, 3)])
    rng = np.random.default_rng(11)
    m = random_model(rng, g, q=3)
    a, b = phi_tree(m).phi, phi_brute_force(m).phi
    assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


def test_phi_tree_zero_theta_on_spanning_tree():
    g = generate_graph("complete", n=5)
    m = equality_model(g, q=3, theta=0.0)
    tree = max_weight_spanning_tree(g, np.ones(g.edge_count))[0]
    assert abs(phi_tree(m, tree).phi - 5 * math.log(3)) < 1e-12


def test_phi_tree_equals_brute_on_random_forests():
    rng = np.random.default_rng(23)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        g = generate_graph("tree", n=n, seed=int(rng.integers(0, 10**6)))
        q = int(rng.integers(2, 4))
        m = random_model(rng, g, q)
        if rng.random() < 0.3:  # also exercise genuine forests
            theta = np.array(m.theta)
            theta[rng.integers(0, g.edge_count)] = 0.0
            m = m.with_theta(theta)
        a, b = phi_tree(m).phi, phi_brute_force(m).phi
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


def test_phi_tree_masked_by_spanning_tree_support(triangle):
    m = equality_model(triangle, q=2, theta=1.0)
    tree = SpanningTree(triangle, [0, 1])
    masked = m.with_theta(np.array([1.0, 1.0, 0.0]))
    assert abs(phi_tree(m, tree).phi - phi_brute_force(masked).phi) < 1e-10


def test_phi_tree_rejects_cycle(triangle):
    m = equality_model(triangle, q=2, theta=1.0)
    with pytest.raises(ValidationError):
        phi_tree(m)


def test_phi_components_singletons(triangle):
    m = equality_model(triangle, q=2, theta=3.0)
    blocks = [[0], [1], [2]]
    assert abs(phi_components(m, blocks).phi - 3 * math.log(2)) < 1e-12


def test_phi_components_single_block():
    rng = np.random.default_rng(7)
    g = random_connected_graph(rng, 5, 7)
    m = random_model(rng, g, q=2)
    got = phi_components(m, [list(range(5))]).phi
    assert abs(got - phi_brute_force(m).phi) <= 1e-10 * max(1.0, abs(got))


def test_phi_components_grid_split():
    g = generate_graph("grid", rows=2, cols=2)
    rng = np.random.default_rng(13)
    m = random_model(rng, g, q=2)
    blocks = [[0, 1], [2, 3]]
    # oracle: brute force with the two vertical edges dropped
    inner = set(g.edges_within([0, 1])) | set(g.edges_within([2, 3]))
    theta = np.array([t if i in inner else 0.0 for i, t in enumerate(m.theta)])
    expect = phi_brute_force(m.with_theta(theta)).phi
    assert abs(phi_components(m, blocks).phi - expect) < 1e-10


def test_phi_components_validates_partition(triangle):
    m = equality_model(triangle)
    with pytest.raises(ValidationError):
        phi_components(m, [[0, 1]])
    with pytest.raises(ValidationError):
        phi_components(m, [[0, 1], [1, 2]])


def test_spanning_tree_count_examples(triangle):
    assert spanning_tree_count(triangle) == 3
    assert spanning_tree_count(generate_graph("grid", rows=1, cols=4)) == 1
    assert spanning_tree_count(generate_graph("complete", n=4)) == 16  # Cayley 4^2
    assert spanning_tree_count(generate_graph("complete", n=6)) == 6**4
    assert spanning_tree_count(generate_graph("cycle", n=7)) == 7
    assert spanning_tree_count(Graph(3, [(0, 1)])) == 0  # disconnected


def test_enumeration_matches_count_and_is_distinct(corpus_graphs):
    for name, g in corpus_graphs:
        count = spanning_tree_count(g)
        if count > 10**5:
            continue
        enum = enumerate_spanning_trees(g)
        assert enum.count == count, name
        assert len(set(enum.trees)) == count, name


def test_enumeration_trees_are_valid(triangle):
    enum = enumerate_spanning_trees(triangle)
    assert enum.count == 3
    assert {t.sorted_indices() for t in enum.trees} == {(0, 1), (0, 2), (1, 2)}


def test_enumeration_cap(corpus_graphs):
    g = dict(corpus_graphs)["grid_4x4"]
    assert spanning_tree_count(g) == 100352
    with pytest.raises(CapExceeded):
        enumerate_spanning_trees(g, cap=10**5)


def test_enumeration_deterministic(triangle):
    a = enumerate_spanning_trees(triangle).trees
    b = enumerate_spanning_trees(triangle).trees
    assert [t.sorted_indices() for t in a] == [t.sorted_indices() for t in b]


def test_max_weight_tree_triangle(triangle):
    tree, weight = max_weight_spanning_tree(triangle, np.array([3, 2, 1]) / 6.0)
    assert tree.sorted_indices() == (0, 1)
    assert abs(weight - 5.0 / 6.0) < 1e-15


def test_max_weight_tree_uniform_weights(corpus_graphs):
    for name, g in corpus_graphs:
        w = np.full(g.edge_count, 1.0 / g.edge_count)
        _, weight = max_weight_spanning_tree(g, w)
        assert abs(weight - (g.node_count - 1) / g.edge_count) < 1e-12, name


def test_max_weight_tree_tie_break_deterministic():
    g = generate_graph("complete", n=4)
    w = np.full(6, 0.25)
    tree, _ = max_weight_spanning_tree(g, w)
    assert tree.sorted_indices() == (0, 1, 2)  # smallest indices win ties


def test_max_weight_tree_rejects_disconnected():
    with pytest.raises(Exception):
        max_weight_spanning_tree(Graph(3, [(0, 1)]), np.array([1.0]))


# -- order/convexity properties of the log-partition function ----------------


def _phi(m):
    return phi_brute_force(m).phi


def test_monotone_in_theta():
    rng = np.random.default_rng(31)
    for _ in range(30):
        g = random_connected_graph(rng, int(rng.integers(2, 6)), 6)
        m = random_model(rng, g, q=2)
        bump = rng.uniform(0.0, 1.0, g.edge_count)
        assert _phi(m.with_theta(m.theta + bump)) >= _phi(m) - 1e-12


def test_sublinear_in_scaling():
    rng = np.random.default_rng(37)
    for _ in range(30):
        g = random_connected_graph(rng, int(rng.integers(2, 6)), 6)
        m = random_model(rng, g, q=2)
        lam = float(rng.uniform(1.0, 4.0))
        assert _phi(m.with_theta(lam * m.theta)) <= lam * _phi(m) + 1e-12


def test_convex_in_theta():
    rng = np.random.default_rng(41)
    for _ in range(30):
        g = random_connected_graph(rng, int(rng.integers(2, 6)), 6)
        m = random_model(rng, g, q=2)
        t2 = rng.uniform(0.0, 5.0, g.edge_count)
        mid = _phi(m.with_theta(0.5 * m.theta + 0.5 * t2))
        assert mid <= 0.5 * _phi(m) + 0.5 * _phi(m.with_theta(t2)) + 1e-12


def test_phi_at_least_n_log_q():
    rng = np.random.default_rng(43)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        g = random_connected_graph(rng, n, n + 1)
        q = int(rng.integers(2, 4))
        m = random_model(rng, g, q)
        assert _phi(m) >= n * math.log(q) - 1e-12


@given(
    st.integers(min_value=0, max_value=10**6),
    st.integers(min_value=1, max_value=10**6),
    st.integers(min_value=0, max_value=10**6),
    st.integers(min_value=1, max_value=10**6),
)
def test_mediant_inequality(a, b, c, d):
    # min(a/b, c/d) <= (a+c)/(b+d); this is what lets subset enumeration
    # restrict itself to connected pieces
    from fractions import Fraction

    assert min(Fraction(a, b), Fraction(c, d)) <= Fraction(a + c, b + d)
