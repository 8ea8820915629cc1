"""Ground-truth engines: brute-force log-partition values, exact tree
inference, spanning-tree enumeration and counting, max-weight spanning trees.

Everything here is exact (up to float arithmetic) and deliberately
independent of the estimators it is used to check. All log-partition
arithmetic happens in natural log with log-sum-exp, so arbitrarily large
weights do not overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, ValidationError
from .graphs import SpanningTree, UnionFind

DEFAULT_CONFIG_CAP = 2**24
DEFAULT_TREE_CAP = 10**6
DEFAULT_BLOCK_CAP = 20

_CHUNK = 2**20


@dataclass(frozen=True)
class LogPartitionValue:
    """A log-partition value together with the method that produced it."""

    phi: float
    method: str


@dataclass(frozen=True)
class TreeEnumeration:
    trees: tuple
    count: int


def _logaddexp_reduce(values):
    acc = -np.inf
    for v in values:
        acc = np.logaddexp(acc, v)
    return float(acc)


def _energy_array(model, suffix_vars, prefix_assign):
    """Energy tensor over the suffix variables, prefix variables pinned.

    Returns an ndarray of shape (q,)*len(suffix_vars) holding
    sum_e theta_e * phi_e(x_u, x_v) for every suffix assignment.
    """
    q = model.alphabet_size
    pos = {v: i for i, v in enumerate(suffix_vars)}
    shape = (q,) * len(suffix_vars)
    energy = np.zeros(shape)
    base = 0.0
    for i, (u, v) in enumerate(model.graph.edges):
        th = model.theta[i]
        if th == 0.0:
            continue
        table = th * model.potentials[i]
        if u in pos and v in pos:
            dims = [1] * len(suffix_vars)
            dims[pos[u]] = q
            dims[pos[v]] = q
            if pos[u] < pos[v]:
                energy += table.reshape(dims)
            else:
                energy += table.T.reshape(dims)
        elif u in pos:
            dims = [1] * len(suffix_vars)
            dims[pos[u]] = q
            energy += table[:, prefix_assign[v]].reshape(dims)
        elif v in pos:
            dims = [1] * len(suffix_vars)
            dims[pos[v]] = q
            energy += table[prefix_assign[u], :].reshape(dims)
        else:
            base += table[prefix_assign[u], prefix_assign[v]]
    return energy + base


def phi_brute_force(model, cap=DEFAULT_CONFIG_CAP):
    """log Z by summing exp(energy) over all q^N labelings.

    Configurations are processed in chunks of at most ~2^20, each reduced by
    a stable log-sum-exp and combined with a streaming logaddexp accumulator,
    so neither memory nor exp overflow limits the computation. Raises
    CapExceeded when q^N > cap.
    """
    import itertools

    n = model.graph.node_count
    q = model.alphabet_size
    total = q**n
    if total > cap:
        raise CapExceeded(f"q^N = {total} exceeds configuration cap {cap}")

    n_suffix = n
    while q**n_suffix > _CHUNK:
        n_suffix -= 1
    prefix_vars = list(range(n - n_suffix))
    suffix_vars = list(range(n - n_suffix, n))

    chunk_logs = []
    for assign in itertools.product(range(q), repeat=len(prefix_vars)):
        prefix_assign = dict(zip(prefix_vars, assign))
        energy = _energy_array(model, suffix_vars, prefix_assign)
        emax = float(energy.max()) if energy.size else 0.0
        chunk_logs.append(emax + np.log(np.sum(np.exp(energy - emax))))
    return LogPartitionValue(_logaddexp_reduce(chunk_logs), "brute_force")


def _lse_vec(v):
    m = v.max()
    return m + np.log(np.exp(v - m).sum())


def phi_tree(model, support=None):
    """log Z by two-pass sum-product, exact when the active edges form a forest.

    Active edges are those with theta_e != 0, intersected with ``support``
    when one is given (edges outside a spanning tree contribute the constant
    factor exp(0) = 1). Messages are q-vectors held in log-space; each
    connected component is rooted and swept leaf-to-root, and isolated
    vertices contribute log q apiece. Raises ValidationError if the active
    edges contain a cycle, which cannot happen when ``support`` is a
    SpanningTree.
    """
    g = model.graph
    n = g.node_count
    q = model.alphabet_size
    theta = model.theta

    if support is not None:
        active = [i for i in support.edge_indices if theta[i] != 0.0]
    else:
        active = [i for i in range(g.edge_count) if theta[i] != 0.0]

    adj = [[] for _ in range(n)]
    for i in active:
        u, v = g.edges[i]
        adj[u].append((v, i))
        adj[v].append((u, i))

    incoming = [None] * n
    visited = [False] * n
    total = 0.0
    for root in range(n):
        if visited[root]:
            continue
        # iterative DFS; record (vertex, parent, edge) in discovery order
        order = []
        visited[root] = True
        stack = [(root, -1, -1)]
        while stack:
            x, parent, pedge = stack.pop()
            order.append((x, parent, pedge))
            for y, ei in adj[x]:
                if not visited[y]:
                    visited[y] = True
                    stack.append((y, x, ei))
                elif ei != pedge:
                    raise ValidationError("active edges contain a cycle; not a forest")
        for x, _, _ in order:
            incoming[x] = np.zeros(q)
        for x, parent, pedge in reversed(order):
            if parent < 0:
                total += _lse_vec(incoming[x])
                continue
            u, v = g.edges[pedge]
            table = theta[pedge] * model.potentials[pedge]
            if x == u:  # x is the row index; message indexed by the parent v
                msg = table + incoming[x][:, None]
                incoming[parent] += _lse_vec_axis0(msg)
            else:
                msg = table + incoming[x][None, :]
                incoming[parent] += _lse_vec_axis1(msg)
    return LogPartitionValue(total, "tree_sum_product")


def _lse_vec_axis0(a):
    m = a.max(axis=0)
    return m + np.log(np.exp(a - m).sum(axis=0))


def _lse_vec_axis1(a):
    m = a.max(axis=1)
    return m + np.log(np.exp(a - m[:, None]).sum(axis=1))


def phi_components(model, blocks, cap=DEFAULT_CONFIG_CAP, block_cap=DEFAULT_BLOCK_CAP):
    """log Z of the model projected onto within-block edges.

    ``blocks`` must partition the vertex set. Edges crossing blocks are
    dropped, making the blocks independent, so the result is the sum of
    brute-forced block values. Each block must satisfy q^|block| <= cap and
    |block| <= block_cap.
    """
    from .models import PairwiseModel

    g = model.graph
    q = model.alphabet_size
    seen = set()
    for block in blocks:
        for v in block:
            if v in seen:
                raise ValidationError(f"vertex {v} appears in two blocks")
            seen.add(v)
    if seen != set(range(g.node_count)):
        raise ValidationError("blocks must partition the vertex set")

    total = 0.0
    for block in blocks:
        block = sorted(block)
        if len(block) > block_cap:
            raise CapExceeded(f"block of size {len(block)} exceeds cap {block_cap}")
        if q ** len(block) > cap:
            raise CapExceeded(f"q^{len(block)} exceeds configuration cap {cap}")
        relabel = {v: i for i, v in enumerate(block)}
        inner = g.edges_within(block)
        sub_edges = [(relabel[g.edges[i][0]], relabel[g.edges[i][1]]) for i in inner]
        from .graphs import Graph

        sub_graph = Graph(len(block), sub_edges)
        # canonical order of sub_edges matches sorted original order because
        # relabeling is monotone
        sub = PairwiseModel(
            sub_graph,
            q,
            model.theta[inner],
            model.potentials[inner] if inner else np.zeros((0, q, q)),
        )
        total += phi_brute_force(sub, cap=cap).phi
    return LogPartitionValue(total, "component_product")


def spanning_tree_count(graph):
    """Number of spanning trees via the matrix-tree determinant.

    Bareiss fraction-free elimination on the reduced Laplacian keeps every
    intermediate an exact integer, so the count is exact for any size this
    package handles.
    """
    n = graph.node_count
    if n == 1:
        return 1
    lap = [[0] * n for _ in range(n)]
    for u, v in graph.edges:
        lap[u][u] += 1
        lap[v][v] += 1
        lap[u][v] -= 1
        lap[v][u] -= 1
    a = [row[1:] for row in lap[1:]]
    m = n - 1
    prev = 1
    sign = 1
    for k in range(m - 1):
        if a[k][k] == 0:
            for r in range(k + 1, m):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[m - 1][m - 1]


def enumerate_spanning_trees(graph, cap=DEFAULT_TREE_CAP):
    """All spanning trees, by include/exclude recursion over the canonical
    edge order; deterministic, duplicate-free, pre-checked against ``cap``
    using the matrix-tree count.
    """
    graph.require_connected()
    count = spanning_tree_count(graph)
    if count > cap:
        raise CapExceeded(f"graph has {count} spanning trees, cap is {cap}")

    n = graph.node_count
    m = graph.edge_count
    edges = graph.edges
    trees = []
    chosen = []

    def connects(start):
        # can chosen + edges[start:] still span?
        uf = UnionFind(n)
        for i in chosen:
            uf.union(*edges[i])
        for i in range(start, m):
            uf.union(*edges[i])
        return uf.components == 1

    def rec(i, uf):
        if len(chosen) == n - 1:
            trees.append(SpanningTree(graph, chosen))
            return
        if i == m:
            return
        u, v = edges[i]
        ru, rv = uf.find(u), uf.find(v)
        if ru != rv:
            child = UnionFind(n)
            child.parent = list(uf.parent)
            child.components = uf.components
            child.union(u, v)
            chosen.append(i)
            rec(i + 1, child)
            chosen.pop()
        if connects(i + 1):
            rec(i + 1, uf)

    rec(0, UnionFind(n))
    assert len(trees) == count
    return TreeEnumeration(tuple(trees), count)


def max_weight_spanning_tree(graph, weights):
    """Greedy maximum-weight spanning tree with deterministic tie-breaking.

    Edges are taken in decreasing weight, ties broken by smallest edge
    index, so the result is a pure function of (graph, weights). Returns
    (tree, total weight).
    """
    graph.require_connected()
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (graph.edge_count,):
        raise ValidationError(f"weights must have shape ({graph.edge_count},)")
    if not np.all(np.isfinite(w)):
        raise ValidationError("weights must be finite")
    order = np.lexsort((np.arange(graph.edge_count), -w))
    uf = UnionFind(graph.node_count)
    picked = []
    total = 0.0
    for i in order:
        u, v = graph.edges[i]
        if uf.union(u, v):
            picked.append(int(i))
            total += float(w[i])
            if len(picked) == graph.node_count - 1:
                break
    return SpanningTree(graph, picked), total
