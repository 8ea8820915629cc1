"""Uniform spanning tree sampling, effective resistances, and the sample
complexity of empirical edge marginals.

Sampling uses the random-walk construction: start anywhere, walk until every
vertex has been visited, and keep for each vertex the edge through which it
was first entered; those N-1 edges form a uniformly distributed spanning
tree. Walks are driven by a counter-based generator keyed on
(seed, sample index), so each sample has its own reproducible stream and
results never depend on batching or thread schedule.

Effective resistance u_e (unit conductances) is computed from Laplacian
solves; it equals the probability that e appears in a uniform spanning tree,
which is how it enters the estimator guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import LogpartError, ValidationError
from .graphs import SpanningTree

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_DENSE_SOLVE_LIMIT = 2000
_WALK_GUARD_FACTOR = 10_000


def _mix64(z):
    """SplitMix64 finalizer over uint64 arrays (wraps mod 2^64)."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _stream_keys(seed, count, offset=0):
    idx = np.arange(offset, offset + count, dtype=np.uint64)
    base = np.uint64((int(seed) + _GAMMA) & _MASK64)
    return _mix64(base + (idx + np.uint64(1)) * np.uint64(_GAMMA))


def _uniforms(keys, counter):
    """One uniform in [0,1) per stream at the given counter value."""
    step = np.uint64((counter * _GAMMA) & _MASK64)
    bits = _mix64(keys + step)
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class SampleBatch:
    """n spanning trees sampled uniformly at random, with bookkeeping.

    ``tree_edges`` has one sorted row of edge indices per sample.
    Marginals are exact ratios count/n of integer occurrence counts.
    """

    graph: object
    tree_edges: np.ndarray
    n: int
    seed: int

    @cached_property
    def edge_counts(self):
        return np.bincount(self.tree_edges.ravel(), minlength=self.graph.edge_count)

    @cached_property
    def empirical_marginals(self):
        return self.edge_counts / self.n

    @cached_property
    def trees(self):
        return [SpanningTree(self.graph, row) for row in self.tree_edges]

    def distinct(self):
        """(SpanningTree, count) pairs, sorted by edge-index tuple."""
        rows, counts = np.unique(self.tree_edges, axis=0, return_counts=True)
        return [(SpanningTree(self.graph, row), int(c)) for row, c in zip(rows, counts)]


def sample_ust(graph, n, seed):
    """Draw n uniform spanning trees by first-entrance random walks.

    All walks advance in lockstep over vectorized steps; sample i consumes
    only its own (seed, i)-keyed stream, so the batch is a pure function of
    (graph, n, seed) and prefixes agree across different n. A guard aborts
    if any walk exceeds 10^4 * N * |E| steps (expected cover time is
    O(N |E|); tripping it indicates a defect, not bad luck).
    """
    graph.require_connected()
    if n < 1:
        raise ValidationError("sample count must be >= 1")
    nv = graph.node_count
    m = graph.edge_count

    if nv == 1:
        return SampleBatch(graph, np.zeros((n, 0), dtype=np.int32), n, seed)

    deg = graph.degrees
    off = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(deg, out=off[1:])
    nbr = np.zeros(2 * m, dtype=np.int64)
    eid = np.zeros(2 * m, dtype=np.int32)
    fill = off[:-1].copy()
    for i, (u, v) in enumerate(graph.edges):
        nbr[fill[u]], eid[fill[u]] = v, i
        fill[u] += 1
        nbr[fill[v]], eid[fill[v]] = u, i
        fill[v] += 1

    keys = _stream_keys(seed, n)
    cur = np.minimum((_uniforms(keys, 0) * nv).astype(np.int64), nv - 1)
    visited = np.zeros((n, nv), dtype=bool)
    visited[np.arange(n), cur] = True
    found = np.zeros(n, dtype=np.int64)
    tree = np.zeros((n, nv - 1), dtype=np.int32)
    active = np.arange(n)
    step = 0
    guard = _WALK_GUARD_FACTOR * nv * m
    while active.size:
        step += 1
        if step > guard:
            raise LogpartError(f"random walk exceeded {guard} steps without covering")
        u = _uniforms(keys[active], step)
        c = cur[active]
        slot = off[c] + np.minimum((u * deg[c]).astype(np.int64), deg[c] - 1)
        nxt = nbr[slot]
        fresh = ~visited[active, nxt]
        hit = active[fresh]
        tree[hit, found[hit]] = eid[slot][fresh]
        visited[hit, nxt[fresh]] = True
        found[hit] += 1
        cur[active] = nxt
        active = active[found[active] < nv - 1]
    tree.sort(axis=1)
    tree.flags.writeable = False
    return SampleBatch(graph, tree, int(n), int(seed))


@dataclass(frozen=True)
class ResistanceProfile:
    """Per-edge effective resistances (unit conductances) and their minimum."""

    u: np.ndarray
    kappa_u: float


def effective_resistance(graph, cg_tol=1e-10):
    """Effective resistance of every edge from Laplacian solves.

    For edge (s, t), u_e = (e_s - e_t)^T L^+ (e_s - e_t): ground vertex 0,
    Cholesky-factor the reduced Laplacian, and solve all edge right-hand
    sides at once. Above 2000 vertices falls back to conjugate gradient with
    Jacobi preconditioning per edge. u_e is also the probability that e lies
    in a uniform spanning tree, so 0 < u_e <= 1, bridges have u_e = 1, and
    the values sum to N - 1.
    """
    graph.require_connected()
    nv = graph.node_count
    m = graph.edge_count
    if m == 0:
        return ResistanceProfile(np.zeros(0), 1.0)

    rhs = np.zeros((nv, m))
    for i, (a, b) in enumerate(graph.edges):
        rhs[a, i] = 1.0
        rhs[b, i] = -1.0

    if nv <= _DENSE_SOLVE_LIMIT:
        from scipy.linalg import cho_factor, cho_solve

        lap = np.zeros((nv, nv))
        for a, b in graph.edges:
            lap[a, a] += 1.0
            lap[b, b] += 1.0
            lap[a, b] -= 1.0
            lap[b, a] -= 1.0
        factor = cho_factor(lap[1:, 1:])
        x = cho_solve(factor, rhs[1:, :])
        pot = np.vstack([np.zeros(m), x])
    else:
        import scipy.sparse as sp
        from scipy.sparse.linalg import LinearOperator, cg

        rows, cols, vals = [], [], []
        for a, b in graph.edges:
            rows += [a, b, a, b]
            cols += [a, b, b, a]
            vals += [1.0, 1.0, -1.0, -1.0]
        lap = sp.csr_matrix((vals, (rows, cols)), shape=(nv, nv))
        red = lap[1:, 1:].tocsr()
        inv_diag = 1.0 / red.diagonal()
        precond = LinearOperator(red.shape, matvec=lambda v: inv_diag * v)
        pot = np.zeros((nv, m))
        for i in range(m):
            sol, info = cg(red, rhs[1:, i], rtol=cg_tol, atol=0.0, M=precond)
            if info != 0:
                raise LogpartError(f"conjugate gradient failed on edge {i} (info={info})")
            pot[1:, i] = sol

    u = np.array([pot[a, i] - pot[b, i] for i, (a, b) in enumerate(graph.edges)])
    u.flags.writeable = False
    return ResistanceProfile(u, float(u.min()))


@dataclass(frozen=True)
class ResistanceBounds:
    degree_bound: float
    girth_bound: float | None


def resistance_bounds_structural(graph):
    """Closed-form lower bounds on the minimum effective resistance.

    Maximum degree d gives min_e u_e >= 2/(d+1); girth g > 3 gives
    min_e u_e >= 1/(1 + |E|/(g-1)^2), omitted for g <= 3 or forests.
    """
    graph.require_connected()
    d = int(graph.degrees.max()) if graph.node_count > 1 else 0
    degree_bound = 2.0 / (d + 1)
    g = graph.girth
    girth_bound = None
    if 3 < g < math.inf:
        girth_bound = 1.0 / (1.0 + graph.edge_count / (g - 1) ** 2)
    return ResistanceBounds(degree_bound, girth_bound)


def sample_size_for(epsilon, delta, graph, kappa_u_lower):
    """Samples needed so every empirical edge marginal is within a factor
    (1 +- epsilon) of its mean with probability >= 1 - delta.

    Hoeffding plus a union bound over the 2|E| marginal events and 4
    aggregate events gives failure probability
    (2|E| + 4) exp(-2 n kappa_u^2 epsilon^2); this returns the smallest n
    making that <= delta: ceil(ln((2|E|+4)/delta) / (2 kappa_u^2 eps^2)).
    """
    if not (0.0 < epsilon < 1.0):
        raise ValidationError(f"epsilon must be in (0, 1), got {epsilon}")
    if not (0.0 < delta < 1.0):
        raise ValidationError(f"delta must be in (0, 1), got {delta}")
    if not (0.0 < kappa_u_lower <= 1.0):
        raise ValidationError(f"kappa_u_lower must be in (0, 1], got {kappa_u_lower}")
    m = graph.edge_count
    return math.ceil(
        math.log((2 * m + 4) / delta) / (2.0 * kappa_u_lower**2 * epsilon**2)
    )
