"""Simple undirected graphs with a canonical edge order.

Vertices are dense 0-based integers. Edges are unordered pairs stored as
``(u, v)`` with ``u < v``, sorted lexicographically, so that edge indices are
stable across runs and safe to use as array indices everywhere else in the
package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DisconnectedGraphError, ValidationError

GRAPH_FAMILIES = ("tree", "cycle", "complete", "grid", "random_regular", "erdos_renyi")

_CONNECT_RETRY_CAP = 200


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph.

    Edges are canonicalized at construction: endpoints swapped into
    ``u < v`` order, the list sorted, self-loops and duplicates rejected.
    """

    node_count: int
    edges: tuple

    def __post_init__(self):
        n = self.node_count
        if n < 1:
            raise ValidationError("node_count must be >= 1")
        canon = []
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) out of range for {n} vertices")
            canon.append((u, v) if u < v else (v, u))
        canon.sort()
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise ValidationError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def edge_count(self):
        return len(self.edges)

    @cached_property
    def adjacency(self):
        """adjacency[v] = tuple of (neighbor, edge index), for O(deg) lookups."""
        adj = [[] for _ in range(self.node_count)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def edge_index(self):
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def degrees(self):
        deg = np.zeros(self.node_count, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @cached_property
    def connected(self):
        if self.node_count == 1:
            return True
        seen = [False] * self.node_count
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            x = stack.pop()
            for y, _ in self.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    count += 1
                    stack.append(y)
        return count == self.node_count

    def require_connected(self):
        if not self.connected:
            raise DisconnectedGraphError(
                f"graph with {self.node_count} vertices / {self.edge_count} edges is not connected"
            )

    def edges_within(self, vertices):
        """Indices of edges with both endpoints in ``vertices``."""
        vs = set(vertices)
        return [i for i, (u, v) in enumerate(self.edges) if u in vs and v in vs]

    @cached_property
    def girth(self):
        """Length of the shortest cycle, or math.inf for forests.

        BFS from every vertex; a non-tree edge seen at depths (d(x), d(y))
        closes a cycle of length d(x) + d(y) + 1. The minimum over all roots
        is the exact girth.
        """
        import math

        best = math.inf
        n = self.node_count
        for root in range(n):
            dist = [-1] * n
            parent_edge = [-1] * n
            dist[root] = 0
            queue = [root]
            head = 0
            while head < len(queue):
                x = queue[head]
                head += 1
                for y, ei in self.adjacency[x]:
                    if dist[y] < 0:
                        dist[y] = dist[x] + 1
                        parent_edge[y] = ei
                        queue.append(y)
                    elif ei != parent_edge[x]:
                        best = min(best, dist[x] + dist[y] + 1)
        return best


class UnionFind:
    """Array union-find with path halving; used by tree checks and Kruskal."""

    __slots__ = ("parent", "components")

    def __init__(self, n):
        self.parent = list(range(n))
        self.components = n

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        self.components -= 1
        return True


class SpanningTree:
    """A spanning tree of a host graph, stored as a frozenset of edge indices.

    Construction verifies (by union-find) that the indices name exactly
    ``node_count - 1`` edges forming a connected acyclic spanning subgraph.
    """

    __slots__ = ("edge_indices",)

    def __init__(self, graph, edge_indices):
        idx = frozenset(int(i) for i in edge_indices)
        n = graph.node_count
        if len(idx) != n - 1:
            raise ValidationError(f"spanning tree needs {n - 1} edges, got {len(idx)}")
        uf = UnionFind(n)
        for i in idx:
            u, v = graph.edges[i]
            if not uf.union(u, v):
                raise ValidationError(f"edge index {i} closes a cycle")
        if uf.components != 1:
            raise ValidationError("edges do not span all vertices")
        self.edge_indices = idx

    def __contains__(self, edge_index):
        return edge_index in self.edge_indices

    def __iter__(self):
        return iter(self.edge_indices)

    def __len__(self):
        return len(self.edge_indices)

    def __eq__(self, other):
        return isinstance(other, SpanningTree) and self.edge_indices == other.edge_indices

    def __hash__(self):
        return hash(self.edge_indices)

    def __repr__(self):
        return f"SpanningTree({sorted(self.edge_indices)})"

    def sorted_indices(self):
        return tuple(sorted(self.edge_indices))


def _prufer_tree(n, rng):
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [int(rng.integers(0, n)) for _ in range(n - 2)]
    degree = [1] * n
    for s in seq:
        degree[s] += 1
    edges = []
    import heapq

    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, s))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(leaves, s)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def _random_regular_edges(n, d, rng):
    # configuration model: pair up d half-edges per vertex, reject bad matchings
    stubs = np.repeat(np.arange(n), d)
    for _ in range(_CONNECT_RETRY_CAP):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        edges = set()
        ok = True
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v or (min(u, v), max(u, v)) in edges:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if ok:
            return sorted(edges)
    raise ValidationError(f"could not realize a simple {d}-regular graph on {n} vertices")


def generate_graph(family, params=None, seed=0, **kwargs):
    """Deterministically build a graph from a named family.

    Families and parameters:
      tree           n              uniform random labeled tree
      cycle          n              the n-cycle
      complete       n              K_n
      grid           rows, cols     rows x cols grid, vertices row-major
      random_regular n, degree      random simple d-regular graph
      erdos_renyi    n, p           G(n, p)

    The output is a pure function of (family, params, seed). Random families
    are resampled until connected, up to a fixed retry cap.
    """
    p = dict(params or {})
    p.update(kwargs)
    if family not in GRAPH_FAMILIES:
        raise ValidationError(f"unknown family {family!r}; choose one of {GRAPH_FAMILIES}")

    if family == "cycle":
        n = int(p["n"])
        if n < 3:
            raise ValidationError("cycle needs n >= 3")
        return Graph(n, [(i, (i + 1) % n) for i in range(n)])

    if family == "complete":
        n = int(p["n"])
        return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    if family == "grid":
        rows, cols = int(p["rows"]), int(p["cols"])
        if rows < 1 or cols < 1:
            raise ValidationError("grid needs rows, cols >= 1")
        edges = []
        for y in range(rows):
            for x in range(cols):
                v = y * cols + x
                if x + 1 < cols:
                    edges.append((v, v + 1))
                if y + 1 < rows:
                    edges.append((v, v + cols))
        return Graph(rows * cols, edges)

    if family == "tree":
        n = int(p["n"])
        rng = np.random.default_rng(seed)
        return Graph(n, _prufer_tree(n, rng))

    if family == "random_regular":
        n, d = int(p["n"]), int(p["degree"])
        if d < 1 or d >= n or (n * d) % 2 != 0:
            raise ValidationError(f"infeasible regular graph: n={n}, degree={d}")
        rng = np.random.default_rng(seed)
        for _ in range(_CONNECT_RETRY_CAP):
            g = Graph(n, _random_regular_edges(n, d, rng))
            if g.connected:
                return g
        raise ValidationError("no connected regular graph found within retry cap")

    # erdos_renyi
    n, prob = int(p["n"]), float(p["p"])
    if not (0.0 < prob <= 1.0):
        raise ValidationError("erdos_renyi needs p in (0, 1]")
    rng = np.random.default_rng(seed)
    for _ in range(_CONNECT_RETRY_CAP):
        draws = rng.random(n * (n - 1) // 2)
        edges = []
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                if draws[k] < prob:
                    edges.append((i, j))
                k += 1
        g = Graph(n, edges)
        if g.connected:
            return g
    raise ValidationError("no connected G(n,p) sample found within retry cap")


def petersen_graph():
    """The Petersen graph: outer 5-cycle, inner pentagram, five spokes."""
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, 5 + i) for i in range(5)]
    return Graph(10, edges)
