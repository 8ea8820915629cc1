"""Log-partition estimation from tree (and partition) coverings.

For a distribution rho over spanning trees, restricting the weights to a
tree can only lower the log-partition value, and Jensen's inequality applied
to the reweighted trees can only raise it:

    L_rho = E_T [ Phi(theta restricted to T) ]            <= Phi(theta)
    U_rho = E_T [ Phi(theta_e / rho_e restricted to T) ]  >= Phi(theta)

with kappa * Phi <= L and U <= Phi / kappa for kappa = min_e rho_e. The
geometric mean sqrt(L * U) is therefore within a factor 1/sqrt(kappa) of
Phi on both sides. Three instantiations are provided: the balanced covering
rho*(G), an empirical distribution of uniformly sampled trees, and
distributions over vertex partitions with small blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EdgeUncovered, ValidationError
from .exact import phi_components, phi_tree
from .kappa import balanced_covering
from .models import PairwiseModel
from .ust import effective_resistance, sample_size_for, sample_ust

_SAMPLE_RETRY_DOUBLINGS = 3


@dataclass(frozen=True)
class EstimateReport:
    """An estimate with its certified two-sided ratio interval.

    Guarantee carried by construction: sqrt(kappa_used) <= phi_hat / Phi
    <= 1/sqrt(kappa_used), where kappa_used is the realized minimum edge
    coverage of the distribution actually employed (so the interval stays
    valid even when that distribution is only approximately balanced).
    """

    L: float
    U: float
    phi_hat: float
    kappa_used: float
    ratio_lo: float
    ratio_hi: float
    method: str
    n_samples: int | None = None
    seed: int | None = None

    def to_text(self):
        lines = [
            f"L {self.L!r}",
            f"U {self.U!r}",
            f"phi_hat {self.phi_hat!r}",
            f"kappa {self.kappa_used!r}",
            f"ratio_lo {self.ratio_lo!r}",
            f"ratio_hi {self.ratio_hi!r}",
            f"method {self.method}",
        ]
        if self.n_samples is not None:
            lines.append(f"n {self.n_samples}")
        if self.seed is not None:
            lines.append(f"seed {self.seed}")
        return "\n".join(lines) + "\n"


def _make_report(L, U, kappa_used, method, n_samples=None, seed=None):
    if not (kappa_used > 0.0):
        raise ValidationError(f"coverage constant must be positive, got {kappa_used}")
    phi_hat = math.sqrt(L * U)
    r = math.sqrt(kappa_used)
    return EstimateReport(L, U, phi_hat, kappa_used, r, 1.0 / r, method, n_samples, seed)


def _reweighted(model, coverage):
    """Model with theta_e replaced by theta_e / coverage_e.

    Edges with theta_e = 0 are exempt from coverage (0/0 := 0); a weighted
    edge with zero coverage raises EdgeUncovered naming the edge.
    """
    theta = model.theta
    cov = np.asarray(coverage, dtype=np.float64)
    hot = theta > 0.0
    bad = hot & (cov <= 0.0)
    if np.any(bad):
        raise EdgeUncovered(model.graph.edges[int(np.flatnonzero(bad)[0])])
    scaled = np.where(hot, theta / np.where(hot, cov, 1.0), 0.0)
    return model.with_theta(scaled)


def lower_upper(model, rho):
    """(L, U) for a tree distribution rho over the model's graph.

    L averages the tree-restricted values; U averages the values of the
    reweighted model (theta_e / rho_e) on the same trees. Both are sums of
    exact tree inferences in a fixed support order.
    """
    if rho.graph != model.graph:
        raise ValidationError("tree distribution is over a different graph")
    scaled = _reweighted(model, rho.edge_marginals)
    lo = math.fsum(p * phi_tree(model, t).phi for t, p in rho.support)
    up = math.fsum(p * phi_tree(scaled, t).phi for t, p in rho.support)
    return lo, up


@lru_cache(maxsize=128)
def _rho_star(graph, tol):
    return balanced_covering(graph, tol=tol).distribution


def estimate_trw_prime(model, tol=1e-6):
    """Estimate Phi with the balanced covering rho*(G) of the model's graph.

    The covering depends only on the graph, so it is computed once per
    (graph, tol) and reused across models. kappa_used is the realized
    minimum marginal of the covering actually employed.
    """
    model.graph.require_connected()
    rho = _rho_star(model.graph, float(tol))
    lo, up = lower_upper(model, rho)
    return _make_report(lo, up, rho.min_marginal, "trw_prime")


def _phi_mixture(model, tree_counts, n):
    return math.fsum((c / n) * phi_tree(model, t).phi for t, c in tree_counts)


def estimate_uniform_sampled(model, epsilon, delta, seed):
    """Estimate Phi from n uniformly sampled spanning trees.

    n comes from sample_size_for at the graph's exact minimum effective
    resistance, so that with probability >= 1 - delta every empirical
    marginal is within a (1 +- epsilon) factor of the truth and the realized
    ratio obeys (1 + epsilon) / sqrt(kappa_u). U divides by the *empirical*
    marginals; if a weighted edge was never sampled, the batch is re-drawn
    with doubled n (same seed, so the prefix is reused) up to 3 times before
    giving up, since silently clamping would void the certificate.
    """
    g = model.graph
    g.require_connected()
    kappa_u = effective_resistance(g).kappa_u
    n = sample_size_for(epsilon, delta, g, kappa_u)

    for attempt in range(_SAMPLE_RETRY_DOUBLINGS + 1):
        batch = sample_ust(g, n, seed)
        cov = batch.empirical_marginals if g.edge_count else np.zeros(0)
        if not np.any((model.theta > 0) & (cov <= 0.0)):
            break
        n *= 2
    else:
        bad = int(np.flatnonzero((model.theta > 0) & (cov <= 0.0))[0])
        raise EdgeUncovered(g.edges[bad], "weighted edge never sampled despite retries")

    tree_counts = batch.distinct()
    lo = _phi_mixture(model, tree_counts, batch.n)
    up = _phi_mixture(_reweighted(model, cov), tree_counts, batch.n)
    kappa_used = float(cov.min()) if g.edge_count else 1.0
    return _make_report(lo, up, kappa_used, "uniform_sampled", n_samples=batch.n, seed=seed)


class PartitionDistribution:
    """A distribution over vertex partitions with blocks of size <= k.

    edge_coverage[e] is the probability that edge e lies inside a block;
    epsilon = 1 - min_e edge_coverage plays the role of 1 - kappa.
    """

    def __init__(self, graph, support, k):
        items = []
        for blocks, prob in support:
            prob = float(prob)
            if prob <= 0:
                raise ValidationError("partition probabilities must be positive")
            canon = tuple(sorted(tuple(sorted(b)) for b in blocks if b))
            seen = set()
            for b in canon:
                if len(b) > k:
                    raise ValidationError(f"block {b} exceeds size cap {k}")
                for v in b:
                    if v in seen:
                        raise ValidationError(f"vertex {v} in two blocks")
                    seen.add(v)
            if seen != set(range(graph.node_count)):
                raise ValidationError("blocks must partition the vertex set")
            items.append((canon, prob))
        total = math.fsum(p for _, p in items)
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"partition probabilities sum to {total}, not 1")
        items.sort(key=lambda bp: bp[0])
        cov = np.zeros(graph.edge_count)
        for blocks, prob in items:
            block_of = {}
            for j, b in enumerate(blocks):
                for v in b:
                    block_of[v] = j
            for i, (u, v) in enumerate(graph.edges):
                if block_of[u] == block_of[v]:
                    cov[i] += prob
        cov.flags.writeable = False
        self.graph = graph
        self.support = tuple(items)
        self.k = int(k)
        self.edge_coverage = cov
        self.epsilon = float(1.0 - cov.min()) if graph.edge_count else 0.0


def estimate_partition(model, pd):
    """Estimate Phi from a distribution over small-block vertex partitions.

    Mirrors the tree estimator with partitions as the subgraph family:
    L averages the within-block-projected values (exact per-block brute
    force), U the same with theta_e / coverage_e on covered edges, and the
    guarantee constant is 1 - epsilon.
    """
    if pd.graph != model.graph:
        raise ValidationError("partition distribution is over a different graph")
    if pd.epsilon >= 1.0:
        raise ValidationError("partition distribution covers some edge with probability 0")
    scaled = _reweighted(model, pd.edge_coverage)
    lo = math.fsum(p * phi_components(model, blocks).phi for blocks, p in pd.support)
    up = math.fsum(p * phi_components(scaled, blocks).phi for blocks, p in pd.support)
    return _make_report(lo, up, 1.0 - pd.epsilon, "partition")


def shifted_grid_partitions(width, height, block):
    """Uniform mixture of b x b block tilings over all b^2 planar shifts.

    Cell (x, y) of the width x height grid (vertex y*width + x) lands in
    tile (floor((x+sx)/b), floor((y+sy)/b)) for shift (sx, sy) in [0,b)^2.
    Every grid edge is interior to a tile in exactly b-1 of the b shifts
    along its axis, so every edge has coverage (b-1)/b and
    epsilon = 1/b exactly. Deterministic; blocks have at most b^2 cells.
    """
    from .graphs import generate_graph

    b = int(block)
    if b < 2:
        raise ValidationError("block size must be >= 2")
    graph = generate_graph("grid", rows=height, cols=width)
    support = []
    prob = 1.0 / (b * b)
    for sx in range(b):
        for sy in range(b):
            tiles = {}
            for y in range(height):
                for x in range(width):
                    key = ((x + sx) // b, (y + sy) // b)
                    tiles.setdefault(key, []).append(y * width + x)
            support.append((tuple(tiles.values()), prob))
    return PartitionDistribution(graph, support, b * b)


def maxcut_bracket(graph, beta=None):
    """Certified bracket on the maximum cut size of a graph.

    Builds the binary disagreement model (theta_e = beta, potential 1 when
    endpoints differ), whose log-partition value satisfies
    beta * MAXCUT <= Phi <= N ln 2 + beta * MAXCUT, estimates Phi with the
    balanced-covering estimator, and converts the certified Phi interval
    into [lower, upper] containing MAXCUT. beta defaults to 10 * N * ln 2.
    """
    graph.require_connected()
    n = graph.node_count
    if beta is None:
        beta = 10.0 * n * math.log(2.0)
    if beta <= 0:
        raise ValidationError("beta must be positive")
    disagree = 1.0 - np.eye(2)
    model = PairwiseModel(
        graph,
        2,
        np.full(graph.edge_count, float(beta)),
        np.broadcast_to(disagree, (graph.edge_count, 2, 2)).copy(),
    )
    report = estimate_trw_prime(model)
    lower = (report.phi_hat / report.ratio_hi - n * math.log(2.0)) / beta
    upper = (report.phi_hat * report.ratio_hi) / beta
    return lower, upper
