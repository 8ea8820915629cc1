"""The tree-coverage constant kappa(G), balanced spanning-tree coverings,
and primal/dual certificates.

kappa(G) is the value of a min-max pair over the spanning tree polytope:

    kappa(G) = max over tree distributions rho of  min_e rho_e
             = min over edge weightings w (sum 1) of  max tree weight
             = min over vertex subsets S of  (|S|-1) / |E(S)|

A distribution attaining the max is a *balanced covering*: it covers the
least-covered edge as well as possible. Any tree distribution certifies a
lower bound (its minimum edge marginal); any normalized edge weighting
certifies an upper bound (its maximum-weight spanning tree). Both
certificate types are produced here and are independently checkable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, ValidationError
from .exact import max_weight_spanning_tree
from .graphs import SpanningTree, UnionFind

DEFAULT_SUBSET_CAP = 22
DEFAULT_EDGE_SUBSET_CAP = 20


class TreeDistribution:
    """A finitely supported distribution over spanning trees of one graph.

    Stores (tree, probability) pairs in a canonical order plus the induced
    per-edge marginals rho_e = sum_T rho^T 1(e in T). Probabilities must be
    positive and sum to 1 within 1e-10.
    """

    def __init__(self, graph, support):
        items = [(t, float(p)) for t, p in support]
        if not items:
            raise ValidationError("tree distribution needs nonempty support")
        for t, p in items:
            if p <= 0:
                raise ValidationError("support probabilities must be positive")
        total = math.fsum(p for _, p in items)
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"support probabilities sum to {total}, not 1")
        items.sort(key=lambda tp: tp[0].sorted_indices())
        seen = set()
        for t, _ in items:
            if t.edge_indices in seen:
                raise ValidationError("duplicate tree in support")
            seen.add(t.edge_indices)
        marg = np.zeros(graph.edge_count)
        for t, p in items:
            for i in t.edge_indices:
                marg[i] += p
        marg.flags.writeable = False
        self.graph = graph
        self.support = tuple(items)
        self.edge_marginals = marg

    @property
    def min_marginal(self):
        return float(self.edge_marginals.min()) if self.graph.edge_count else 1.0

    def __len__(self):
        return len(self.support)

    def __repr__(self):
        return f"TreeDistribution({len(self.support)} trees, min marginal {self.min_marginal:.6g})"


@dataclass(frozen=True)
class CoveringResult:
    """Output of balanced_covering: a tree distribution plus a certified
    bracket lower <= kappa(G) <= upper."""

    distribution: TreeDistribution
    lower: float
    upper: float
    rounds: int


@dataclass(frozen=True)
class KappaCertificate:
    """kappa(G) with a primal witness (tree distribution whose minimum edge
    marginal approaches kappa) and a dual witness (the minimizing vertex set
    S*, and the uniform weighting on E(S*) whose max spanning tree weight
    equals kappa)."""

    kappa: Fraction
    primal: TreeDistribution
    dual_S: tuple
    dual_w: np.ndarray
    gap: float

    @property
    def kappa_float(self):
        return float(self.kappa)


def _subset_tables(graph):
    """Vectorized per-subset tables: popcount(S) and |E(S)| for all S."""
    n = graph.node_count
    adj = [0] * n
    for u, v in graph.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    size = 1 << n
    masks = np.arange(size, dtype=np.uint64)
    ec = np.zeros(size, dtype=np.int32)
    for v in range(n):
        lo = 1 << v
        a = np.uint64(adj[v])
        ec[lo : 2 * lo] = ec[:lo] + np.bitwise_count(a & masks[:lo]).astype(np.int32)
    pc = np.bitwise_count(masks).astype(np.int32)
    return masks, pc, ec


def kappa_exact(graph, cap=DEFAULT_SUBSET_CAP, primal_tol=1e-6):
    """Exact kappa(G) = min_S (|S|-1)/|E(S)| by subset enumeration.

    The minimum is taken as an exact rational; among minimizing subsets the
    lexicographically smallest vertex tuple is reported. The dual weighting
    is uniform on E(S*). The primal witness comes from balanced_covering run
    to gap <= primal_tol.

    Requires a connected graph with at least one edge and N <= cap
    (enumeration is Theta(2^N)).
    """
    graph.require_connected()
    n = graph.node_count
    if graph.edge_count == 0:
        raise ValidationError("kappa is undefined for an edgeless graph")
    if n > cap:
        raise CapExceeded(
            f"subset enumeration needs N <= {cap}, got {n}; use balanced_covering"
        )

    masks, pc, ec = _subset_tables(graph)
    valid = ec > 0
    num = (pc - 1).astype(np.float64)
    den = ec.astype(np.float64)
    # integer gaps between distinct candidate rationals dwarf float64 error,
    # so float comparison is faithful here
    ratio = np.where(valid, num / np.maximum(den, 1.0), np.inf)
    best_val = ratio.min()
    cand = np.flatnonzero(ratio == best_val)
    best = None
    best_tuple = None
    for c in cand:
        f = Fraction(int(pc[c]) - 1, int(ec[c]))
        t = tuple(i for i in range(n) if (int(c) >> i) & 1)
        if best is None or f < best or (f == best and t < best_tuple):
            best, best_tuple = f, t

    inner = graph.edges_within(best_tuple)
    dual_w = np.zeros(graph.edge_count)
    dual_w[inner] = 1.0 / len(inner)
    dual_w.flags.writeable = False

    covering = balanced_covering(graph, tol=primal_tol)
    gap = max(0.0, float(best) - covering.distribution.min_marginal)
    return KappaCertificate(
        kappa=best, primal=covering.distribution, dual_S=best_tuple, dual_w=dual_w, gap=gap
    )


def kappa_subgraph_form(graph, cap=DEFAULT_EDGE_SUBSET_CAP):
    """kappa(G) as min over edge subsets F of (|V(F)| - c(F)) / |F|.

    Test oracle on the edge side of the identity with the vertex-subset
    form. Only connected F are enumerated: splitting a disconnected F into
    components and applying min(a/b, c/d) <= (a+c)/(b+d) shows a connected
    component always does at least as well, so the minimum is unchanged
    (for connected F, c(F) = 1). Exact rational result.
    """
    m = graph.edge_count
    if m == 0:
        raise ValidationError("kappa is undefined for an edgeless graph")
    if m > cap:
        raise CapExceeded(f"edge-subset enumeration needs |E| <= {cap}, got {m}")

    edges = graph.edges
    n = graph.node_count
    incident = [[] for _ in range(n)]
    for i, (u, v) in enumerate(edges):
        incident[u].append(i)
        incident[v].append(i)

    in_sub = [False] * m
    vert_count = [0] * n
    banned = [False] * m
    best_num, best_den = 1, 1  # single edge: (2-1)/1

    def consider(nv, size):
        nonlocal best_num, best_den
        num = nv - 1
        if num * best_den < best_num * size:
            best_num, best_den = num, size

    def fresh_candidates(new_vertices, start):
        out = []
        for x in new_vertices:
            for e2 in incident[x]:
                if e2 > start and not banned[e2] and not in_sub[e2]:
                    y = edges[e2][0] if edges[e2][1] == x else edges[e2][1]
                    if vert_count[y] == 0:
                        out.append(e2)
        return out

    def grow(cands, size, nv, start):
        consider(nv, size)
        level_bans = []
        for pos, e in enumerate(cands):
            u, v = edges[e]
            new_vs = [x for x in (u, v) if vert_count[x] == 0]
            in_sub[e] = True
            vert_count[u] += 1
            vert_count[v] += 1
            child = cands[pos + 1 :] + fresh_candidates(new_vs, start)
            grow(child, size + 1, nv + len(new_vs), start)
            in_sub[e] = False
            vert_count[u] -= 1
            vert_count[v] -= 1
            banned[e] = True
            level_bans.append(e)
        for e in level_bans:
            banned[e] = False

    for s in range(m):
        u, v = edges[s]
        in_sub[s] = True
        vert_count[u] = vert_count[v] = 1
        grow(fresh_candidates((u, v), s), 1, 2, s)
        in_sub[s] = False
        vert_count[u] = vert_count[v] = 0

    return Fraction(best_num, best_den)


def dual_certificate(graph, vertices):
    """Uniform edge weighting on E(S) and its maximum-spanning-tree weight.

    The weight vector is a feasible point of the dual (non-negative, sums
    to 1), so the returned value is always >= kappa(G); for a minimizing S
    it equals kappa(G), which makes (w, value) a checkable upper-bound
    certificate. value is computed definitionally via the greedy maximum
    spanning tree and equals (|V(F)| - c(F)) / |F| for F = E(S).
    """
    inner = graph.edges_within(vertices)
    if not inner:
        raise ValidationError("E(S) is empty; no certificate")
    w = np.zeros(graph.edge_count)
    w[inner] = 1.0 / len(inner)
    _, value = max_weight_spanning_tree(graph, w)
    return w, value


def _kruskal(graph, w, order_buf):
    np.negative(w, out=order_buf)
    order = np.lexsort((np.arange(graph.edge_count), order_buf))
    uf = UnionFind(graph.node_count)
    picked = []
    total = 0.0
    target = graph.node_count - 1
    for i in order:
        u, v = graph.edges[i]
        if uf.union(u, v):
            picked.append(int(i))
            total += float(w[i])
            if len(picked) == target:
                break
    return frozenset(picked), total


def _mw_rounds(graph, rounds, tol):
    """The multiplicative-weights loop: hedge over edges against a
    max-spanning-tree best response.

    Returns (pool of distinct trees seen, best uniform-mixture snapshot,
    best lower, best upper, rounds actually run). lower is the minimum
    marginal of the uniform mixture over best responses so far; upper is the
    smallest max-tree weight observed under the running average of the
    weight iterates (a dual-feasible value each round).
    """
    m = graph.edge_count
    n = graph.node_count
    eta = math.sqrt(8.0 * math.log(m) / rounds) if m > 1 else 1.0
    w = np.full(m, 1.0 / m)
    w_sum = np.zeros(m)
    counts = np.zeros(m)
    pool = {}
    buf = np.empty(m)
    decay = math.exp(-eta)
    upper = math.inf
    best_lower = -math.inf
    best_mix = None
    for t in range(1, rounds + 1):
        tree, _ = _kruskal(graph, w, buf)
        pool[tree] = pool.get(tree, 0) + 1
        idx = list(tree)
        counts[idx] += 1.0
        lower = counts.min() / t
        if lower > best_lower:
            best_lower = lower
            best_mix = dict(pool)
        w_sum += w
        _, dual_val = _kruskal(graph, w_sum / t, buf)
        upper = min(upper, dual_val)
        if upper - best_lower <= tol:
            return pool, best_mix, best_lower, upper, t
        w[idx] *= decay
        w /= w.sum()
    return pool, best_mix, best_lower, upper, rounds


def _polish_lp(graph, pool, tol, max_cols=200):
    """Reweight a pool of trees by linear programming, generating missing
    trees by column generation against the max-spanning-tree oracle.

    Solves max z s.t. probabilities over the pool sum to 1 and every edge
    marginal is >= z. The LP dual yields an edge weighting whose true
    max-tree weight is a valid upper bound on kappa; when that weight
    exceeds the restricted optimum the offending tree is added and the LP
    re-solved, which terminates because each added column is new.

    Returns (support list, probabilities, lower, upper).
    """
    from scipy.optimize import linprog

    m = graph.edge_count
    support = sorted(pool, key=sorted)
    upper = math.inf
    buf = np.empty(m)
    x = None
    for _ in range(max_cols):
        k = len(support)
        cost = np.zeros(k + 1)
        cost[-1] = -1.0
        a_ub = np.zeros((m, k + 1))
        for j, tree in enumerate(support):
            a_ub[list(tree), j] = -1.0
        a_ub[:, -1] = 1.0
        a_eq = np.zeros((1, k + 1))
        a_eq[0, :k] = 1.0
        res = linprog(
            cost,
            A_ub=a_ub,
            b_ub=np.zeros(m),
            A_eq=a_eq,
            b_eq=[1.0],
            bounds=[(0, None)] * k + [(None, None)],
            method="highs",
        )
        if not res.success:
            break
        x = res.x
        z = float(x[-1])
        dual = np.maximum(-np.asarray(res.ineqlin.marginals), 0.0)
        s = dual.sum()
        dual = dual / s if s > 0 else np.full(m, 1.0 / m)
        tree, val = _kruskal(graph, dual, buf)
        upper = min(upper, val)
        if val <= z + 1e-11 or upper - z <= tol:
            break
        support.append(tree)
    if x is None:
        return None
    probs = np.asarray(x[:-1])
    marg = np.zeros(m)
    for j, tree in enumerate(support):
        marg[list(tree)] += probs[j]
    return support, probs, float(marg.min()), upper


def balanced_covering(graph, iterations=None, tol=1e-6, polish=True):
    """Balanced covering of the graph by spanning trees, with a certified
    bracket lower <= kappa(G) <= upper.

    Runs the multiplicative-weights scheme (step size sqrt(8 ln|E| / T),
    uniform mixture over best responses, dual values from averaged weight
    iterates), restart-doubling T until the bracket gap reaches ``tol`` or
    the round budget runs out. When ``polish`` is set, the pooled trees are
    optimally reweighted by LP with column generation, which closes the gap
    to LP precision and is what makes tight tolerances affordable.

    ``iterations`` pins the round count of a single MW run instead of the
    doubling schedule. Fully deterministic.
    """
    graph.require_connected()
    n = graph.node_count
    m = graph.edge_count
    if m == 0:
        tree = SpanningTree(graph, ())
        dist = TreeDistribution(graph, [(tree, 1.0)])
        return CoveringResult(dist, 1.0, 1.0, 0)
    if iterations is not None and iterations < 1:
        raise ValidationError("iterations must be >= 1")

    schedule = [iterations] if iterations is not None else [64, 128, 256, 512, 1024]
    pool = {}
    best_mix = None
    lower = -math.inf
    upper = math.inf
    rounds_total = 0
    for rounds in schedule:
        p, mix, lo, up, used = _mw_rounds(graph, rounds, tol)
        rounds_total += used
        for tree, c in p.items():
            pool[tree] = pool.get(tree, 0) + c
        upper = min(upper, up)
        if lo > lower:
            lower = lo
            best_mix = mix
        if upper - lower <= tol:
            break
        if polish:
            polished = _polish_lp(graph, pool, tol)
            if polished is not None:
                support, probs, lo2, up2 = polished
                upper = min(upper, up2)
                if lo2 > lower:
                    lower = lo2
                    best_mix = {t: float(pr) for t, pr in zip(support, probs) if pr > 1e-12}
            if upper - lower <= tol:
                break

    total = float(sum(best_mix.values()))
    dist = TreeDistribution(
        graph,
        [(SpanningTree(graph, t), c / total) for t, c in best_mix.items()],
    )
    # the returned lower bound is the realized minimum marginal of the
    # distribution actually handed back, so it is self-certifying
    return CoveringResult(dist, dist.min_marginal, upper, rounds_total)


def _peel_mad_upper(graph):
    """Greedy peeling estimate: returns an upper bound on the maximum
    average degree (densest prefix average degree, doubled)."""
    import heapq

    n = graph.node_count
    deg = list(graph.degrees)
    alive = [True] * n
    edges_left = graph.edge_count
    nodes_left = n
    heap = [(deg[v], v) for v in range(n)]
    heapq.heapify(heap)
    best = Fraction(0)
    while nodes_left > 0:
        best = max(best, Fraction(2 * edges_left, nodes_left))
        d, v = heapq.heappop(heap)
        if not alive[v] or d != deg[v]:
            continue
        alive[v] = False
        nodes_left -= 1
        for y, _ in graph.adjacency[v]:
            if alive[y]:
                deg[y] -= 1
                edges_left -= 1
                heapq.heappush(heap, (deg[y], y))
    return 2 * best


@dataclass(frozen=True)
class StructuralKappaBounds:
    """Closed-form lower bounds on kappa(G) from degree and girth."""

    mad_bound: float
    girth_bound: float | None
    mad: Fraction
    girth: float
    mad_exact: bool


def kappa_bounds_structural(graph, cap=DEFAULT_SUBSET_CAP):
    """Lower bounds on kappa(G) from the maximum average degree and girth.

    mad = max_S 2|E(S)|/|S| gives kappa >= 2/(mad+1). Girth g > 3 gives
    kappa >= 2/(1 + N^(2/(g-3))) * (1 - 1/g); that bound is omitted for
    g <= 3 or acyclic graphs. mad is exact (subset enumeration) for
    N <= cap, otherwise a peeling-based upper estimate flagged by
    mad_exact=False (an overestimate of mad only weakens, never invalidates,
    the kappa bound).
    """
    graph.require_connected()
    n = graph.node_count
    if n <= cap:
        masks, pc, ec = _subset_tables(graph)
        nz = pc > 0
        best = Fraction(0)
        dens = np.where(nz, ec / np.maximum(pc, 1), -1.0)
        top = dens.max()
        for c in np.flatnonzero(dens == top):
            best = max(best, Fraction(2 * int(ec[c]), int(pc[c])))
        mad, mad_exact = best, True
    else:
        mad, mad_exact = _peel_mad_upper(graph), False

    mad_bound = 2.0 / (float(mad) + 1.0)
    g = graph.girth
    girth_bound = None
    if 3 < g < math.inf:
        girth_bound = 2.0 / (1.0 + n ** (2.0 / (g - 3.0))) * (1.0 - 1.0 / g)
    return StructuralKappaBounds(mad_bound, girth_bound, mad, g, mad_exact)


def format_certificate(cert):
    """Line-oriented certificate text: kappa p/q, dual_S, one primal_tree
    per support tree."""
    lines = [f"kappa {cert.kappa.numerator}/{cert.kappa.denominator}"]
    lines.append("dual_S " + " ".join(str(v) for v in cert.dual_S))
    for tree, prob in cert.primal.support:
        lines.append(f"primal_tree {prob!r} " + " ".join(str(i) for i in tree.sorted_indices()))
    return "\n".join(lines) + "\n"


def format_covering(result):
    """Line-oriented bracket certificate for a balanced covering."""
    lines = [f"kappa_lower {result.lower!r}", f"kappa_upper {result.upper!r}"]
    for tree, prob in result.distribution.support:
        lines.append(f"primal_tree {prob!r} " + " ".join(str(i) for i in tree.sorted_indices()))
    return "\n".join(lines) + "\n"


def verify_certificate(graph, text, tol=1e-6):
    """Re-check a certificate from its text form against the graph.

    For an exact certificate: the rational kappa must equal
    (|S|-1)/|E(S)| for the stated S, the uniform dual weighting on E(S)
    must have max-tree weight <= kappa + tol, and the recomputed primal
    marginals must reach kappa - max(tol, 1e-6). For a bracket certificate
    the primal marginals must reach kappa_lower and lower <= upper must
    hold. Returns (all_ok, list of per-check report lines).
    """
    kappa = None
    lower = upper = None
    dual_s = None
    trees = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "kappa" and len(toks) == 2:
            p, q = toks[1].split("/")
            kappa = Fraction(int(p), int(q))
        elif toks[0] == "kappa_lower":
            lower = float(toks[1])
        elif toks[0] == "kappa_upper":
            upper = float(toks[1])
        elif toks[0] == "dual_S":
            dual_s = tuple(int(t) for t in toks[1:])
        elif toks[0] == "primal_tree":
            trees.append((float(toks[1]), [int(t) for t in toks[2:]]))
        else:
            raise ValidationError(f"unknown certificate line: {line}")

    checks = []

    def check(name, ok, detail=""):
        checks.append((name, ok, detail))

    marg = np.zeros(graph.edge_count)
    total = 0.0
    trees_ok = True
    for prob, idx in trees:
        try:
            SpanningTree(graph, idx)
        except ValidationError as exc:
            trees_ok = False
            check("primal_trees_valid", False, str(exc))
            break
        marg[idx] += prob
        total += prob
    if trees_ok:
        check("primal_trees_valid", bool(trees), "no primal trees" if not trees else "")
    check("primal_prob_sum", abs(total - 1.0) <= 1e-8, f"sum={total!r}")
    min_marg = float(marg.min()) if graph.edge_count else 1.0

    if kappa is not None:
        kf = float(kappa)
        if dual_s is None:
            check("dual_S_present", False)
        else:
            inner = graph.edges_within(dual_s)
            check("dual_S_nonempty", bool(inner))
            if inner:
                ratio = Fraction(len(dual_s) - 1, len(inner))
                check("kappa_matches_S", ratio == kappa, f"(|S|-1)/|E(S)|={ratio}")
                _, value = dual_certificate(graph, dual_s)
                check("dual_max_tree", value <= kf + tol, f"value={value!r}")
        check(
            "primal_min_marginal",
            min_marg >= kf - max(tol, 1e-6),
            f"min marginal={min_marg!r} kappa={kf!r}",
        )
    elif lower is not None and upper is not None:
        check("bracket_order", lower <= upper + 1e-12, f"{lower!r} > {upper!r}")
        check(
            "primal_min_marginal",
            min_marg >= lower - 1e-9,
            f"min marginal={min_marg!r} lower={lower!r}",
        )
    else:
        check("certificate_complete", False, "neither exact kappa nor bracket present")

    ok = all(c[1] for c in checks)
    report = [
        f"{'PASS' if good else 'FAIL'} {name}" + (f" ({detail})" if detail and not good else "")
        for name, good, detail in checks
    ]
    return ok, report
