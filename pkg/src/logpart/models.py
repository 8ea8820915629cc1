"""Pairwise models and the GMODEL / GGRAPH text formats.

A pairwise model over graph G assigns each edge e a weight theta_e >= 0 and a
q x q non-negative potential table phi_e; the joint distribution on labelings
x in {0..q-1}^N is proportional to exp(sum_e theta_e * phi_e(x_u, x_v)).
Potential tables are oriented so the row always indexes the endpoint with the
smaller vertex id.

GMODEL is a line-oriented UTF-8 format ('#' starts a comment, tokens are
whitespace-separated)::

    gmodel 1
    nodes <N>
    alphabet <q>
    edge <u> <v> <theta>
    pot <q*q reals, row-major, row = smaller-id endpoint>
    ...                       # one edge/pot pair per edge

GGRAPH is the graph-only variant::

    ggraph 1
    nodes <N>
    edge <u> <v>
    ...
"""

from __future__ import annotations

import numpy as np

from .errors import ModelFormatError, NegativeWeight, ValidationError
from .graphs import Graph


class PairwiseModel:
    """Graph + alphabet size + per-edge weights and potential tables.

    theta has shape (|E|,), potentials (|E|, q, q); both are validated
    non-negative and finite, stored read-only, and indexed in the graph's
    canonical edge order.
    """

    def __init__(self, graph, alphabet_size, theta, potentials):
        q = int(alphabet_size)
        if q < 2:
            raise ValidationError(f"alphabet size must be >= 2, got {q}")
        theta = np.array(theta, dtype=np.float64)
        potentials = np.array(potentials, dtype=np.float64)
        m = graph.edge_count
        if theta.shape != (m,):
            raise ValidationError(f"theta must have shape ({m},), got {theta.shape}")
        if potentials.shape != (m, q, q):
            raise ValidationError(
                f"potentials must have shape ({m},{q},{q}), got {potentials.shape}"
            )
        if not np.all(np.isfinite(theta)) or not np.all(np.isfinite(potentials)):
            raise ValidationError("theta and potentials must be finite")
        if np.any(theta < 0):
            raise NegativeWeight("negative edge weight")
        if np.any(potentials < 0):
            raise NegativeWeight("negative potential entry")
        theta.flags.writeable = False
        potentials.flags.writeable = False
        self.graph = graph
        self.alphabet_size = q
        self.theta = theta
        self.potentials = potentials

    def __eq__(self, other):
        return (
            isinstance(other, PairwiseModel)
            and self.graph == other.graph
            and self.alphabet_size == other.alphabet_size
            and np.array_equal(self.theta, other.theta)
            and np.array_equal(self.potentials, other.potentials)
        )

    def __repr__(self):
        return (
            f"PairwiseModel(N={self.graph.node_count}, |E|={self.graph.edge_count}, "
            f"q={self.alphabet_size})"
        )

    def with_theta(self, theta):
        """Same graph and potentials, different edge weights."""
        return PairwiseModel(self.graph, self.alphabet_size, theta, self.potentials)


def _tokenized_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise ModelFormatError(f"expected integer {what}, got {tok!r}", lineno) from None


def _parse_float(tok, lineno, what):
    try:
        v = float(tok)
    except ValueError:
        raise ModelFormatError(f"expected real {what}, got {tok!r}", lineno) from None
    if not np.isfinite(v):
        raise ModelFormatError(f"{what} must be finite, got {tok!r}", lineno)
    return v


def _parse_header(lines, magic):
    try:
        lineno, toks = next(lines)
    except StopIteration:
        raise ModelFormatError("empty file") from None
    if len(toks) != 2 or toks[0] != magic or toks[1] != "1":
        raise ModelFormatError(f"expected header '{magic} 1'", lineno)
    lineno, toks = next(lines, (lineno, None))
    if toks is None or len(toks) != 2 or toks[0] != "nodes":
        raise ModelFormatError("expected 'nodes <N>'", lineno)
    n = _parse_int(toks[1], lineno, "node count")
    if n < 1:
        raise ModelFormatError("node count must be >= 1", lineno)
    return n


def _check_edge(u, v, n, seen, lineno):
    if u == v:
        raise ModelFormatError(f"self-loop at vertex {u}", lineno)
    if not (0 <= u < n and 0 <= v < n):
        raise ModelFormatError(f"edge ({u},{v}) out of range", lineno)
    key = (min(u, v), max(u, v))
    if key in seen:
        raise ModelFormatError(f"duplicate edge {key}", lineno)
    seen.add(key)
    return key


def parse_model(text):
    """Parse GMODEL text into a validated PairwiseModel.

    Edges are canonicalized (sorted by endpoint pair); theta and potential
    rows are permuted alongside, so the result is independent of edge order
    in the file. Errors carry the offending line number.
    """
    lines = _tokenized_lines(text)
    n = _parse_header(lines, "gmodel")
    lineno, toks = next(lines, (0, None))
    if toks is None or len(toks) != 2 or toks[0] != "alphabet":
        raise ModelFormatError("expected 'alphabet <q>'", lineno)
    q = _parse_int(toks[1], lineno, "alphabet size")
    if q < 2:
        raise ModelFormatError(f"alphabet size must be >= 2, got {q}", lineno)

    seen = set()
    records = []
    for lineno, toks in lines:
        if toks[0] == "edge":
            if len(toks) != 4:
                raise ModelFormatError("expected 'edge <u> <v> <theta>'", lineno)
            u = _parse_int(toks[1], lineno, "vertex")
            v = _parse_int(toks[2], lineno, "vertex")
            th = _parse_float(toks[3], lineno, "theta")
            if th < 0:
                raise NegativeWeight(f"theta {th} < 0", lineno)
            key = _check_edge(u, v, n, seen, lineno)
            records.append([key, th, None, lineno])
        elif toks[0] == "pot":
            if not records or records[-1][2] is not None:
                raise ModelFormatError("'pot' line without preceding 'edge'", lineno)
            vals = [_parse_float(t, lineno, "potential") for t in toks[1:]]
            if len(vals) != q * q:
                raise ModelFormatError(
                    f"expected {q * q} potential entries, got {len(vals)}", lineno
                )
            if any(v < 0 for v in vals):
                raise NegativeWeight("negative potential entry", lineno)
            records[-1][2] = np.array(vals, dtype=np.float64).reshape(q, q)
        else:
            raise ModelFormatError(f"unexpected directive {toks[0]!r}", lineno)

    for key, _, pot, lineno in records:
        if pot is None:
            raise ModelFormatError(f"edge {key} is missing its 'pot' line", lineno)

    records.sort(key=lambda r: r[0])
    graph = Graph(n, [r[0] for r in records])
    theta = np.array([r[1] for r in records], dtype=np.float64)
    if records:
        pots = np.stack([r[2] for r in records])
    else:
        pots = np.zeros((0, q, q))
    return PairwiseModel(graph, q, theta, pots)


def serialize_model(model):
    """Render a PairwiseModel as GMODEL text; parse_model round-trips exactly.

    Reals are printed with repr, which is shortest-round-trip in Python 3,
    so parse(serialize(m)) reproduces m bit-exactly.
    """
    out = ["gmodel 1", f"nodes {model.graph.node_count}", f"alphabet {model.alphabet_size}"]
    for i, (u, v) in enumerate(model.graph.edges):
        out.append(f"edge {u} {v} {float(model.theta[i])!r}")
        out.append("pot " + " ".join(repr(float(x)) for x in model.potentials[i].ravel()))
    return "\n".join(out) + "\n"


def parse_graph(text):
    """Parse GGRAPH text into a Graph."""
    lines = _tokenized_lines(text)
    n = _parse_header(lines, "ggraph")
    seen = set()
    for lineno, toks in lines:
        if toks[0] != "edge" or len(toks) != 3:
            raise ModelFormatError("expected 'edge <u> <v>'", lineno)
        u = _parse_int(toks[1], lineno, "vertex")
        v = _parse_int(toks[2], lineno, "vertex")
        _check_edge(u, v, n, seen, lineno)
    return Graph(n, sorted(seen))


def serialize_graph(graph):
    out = ["ggraph 1", f"nodes {graph.node_count}"]
    out.extend(f"edge {u} {v}" for u, v in graph.edges)
    return "\n".join(out) + "\n"
