"""Command-line interface.

Subcommands: estimate, kappa, exact, resistance, sample, gen, bench, verify.
Exit codes: 0 success, 2 input validation error, 3 cap/capability exceeded,
4 invariant or verification failure. Runs with fixed flags and seed are
byte-identical, except for the wall-time columns of ``bench``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .errors import CapExceeded, LogpartError, ModelFormatError, ValidationError
from .estimator import (
    PartitionDistribution,
    estimate_partition,
    estimate_trw_prime,
    estimate_uniform_sampled,
    shifted_grid_partitions,
)
from .exact import DEFAULT_CONFIG_CAP, phi_brute_force, phi_tree
from .graphs import generate_graph
from .kappa import (
    DEFAULT_SUBSET_CAP,
    balanced_covering,
    format_certificate,
    format_covering,
    kappa_exact,
    verify_certificate,
)
from .models import parse_graph, parse_model, serialize_graph
from .ust import effective_resistance, sample_ust


def _resolve_seed(args, required=False):
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("LOGPART_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"LOGPART_SEED must be an integer, got {env!r}") from None
    if required:
        raise ValidationError("a seed is required: pass --seed or set LOGPART_SEED")
    return 0


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None


def _load_model(args):
    return parse_model(_read(args.model))


def _load_graph(args):
    return parse_graph(_read(args.graph))


def _infer_grid_dims(graph):
    n = graph.node_count
    for rows in range(1, n + 1):
        if n % rows:
            continue
        cols = n // rows
        if generate_graph("grid", rows=rows, cols=cols).edges == graph.edges:
            return rows, cols
    raise ValidationError("graph is not a row-major grid; --grid-shift needs one")


def parse_partition_file(text, graph):
    """Partition-distribution text: a 'partition <prob>' line starts each
    partition, followed by one 'block <v...>' line per block."""
    support = []
    blocks = None
    prob = None
    k = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "partition" and len(toks) == 2:
            if blocks is not None:
                support.append((blocks, prob))
            prob = float(toks[1])
            blocks = []
        elif toks[0] == "block" and blocks is not None:
            block = tuple(int(t) for t in toks[1:])
            k = max(k, len(block))
            blocks.append(block)
        else:
            raise ModelFormatError(f"unexpected partition line {line!r}", lineno)
    if blocks is not None:
        support.append((blocks, prob))
    if not support:
        raise ValidationError("partition file contains no partitions")
    return PartitionDistribution(graph, support, k)


def cmd_estimate(args):
    model = _load_model(args)
    if args.method == "trwp":
        report = estimate_trw_prime(model, tol=args.tol)
    elif args.method == "uniform":
        if args.epsilon is None or args.delta is None:
            raise ValidationError("--method uniform requires --epsilon and --delta")
        seed = _resolve_seed(args, required=True)
        report = estimate_uniform_sampled(model, args.epsilon, args.delta, seed)
    else:
        if args.partition_file:
            pd = parse_partition_file(_read(args.partition_file), model.graph)
        elif args.grid_shift:
            rows, cols = _infer_grid_dims(model.graph)
            pd = shifted_grid_partitions(cols, rows, args.grid_shift)
        else:
            raise ValidationError("--method partition requires --partition-file or --grid-shift")
        report = estimate_partition(model, pd)
    sys.stdout.write(report.to_text())
    return 0


def cmd_kappa(args):
    graph = _load_graph(args)
    if args.exact:
        cert = kappa_exact(graph, cap=args.cap_subset_n)
        text = format_certificate(cert)
    else:
        result = balanced_covering(graph, tol=args.tol)
        text = format_covering(result)
    sys.stdout.write(text)
    if args.verify:
        ok, report = verify_certificate(graph, text, tol=max(args.tol, 1e-9))
        for line in report:
            print(line)
        return 0 if ok else 4
    return 0


def cmd_exact(args):
    model = _load_model(args)
    if args.method == "tree":
        value = phi_tree(model)
    else:
        value = phi_brute_force(model, cap=args.cap_configs)
    print(f"phi {value.phi!r}")
    print(f"method {value.method}")
    return 0


def cmd_resistance(args):
    graph = _load_graph(args)
    profile = effective_resistance(graph)
    for value in profile.u:
        print(f"u {value!r}")
    return 0


def cmd_sample(args):
    graph = _load_graph(args)
    seed = _resolve_seed(args, required=True)
    batch = sample_ust(graph, args.n, seed)
    for row in batch.tree_edges:
        print("tree " + " ".join(str(int(i)) for i in row))
    return 0


def cmd_gen(args):
    params = {}
    if args.family in ("tree", "cycle", "complete"):
        if args.n is None:
            raise ValidationError(f"--family {args.family} requires --n")
        params["n"] = args.n
    elif args.family == "grid":
        if args.rows is None or args.cols is None:
            raise ValidationError("--family grid requires --rows and --cols")
        params.update(rows=args.rows, cols=args.cols)
    elif args.family == "random_regular":
        if args.n is None or args.degree is None:
            raise ValidationError("--family random_regular requires --n and --degree")
        params.update(n=args.n, degree=args.degree)
    elif args.family == "erdos_renyi":
        if args.n is None or args.p is None:
            raise ValidationError("--family erdos_renyi requires --n and --p")
        params.update(n=args.n, p=args.p)
    graph = generate_graph(args.family, params, seed=_resolve_seed(args))
    text = serialize_graph(graph)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args):
    entries = bench_mod.parse_corpus(args.corpus)
    seed = _resolve_seed(args)
    rows, violations = bench_mod.run_bench(
        entries,
        seed=seed,
        epsilon=args.epsilon,
        delta=args.delta,
        config_cap=args.cap_configs,
        subset_cap=args.cap_subset_n,
        check=args.check,
    )
    text = bench_mod.rows_to_tsv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for v in violations:
        print(f"VIOLATION {v}", file=sys.stderr)
    return 4 if violations else 0


def cmd_verify(args):
    graph = _load_graph(args)
    ok, report = verify_certificate(graph, _read(args.certificate), tol=args.tol)
    for line in report:
        print(line)
    return 0 if ok else 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="logpart",
        description="Certified log-partition estimation via balanced spanning-tree coverings.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="accepted for compatibility; computation is single-threaded and "
        "outputs are deterministic regardless",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate the log-partition value of a model")
    est.add_argument("--model", required=True, help="GMODEL file")
    est.add_argument("--method", required=True, choices=["trwp", "uniform", "partition"])
    est.add_argument("--epsilon", type=float)
    est.add_argument("--delta", type=float)
    est.add_argument("--seed", type=int)
    est.add_argument("--tol", type=float, default=1e-6, help="covering gap tolerance")
    est.add_argument("--partition-file", help="partition-distribution file")
    est.add_argument("--grid-shift", type=int, help="shifted b x b tilings for grid models")
    est.set_defaults(func=cmd_estimate)

    kap = sub.add_parser("kappa", help="compute kappa(G) with certificates")
    kap.add_argument("--graph", required=True, help="GGRAPH file")
    mode = kap.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--mw", action="store_true")
    kap.add_argument("--tol", type=float, default=1e-6)
    kap.add_argument("--verify", action="store_true", help="re-check the emitted certificate")
    kap.add_argument("--cap-subset-n", type=int, default=DEFAULT_SUBSET_CAP)
    kap.set_defaults(func=cmd_kappa)

    exa = sub.add_parser("exact", help="exact log-partition value (oracle)")
    exa.add_argument("--model", required=True)
    exa.add_argument("--method", choices=["brute", "tree"], default="brute")
    exa.add_argument("--cap-configs", type=int, default=DEFAULT_CONFIG_CAP)
    exa.set_defaults(func=cmd_exact)

    res = sub.add_parser("resistance", help="per-edge effective resistances")
    res.add_argument("--graph", required=True)
    res.set_defaults(func=cmd_resistance)

    sam = sub.add_parser("sample", help="sample uniform spanning trees")
    sam.add_argument("--graph", required=True)
    sam.add_argument("--n", type=int, required=True)
    sam.add_argument("--seed", type=int)
    sam.set_defaults(func=cmd_sample)

    gen = sub.add_parser("gen", help="generate a graph file")
    gen.add_argument("--family", required=True,
                     choices=["tree", "cycle", "complete", "grid", "random_regular", "erdos_renyi"])
    gen.add_argument("--n", type=int)
    gen.add_argument("--rows", type=int)
    gen.add_argument("--cols", type=int)
    gen.add_argument("--degree", type=int)
    gen.add_argument("--p", type=float)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    ben = sub.add_parser("bench", help="run the benchmark corpus, emit TSV")
    ben.add_argument("--corpus", required=True, help="comma-separated tokens or 'default'")
    ben.add_argument("--out")
    ben.add_argument("--check", action="store_true", help="assert certified invariants")
    ben.add_argument("--seed", type=int)
    ben.add_argument("--epsilon", type=float, default=0.2)
    ben.add_argument("--delta", type=float, default=0.1)
    ben.add_argument("--cap-configs", type=int, default=DEFAULT_CONFIG_CAP)
    ben.add_argument("--cap-subset-n", type=int, default=DEFAULT_SUBSET_CAP)
    ben.set_defaults(func=cmd_bench)

    ver = sub.add_parser("verify", help="re-check a kappa certificate")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--certificate", required=True)
    ver.add_argument("--tol", type=float, default=1e-6)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelFormatError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except LogpartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
