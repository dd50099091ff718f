"""Command-line front end.

Subcommands::

    run              run one algorithm, emit a metrics document
    bench-compare    structure-aware vs static baseline, CSV row on stdout
    partition-stats  per-partition CSV (id, kind, vertex_count, edge_weight, psd)
    convert          text edge list -> SAGE1 binary

Exit status: 0 on success (unconverged runs included), 2 on configuration
errors, 1 on I/O or validation errors.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import metrics as _metrics
from .algorithms import ALGORITHMS, AlgorithmSpec, make_kernel
from .bench import compare, run_baseline
from .errors import ConfigError, GraphFormatError, GraphValidationError
from .graph import load_graph, write_binary
from .scheduler import SchedulerConfig, build_partitions, run
from .state import DEFAULT_T2, accumulate_psd

WORKERS_ENV = "SAGEGRAPH_WORKERS"


def _add_graph(p):
    p.add_argument("--graph", required=True, help="edge list (src dst [weight]) or SAGE1 file")
    p.add_argument("--weighted", action="store_true", help="read a third weight column (default: off)")


def _add_partitioning(p):
    p.add_argument("--alpha", type=float, default=0.5, help="in-degree weight, in [0.5, 1] (default: 0.5)")
    p.add_argument("--hot-ratio", type=float, default=0.1, help="fraction of sampled vertices treated as hot (default: 0.1)")
    p.add_argument("--sample-size", type=int, default=None, help="threshold sample size (default: min(1000, live vertices))")
    p.add_argument("--t1", type=float, default=None, help="override the sampled activity threshold")
    p.add_argument("--vertices-per-block", type=int, default=4096, help="cache-block size in vertices (default: 4096)")
    p.add_argument("--max-blocks", type=int, default=2, help="max blocks per partition (default: 2)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")


def _add_algorithm(p, required=True):
    p.add_argument("--algorithm", choices=ALGORITHMS, required=required,
                   default=None if required else "pagerank",
                   help="vertex program" + ("" if required else " (default: pagerank)"))
    p.add_argument("--source", type=int, default=None, help="source vertex for sssp/bfs (required for those)")
    p.add_argument("--allow-default-source", action="store_true",
                   help="use vertex 0 when --source is omitted for sssp/bfs")
    p.add_argument("--damping", type=float, default=0.85, help="PageRank damping (default: 0.85)")


def _add_schedule(p):
    p.add_argument("--t2", type=float, default=DEFAULT_T2, help="convergence threshold on the psd sum (default: 1e-6)")
    p.add_argument("--i1", type=int, default=5, help="iterations before the first repartition (default: 5)")
    p.add_argument("--i2", type=int, default=4, help="cold partitions are mixed in every i2 iterations (default: 4)")
    p.add_argument("--i1-growth", type=float, default=2.0, help="repartition interval multiplier (default: 2.0)")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker threads (default: ${WORKERS_ENV} if set, else CPU count)")
    p.add_argument("--m", type=int, default=None, help="hot slots on i2 iterations (default: ceil(0.7 * workers))")
    p.add_argument("--n", type=int, default=None, help="cold slots on i2 iterations (default: workers - m)")
    p.add_argument("--max-iterations", type=int, default=None,
                   help="iteration cap (default: 10 * ceil(log2 V) + 100)")
    p.add_argument("--progress-every", type=int, default=0, help="log progress to stderr every N iterations (default: off)")
    p.add_argument("--metrics-out", default=None, help="write the metrics document here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sagegraph", description="Structure-aware graph processing engine.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one algorithm")
    _add_graph(p)
    _add_algorithm(p)
    _add_partitioning(p)
    _add_schedule(p)
    p.add_argument("--mode", choices=("structure-aware", "static-baseline"), default="structure-aware",
                   help="scheduler (default: structure-aware)")
    p.add_argument("--values-out", default=None, help="write final vertex values, one per line")

    p = sub.add_parser("bench-compare", help="structure-aware vs static baseline")
    _add_graph(p)
    _add_algorithm(p)
    _add_partitioning(p)
    _add_schedule(p)
    p.add_argument("--no-header", action="store_true", help="omit the CSV header line")

    p = sub.add_parser("partition-stats", help="per-partition statistics as CSV")
    _add_graph(p)
    _add_algorithm(p, required=False)
    _add_partitioning(p)
    _add_schedule(p)
    p.add_argument("--after-run", action="store_true", help="report the final partition set of a full run")
    p.add_argument("--output", default=None, help="CSV path (default: stdout)")

    p = sub.add_parser("convert", help="convert a text edge list to SAGE1 binary")
    _add_graph(p)
    p.add_argument("--output", required=True, help="destination SAGE1 file")
    return parser


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _spec(args) -> AlgorithmSpec:
    source = args.source
    if args.algorithm in ("sssp", "bfs") and source is None:
        if not args.allow_default_source:
            raise ConfigError(f"--source is required for {args.algorithm} (or pass --allow-default-source)")
        source = 0
    return AlgorithmSpec(args.algorithm, source=source, damping=args.damping)


def _config(args) -> SchedulerConfig:
    return SchedulerConfig(
        worker_count=_workers(args), m=args.m, n=args.n, i1=args.i1, i2=args.i2,
        i1_growth=args.i1_growth, t1=args.t1, t2=args.t2, alpha=args.alpha,
        hot_ratio=args.hot_ratio, sample_size=args.sample_size, seed=args.seed,
        vertices_per_block=args.vertices_per_block, max_blocks=args.max_blocks,
        max_iterations=args.max_iterations, progress_every=args.progress_every,
    )


def _config_section(args, spec, cfg, **extra) -> dict:
    out = {"graph": args.graph, "algorithm": spec.name, "source": spec.source,
           "damping": spec.damping, "scheduler": cfg.to_dict()}
    out.update(extra)
    return out


def _check_source(spec, g):
    if spec.source is not None and not (0 <= spec.source < g.vertex_count):
        raise ConfigError(f"--source {spec.source} out of range for {g.vertex_count} vertices")


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_run(args) -> int:
    spec, cfg = _spec(args), _config(args)
    g = load_graph(args.graph, weighted=args.weighted)
    _check_source(spec, g)
    if args.mode == "static-baseline":
        res = run_baseline(g, spec, cfg=cfg)
    else:
        res = run(g, spec, cfg)
    extra = {}
    if res.threshold is not None:
        extra["threshold"] = {"sampled_t1": res.threshold.t1, "sample_size": res.threshold.sample_size}
    doc = _metrics.metrics_document(_config_section(args, spec, cfg, mode=args.mode), res.metrics, **extra)
    if args.values_out:
        np.savetxt(args.values_out, res.values, fmt="%.17g")
    m = res.metrics
    summary = (f"status={m.status} iterations={m.iterations} vertex_updates={m.total_vertex_updates} "
               f"partition_loads={m.partition_loads}\n")
    if args.metrics_out:
        _write(args.metrics_out, _metrics.dumps(doc))
        sys.stdout.write(summary)
    else:
        sys.stdout.write(_metrics.dumps(doc))
        sys.stderr.write(summary)
    return 0


def cmd_bench(args) -> int:
    spec, cfg = _spec(args), _config(args)
    g = load_graph(args.graph, weighted=args.weighted)
    _check_source(spec, g)
    report, _, _ = compare(g, spec, cfg, graph_name=args.graph)
    sys.stdout.write(report.to_csv(header=not args.no_header))
    if args.metrics_out:
        doc = {"config": _config_section(args, spec, cfg), "report": report.to_dict()}
        _write(args.metrics_out, _metrics.dumps(doc))
    return 0


def cmd_partition_stats(args) -> int:
    spec, cfg = _spec(args), _config(args)
    g = load_graph(args.graph, weighted=args.weighted)
    _check_source(spec, g)
    if args.after_run:
        res = run(g, spec, cfg)
        rows = _rows(res.partitions, res.final_psd)
    else:
        ps, _, _ = build_partitions(g, cfg)
        _, sdt = make_kernel(g, spec).initial_state()
        rows = _rows(ps, accumulate_psd(ps, sdt).psd)
    fh = sys.stdout if args.output is None else open(args.output, "w", newline="", encoding="utf-8")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "kind", "vertex_count", "edge_weight", "psd"])
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _rows(ps, psd):
    return [[p.id, p.kind.value, len(p), p.edge_weight, f"{psd[p.id]:.9g}"] for p in ps]


def cmd_convert(args) -> int:
    g = load_graph(args.graph, weighted=args.weighted)
    write_binary(g, args.output)
    sys.stdout.write(f"wrote {args.output}: {g.vertex_count} vertices, {g.edge_count} edges\n")
    return 0


COMMANDS = {"run": cmd_run, "bench-compare": cmd_bench,
            "partition-stats": cmd_partition_stats, "convert": cmd_convert}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "progress_every", 0):
        logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"sagegraph: configuration error: {exc}", file=sys.stderr)
        return 2
    except (GraphFormatError, GraphValidationError, OSError) as exc:
        print(f"sagegraph: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
