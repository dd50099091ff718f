"""Adaptive partition scheduling and the bulk-synchronous run loop.

Iteration 0 services every dead partition plus the hottest hot partition.
Afterwards each iteration services the hot partitions with the largest
partition state degree, mixing in the top cold partitions every ``i2``
iterations, and only cold ones once no hot partition has pending work.
Repartitioning happens on a geometrically growing cadence.
"""
from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .algorithms import AlgorithmSpec, Kernel, make_kernel
from .errors import ConfigError
from .graph import Graph, compute_degrees
from .metrics import RunMetrics
from .partition import (ActivityThreshold, Kind, PartitionSet, initial_partition,
                        repartition_barrier, repartition_general, sample_threshold,
                        with_active_degrees)
from .state import (DEFAULT_T2, PartitionStateTable, ValueTables, accumulate_psd,
                    check_convergence)

log = logging.getLogger("sagegraph")


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SchedulerConfig:
    """Scheduling and partitioning knobs for one run.

    ``m``/``n`` default to ceil(0.7 * worker_count) hot slots and the rest
    cold.  ``t1`` overrides the sampled activity threshold, which is also the
    repartitioning threshold.  ``max_iterations`` defaults to
    10 * ceil(log2(V)) + 100.
    """

    worker_count: int = field(default_factory=default_workers)
    m: int | None = None
    n: int | None = None
    i1: int = 5
    i2: int = 4
    i1_growth: float = 2.0
    t1: float | None = None
    t2: float = DEFAULT_T2
    alpha: float = 0.5
    hot_ratio: float = 0.1
    sample_size: int | None = None
    seed: int = 0
    vertices_per_block: int = 4096
    max_blocks: int = 2
    max_iterations: int | None = None
    progress_every: int = 0

    def __post_init__(self):
        if self.worker_count < 1:
            raise ConfigError("worker_count must be at least 1")
        m, n = self.m, self.n
        if m is None and n is None:
            m = math.ceil(0.7 * self.worker_count)
            n = self.worker_count - m
        elif m is None:
            m = self.worker_count - n
        elif n is None:
            n = self.worker_count - m
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        if m + n != self.worker_count:
            raise ConfigError(f"m + n must equal worker_count ({m} + {n} != {self.worker_count})")
        if n < 0 or m <= n:
            raise ConfigError(f"need m > n >= 0, got m={m}, n={n}")
        if self.i1 < 1 or self.i2 < 1:
            raise ConfigError("i1 and i2 must be at least 1")
        if self.i1_growth < 1:
            raise ConfigError("i1_growth must be >= 1")
        if not self.t2 > 0:
            raise ConfigError("t2 must be positive")
        if not (0 < self.hot_ratio <= 1):
            raise ConfigError("hot_ratio must be in (0, 1]")
        if not (0.5 <= self.alpha <= 1):
            raise ConfigError("alpha must be in [0.5, 1]")
        if self.vertices_per_block < 1:
            raise ConfigError("vertices_per_block must be positive")
        if self.sample_size is not None and self.sample_size < 1:
            raise ConfigError("sample_size must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError("max_iterations must be positive")

    def iteration_cap(self, vertex_count: int) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return 10 * math.ceil(math.log2(max(vertex_count, 1))) + 100

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class IterationPlan:
    iteration: int
    selected: tuple[int, ...]
    repartition_due: bool = False
    phase: str = "steady"     # initial | steady | cold_only


def _top(ids: list[int], psd: np.ndarray, k: int) -> list[int]:
    if k <= 0 or not ids:
        return []
    return sorted(ids, key=lambda i: (-psd[i], i))[:k]


def plan_iteration(it: int, ps: PartitionSet, pst: PartitionStateTable,
                   cfg: SchedulerConfig) -> IterationPlan:
    """Pick the partitions to service in iteration ``it``.

    Only partitions with pending work (positive state degree) are eligible
    after iteration 0; the plan shrinks rather than padding idle slots.
    """
    psd = pst.psd
    if it == 0:
        hottest = _top(ps.ids_of(Kind.HOT), psd, 1)
        return IterationPlan(0, tuple(ps.ids_of(Kind.DEAD) + hottest), phase="initial")
    hot = [i for i in ps.ids_of(Kind.HOT) if psd[i] > 0]
    cold = [i for i in ps.ids_of(Kind.COLD) if psd[i] > 0]
    if hot:
        if it % cfg.i2 == 0:
            sel = _top(hot, psd, cfg.m) + _top(cold, psd, cfg.n)
        else:
            sel = _top(hot, psd, cfg.worker_count)
        return IterationPlan(it, tuple(sel), phase="steady")
    return IterationPlan(it, tuple(_top(cold, psd, cfg.worker_count)), phase="cold_only")


def plan_all(it: int, ps: PartitionSet, pst: PartitionStateTable,
             cfg: SchedulerConfig) -> IterationPlan:
    """Static schedule: every partition, every iteration."""
    return IterationPlan(it, tuple(range(len(ps))), phase="steady")


def repartition_due(it: int, last: int, interval: int, growth: float = 1.0) -> bool:
    """True once ``interval`` iterations have passed since ``last``.

    The caller grows the interval to ceil(interval * growth) after acting.
    """
    if growth < 1:
        raise ConfigError(f"growth must be >= 1, got {growth}")
    if interval < 1:
        raise ConfigError(f"interval must be >= 1, got {interval}")
    return it - last >= interval


@dataclass
class RepartitionEvent:
    iteration: int
    psd: np.ndarray
    kinds_before: list[Kind]
    kinds_after: list[Kind]
    threshold: float


@dataclass
class RunResult:
    values: np.ndarray
    metrics: RunMetrics
    partitions: PartitionSet
    initial_partitions: PartitionSet
    threshold: ActivityThreshold | None = None
    service_counts: np.ndarray | None = None
    repartitions: list[RepartitionEvent] = field(default_factory=list)
    tables: ValueTables | None = None
    final_psd: np.ndarray | None = None

    @property
    def converged(self) -> bool:
        return self.metrics.converged


Planner = Callable[[int, PartitionSet, PartitionStateTable, SchedulerConfig], IterationPlan]


def execute(g: Graph, kernel: Kernel, ps: PartitionSet, cfg: SchedulerConfig,
            planner: Planner = plan_iteration, repartition: str | None = None,
            t1: float | None = None, observer=None) -> RunResult:
    """Bulk-synchronous loop shared by the adaptive and static modes.

    ``repartition`` is ``"barrier"``, ``"general"`` or ``None``.
    ``observer(it, plan, tables, pst)`` is called after every iteration's
    barrier and must not mutate its arguments.
    """
    start = time.perf_counter()
    tables, sdt = kernel.initial_state()
    edges = [kernel.edges_for(p.vertices) for p in ps]
    metrics = RunMetrics()
    counts = np.zeros(len(ps), dtype=np.int64)
    events = []
    initial = ps
    interval, last = cfg.i1, 0
    pst = accumulate_psd(ps, sdt)
    cap = cfg.iteration_cap(g.vertex_count)

    def service(pid, it):
        return kernel.service(ps[pid].vertices, edges[pid], tables, sdt, it)

    pool = ThreadPoolExecutor(cfg.worker_count) if cfg.worker_count > 1 else None
    try:
        for it in range(cap):
            plan = planner(it, ps, pst, cfg)
            sel = plan.selected
            if len(set(sel)) != len(sel):
                raise RuntimeError(f"planner selected a partition twice at iteration {it}")
            if pool is not None and len(sel) > 1:
                batches = list(pool.map(lambda pid: service(pid, it), sel))
            else:
                batches = [service(pid, it) for pid in sel]
            kernel.deliver(batches, tables, sdt)
            metrics.record(sel, ps.sizes)
            counts[list(sel)] += 1
            metrics.iterations = it + 1

            pst = accumulate_psd(ps, sdt)
            metrics.per_iteration_psd_sum.append(pst.total)
            if observer is not None:
                observer(it, plan, tables, pst)

            if repartition and repartition_due(it, last, interval, cfg.i1_growth):
                before = ps.kinds
                if repartition == "barrier":
                    ps = repartition_barrier(ps, pst, t1, kernel.spec)
                else:
                    ps = repartition_general(ps, pst, t1)
                events.append(RepartitionEvent(it, pst.psd.copy(), before, ps.kinds, t1))
                metrics.repartition_events += 1
                last, interval = it, math.ceil(interval * cfg.i1_growth)

            if cfg.progress_every and it % cfg.progress_every == 0:
                log.info("iteration %d  psd_sum %.6g  serviced %d", it, pst.total, len(sel))
            if check_convergence(pst, cfg.t2):
                metrics.converged = True
                break
    finally:
        if pool is not None:
            pool.shutdown()

    metrics.wall_time = time.perf_counter() - start
    if not metrics.converged:
        log.warning("stopped unconverged after %d iterations (psd sum %.3g)",
                    metrics.iterations, metrics.per_iteration_psd_sum[-1] if metrics.iterations else float("nan"))
    return RunResult(kernel.values(tables), metrics, ps, initial, service_counts=counts,
                     repartitions=events, tables=tables, final_psd=pst.psd)


def build_partitions(g: Graph, cfg: SchedulerConfig) -> tuple[PartitionSet, ActivityThreshold | None, float]:
    """Degree table, sampled threshold and initial hot/cold/dead partition set."""
    d = with_active_degrees(g, compute_degrees(g, cfg.alpha))
    live = int(np.count_nonzero(~d.dead))
    th = None
    if live:
        k = cfg.sample_size if cfg.sample_size is not None else min(1000, live)
        th = sample_threshold(g, d, min(k, live), cfg.hot_ratio, cfg.seed)
    t1 = cfg.t1 if cfg.t1 is not None else (th.t1 if th else math.inf)
    ps = initial_partition(g, d, t1, cfg.vertices_per_block, cfg.max_blocks)
    return ps, th, t1


def run(g: Graph, spec: AlgorithmSpec, cfg: SchedulerConfig | None = None,
        planner: Planner | None = None, observer=None) -> RunResult:
    """Structure-aware run: activity partitioning, adaptive scheduling, repartitioning.

    A custom ``planner`` replaces :func:`plan_iteration` (used to check that
    results do not depend on schedule).  Hitting the iteration cap returns an
    unconverged result rather than raising.
    """
    cfg = cfg or SchedulerConfig()
    ps, th, t1 = build_partitions(g, cfg)
    kernel = make_kernel(g, spec)
    mode = "barrier" if spec.monotone_cooling else "general"
    result = execute(g, kernel, ps, cfg, planner or plan_iteration, mode, t1, observer)
    result.threshold = th
    return result
