"""Push-style vertex kernels for PageRank, SSSP, BFS and connected components.

Every kernel follows the same contract so the scheduler can service any
subset of partitions per iteration:

* servicing a vertex commits its tentative value (``next`` -> ``curr``),
  clears its state degree and emits messages along its edges;
* messages are combined at the iteration barrier with an associative,
  commutative operator (sum, min or max) into the targets' tentative
  values, and every change is charged to the target's state degree.

Because the combine operators are order-insensitive and each kernel is a
monotone or linear fixed-point iteration, the converged values do not depend
on which partitions were serviced when.

Two entry points exist per algorithm: ``*_update`` processes one vertex and
delivers its messages immediately (reference semantics), while the kernel
classes service whole partitions with numpy and defer delivery to the
barrier.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import Graph
from .state import (StateDegreeTable, ValueTables, sd_contribution_cc,
                    sd_contribution_pagerank, sd_contribution_sssp)

DEFAULT_DAMPING = 0.85

# Charged when a distance changes but the min-rule contribution is 0
# (a change to distance 0); keeps such vertices schedulable.
ACTIVATION = 1.0

ALGORITHMS = ("pagerank", "sssp", "cc", "bfs")


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    source: int | None = None
    damping: float = DEFAULT_DAMPING

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.name!r}; choose from {', '.join(ALGORITHMS)}")
        if self.name in ("sssp", "bfs") and self.source is None:
            raise ConfigError(f"{self.name} requires a source vertex")
        if not (0 < self.damping < 1):
            raise ConfigError(f"damping must be in (0, 1), got {self.damping}")

    @property
    def monotone_cooling(self) -> bool:
        """Partitions only ever cool (hot -> cold), so a barrier suffices."""
        return self.name == "pagerank"

    @property
    def contribution_fn(self):
        return {"pagerank": sd_contribution_pagerank, "cc": sd_contribution_cc}.get(
            self.name, sd_contribution_sssp)

    @property
    def tolerance(self) -> float:
        """Largest acceptable final-value discrepancy between two runs."""
        return 1e-4 if self.name == "pagerank" else 0.0


def _live_mask(g: Graph) -> np.ndarray:
    return (g.out_degree > 0) | (g.in_degree > 0)


def _gather(offsets: np.ndarray, verts: np.ndarray):
    """Local source index and global slot of every adjacency entry of ``verts``."""
    counts = offsets[verts + 1] - offsets[verts]
    total = int(counts.sum())
    before = np.cumsum(counts) - counts
    slots = np.repeat(offsets[verts] - before, counts) + np.arange(total)
    local = np.repeat(np.arange(len(verts)), counts)
    return local, slots


@dataclass(frozen=True)
class PartEdges:
    """Edges leaving one partition, precomputed once per run."""

    src: np.ndarray     # index into the partition's vertex array
    tgt: np.ndarray
    weight: np.ndarray | None = None


@dataclass
class Messages:
    tgt: np.ndarray
    val: np.ndarray
    dangling: float = 0.0


def _init_sd(g: Graph, tables: ValueTables, fn) -> StateDegreeTable:
    sd = np.zeros(g.vertex_count)
    c = tables.changed
    sd[c] = fn(tables.curr[c], tables.next[c])
    return StateDegreeTable(sd)


# --- single-vertex reference updates -------------------------------------

def pagerank_update(v: int, g: Graph, tables: ValueTables, sdt: StateDegreeTable,
                    damping: float = DEFAULT_DAMPING) -> float:
    """Move ``v``'s residual into its rank and push the damped share to out-neighbours.

    Returns the rank change of ``v``.  Mass from a dangling (but not
    isolated) vertex is parked in ``tables.dangling`` until
    :func:`fold_dangling` spreads it at the barrier.
    """
    r = float(tables.residual[v])
    tables.curr[v] += r
    tables.next[v] = tables.curr[v]
    tables.residual[v] = 0.0
    tables.changed[v] = False
    sdt.sd[v] = 0.0
    nbrs = g.out_neighbors(v)
    if len(nbrs):
        share = damping * r / len(nbrs)
        for u in nbrs:
            tables.residual[u] += share
            tables.next[u] += share
            sdt.sd[u] += share
            tables.changed[u] = tables.changed[u] or share > 0
    elif g.in_degree[v] > 0:
        tables.dangling += damping * r
    return r


def fold_dangling(g: Graph, tables: ValueTables, sdt: StateDegreeTable) -> None:
    """Spread parked dangling mass uniformly over live vertices."""
    mass = tables.dangling
    tables.dangling = 0.0
    live = _live_mask(g)
    k = int(live.sum())
    if mass <= 0 or k == 0:
        return
    share = mass / k
    tables.residual[live] += share
    tables.next[live] += share
    sdt.sd[live] += share
    tables.changed[live] = True


def _relax_update(v: int, g: Graph, tables: ValueTables, sdt: StateDegreeTable,
                  weights) -> float:
    old, new = tables.curr[v], tables.next[v]
    tables.curr[v] = new
    tables.changed[v] = False
    sdt.sd[v] = 0.0
    for u, w in zip(g.out_neighbors(v), weights):
        cand = new + w
        if cand < tables.next[u]:
            c = sd_contribution_sssp(tables.next[u], cand)
            sdt.sd[u] += c if c > 0 else ACTIVATION
            tables.next[u] = cand
            tables.changed[u] = True
    return sd_contribution_sssp(old, new)


def sssp_update(v: int, g: Graph, tables: ValueTables, sdt: StateDegreeTable) -> float:
    """Commit ``v``'s distance and relax its out-edges; returns ``v``'s own contribution."""
    return _relax_update(v, g, tables, sdt, g.out_weights(v))


def bfs_update(v: int, g: Graph, tables: ValueTables, sdt: StateDegreeTable) -> float:
    """:func:`sssp_update` with every edge weight taken as 1."""
    return _relax_update(v, g, tables, sdt, np.ones(len(g.out_neighbors(v))))


def cc_update(v: int, g: Graph, tables: ValueTables, sdt: StateDegreeTable) -> float:
    """Commit ``v``'s label and raise every neighbour (either direction) to at least it."""
    old, new = tables.curr[v], tables.next[v]
    tables.curr[v] = new
    tables.changed[v] = False
    sdt.sd[v] = 0.0
    for u in np.concatenate([g.out_neighbors(v), g.in_neighbors(v)]):
        if new > tables.next[u]:
            sdt.sd[u] += sd_contribution_cc(tables.next[u], new)
            tables.next[u] = new
            tables.changed[u] = True
    return sd_contribution_cc(old, new)


# --- partition-granular kernels ------------------------------------------

class Kernel:
    """Shared plumbing; subclasses define initial state and message handling."""

    both_directions = False

    def __init__(self, g: Graph, spec: AlgorithmSpec):
        self.g = g
        self.spec = spec
        self.n = g.vertex_count
        self.live = _live_mask(g)

    def edges_for(self, verts: np.ndarray) -> PartEdges:
        g = self.g
        src, slots = _gather(g.out_offsets, verts)
        tgt = g.out_targets[slots]
        w = g.edge_weights()[slots]
        if self.both_directions:
            isrc, islots = _gather(g.in_offsets, verts)
            src = np.concatenate([src, isrc])
            tgt = np.concatenate([tgt, g.in_sources[islots]])
            w = None
        return PartEdges(src, tgt, w)

    def initial_state(self) -> tuple[ValueTables, StateDegreeTable]:
        raise NotImplementedError

    def _commit(self, verts, tables: ValueTables, sdt: StateDegreeTable, iteration: int):
        vals = tables.next[verts].copy()
        pending = tables.changed[verts].copy()
        tables.curr[verts] = vals
        tables.changed[verts] = False
        sdt.sd[verts] = 0.0
        sdt.window_start[verts] = iteration
        return vals, pending

    def service(self, verts, edges: PartEdges, tables: ValueTables, sdt: StateDegreeTable,
                iteration: int = 0) -> Messages:
        raise NotImplementedError

    def deliver(self, batches: list[Messages], tables: ValueTables, sdt: StateDegreeTable) -> None:
        raise NotImplementedError

    def update(self, v: int, tables: ValueTables, sdt: StateDegreeTable) -> float:
        raise NotImplementedError

    def values(self, tables: ValueTables) -> np.ndarray:
        return tables.next.copy()

    @staticmethod
    def _concat(batches: list[Messages]):
        if not batches:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        return (np.concatenate([b.tgt for b in batches]),
                np.concatenate([b.val for b in batches]))


class PageRankKernel(Kernel):
    """Accumulative PageRank: rank = sum of all residual mass a vertex absorbs.

    Fixed point: rank = (1 - d) + d * (sum of in-neighbour rank / out-degree
    + dangling rank / live count) on live vertices; isolated vertices keep
    1 - d.
    """

    def __init__(self, g, spec):
        super().__init__(g, spec)
        self.d = spec.damping
        self.outdeg = np.asarray(g.out_degree)
        self.inv_out = np.divide(self.d, self.outdeg, out=np.zeros(self.n),
                                 where=self.outdeg > 0)
        self.sink = (self.outdeg == 0) & self.live
        self.n_live = int(self.live.sum())

    def initial_state(self):
        res = np.full(self.n, 1.0 - self.d)
        tables = ValueTables(np.zeros(self.n), res.copy(), np.ones(self.n, dtype=bool), res)
        return tables, _init_sd(self.g, tables, sd_contribution_pagerank)

    def service(self, verts, edges, tables, sdt, iteration=0):
        r = tables.residual[verts].copy()
        tables.residual[verts] = 0.0
        self._commit(verts, tables, sdt, iteration)
        share = r * self.inv_out[verts]
        return Messages(edges.tgt, share[edges.src],
                        self.d * float(r[self.sink[verts]].sum()))

    def deliver(self, batches, tables, sdt):
        tgt, val = self._concat(batches)
        delta = np.bincount(tgt, weights=val, minlength=self.n).astype(np.float64, copy=False)
        mass = sum(b.dangling for b in batches)
        if mass > 0 and self.n_live:
            delta[self.live] += mass / self.n_live
        hit = delta > 0
        # pushes are non-negative, so |next_new - next_old| == delta
        tables.residual += delta
        tables.next += delta
        sdt.sd += delta
        tables.changed |= hit

    def update(self, v, tables, sdt):
        return pagerank_update(v, self.g, tables, sdt, self.d)


class SSSPKernel(Kernel):
    def __init__(self, g, spec):
        super().__init__(g, spec)
        if not (0 <= spec.source < self.n):
            raise ConfigError(f"source {spec.source} out of range for {self.n} vertices")

    def initial_state(self):
        curr = np.full(self.n, np.inf)
        nxt = curr.copy()
        nxt[self.spec.source] = 0.0
        tables = ValueTables(curr, nxt, curr != nxt)
        sdt = _init_sd(self.g, tables, sd_contribution_sssp)
        sdt.sd[tables.changed & (sdt.sd == 0)] = ACTIVATION
        return tables, sdt

    def service(self, verts, edges, tables, sdt, iteration=0):
        dist, pending = self._commit(verts, tables, sdt, iteration)
        m = pending[edges.src]
        return Messages(edges.tgt[m], dist[edges.src[m]] + edges.weight[m])

    def deliver(self, batches, tables, sdt):
        tgt, cand = self._concat(batches)
        if not len(tgt):
            return
        new = tables.next.copy()
        np.minimum.at(new, tgt, cand)
        imp = new < tables.next
        c = sd_contribution_sssp(tables.next[imp], new[imp])
        sdt.sd[imp] += np.where(c > 0, c, ACTIVATION)
        tables.next[imp] = new[imp]
        tables.changed |= imp

    def update(self, v, tables, sdt):
        return sssp_update(v, self.g, tables, sdt)


class BFSKernel(SSSPKernel):
    def edges_for(self, verts):
        e = super().edges_for(verts)
        return PartEdges(e.src, e.tgt, np.ones(len(e.tgt)))

    def update(self, v, tables, sdt):
        return bfs_update(v, self.g, tables, sdt)


class CCKernel(Kernel):
    """Max-label propagation over the underlying undirected graph."""

    both_directions = True

    def initial_state(self):
        tables = ValueTables(np.zeros(self.n), np.arange(self.n, dtype=float), np.zeros(self.n, dtype=bool))
        tables.changed = tables.curr != tables.next
        return tables, _init_sd(self.g, tables, sd_contribution_cc)

    def service(self, verts, edges, tables, sdt, iteration=0):
        labels, pending = self._commit(verts, tables, sdt, iteration)
        m = pending[edges.src]
        return Messages(edges.tgt[m], labels[edges.src[m]])

    def deliver(self, batches, tables, sdt):
        tgt, lab = self._concat(batches)
        if not len(tgt):
            return
        new = tables.next.copy()
        np.maximum.at(new, tgt, lab)
        up = new > tables.next
        sdt.sd[up] += sd_contribution_cc(tables.next[up], new[up])
        tables.next[up] = new[up]
        tables.changed |= up

    def update(self, v, tables, sdt):
        return cc_update(v, self.g, tables, sdt)


_KERNELS = {"pagerank": PageRankKernel, "sssp": SSSPKernel, "bfs": BFSKernel, "cc": CCKernel}


def make_kernel(g: Graph, spec: AlgorithmSpec) -> Kernel:
    return _KERNELS[spec.name](g, spec)
