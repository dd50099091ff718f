"""Activity-based partitioning into hot, cold and dead blocks, and repartitioning.

Vertices are scored once by their active degree (own degree function plus a
normalised sum of their neighbours' degree functions), sorted, split at a
sampled threshold into a hot and a cold stream, and each stream is cut into
out-edge-balanced partitions.  Zero-degree vertices go to dead partitions.
Later repartitions only move hot/cold tags; membership never changes.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import ConfigError
from .graph import DegreeTable, Graph


class Kind(str, enum.Enum):
    HOT = "hot"
    COLD = "cold"
    DEAD = "dead"


@dataclass(frozen=True, eq=False)
class Partition:
    id: int
    kind: Kind
    vertices: np.ndarray
    edge_weight: int
    start: int          # position of the first member in PartitionSet.order

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True, eq=False)
class PartitionSet:
    """Ordered partitions plus the global vertex order they were cut from.

    ``order`` lists live vertices by descending active degree (hot stream,
    then cold stream) followed by dead vertices.  ``barrier`` is the position
    in ``order`` of the first non-hot vertex; it is ``None`` when the hot set
    is not a prefix of the order.
    """

    partitions: tuple[Partition, ...]
    order: np.ndarray
    barrier: int | None
    vertices_per_block: int
    generation: int = 0

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)

    def __getitem__(self, i) -> Partition:
        return self.partitions[i]

    @property
    def kinds(self) -> list[Kind]:
        return [p.kind for p in self.partitions]

    def ids_of(self, kind: Kind) -> list[int]:
        return [p.id for p in self.partitions if p.kind == kind]

    @cached_property
    def owner(self) -> np.ndarray:
        """Partition id of every vertex."""
        out = np.full(len(self.order), -1, dtype=np.int64)
        for p in self.partitions:
            out[p.vertices] = p.id
        return out

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([len(p) for p in self.partitions], dtype=np.int64)


@dataclass(frozen=True)
class ActivityThreshold:
    t1: float
    sample_size: int
    hot_ratio: float


def active_degree(g: Graph, d: DegreeTable, v: int) -> float:
    """Active degree of a single vertex.

    Neighbours are the distinct in- and out-neighbours of ``v``.  Raises
    ``ValueError`` for a zero-degree vertex, whose score is undefined.
    """
    dv = float(d.degree[v])
    if dv <= 0:
        raise ValueError(f"vertex {v} has zero degree; active degree is undefined")
    nbrs = np.union1d(g.out_neighbors(v), g.in_neighbors(v))
    return dv + float(d.degree[nbrs].sum()) / (math.sqrt(d.max_degree) * dv)


def active_degrees(g: Graph, d: DegreeTable) -> np.ndarray:
    """Vectorised :func:`active_degree` over all vertices; NaN for dead ones."""
    n = g.vertex_count
    src, dst = g.edges()
    a = np.concatenate([src, dst])
    b = np.concatenate([dst, src])
    keys = np.unique(a * n + b)
    v, u = keys // n, keys % n
    nbr_sum = np.bincount(v, weights=d.degree[u], minlength=n)
    out = np.full(n, np.nan)
    live = d.degree > 0
    out[live] = d.degree[live] + nbr_sum[live] / (math.sqrt(d.max_degree) * d.degree[live])
    return out


def with_active_degrees(g: Graph, d: DegreeTable) -> DegreeTable:
    if d.active_degree is not None:
        return d
    ad = active_degrees(g, d)
    ad.setflags(write=False)
    return replace(d, active_degree=ad)


def _rank_count(ratio: float, size: int) -> int:
    # round() first so 0.3 * 10 does not ceil to 4
    return max(1, math.ceil(round(ratio * size, 9)))


def descending_order(ad: np.ndarray, ids: np.ndarray) -> np.ndarray:
    """``ids`` sorted by active degree descending, ties by ascending id."""
    ids = np.asarray(ids)
    return ids[np.lexsort((ids, -ad[ids]))]


def sample_threshold(g: Graph, d: DegreeTable, sample_size: int, hot_ratio: float,
                     seed=None) -> ActivityThreshold:
    """Hotness cutoff: active degree of the ceil(hot_ratio * k)-th best of k sampled live vertices."""
    if not (0 < hot_ratio <= 1):
        raise ConfigError(f"hot_ratio must be in (0, 1], got {hot_ratio}")
    if sample_size <= 0:
        raise ConfigError(f"sample_size must be positive, got {sample_size}")
    d = with_active_degrees(g, d)
    live = np.flatnonzero(~d.dead)
    if live.size == 0:
        raise ConfigError("graph has no live vertices to sample")
    if sample_size > live.size:
        warnings.warn(f"sample_size {sample_size} exceeds live vertex count {live.size}; clipped",
                      stacklevel=2)
        sample_size = int(live.size)
    rng = np.random.default_rng(seed)
    sample = rng.choice(live, size=sample_size, replace=False)
    ranked = descending_order(d.active_degree, sample)
    k = _rank_count(hot_ratio, sample_size)
    return ActivityThreshold(t1=float(d.active_degree[ranked[k - 1]]),
                             sample_size=sample_size, hot_ratio=hot_ratio)


def _cut_stream(vertices: np.ndarray, out_degree: np.ndarray, vertices_per_block: int,
                max_blocks: int) -> list[np.ndarray]:
    """Greedy out-edge-balanced cut of an ordered stream.

    Targets P = ceil(len / vertices_per_block) partitions.  The k-th cut
    falls at the first prefix holding k/P of the stream's out-edges, so each
    partition is within one vertex's out-degree of the mean.  A partition is
    also closed at ``max_blocks * vertices_per_block`` vertices; when that
    cap binds, the remainder is re-planned from the cut.
    """
    n = len(vertices)
    if n == 0:
        return []
    cap = max_blocks * vertices_per_block
    cs = np.concatenate([[0], np.cumsum(out_degree[vertices])])
    planned = math.ceil(n / vertices_per_block)
    parts = []
    i = 0
    while i < n:
        # plan the segment [i, n) with the partitions still owed
        base, left = i, n - i
        target = max(planned - len(parts), math.ceil(left / cap))
        seg = int(cs[n] - cs[base])
        for k in range(1, target + 1):
            if k == target:
                j = n
            elif seg > 0:
                # first prefix whose edge count reaches k/P of the segment
                j = int(np.searchsorted(cs, cs[base] + seg * k / target, side="left"))
            else:
                j = base + round(left * k / target)
            j = max(i + 1, min(j, n - (target - k)))
            capped = j - i > cap
            j = min(j, i + cap)
            parts.append(vertices[i:j])
            i = j
            if capped:
                break
    return parts


def initial_partition(g: Graph, d: DegreeTable, t: ActivityThreshold | float,
                      vertices_per_block: int = 4096, max_blocks: int = 2) -> PartitionSet:
    """Build the hot/cold/dead partition set from active degrees.

    Partition ids run hot, then cold, then dead.  A vertex is hot when its
    active degree is at least the threshold.
    """
    if vertices_per_block <= 0:
        raise ConfigError("vertices_per_block must be positive")
    if max_blocks < 1:
        raise ConfigError("max_blocks must be at least 1")
    t1 = t.t1 if isinstance(t, ActivityThreshold) else float(t)
    d = with_active_degrees(g, d)
    dead_mask = d.dead
    live_sorted = descending_order(d.active_degree, np.flatnonzero(~dead_mask))
    n_hot = int(np.count_nonzero(d.active_degree[live_sorted] >= t1))
    dead = np.flatnonzero(dead_mask)

    streams = [
        (Kind.HOT, _cut_stream(live_sorted[:n_hot], d.out_degree, vertices_per_block, max_blocks)),
        (Kind.COLD, _cut_stream(live_sorted[n_hot:], d.out_degree, vertices_per_block, max_blocks)),
        (Kind.DEAD, [dead[i:i + vertices_per_block] for i in range(0, len(dead), vertices_per_block)]),
    ]
    parts = []
    pos = 0
    for kind, chunks in streams:
        for verts in chunks:
            verts = np.ascontiguousarray(verts, dtype=np.int64)
            verts.setflags(write=False)
            parts.append(Partition(len(parts), kind, verts, int(d.out_degree[verts].sum()), pos))
            pos += len(verts)
    order = np.concatenate([live_sorted, dead]).astype(np.int64)
    order.setflags(write=False)
    return PartitionSet(tuple(parts), order, n_hot, vertices_per_block)


def static_partition(g: Graph, vertices_per_block: int = 4096) -> PartitionSet:
    """Id-order chunks of ``vertices_per_block`` vertices, no activity sorting."""
    if vertices_per_block <= 0:
        raise ConfigError("vertices_per_block must be positive")
    n = g.vertex_count
    dout = g.out_degree
    parts = []
    for start in range(0, n, vertices_per_block):
        verts = np.arange(start, min(start + vertices_per_block, n), dtype=np.int64)
        verts.setflags(write=False)
        parts.append(Partition(len(parts), Kind.COLD, verts, int(dout[verts].sum()), start))
    return PartitionSet(tuple(parts), np.arange(n, dtype=np.int64), None, vertices_per_block)


def _psd_array(pst) -> np.ndarray:
    return np.asarray(getattr(pst, "psd", pst), dtype=np.float64)


def _hot_prefix_barrier(parts) -> int | None:
    live = [p for p in parts if p.kind != Kind.DEAD]
    seen_cold = False
    for p in live:
        if p.kind == Kind.COLD:
            seen_cold = True
        elif seen_cold:
            return None
    first_cold = next((p.start for p in live if p.kind == Kind.COLD), None)
    if first_cold is not None:
        return first_cold
    return sum(len(p) for p in live) if live else 0


def repartition_general(ps: PartitionSet, pst, t1: float) -> PartitionSet:
    """Re-tag hot partitions below ``t1`` as cold and cold ones at or above as hot."""
    psd = _psd_array(pst)
    parts = []
    for p in ps.partitions:
        kind = p.kind
        if kind == Kind.HOT and psd[p.id] < t1:
            kind = Kind.COLD
        elif kind == Kind.COLD and psd[p.id] >= t1:
            kind = Kind.HOT
        parts.append(p if kind == p.kind else replace(p, kind=kind))
    return replace(ps, partitions=tuple(parts), generation=ps.generation + 1,
                   barrier=_hot_prefix_barrier(parts))


def repartition_barrier(ps: PartitionSet, pst, t1: float, spec=None) -> PartitionSet:
    """Shrink the hot prefix for algorithms whose partitions only ever cool.

    Starting from the hot partition adjacent to the barrier, every partition
    with state degree below ``t1`` is released to the cold side, stopping at
    the first one that is still active.  Kinds are derived from the barrier
    alone.  The hot region never grows.
    """
    if spec is not None and not spec.monotone_cooling:
        raise ConfigError(f"barrier repartitioning requires a monotone-cooling algorithm; "
                          f"{spec.name} is not")
    if ps.barrier is None:
        raise ConfigError("partition set has no barrier")
    psd = _psd_array(pst)
    barrier = ps.barrier
    hot_region = [p for p in ps.partitions if p.kind != Kind.DEAD and p.start < barrier]
    for p in reversed(hot_region):
        if psd[p.id] >= t1:
            break
        barrier = p.start
    parts = []
    for p in ps.partitions:
        if p.kind == Kind.DEAD:
            parts.append(p)
            continue
        kind = Kind.HOT if p.start < barrier else Kind.COLD
        parts.append(p if kind == p.kind else replace(p, kind=kind))
    return replace(ps, partitions=tuple(parts), barrier=barrier, generation=ps.generation + 1)
