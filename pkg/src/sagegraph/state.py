"""Vertex value buffers, state-degree accumulators and convergence detection.

A vertex's state degree accumulates how much its tentative value has moved
since the vertex was last serviced; it is reset when the vertex's partition
is processed.  The partition state degree is the mean over members and the
run is converged once the partition state degrees sum below a threshold.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .partition import Kind, Partition, PartitionSet

DEFAULT_T2 = 1e-6


def _scalar_or_array(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


@dataclass
class ValueTables:
    """Committed (``curr``) and tentative (``next``) vertex values.

    ``next`` already reflects every message a vertex has received; ``curr``
    is what it held when last serviced.  ``changed`` marks vertices whose
    tentative value has not been propagated yet.  PageRank keeps its
    undelivered mass in ``residual``.
    """

    curr: np.ndarray
    next: np.ndarray
    changed: np.ndarray
    residual: np.ndarray | None = None
    dangling: float = 0.0

    def __len__(self) -> int:
        return len(self.curr)


@dataclass
class StateDegreeTable:
    sd: np.ndarray
    window_start: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.window_start is None:
            self.window_start = np.zeros(len(self.sd), dtype=np.int64)

    @classmethod
    def zeros(cls, n: int) -> "StateDegreeTable":
        return cls(np.zeros(n))


@dataclass
class PartitionStateTable:
    psd: np.ndarray
    ids: np.ndarray

    @property
    def total(self) -> float:
        return float(self.psd.sum())


def sd_contribution_pagerank(curr, next):
    """Absolute rank difference between two consecutive results."""
    return _scalar_or_array(np.abs(np.asarray(curr, dtype=float) - np.asarray(next, dtype=float)))


def sd_contribution_sssp(curr, next):
    """Smaller of two distances, or 0 when the distance did not change.

    ``inf`` marks an unreached vertex: two infinities contribute 0, one
    infinity yields the finite operand.
    """
    c = np.asarray(curr, dtype=float)
    n = np.asarray(next, dtype=float)
    if np.any(c < 0) or np.any(n < 0):
        raise ValueError("distances must be non-negative")
    return _scalar_or_array(np.where(c == n, 0.0, np.minimum(c, n)))


def sd_contribution_cc(curr, next):
    """Larger of two component labels, or 0 when the label did not change."""
    c = np.asarray(curr, dtype=float)
    n = np.asarray(next, dtype=float)
    return _scalar_or_array(np.where(c == n, 0.0, np.maximum(c, n)))


def accumulate_psd(ps: PartitionSet, sdt: StateDegreeTable) -> PartitionStateTable:
    """Mean member state degree per partition; dead and empty partitions get 0."""
    ids = np.arange(len(ps), dtype=np.int64)
    sums = np.bincount(ps.owner, weights=sdt.sd, minlength=len(ps))
    sizes = ps.sizes
    psd = np.divide(sums, sizes, out=np.zeros(len(ps)), where=sizes > 0)
    for p in ps.partitions:
        if p.kind == Kind.DEAD:
            psd[p.id] = 0.0
    return PartitionStateTable(psd, ids)


def check_convergence(pst: PartitionStateTable, t2: float = DEFAULT_T2) -> bool:
    if not t2 > 0:
        raise ConfigError(f"t2 must be positive, got {t2}")
    return bool(pst.psd.sum() < t2)


def reset_window(sdt: StateDegreeTable, partition: Partition, iteration: int = 0) -> None:
    sdt.sd[partition.vertices] = 0.0
    sdt.window_start[partition.vertices] = iteration
