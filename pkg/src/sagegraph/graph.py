"""Compact adjacency storage, edge-list I/O and per-vertex degree tables.

A :class:`Graph` keeps both directions of every edge in CSR form so that
push-style kernels (out-edges) and structure scoring (in- and out-edges) can
read it without rebuilding anything.  Graphs are immutable once built.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, GraphFormatError, GraphValidationError

MAGIC = b"SAGE1"
_HEADER = struct.Struct("<5sQQQ")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Directed multigraph in dual CSR form.

    ``out_targets[out_offsets[v]:out_offsets[v + 1]]`` are the heads of the
    edges leaving ``v`` and ``weights`` runs parallel to ``out_targets``.
    ``in_sources`` is the reverse adjacency; ``in_edge_ids`` maps each in-edge
    slot back to its position in ``out_targets``.
    """

    vertex_count: int
    edge_count: int
    out_offsets: np.ndarray
    out_targets: np.ndarray
    in_offsets: np.ndarray
    in_sources: np.ndarray
    in_edge_ids: np.ndarray
    weights: np.ndarray | None = None

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_offsets)

    @property
    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_offsets)

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_targets[self.out_offsets[v]:self.out_offsets[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_sources[self.in_offsets[v]:self.in_offsets[v + 1]]

    def out_weights(self, v: int) -> np.ndarray:
        lo, hi = self.out_offsets[v], self.out_offsets[v + 1]
        if self.weights is None:
            return np.ones(hi - lo)
        return self.weights[lo:hi]

    def edge_weights(self) -> np.ndarray:
        """Per-edge weights, with implicit 1.0 for unweighted graphs."""
        if self.weights is None:
            return np.ones(self.edge_count)
        return self.weights

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """(sources, targets) in out-edge order."""
        src = np.repeat(np.arange(self.vertex_count, dtype=np.int64), self.out_degree)
        return src, np.asarray(self.out_targets)


def from_edges(src, dst, weights=None, vertex_count: int | None = None) -> Graph:
    """Build a :class:`Graph` from parallel edge arrays.

    Edge order within each source is preserved; duplicates and self-loops are
    kept.  ``vertex_count`` defaults to ``max id + 1``.
    """
    src = np.asarray(src, dtype=np.int64).ravel()
    dst = np.asarray(dst, dtype=np.int64).ravel()
    if src.shape != dst.shape:
        raise GraphValidationError("source and target arrays differ in length")
    if src.size and (src.min() < 0 or dst.min() < 0):
        raise GraphValidationError("vertex ids must be non-negative")
    if vertex_count is None:
        vertex_count = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
    if vertex_count <= 0:
        raise GraphValidationError("graph has no vertices")
    if src.size and max(src.max(), dst.max()) >= vertex_count:
        raise GraphValidationError("vertex id out of range")

    w = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.shape != src.shape:
            raise GraphValidationError("weight array differs in length from edges")
        if not np.all(np.isfinite(w)):
            raise GraphValidationError("edge weights must be finite")
        if np.any(w < 0):
            raise GraphValidationError("edge weights must be non-negative")

    n, m = int(vertex_count), int(src.size)
    order = np.argsort(src, kind="stable")
    out_targets = dst[order]
    out_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=out_offsets[1:])
    if w is not None:
        w = w[order]

    in_order = np.argsort(out_targets, kind="stable")
    sorted_src = np.repeat(np.arange(n, dtype=np.int64), np.diff(out_offsets))
    in_sources = sorted_src[in_order]
    in_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(out_targets, minlength=n), out=in_offsets[1:])

    return Graph(
        vertex_count=n,
        edge_count=m,
        out_offsets=_frozen(out_offsets),
        out_targets=_frozen(out_targets),
        in_offsets=_frozen(in_offsets),
        in_sources=_frozen(in_sources),
        in_edge_ids=_frozen(in_order.astype(np.int64)),
        weights=None if w is None else _frozen(w),
    )


def load_edge_list(path, weighted: bool = False) -> Graph:
    """Parse a whitespace-separated ``src dst [weight]`` edge list.

    Lines starting with ``#`` and blank lines are skipped.  When ``weighted``
    is false a third column, if present, is ignored.
    """
    src, dst, wts = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3) or (weighted and len(parts) != 3):
                want = "src dst weight" if weighted else "src dst [weight]"
                raise GraphFormatError(f"expected '{want}', got {line!r}", lineno)
            try:
                s, d = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"non-integer vertex id in {line!r}", lineno) from None
            if s < 0 or d < 0:
                raise GraphFormatError(f"negative vertex id in {line!r}", lineno)
            if weighted:
                try:
                    wt = float(parts[2])
                except ValueError:
                    raise GraphFormatError(f"bad weight in {line!r}", lineno) from None
                if not np.isfinite(wt):
                    raise GraphValidationError(f"line {lineno}: weight must be finite")
                if wt < 0:
                    raise GraphValidationError(f"line {lineno}: negative weight {wt}")
                wts.append(wt)
            src.append(s)
            dst.append(d)
    if not src:
        raise GraphFormatError("edge list contains no edges")
    return from_edges(src, dst, wts if weighted else None)


def write_binary(g: Graph, path) -> None:
    """Write the SAGE1 binary cache: header, offsets, targets, optional weights."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, g.vertex_count, g.edge_count, int(g.weighted)))
        fh.write(np.asarray(g.out_offsets, dtype="<i8").tobytes())
        fh.write(np.asarray(g.out_targets, dtype="<i8").tobytes())
        if g.weighted:
            fh.write(np.asarray(g.weights, dtype="<f8").tobytes())


def read_binary(path) -> Graph:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise GraphFormatError("truncated SAGE1 header")
    magic, n, m, weighted = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise GraphFormatError("not a SAGE1 file")
    expected = _HEADER.size + 8 * (n + 1) + 8 * m + (8 * m if weighted else 0)
    if len(data) != expected:
        raise GraphFormatError(f"SAGE1 payload is {len(data)} bytes, expected {expected}")
    pos = _HEADER.size
    offsets = np.frombuffer(data, dtype="<i8", count=n + 1, offset=pos).astype(np.int64)
    pos += 8 * (n + 1)
    targets = np.frombuffer(data, dtype="<i8", count=m, offset=pos).astype(np.int64)
    pos += 8 * m
    w = np.frombuffer(data, dtype="<f8", count=m, offset=pos).astype(np.float64) if weighted else None
    if offsets[0] != 0 or offsets[-1] != m or np.any(np.diff(offsets) < 0):
        raise GraphFormatError("SAGE1 offsets are inconsistent")
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
    return from_edges(src, targets, w, vertex_count=n)


def load_graph(path, weighted: bool = False) -> Graph:
    """Load text or SAGE1 input, sniffed by magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        return read_binary(path)
    return load_edge_list(path, weighted=weighted)


def validate(g: Graph) -> list[str]:
    """Names of violated structural invariants; empty when ``g`` is well formed."""
    problems = []
    n, m = g.vertex_count, g.edge_count
    for name, offs, ids in (("out", g.out_offsets, g.out_targets), ("in", g.in_offsets, g.in_sources)):
        if len(offs) != n + 1:
            problems.append(f"offset length ({name})")
            continue
        if np.any(np.diff(offs) < 0):
            problems.append(f"offset monotonicity ({name})")
        if offs[0] != 0 or offs[-1] != m:
            problems.append(f"offset endpoints ({name})")
        if len(ids) != m:
            problems.append(f"edge array length ({name})")
        if len(ids) and (ids.min() < 0 or ids.max() >= n):
            problems.append(f"id range ({name})")
    if not problems and int(g.out_degree.sum()) != int(g.in_degree.sum()):
        problems.append("degree sum")
    if g.weights is not None:
        if len(g.weights) != m:
            problems.append("weight length")
        elif not np.all(np.isfinite(g.weights)) or np.any(g.weights < 0):
            problems.append("weight sign")
    return problems


@dataclass(frozen=True, eq=False)
class DegreeTable:
    """Per-vertex in/out degree, degree function and (once filled) active degree."""

    in_degree: np.ndarray
    out_degree: np.ndarray
    degree: np.ndarray
    alpha: float
    active_degree: np.ndarray | None = field(default=None)

    @property
    def max_degree(self) -> float:
        return float(self.degree.max()) if self.degree.size else 0.0

    @property
    def dead(self) -> np.ndarray:
        """Mask of vertices with no edges in either direction."""
        return (self.in_degree == 0) & (self.out_degree == 0)


def compute_degrees(g: Graph, alpha: float = 0.5) -> DegreeTable:
    """Degree function ``out_degree + alpha * in_degree`` for every vertex.

    ``alpha`` must lie in the closed interval [0.5, 1].
    """
    if not (0.5 <= alpha <= 1.0):
        raise ConfigError(f"alpha must be in [0.5, 1], got {alpha}")
    din = np.asarray(g.in_degree, dtype=np.int64)
    dout = np.asarray(g.out_degree, dtype=np.int64)
    return DegreeTable(
        in_degree=_frozen(din.copy()),
        out_degree=_frozen(dout.copy()),
        degree=_frozen(dout + alpha * din),
        alpha=float(alpha),
    )
