"""Seeded synthetic graphs: RMAT for skewed benchmarks, plus small helpers."""
from __future__ import annotations

import numpy as np

from .graph import Graph, from_edges


def rmat(scale: int, edge_factor: int = 16, a: float = 0.57, b: float = 0.19,
         c: float = 0.19, d: float = 0.05, seed: int = 0, weighted: bool = False,
         weight_range: tuple[float, float] = (1.0, 10.0)) -> Graph:
    """Recursive-matrix graph with ``2**scale`` vertices and ``edge_factor * 2**scale`` edges.

    Each edge descends ``scale`` levels of the adjacency matrix, picking one of
    the four quadrants with probabilities (a, b, c, d).  Vertex ids are not
    permuted, so low ids carry the heavy degrees.
    """
    if abs(a + b + c + d - 1.0) > 1e-9:
        raise ValueError("quadrant probabilities must sum to 1")
    rng = np.random.default_rng(seed)
    n = 1 << scale
    m = edge_factor * n
    src = np.zeros(m, dtype=np.int64)
    dst = np.zeros(m, dtype=np.int64)
    for level in range(scale):
        r = rng.random(m)
        down = r >= a + b            # quadrant c or d: source bit set
        right = ((r >= a) & (r < a + b)) | (r >= a + b + c)
        bit = 1 << (scale - level - 1)
        src += bit * down
        dst += bit * right
    w = rng.uniform(*weight_range, size=m) if weighted else None
    return from_edges(src, dst, w, vertex_count=n)


def random_graph(n: int, edge_count: int, seed: int = 0, skew: float = 0.0,
                 weighted: bool = False, isolated_fraction: float = 0.0,
                 weight_range: tuple[float, float] = (1.0, 10.0)) -> Graph:
    """Random directed multigraph on ``n`` vertices.

    ``skew`` > 0 draws endpoints with probability proportional to
    ``(rank + 1) ** -skew`` over a random vertex ranking, giving power-law-like
    degrees; 0 is uniform.  ``isolated_fraction`` of the vertices receive no
    edges at all.
    """
    rng = np.random.default_rng(seed)
    k_isolated = int(round(isolated_fraction * n))
    perm = rng.permutation(n)
    live = np.sort(perm[k_isolated:])
    if live.size == 0 or edge_count == 0:
        return from_edges([], [], [] if weighted else None, vertex_count=n)
    if skew > 0:
        p = (np.arange(live.size) + 1.0) ** -skew
        p /= p.sum()
        ranked = rng.permutation(live)
        src = ranked[rng.choice(live.size, size=edge_count, p=p)]
        ranked = rng.permutation(live)
        dst = ranked[rng.choice(live.size, size=edge_count, p=p)]
    else:
        src = live[rng.integers(0, live.size, size=edge_count)]
        dst = live[rng.integers(0, live.size, size=edge_count)]
    w = rng.uniform(*weight_range, size=edge_count) if weighted else None
    return from_edges(src, dst, w, vertex_count=n)


def ring(n: int, weighted: bool = False) -> Graph:
    """Directed cycle 0 -> 1 -> ... -> n-1 -> 0; every vertex has degree (1, 1)."""
    src = np.arange(n)
    return from_edges(src, (src + 1) % n, np.ones(n) if weighted else None, vertex_count=n)
