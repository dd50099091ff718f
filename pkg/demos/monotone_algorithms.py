"""
Shortest paths, BFS levels and components
=========================================

Monotone algorithms push only improvements, so the answers match the
classic sequential algorithms exactly whatever order partitions run in.
"""

import heapq

import numpy as np

from sagegraph import AlgorithmSpec, SchedulerConfig, run
from sagegraph.generators import random_graph

g = random_graph(2000, 10_000, seed=3, skew=1.0, weighted=True)
cfg = SchedulerConfig(worker_count=4, vertices_per_block=128)
source = int(np.argmax(g.out_degree))

dist = run(g, AlgorithmSpec("sssp", source=source), cfg)
levels = run(g, AlgorithmSpec("bfs", source=source), cfg)
comps = run(g, AlgorithmSpec("cc"), cfg)

reach = np.isfinite(dist.values)
print(f"reachable from {source}: {reach.sum()} vertices, farthest at {dist.values[reach].max():.2f}")
print(f"deepest BFS level: {int(levels.values[reach].max())}")
print(f"components: {len(np.unique(comps.values))}")
for res, name in ((dist, "sssp"), (levels, "bfs"), (comps, "cc")):
    m = res.metrics
    print(f"{name:5s} {m.status} in {m.iterations} iterations, {m.partition_loads} partition loads")

# quick cross-check against a textbook Dijkstra
adj = [[] for _ in range(g.vertex_count)]
for s, t, w in zip(*g.edges(), g.edge_weights()):
    adj[s].append((t, w))
best = np.full(g.vertex_count, np.inf)
best[source] = 0.0
heap = [(0.0, source)]
while heap:
    d, v = heapq.heappop(heap)
    if d > best[v]:
        continue
    for u, w in adj[v]:
        if d + w < best[u]:
            best[u] = d + w
            heapq.heappush(heap, (best[u], u))
print("matches Dijkstra:", np.array_equal(best, dist.values))
