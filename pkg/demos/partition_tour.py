"""
Hot, cold and dead partitions on a tiny graph
=============================================

Score every vertex, pick a hotness cutoff and cut the activity-sorted order
into partitions.
"""

import numpy as np

from sagegraph import compute_degrees, from_edges, initial_partition, sample_threshold
from sagegraph.partition import with_active_degrees

# six vertices; vertex 5 has no edges at all
g = from_edges([0, 0, 0, 1, 2, 3], [1, 2, 3, 0, 0, 4], vertex_count=6)

d = with_active_degrees(g, compute_degrees(g, alpha=0.5))
print("degree function:", d.degree)
print("active degree:  ", np.round(d.active_degree, 4))

# rank cutoff over the five live vertices: the top 20% is one vertex
th = sample_threshold(g, d, sample_size=5, hot_ratio=0.2, seed=0)
print("t1 =", th.t1)

ps = initial_partition(g, d, th, vertices_per_block=4)
for p in ps:
    print(f"partition {p.id}: {p.kind.value:4s} vertices={p.vertices.tolist()} out_edges={p.edge_weight}")
print("barrier after", ps.barrier, "vertices of the sorted order")
