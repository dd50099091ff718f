"""
Watching the scheduler
======================

An observer sees every iteration after its barrier: which partitions ran,
which phase the planner was in, and how much state degree is left.
"""

from collections import Counter

from sagegraph import AlgorithmSpec, SchedulerConfig, run
from sagegraph.generators import random_graph

g = random_graph(3000, 15_000, seed=11, skew=1.1, isolated_fraction=0.2)
cfg = SchedulerConfig(worker_count=6, vertices_per_block=64, i1=4, i2=3, max_iterations=10_000)

phases = Counter()


def watch(it, plan, tables, pst):
    phases[plan.phase] += 1
    if it < 6 or it % 50 == 0:
        print(f"it {it:4d} {plan.phase:9s} ran {list(plan.selected)}  psd sum {pst.total:.3e}")


res = run(g, AlgorithmSpec("pagerank"), cfg, observer=watch)
print(dict(phases))
print(f"{res.metrics.status} after {res.metrics.iterations} iterations, "
      f"{res.metrics.repartition_events} repartitions")
dead = [p.id for p in res.partitions if p.kind.value == "dead"]
print("dead partitions serviced:", {d: int(res.service_counts[d]) for d in dead})
