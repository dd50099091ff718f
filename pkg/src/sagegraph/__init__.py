"""Structure-aware iterative graph processing.

Vertices are grouped into hot, cold and dead partitions by a degree-derived
activity score; an adaptive scheduler then services the partitions whose
values are still moving the most, repartitioning as they converge.
"""
from .algorithms import AlgorithmSpec, make_kernel
from .bench import compare, run_baseline
from .errors import ConfigError, GraphFormatError, GraphValidationError
from .graph import (DegreeTable, Graph, compute_degrees, from_edges, load_edge_list,
                    load_graph, read_binary, validate, write_binary)
from .metrics import ComparisonReport, RunMetrics
from .partition import (ActivityThreshold, Kind, Partition, PartitionSet, active_degree,
                        active_degrees, initial_partition, repartition_barrier,
                        repartition_general, sample_threshold)
from .scheduler import RunResult, SchedulerConfig, plan_iteration, repartition_due, run
from .state import (PartitionStateTable, StateDegreeTable, ValueTables, accumulate_psd,
                    check_convergence, reset_window, sd_contribution_cc,
                    sd_contribution_pagerank, sd_contribution_sssp)

__version__ = "0.1.0"

__all__ = [
    "ActivityThreshold", "AlgorithmSpec", "ComparisonReport", "ConfigError", "DegreeTable",
    "Graph", "GraphFormatError", "GraphValidationError", "Kind", "Partition", "PartitionSet",
    "PartitionStateTable", "RunMetrics", "RunResult", "SchedulerConfig", "StateDegreeTable",
    "ValueTables", "accumulate_psd", "active_degree", "active_degrees", "check_convergence",
    "compare", "compute_degrees", "from_edges", "initial_partition", "load_edge_list",
    "load_graph", "make_kernel", "plan_iteration", "read_binary", "repartition_barrier",
    "repartition_due", "repartition_general", "reset_window", "run", "run_baseline",
    "sample_threshold", "sd_contribution_cc", "sd_contribution_pagerank", "sd_contribution_sssp",
    "validate", "write_binary",
]
