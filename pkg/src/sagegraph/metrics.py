"""Run counters and comparison reports, with JSON/CSV export.

Hardware cache-miss rates are not measured.  Partition loads (one per
serviced partition) and vertex updates stand in for memory traffic.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np


@dataclass
class RunMetrics:
    total_vertex_updates: int = 0
    partition_loads: int = 0
    iterations: int = 0
    repartition_events: int = 0
    wall_time: float = 0.0
    converged: bool = False
    per_iteration_psd_sum: list[float] = field(default_factory=list)
    schedule: list[list[int]] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "converged" if self.converged else "unconverged"

    def record(self, selected, sizes) -> None:
        self.schedule.append([int(p) for p in selected])
        self.partition_loads += len(selected)
        self.total_vertex_updates += int(sum(int(sizes[p]) for p in selected))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["status"] = self.status
        return out


def metrics_document(config: dict, metrics: RunMetrics, **extra) -> dict:
    """``{config, metrics, per_iteration_psd_sum}`` plus any extra sections."""
    m = metrics.to_dict()
    series = m.pop("per_iteration_psd_sum")
    doc = {"config": config, "metrics": m, "per_iteration_psd_sum": series}
    doc.update(extra)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def strip_wall_time(doc: dict) -> dict:
    """Copy of a metrics document without wall-clock fields, for determinism checks."""
    def scrub(x):
        if isinstance(x, dict):
            return {k: scrub(v) for k, v in x.items() if k != "wall_time"}
        if isinstance(x, list):
            return [scrub(v) for v in x]
        return x
    return scrub(doc)


def max_discrepancy(a, b) -> float:
    """Largest elementwise |a - b|; matching infinities count as equal."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return float("inf")
    with np.errstate(invalid="ignore"):
        diff = np.where(a == b, 0.0, np.abs(a - b))
    return float(diff.max()) if diff.size else 0.0


@dataclass
class ComparisonReport:
    mode_a: dict
    mode_b: dict
    update_ratio: float
    load_ratio: float
    value_agreement: float
    tolerance: float
    metrics_a: RunMetrics
    metrics_b: RunMetrics

    @property
    def valid(self) -> bool:
        """Performance ratios only count when both runs reached the same answer."""
        return self.value_agreement <= self.tolerance

    @property
    def flags(self) -> list[str]:
        out = []
        if not self.valid:
            out.append("INVALID")
        if not self.metrics_a.converged:
            out.append("A_UNCONVERGED")
        if not self.metrics_b.converged:
            out.append("B_UNCONVERGED")
        return out

    CSV_FIELDS = ("graph", "algorithm", "workers", "updates_a", "updates_b", "update_ratio",
                  "loads_a", "loads_b", "load_ratio", "iterations_a", "iterations_b",
                  "value_agreement", "tolerance", "valid", "flags")

    def csv_row(self) -> dict:
        return {
            "graph": self.mode_a.get("graph", ""),
            "algorithm": self.mode_a.get("algorithm", ""),
            "workers": self.mode_a.get("workers", ""),
            "updates_a": self.metrics_a.total_vertex_updates,
            "updates_b": self.metrics_b.total_vertex_updates,
            "update_ratio": f"{self.update_ratio:.6f}",
            "loads_a": self.metrics_a.partition_loads,
            "loads_b": self.metrics_b.partition_loads,
            "load_ratio": f"{self.load_ratio:.6f}",
            "iterations_a": self.metrics_a.iterations,
            "iterations_b": self.metrics_b.iterations,
            "value_agreement": f"{self.value_agreement:.3e}",
            "tolerance": self.tolerance,
            "valid": int(self.valid),
            "flags": "|".join(self.flags),
        }

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        if header:
            w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "mode_a": self.mode_a, "mode_b": self.mode_b,
            "update_ratio": self.update_ratio, "load_ratio": self.load_ratio,
            "value_agreement": self.value_agreement, "tolerance": self.tolerance,
            "valid": self.valid, "flags": self.flags,
            "metrics_a": self.metrics_a.to_dict(), "metrics_b": self.metrics_b.to_dict(),
        }
