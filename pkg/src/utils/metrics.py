"""
Timing and outcome tracking for CLI commands and HTTP endpoints.
"""

import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Dict, List, Literal, Optional

from src.utils.logger import get_logger

logger = get_logger(__name__)

Surface = Literal["cli", "http"]


@dataclass
class RunMetrics:
    """One command or request."""
    name: str
    surface: Surface = "http"
    timestamp: datetime = field(default_factory=datetime.utcnow)
    processing_time_ms: float = 0.0
    status_code: int = 200
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status_code < 400


@dataclass
class AggregatedMetrics:
    """Running totals since start or the last reset."""
    start_time: datetime = field(default_factory=datetime.utcnow)
    total_runs: int = 0
    successful_runs: int = 0
    failed_runs: int = 0
    total_processing_time_ms: float = 0.0
    min_processing_time_ms: float = float('inf')
    max_processing_time_ms: float = 0.0
    runs_by_name: Dict[str, int] = field(default_factory=dict)
    runs_by_surface: Dict[str, int] = field(default_factory=dict)
    errors_by_type: Dict[str, int] = field(default_factory=dict)

    @property
    def avg_processing_time_ms(self) -> float:
        return self.total_processing_time_ms / self.total_runs if self.total_runs else 0.0

    def add(self, metrics: RunMetrics) -> None:
        self.total_runs += 1
        if metrics.ok:
            self.successful_runs += 1
        else:
            self.failed_runs += 1
        self.total_processing_time_ms += metrics.processing_time_ms
        self.min_processing_time_ms = min(self.min_processing_time_ms, metrics.processing_time_ms)
        self.max_processing_time_ms = max(self.max_processing_time_ms, metrics.processing_time_ms)
        self.runs_by_name[metrics.name] = self.runs_by_name.get(metrics.name, 0) + 1
        self.runs_by_surface[metrics.surface] = self.runs_by_surface.get(metrics.surface, 0) + 1
        if metrics.error:
            self.errors_by_type[metrics.error] = self.errors_by_type.get(metrics.error, 0) + 1


class MetricsCollector:
    """Keeps recent runs for per-name stats and totals for the summary."""

    def __init__(self, retention_hours: int = 24):
        self.retention_hours = retention_hours
        self.runs: List[RunMetrics] = []
        self.aggregated = AggregatedMetrics()
        self._start_time = time.time()

    def record(self, metrics: RunMetrics) -> None:
        self.runs.append(metrics)
        self.aggregated.add(metrics)
        logger.debug(
            f"{metrics.surface} {metrics.name}: {metrics.status_code} in {metrics.processing_time_ms:.2f} ms"
        )
        self._cleanup_old_metrics()

    def _cleanup_old_metrics(self) -> None:
        cutoff_time = datetime.utcnow() - timedelta(hours=self.retention_hours)
        self.runs = [m for m in self.runs if m.timestamp > cutoff_time]

    def get_summary(self) -> Dict[str, Any]:
        agg = self.aggregated
        return {
            "uptime_seconds": time.time() - self._start_time,
            "total_runs": agg.total_runs,
            "successful_runs": agg.successful_runs,
            "failed_runs": agg.failed_runs,
            "success_rate": (
                f"{(agg.successful_runs / agg.total_runs * 100):.2f}%" if agg.total_runs > 0 else "0%"
            ),
            "avg_processing_time_ms": f"{agg.avg_processing_time_ms:.2f}",
            "min_processing_time_ms": (
                f"{agg.min_processing_time_ms:.2f}" if agg.total_runs > 0 else "N/A"
            ),
            "max_processing_time_ms": f"{agg.max_processing_time_ms:.2f}",
            "runs_by_name": agg.runs_by_name,
            "runs_by_surface": agg.runs_by_surface,
            "errors_by_type": agg.errors_by_type,
            "retention_hours": self.retention_hours,
        }

    def get_stats(self, name: str) -> Dict[str, Any]:
        """Stats of one command or endpoint over the retention window."""
        runs = [r for r in self.runs if r.name == name]
        if not runs:
            return {"name": name, "total_runs": 0}

        times = sorted(r.processing_time_ms for r in runs)
        return {
            "name": name,
            "total_runs": len(runs),
            "successful": sum(1 for r in runs if r.ok),
            "failed": sum(1 for r in runs if not r.ok),
            "median_processing_time_ms": f"{times[len(times) // 2]:.2f}",
            "last_error": next((r.error for r in reversed(runs) if r.error), None),
        }

    def reset(self) -> None:
        self.runs.clear()
        self.aggregated = AggregatedMetrics()
        logger.info("Metrics reset")


_metrics_collector = MetricsCollector()


def get_metrics_collector() -> MetricsCollector:
    return _metrics_collector


class RequestTimer:
    """Context manager measuring wall time in milliseconds."""

    def __init__(self):
        self.start_time: Optional[float] = None
        self.elapsed_ms: float = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.start_time:
            self.elapsed_ms = (time.perf_counter() - self.start_time) * 1000
