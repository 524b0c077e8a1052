"""
Performance monitoring for perisobolev runs.

Tracks wall time, peak resident memory and evaluation counters per command.
Summaries go to the log only, so result files stay byte-identical.
"""

import time
import os
import logging
from typing import Dict, Any, Optional
from dataclasses import dataclass
from contextlib import contextmanager

import psutil

logger = logging.getLogger(__name__)


@dataclass
class PerformanceMetrics:
    """
    Performance metrics for one command run.
    """
    command: str
    start_time: float
    end_time: Optional[float] = None
    evaluations: int = 0
    iterations: int = 0
    memory_peak_mb: float = 0.0

    @property
    def duration_seconds(self) -> float:
        """Calculate duration in seconds."""
        if self.end_time is None:
            return time.time() - self.start_time
        return self.end_time - self.start_time

    @property
    def evaluations_per_second(self) -> float:
        duration = self.duration_seconds
        if duration == 0:
            return 0.0
        return self.evaluations / duration

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            'command': self.command,
            'duration_seconds': round(self.duration_seconds, 2),
            'evaluations': self.evaluations,
            'iterations': self.iterations,
            'memory_peak_mb': round(self.memory_peak_mb, 2),
            'evaluations_per_second': round(self.evaluations_per_second, 2)
        }


class PerformanceMonitor:
    """
    Monitor resource usage while commands run.
    """

    def __init__(self):
        self.metrics: Dict[str, PerformanceMetrics] = {}
        self.process = psutil.Process(os.getpid())

    def start_monitoring(self, command: str) -> PerformanceMetrics:
        """
        Start monitoring a command.

        Args:
            command: Command name

        Returns:
            PerformanceMetrics object
        """
        metrics = PerformanceMetrics(command=command, start_time=time.time())
        self.metrics[command] = metrics
        self.sample_memory(command)
        return metrics

    def sample_memory(self, command: str):
        if command not in self.metrics:
            return
        memory_mb = self.process.memory_info().rss / 1024 / 1024
        metrics = self.metrics[command]
        if memory_mb > metrics.memory_peak_mb:
            metrics.memory_peak_mb = memory_mb

    def update_metrics(self, command: str, evaluations: int = 0, iterations: int = 0):
        """
        Add to the counters of a running command.

        Args:
            command: Command name
            evaluations: Number of modular evaluations to add
            iterations: Number of solver iterations to add
        """
        if command not in self.metrics:
            return
        metrics = self.metrics[command]
        metrics.evaluations += evaluations
        metrics.iterations += iterations
        self.sample_memory(command)

    def end_monitoring(self, command: str):
        if command in self.metrics:
            self.sample_memory(command)
            self.metrics[command].end_time = time.time()

    def get_metrics(self, command: str) -> Optional[PerformanceMetrics]:
        return self.metrics.get(command)

    def log_summary(self, command: Optional[str] = None):
        """
        Log a performance summary.

        Args:
            command: Optional command filter
        """
        if command and command in self.metrics:
            metrics = [self.metrics[command]]
        else:
            metrics = list(self.metrics.values())
        for m in metrics:
            logger.info(
                f"{m.command}: {m.duration_seconds:.2f}s, "
                f"{m.iterations} iterations, peak memory {m.memory_peak_mb:.1f} MB"
            )


@contextmanager
def profile_run(command: str, monitor: Optional[PerformanceMonitor] = None):
    """
    Context manager for profiling a command.

    Usage:
        with profile_run("solve") as metrics:
            metrics.iterations += result.iterations

    Args:
        command: Command being run
        monitor: Optional PerformanceMonitor instance

    Yields:
        PerformanceMetrics object
    """
    if monitor is None:
        monitor = PerformanceMonitor()

    metrics = monitor.start_monitoring(command)

    try:
        yield metrics
    finally:
        monitor.end_monitoring(command)
        monitor.log_summary(command)
