"""
Tests for performance monitoring and the ordered worker map.
"""

import threading

from perisobolev.performance import PerformanceMonitor, profile_run
from perisobolev.workers import ordered_map


class TestPerformance:
    """Tests for PerformanceMonitor."""

    def test_profile_run_records_metrics(self):
        """Test counters, memory and end time."""
        monitor = PerformanceMonitor()
        with profile_run("bbm", monitor) as metrics:
            monitor.update_metrics("bbm", evaluations=4, iterations=2)

        assert metrics.end_time is not None
        assert metrics.evaluations == 4
        assert metrics.iterations == 2
        assert metrics.memory_peak_mb > 0
        assert set(metrics.to_dict()) >= {'command', 'duration_seconds', 'memory_peak_mb'}

    def test_unknown_command_is_ignored(self):
        """Test that updates for unmonitored commands do nothing."""
        monitor = PerformanceMonitor()
        monitor.update_metrics("eigen", evaluations=1)

        assert monitor.get_metrics("eigen") is None


class TestOrderedMap:
    """Tests for ordered_map."""

    def test_inline(self):
        """Test one thread."""
        assert ordered_map(lambda x: x * x, [3, 1, 2], threads=1) == [9, 1, 4]

    def test_threads_keep_order(self):
        """Test that results come back in input order on a pool."""
        names = set()

        def work(x):
            names.add(threading.current_thread().name)
            return -x

        assert ordered_map(work, range(20), threads=4) == [-x for x in range(20)]
        assert names

    def test_empty(self):
        """Test an empty work list."""
        assert ordered_map(lambda x: x, [], threads=4) == []
