"""
Performance utilities for the conditioning laboratory.
Provides stage timing and per-stage performance monitoring.
"""

import logging
import threading
import time
from typing import Any, Dict, List
from contextlib import contextmanager

logger = logging.getLogger(__name__)


@contextmanager
def performance_timer(operation_name: str):
    """Context manager for timing operations"""
    start_time = time.perf_counter()
    logger.info(f"Starting: {operation_name}")
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start_time
        _performance_monitor.log_operation(operation_name, elapsed)
        logger.info(f"Completed: {operation_name} in {elapsed:.2f} seconds")


# Performance monitoring
class PerformanceMonitor:
    """Monitor experiment stage performance"""

    def __init__(self):
        self.start_time = time.perf_counter()
        self.operation_times: Dict[str, List[float]] = {}
        self._lock = threading.Lock()

    def log_operation(self, operation: str, duration: float):
        """Log operation duration"""
        with self._lock:
            times = self.operation_times.setdefault(operation, [])
            times.append(duration)

            if len(times) > 100:
                # Keep only last 100 measurements
                self.operation_times[operation] = times[-100:]

    def get_average_time(self, operation: str) -> float:
        """Get average time for an operation"""
        times = self.operation_times.get(operation, [])
        return sum(times) / len(times) if times else 0.0

    def get_performance_stats(self) -> Dict[str, Any]:
        """Get performance statistics"""
        with self._lock:
            operations = list(self.operation_times.keys())
            total = sum(len(times) for times in self.operation_times.values())
        return {
            'uptime': time.perf_counter() - self.start_time,
            'operation_averages': {op: self.get_average_time(op) for op in operations},
            'total_operations': total
        }

    def reset(self):
        with self._lock:
            self.operation_times.clear()
            self.start_time = time.perf_counter()


# Global performance monitor
_performance_monitor = PerformanceMonitor()


def get_performance_monitor() -> PerformanceMonitor:
    """Get global performance monitor"""
    return _performance_monitor
