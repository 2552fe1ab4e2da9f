"""
Performance Tracking Module.

Named timers and process memory snapshots for the ``--profile`` report.
The report goes to stderr so that documents written to stdout stay
byte-identical between profiled and plain runs.
"""

import gc
import os
import sys
import time
from contextlib import contextmanager
from typing import Dict, Iterator, Optional, TextIO

import psutil


def get_memory_usage() -> float:
    """Get current memory usage of the process.

    Returns:
        Resident set size in megabytes (MB)
    """
    process = psutil.Process(os.getpid())
    return process.memory_info().rss / (1024 * 1024)


class PerformanceTracker:
    """Collects execution times and memory usage for one command run."""

    def __init__(self, stream: Optional[TextIO] = None):
        self.stream = stream
        self.timers: Dict[str, float] = {}
        self.start_times: Dict[str, float] = {}
        self.memory_snapshots: Dict[str, float] = {}

    def start_timer(self, name: str) -> None:
        self.start_times[name] = time.perf_counter()

    def stop_timer(self, name: str) -> float:
        """Stop a named timer and record the duration.

        Args:
            name: Timer name

        Returns:
            Duration in seconds, 0 for a timer that was never started
        """
        if name not in self.start_times:
            print(f"Warning: Timer '{name}' was never started", file=self._out())
            return 0.0

        duration = time.perf_counter() - self.start_times.pop(name)
        self.timers[name] = duration
        return duration

    @contextmanager
    def timed(self, name: str) -> Iterator[None]:
        """Time the enclosed block and snapshot memory after it."""
        self.start_timer(name)
        try:
            yield
        finally:
            self.stop_timer(name)
            self.take_memory_snapshot(f"after {name}")

    def take_memory_snapshot(self, name: str) -> float:
        gc.collect()
        memory_usage = get_memory_usage()
        self.memory_snapshots[name] = memory_usage
        return memory_usage

    def get_timer(self, name: str) -> Optional[float]:
        return self.timers.get(name)

    def get_memory_snapshot(self, name: str) -> Optional[float]:
        return self.memory_snapshots.get(name)

    def _out(self) -> TextIO:
        return self.stream if self.stream is not None else sys.stderr

    def print_report(self) -> None:
        """Print all timers and memory snapshots, snapshots in the order taken."""
        out = self._out()
        print("\nPerformance Report:", file=out)
        print("-" * 50, file=out)

        if self.timers:
            print("Execution Times:", file=out)
            for name, duration in sorted(self.timers.items()):
                print(f"  {name}: {duration:.4f} seconds", file=out)

        if self.memory_snapshots:
            print("\nMemory Usage:", file=out)
            snapshots = list(self.memory_snapshots.items())
            for i, (name, usage) in enumerate(snapshots):
                print(f"  {name}: {usage:.2f} MB", file=out)
                if i > 0:
                    prev_name, prev_usage = snapshots[i - 1]
                    change = usage - prev_usage
                    print(f"    Change from {prev_name}: {'+' if change >= 0 else ''}{change:.2f} MB", file=out)

        print("-" * 50, file=out)
