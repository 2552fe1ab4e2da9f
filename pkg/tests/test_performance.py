import io

from qhd_system.utils.performance import PerformanceTracker, get_memory_usage


def test_memory_usage_is_positive():
    assert get_memory_usage() > 0


def test_timed_block_records_timer_and_snapshot():
    tracker = PerformanceTracker(io.StringIO())
    with tracker.timed("Sweep"):
        sum(range(1000))
    assert tracker.get_timer("Sweep") >= 0
    assert tracker.get_memory_snapshot("after Sweep") > 0


def test_stop_without_start_warns():
    stream = io.StringIO()
    tracker = PerformanceTracker(stream)
    assert tracker.stop_timer("missing") == 0.0
    assert "never started" in stream.getvalue()


def test_report_lists_snapshots_in_order():
    stream = io.StringIO()
    tracker = PerformanceTracker(stream)
    tracker.take_memory_snapshot("first")
    tracker.take_memory_snapshot("second")
    tracker.start_timer("Verification")
    tracker.stop_timer("Verification")
    tracker.print_report()
    report = stream.getvalue()
    assert "Verification:" in report
    assert report.index("first:") < report.index("second:")
    assert "Change from first" in report
