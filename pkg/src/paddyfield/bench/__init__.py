"""Benchmark harness and command-line interface."""

from .harness import (
    BENCHMARKS,
    BenchmarkSpec,
    CurveRow,
    RunRow,
    RunSummary,
    random_baseline,
    random_search,
    read_outputs,
    run_benchmark,
    summarize,
    write_outputs,
)
