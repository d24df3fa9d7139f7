from __future__ import annotations

import time
from dataclasses import dataclass, replace

from .engine import EngineConfig, run_engine
from .grid import Instance
from .reports import solution_fingerprint

# Reference speedups printed next to the measured ones; context only, not targets.
REFERENCE_SPEEDUPS = {2: 1.63, 4: 2.74, 8: 3.32}


class DeterminismError(RuntimeError):
    """Runs at different thread counts produced different solutions."""


@dataclass(frozen=True)
class BenchRow:
    threads: int
    seconds: float
    speedup: float
    reference: float | None


def run_bench(instance: Instance, config: EngineConfig, thread_counts=(1, 2, 4, 8),
              runner=run_engine) -> list[BenchRow]:
    """Time ``runner`` at each thread count; raise if any output differs from the first."""
    timings = []
    baseline = None
    for threads in thread_counts:
        start = time.perf_counter()
        solution = runner(instance, replace(config, threads=threads))
        elapsed = time.perf_counter() - start
        fp = solution_fingerprint(solution)
        if baseline is None:
            baseline = (threads, fp)
        elif fp != baseline[1]:
            raise DeterminismError(f"output at {threads} threads differs from {baseline[0]} threads")
        timings.append((threads, elapsed))
    base_time = dict(timings).get(1, timings[0][1])
    return [BenchRow(t, s, base_time / s if s > 0 else float("inf"), REFERENCE_SPEEDUPS.get(t))
            for t, s in timings]


def format_bench(rows: list[BenchRow]) -> str:
    lines = [f"{'threads':>7}  {'seconds':>9}  {'speedup':>7}  {'reference':>9}"]
    for r in rows:
        ref = f"{r.reference:.2f}" if r.reference is not None else "-"
        lines.append(f"{r.threads:>7}  {r.seconds:>9.3f}  {r.speedup:>7.2f}  {ref:>9}")
    return "\n".join(lines) + "\n"
