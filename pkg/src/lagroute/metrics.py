from __future__ import annotations

import statistics
from dataclasses import asdict, dataclass

import numpy as np

from .solution import Solution


@dataclass(frozen=True)
class MetricsReport:
    """Quality figures of a routed solution.

    ``abs_violation`` is the mean excess over the violating edges; the raw
    ``total_excess`` and ``violating_edges`` count are kept alongside so other
    aggregations can be rebuilt.
    """

    abs_violation: float
    total_excess: int
    violating_edges: int
    min_channel_width: int
    width: int
    total_wire_length: int
    critical_path_delay: float
    runtime_seconds: float = 0.0
    threads: int = 1

    def as_dict(self) -> dict:
        return asdict(self)


def _tree_delays(graph, edges, source: int) -> dict[int, float]:
    adj: dict[int, list[tuple[int, float]]] = {}
    for e in edges:
        a, b = graph.endpoints(e)
        w = float(graph.base_cost[e])
        adj.setdefault(a, []).append((b, w))
        adj.setdefault(b, []).append((a, w))
    delay = {source: 0.0}
    stack = [source]
    while stack:
        v = stack.pop()
        for u, w in adj.get(v, ()):
            if u not in delay:
                delay[u] = delay[v] + w
                stack.append(u)
    return delay


def net_delay(graph, net, edges) -> float:
    """Largest base-cost delay from the source to any sink along the tree."""
    delay = _tree_delays(graph, edges, net.source)
    try:
        return max(delay[s] for s in net.sinks)
    except KeyError:
        raise ValueError(f"net {net.id}: a sink is not reachable from the source") from None


def critical_path_delay(solution: Solution, instance=None) -> float:
    return max((net_delay(solution.graph, net, tree.edges)
                for net, tree in zip(solution.nets, solution.trees)), default=0.0)


def compute_metrics(solution: Solution, instance=None, runtime_seconds: float = 0.0,
                    threads: int = 1) -> MetricsReport:
    excess = solution.excess()
    n_viol = int(np.count_nonzero(excess))
    total = int(excess.sum())
    return MetricsReport(
        abs_violation=total / n_viol if n_viol else 0.0,
        total_excess=total,
        violating_edges=n_viol,
        min_channel_width=solution.max_usage(),
        width=solution.width,
        total_wire_length=solution.wire_length(),
        critical_path_delay=critical_path_delay(solution),
        runtime_seconds=float(runtime_seconds),
        threads=int(threads),
    )


def geo_mean(values) -> float:
    values = [float(v) for v in values]
    if not values:
        raise ValueError("geo_mean of an empty sequence")
    if any(v <= 0 for v in values):
        raise ValueError("geo_mean needs strictly positive values")
    return statistics.geometric_mean(values)
