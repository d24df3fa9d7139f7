"""Feasibility repair: divert nets off over-capacity edges onto detours.

For an edge ``e`` with usage ``W + d``, a detour between its endpoints that
avoids every over-capacity edge can absorb ``Threshold = min(W - usage)``
more nets along its length. ``q = min(Threshold, d)`` nets have ``e`` swapped
for the detour, and the search restarts until ``e`` is within capacity or no
detour is left.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

import numpy as np

from .solution import Solution
from .steiner import CostView, RouteTree, canonicalize_tree

logger = logging.getLogger(__name__)

ELIMINATED = "eliminated"
REDUCED = "reduced"
NO_PATH = "no_path"


@dataclass(frozen=True)
class RepairConfig:
    beta: int = 3
    sort_nets: bool = True
    max_passes: int = 10_000

    def __post_init__(self):
        if self.beta < 1:
            raise ValueError("beta must be >= 1")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")

    @classmethod
    def variant(cls, name: str, beta: int = 3) -> "RepairConfig":
        """``base`` (one path, id order), ``A`` (best of beta paths), ``B`` (A plus net sorting)."""
        name = name.upper() if name.lower() != "base" else "base"
        if name == "base":
            return cls(beta=1, sort_nets=False)
        if name == "A":
            return cls(beta=beta, sort_nets=False)
        if name == "B":
            return cls(beta=beta, sort_nets=True)
        raise ValueError(f"unknown repair variant {name!r}")


@dataclass(frozen=True)
class ViolationRecord:
    edge: int
    d: int
    nets_using: tuple[int, ...]


@dataclass(frozen=True)
class AlternatePath:
    edges: tuple[int, ...]
    threshold: int
    cost: float


@dataclass(frozen=True)
class RepairPass:
    d: int
    threshold: int
    q: int
    path: tuple[int, ...]
    nets: tuple[int, ...]


@dataclass
class EdgeRepair:
    edge: int
    d_before: int
    outcome: str = NO_PATH
    passes: list[RepairPass] = field(default_factory=list)

    @property
    def q_total(self) -> int:
        return sum(p.q for p in self.passes)

    def as_dict(self, graph=None) -> dict:
        out = {
            "edge": self.edge,
            "d_before": self.d_before,
            "passes": len(self.passes),
            "q_total": self.q_total,
            "outcome": self.outcome,
            "steps": [{"d": p.d, "threshold": p.threshold, "q": p.q, "path": list(p.path),
                       "nets": list(p.nets)} for p in self.passes],
        }
        if graph is not None:
            out["label"] = graph.edge_label(self.edge)
            for step, p in zip(out["steps"], self.passes):
                step["path_labels"] = [graph.edge_label(e) for e in p.path]
        return out


def violation_record(solution: Solution, edge: int) -> ViolationRecord:
    d = int(solution.usage[edge]) - solution.width
    if d <= 0:
        raise ValueError(f"edge {edge} is within capacity")
    ids = tuple(solution.nets[i].id for i in solution.nets_using(edge))
    return ViolationRecord(edge, d, ids)


def _dijkstra_path(adjacency, cost, usable, source, target, banned_vertices=frozenset(),
                   banned_edges=frozenset()):
    """Cheapest path over usable edges; ties resolved toward lower edge ids."""
    settled: dict[int, float] = {}
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in settled:
            continue
        settled[v] = d
        if v == target:
            break
        for u, e in adjacency[v]:
            if u in settled or u in banned_vertices or e in banned_edges or not usable[e]:
                continue
            nd = d + cost[e]
            if nd < dist.get(u, float("inf")):
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    if target not in settled:
        return None
    # Walk back over settled vertices, taking the lowest-id tight edge.
    path = []
    t = target
    while t != source:
        dt = settled[t]
        tol = 1e-9 * max(1.0, dt)
        for u, e in adjacency[t]:
            if (u in settled and usable[e] and e not in banned_edges and u not in banned_vertices
                    and settled[u] < dt and abs(settled[u] + cost[e] - dt) <= tol):
                path.append(e)
                t = u
                break
        else:
            raise RuntimeError("inconsistent shortest-path tree")
    path.reverse()
    return path


def _path_vertices(graph, source, edges):
    verts = [source]
    for e in edges:
        a, b = graph.endpoints(e)
        verts.append(b if a == verts[-1] else a)
    return verts


def k_shortest_paths(graph, cost, usable, source, target, k):
    """Yen's k cheapest simple paths, as lists of edge ids from ``source``."""
    adjacency = graph.adjacency

    def path_cost(p):
        return sum(cost[e] for e in p)

    first = _dijkstra_path(adjacency, cost, usable, source, target)
    if first is None:
        return []
    accepted = [first]
    seen = {tuple(first)}
    candidates: list[tuple[float, tuple[int, ...]]] = []
    while len(accepted) < k:
        prev = accepted[-1]
        prev_verts = _path_vertices(graph, source, prev)
        for i in range(len(prev)):
            spur = prev_verts[i]
            root = prev[:i]
            banned_edges = {p[i] for p in accepted if len(p) > i and p[:i] == root}
            banned_vertices = frozenset(prev_verts[:i])
            tail = _dijkstra_path(adjacency, cost, usable, spur, target, banned_vertices, banned_edges)
            if tail is None:
                continue
            cand = tuple(root + tail)
            if cand not in seen:
                seen.add(cand)
                heapq.heappush(candidates, (path_cost(cand), cand))
        if not candidates:
            break
        _, best = heapq.heappop(candidates)
        accepted.append(list(best))
    return accepted


def compute_threshold(solution: Solution, path) -> int:
    edges = path.edges if isinstance(path, AlternatePath) else path
    return int(min(solution.width - solution.usage[e] for e in edges))


def find_alternate_paths(solution: Solution, edge: int, beta: int,
                         exclude_saturated: bool = False) -> list[AlternatePath]:
    """Up to ``beta`` cheapest detours around ``edge`` avoiding over-capacity edges.

    With ``exclude_saturated`` edges already at capacity are skipped too, so
    every returned detour has a positive threshold.
    """
    graph = solution.graph
    limit = solution.width - 1 if exclude_saturated else solution.width
    usable = (solution.usage <= limit).tolist()
    usable[edge] = False
    cost = solution.costs().cost.tolist()
    a, b = graph.endpoints(edge)
    paths = k_shortest_paths(graph, cost, usable, a, b, beta)
    return [AlternatePath(tuple(p), compute_threshold(solution, p), float(sum(cost[e] for e in p)))
            for p in paths]


def _replace_edge(solution: Solution, costs: CostView, pos: int, edge: int, path) -> None:
    tree = solution.trees[pos]
    net = solution.nets[pos]
    merged = (tree.edges - {edge}) | set(path)
    new_edges = canonicalize_tree(costs, merged, net.terminals)
    for e in new_edges - tree.edges:
        solution.usage[e] += 1
    for e in tree.edges - new_edges:
        solution.usage[e] -= 1
    solution.trees[pos] = RouteTree(tree.net_id, new_edges, costs.tree_cost(new_edges))


def repair_edge(solution: Solution, edge: int, config: RepairConfig = RepairConfig()) -> EdgeRepair:
    """Drive one over-capacity edge back to ``W`` by diverting nets; mutates ``solution``."""
    record = EdgeRepair(edge, int(solution.usage[edge]) - solution.width)
    if record.d_before <= 0:
        record.outcome = ELIMINATED
        return record
    costs = solution.costs()
    while solution.usage[edge] > solution.width and len(record.passes) < config.max_passes:
        d = int(solution.usage[edge]) - solution.width
        paths = find_alternate_paths(solution, edge, config.beta, exclude_saturated=True)
        if not paths:
            break
        best = min(paths, key=lambda p: (-min(p.threshold, d), len(p.edges), p.edges))
        q = min(best.threshold, d)
        users = solution.nets_using(edge)
        if config.sort_nets:
            path_set = set(best.edges)
            users.sort(key=lambda i: (len(path_set - solution.trees[i].edges), solution.nets[i].id))
        chosen = users[:q]
        for pos in chosen:
            _replace_edge(solution, costs, pos, edge, best.edges)
        record.passes.append(RepairPass(d, best.threshold, q, best.edges,
                                        tuple(solution.nets[i].id for i in chosen)))
    if solution.usage[edge] <= solution.width:
        record.outcome = ELIMINATED
    elif record.passes:
        record.outcome = REDUCED
    else:
        record.outcome = NO_PATH
    logger.debug("edge %d: %s after %d passes", edge, record.outcome, len(record.passes))
    return record


def repair_all(solution: Solution, config: RepairConfig = RepairConfig()) -> list[EdgeRepair]:
    """Repair every over-capacity edge in ascending id order; mutates ``solution``."""
    report = []
    for edge in solution.violating_edges():
        if solution.usage[edge] > solution.width:
            report.append(repair_edge(solution, edge, config))
    return report


def total_excess(usage: np.ndarray, width: int) -> int:
    return int(np.maximum(0, np.asarray(usage) - width).sum())
