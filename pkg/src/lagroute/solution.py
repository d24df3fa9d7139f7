from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridGraph, Net
from .lagrange import edge_usage
from .steiner import CostView, RouteTree, tree_problems


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    width: int
    total_violation: int
    max_usage: int
    total_wire_length: int
    step: float


@dataclass
class Solution:
    """Route trees for every net plus the usage counts they induce.

    ``trees[i]`` belongs to ``nets[i]``. ``usage`` is maintained incrementally
    by the repair code; :meth:`recount` rebuilds it from scratch.
    """

    graph: GridGraph
    nets: tuple[Net, ...]
    trees: list[RouteTree]
    usage: np.ndarray
    width: int
    lam: np.ndarray
    best_feasible_width: int | None = None
    initial_width: int | None = None
    history: list[IterationRecord] = field(default_factory=list)
    repair_report: list = field(default_factory=list)

    @classmethod
    def from_edge_sets(cls, graph: GridGraph, nets, edge_sets, width: int,
                       lam: np.ndarray | None = None) -> "Solution":
        nets = tuple(nets)
        lam = np.zeros(graph.n_edges) if lam is None else np.asarray(lam, dtype=np.float64)
        view = CostView(graph, lam)
        trees = [RouteTree(net.id, frozenset(int(e) for e in es), view.tree_cost(es))
                 for net, es in zip(nets, edge_sets)]
        if len(trees) != len(nets):
            raise ValueError("need exactly one edge set per net")
        return cls(graph, nets, trees, edge_usage(graph.n_edges, trees), int(width), lam,
                   initial_width=int(width))

    def costs(self) -> CostView:
        return CostView(self.graph, self.lam)

    def recount(self) -> np.ndarray:
        return edge_usage(self.graph.n_edges, self.trees)

    def excess(self) -> np.ndarray:
        return np.maximum(0, self.usage - self.width)

    def total_violation(self) -> int:
        return int(self.excess().sum())

    def violating_edges(self) -> list[int]:
        return [int(e) for e in np.flatnonzero(self.usage > self.width)]

    def max_usage(self) -> int:
        return int(self.usage.max()) if len(self.usage) else 0

    def wire_length(self) -> int:
        return sum(len(t.edges) for t in self.trees)

    def nets_using(self, edge: int) -> list[int]:
        """Positions of the nets whose tree contains ``edge``, in ascending net-id order."""
        idx = [i for i, t in enumerate(self.trees) if edge in t.edges]
        return sorted(idx, key=lambda i: self.nets[i].id)

    def problems(self) -> list[str]:
        out = []
        for net, tree in zip(self.nets, self.trees):
            out.extend(f"net {net.id}: {p}" for p in tree_problems(self.graph, tree.edges, net.terminals))
        if not np.array_equal(self.usage, self.recount()):
            out.append("usage counts disagree with route trees")
        return out
