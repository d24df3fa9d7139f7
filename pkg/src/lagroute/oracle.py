"""Exhaustive reference router for tiny instances (test harness only).

Every net's candidate trees are enumerated exactly: all trees whose leaves
are terminals, built by attaching each terminal in turn to the tree grown so
far through a simple path that meets it in a single vertex. Combinations of
trees are then searched with bitmask capacity bookkeeping and bounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridGraph, Instance


class OracleSizeError(ValueError):
    """Instance is beyond what the exhaustive search is allowed to attempt."""


@dataclass(frozen=True)
class OracleBounds:
    max_rows: int = 4
    max_cols: int = 4
    max_nets: int = 3
    max_terminals: int = 3
    max_trees: int = 100_000
    max_nodes: int = 2_000_000


@dataclass(frozen=True)
class ExhaustiveResult:
    optimal_wire_length: int | None  # None when no routing fits the capacity
    optimal_channel_width: int
    witness: tuple[frozenset[int], ...] | None
    width_witness: tuple[frozenset[int], ...]
    capacity: int
    tree_counts: tuple[int, ...]


def _mask_edges(mask: int) -> frozenset[int]:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return frozenset(out)


def enumerate_trees(graph: GridGraph, terminals, limit: int = 100_000) -> list[int]:
    """All trees (as edge bitmasks) spanning ``terminals`` whose leaves are terminals."""
    terms = list(terminals)
    adjacency = graph.adjacency
    results: list[int] = []

    def grow(j: int, mask: int, verts: frozenset[int]) -> None:
        if j == len(terms):
            results.append(mask)
            if len(results) > limit:
                raise OracleSizeError(f"more than {limit} candidate trees for one net")
            return
        start = terms[j]
        if start in verts:
            grow(j + 1, mask, verts)
            return
        # Simple paths from `start` that touch the current tree only at their end.
        on_path = {start}

        def walk(v: int, pmask: int) -> None:
            for u, e in adjacency[v]:
                if u in verts:
                    grow(j + 1, mask | pmask | (1 << e), verts | on_path | {u})
                elif u not in on_path:
                    on_path.add(u)
                    walk(u, pmask | (1 << e))
                    on_path.remove(u)

        walk(start, 0)

    grow(1, 0, frozenset([terms[0]]))
    return results


def _check_guard(instance: Instance, bounds: OracleBounds) -> None:
    g = instance.graph
    if g.rows > bounds.max_rows or g.cols > bounds.max_cols:
        raise OracleSizeError(f"grid {g.rows}x{g.cols} exceeds {bounds.max_rows}x{bounds.max_cols}")
    if len(instance.nets) > bounds.max_nets:
        raise OracleSizeError(f"{len(instance.nets)} nets exceed the limit of {bounds.max_nets}")
    for net in instance.nets:
        if len(net.terminals) > bounds.max_terminals:
            raise OracleSizeError(f"net {net.id} has more than {bounds.max_terminals} terminals")


class _Search:
    def __init__(self, trees: list[np.ndarray], max_nodes: int):
        self.trees = trees
        self.sizes = [np.array([bin(int(m)).count("1") for m in t], dtype=np.int64) for t in trees]
        self.nodes = 0
        self.max_nodes = max_nodes

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise OracleSizeError(f"search exceeded {self.max_nodes} nodes")

    @staticmethod
    def _add(levels: tuple[int, ...], m: int) -> tuple[int, ...]:
        out = list(levels)
        for lvl in range(len(out) - 1, 0, -1):
            out[lvl] |= out[lvl - 1] & m
        out[0] |= m
        return tuple(out)

    def feasible(self, width: int):
        """A combination with every edge used by at most ``width`` nets, or None."""
        n = len(self.trees)
        levels0 = (0,) * n

        def dfs(i, levels, chosen):
            saturated = levels[width - 1] if width <= n else 0
            cand = self.trees[i]
            ok = np.flatnonzero((cand & np.uint64(saturated)) == 0)
            if i == n - 1:
                self._tick()
                return chosen + [int(cand[ok[0]])] if len(ok) else None
            for idx in ok:
                self._tick()
                m = int(cand[idx])
                found = dfs(i + 1, self._add(levels, m), chosen + [m])
                if found is not None:
                    return found
            return None

        return dfs(0, levels0, [])

    def min_wire_length(self, width: int):
        n = len(self.trees)
        order = [np.argsort(s, kind="stable") for s in self.sizes]
        trees = [t[o] for t, o in zip(self.trees, order)]
        sizes = [s[o] for s, o in zip(self.sizes, order)]
        rest = [int(sum(s[0] for s in sizes[i + 1:])) for i in range(n)]
        best = [None, None]

        def dfs(i, levels, cur, chosen):
            saturated = levels[width - 1] if width <= n else 0
            ok = (trees[i] & np.uint64(saturated)) == 0
            if i == n - 1:
                self._tick()
                idx = np.flatnonzero(ok)
                if len(idx):
                    total = cur + int(sizes[i][idx[0]])
                    if best[0] is None or total < best[0]:
                        best[0], best[1] = total, chosen + [int(trees[i][idx[0]])]
                return
            for idx in np.flatnonzero(ok):
                size = int(sizes[i][idx])
                if best[0] is not None and cur + size + rest[i] >= best[0]:
                    break
                self._tick()
                m = int(trees[i][idx])
                dfs(i + 1, self._add(levels, m), cur + size, chosen + [m])

        dfs(0, (0,) * n, 0, [])
        return best[0], best[1]


def enumerate_routings(instance: Instance, bounds: OracleBounds = OracleBounds(),
                       width: int | None = None) -> ExhaustiveResult:
    """Exact optimum wire length under capacity ``width`` and exact minimum width.

    ``width`` defaults to the instance's width, or to the net count (no
    effective capacity) when the instance has none.
    """
    _check_guard(instance, bounds)
    graph = instance.graph
    if graph.n_edges > 64:
        raise OracleSizeError("more than 64 edges")
    n = len(instance.nets)
    capacity = width if width is not None else (instance.width or n)
    trees = [np.array(sorted(enumerate_trees(graph, net.terminals, bounds.max_trees)), dtype=np.uint64)
             for net in instance.nets]
    search = _Search(trees, bounds.max_nodes)

    width_witness = None
    for w in range(1, n + 1):
        width_witness = search.feasible(w)
        if width_witness is not None:
            min_width = w
            break
    wl, witness = search.min_wire_length(min(capacity, n))
    as_sets = (lambda ms: tuple(_mask_edges(m) for m in ms))
    return ExhaustiveResult(
        optimal_wire_length=wl,
        optimal_channel_width=min_width,
        witness=as_sets(witness) if witness is not None else None,
        width_witness=as_sets(width_witness),
        capacity=capacity,
        tree_counts=tuple(len(t) for t in trees),
    )
