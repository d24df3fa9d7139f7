"""Per-net Steiner routing under effective edge costs ``w_e + lambda_e``.

Distances come from scipy's compiled Dijkstra; paths are recovered by walking
back from the target and always taking the lowest-id tight edge, so the
chosen path depends only on the cost vector and never on heap order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .grid import GridGraph, InstanceError, Net

FULL_TRIPLE_LIMIT = 30
EXHAUSTIVE_SEARCH_LIMIT = 10_000
_REL_TOL = 1e-9


@dataclass(frozen=True)
class RouteTree:
    net_id: int
    edges: frozenset[int]
    cost: float

    def __len__(self) -> int:
        return len(self.edges)


class CostView:
    """Read-only pairing of a graph with a multiplier vector."""

    def __init__(self, graph: GridGraph, lam: np.ndarray | None = None):
        self.graph = graph
        if lam is None:
            lam = np.zeros(graph.n_edges)
        lam = np.asarray(lam, dtype=np.float64)
        if lam.shape != (graph.n_edges,):
            raise ValueError(f"multiplier vector has shape {lam.shape}, expected ({graph.n_edges},)")
        if np.any(lam < 0):
            raise ValueError("multipliers must be non-negative")
        self.lam = lam
        self.cost = graph.base_cost + lam
        self._cost_list = self.cost.tolist()

    def effective_cost(self, e: int) -> float:
        return self._cost_list[e]

    def tree_cost(self, edges) -> float:
        return float(sum(self._cost_list[e] for e in sorted(edges)))

    @cached_property
    def matrix(self) -> csr_matrix:
        g = self.graph
        n = g.n_vertices
        rows = np.concatenate([g.edge_a, g.edge_b])
        cols = np.concatenate([g.edge_b, g.edge_a])
        return csr_matrix((np.concatenate([self.cost, self.cost]), (rows, cols)), shape=(n, n))

    def distances(self, sources) -> np.ndarray:
        """Dense ``len(sources) x V`` array of shortest-path distances."""
        return np.atleast_2d(dijkstra(self.matrix, directed=True, indices=list(sources)))

    def backtrack(self, dist: np.ndarray, src: int, dst: int) -> list[int]:
        """Edge sequence from ``src`` to ``dst`` consistent with ``dist`` (distances from ``src``)."""
        adjacency = self.graph.adjacency
        cost = self._cost_list
        path = []
        t = dst
        while t != src:
            dt = dist[t]
            tol = _REL_TOL * max(1.0, dt)
            best = None
            for u, e in adjacency[t]:
                du = dist[u]
                if du < dt and abs(du + cost[e] - dt) <= tol:
                    best = (u, e)
                    break  # adjacency is sorted by edge id
            if best is None:
                raise RuntimeError(f"no tight predecessor for vertex {t}")
            t, e = best
            path.append(e)
        path.reverse()
        return path


def shortest_path(costs: CostView, source: int, target: int) -> tuple[list[int], float]:
    if source == target:
        raise InstanceError("shortest_path needs distinct endpoints")
    dist = costs.distances([source])[0]
    path = costs.backtrack(dist, source, target)
    return path, float(dist[target])


def _bbox_vertices(graph: GridGraph, verts) -> np.ndarray:
    rc = [graph.coords(v) for v in verts]
    r0, r1 = min(r for r, _ in rc), max(r for r, _ in rc)
    c0, c1 = min(c for _, c in rc), max(c for _, c in rc)
    rows = np.arange(r0, r1 + 1)[:, None]
    cols = np.arange(c0, c1 + 1)[None, :]
    return (rows * graph.cols + cols).ravel()


def find_steiner_candidates(costs: CostView, terminals, dist: np.ndarray | None = None,
                            seed: int = 0, net_id: int = 0) -> tuple[int, ...]:
    """Best meeting vertex of every terminal triple, when it beats the triple's MST.

    ``dist`` may carry precomputed distance rows aligned with ``sorted(terminals)``.
    Above ``FULL_TRIPLE_LIMIT`` terminals, ``FULL_TRIPLE_LIMIT**3`` triples are
    sampled with a generator seeded by ``(seed, net_id)``.
    """
    pts = sorted(set(terminals))
    n = len(pts)
    if n < 3:
        return ()
    if dist is None:
        dist = costs.distances(pts)
    pair = dist[:, pts]
    if n <= FULL_TRIPLE_LIMIT:
        triples = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64)
    else:
        rng = np.random.default_rng([seed, net_id])
        keys = rng.random((FULL_TRIPLE_LIMIT ** 3, n))
        triples = np.sort(np.argpartition(keys, 3, axis=1)[:, :3], axis=1)

    graph = costs.graph
    exhaustive = graph.n_vertices <= EXHAUSTIVE_SEARCH_LIMIT
    terminal_set = set(pts)
    found: set[int] = set()
    for i, j, k in triples:
        dij, dik, djk = pair[i, j], pair[i, k], pair[j, k]
        without = dij + dik + djk - max(dij, dik, djk)
        if exhaustive:
            total = dist[i] + dist[j] + dist[k]
            v = int(np.argmin(total))
            best = total[v]
        else:
            scope = _bbox_vertices(graph, (pts[i], pts[j], pts[k]))
            total = dist[i, scope] + dist[j, scope] + dist[k, scope]
            pos = int(np.argmin(total))
            v, best = int(scope[pos]), total[pos]
        if v not in terminal_set and best < without - _REL_TOL * max(1.0, without):
            found.add(v)
    return tuple(sorted(found))


class _DisjointSet:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        parent = self.parent
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def canonicalize_tree(costs: CostView, edges, terminals) -> frozenset[int]:
    """Spanning forest of ``edges`` by (effective cost, edge id), minus non-terminal leaves."""
    graph = costs.graph
    ds = _DisjointSet()
    kept = []
    for e in sorted(set(edges), key=lambda e: (costs.effective_cost(e), e)):
        a, b = graph.endpoints(e)
        if ds.union(a, b):
            kept.append(e)
    return prune_leaves(graph, kept, terminals)


def prune_leaves(graph: GridGraph, edges, terminals) -> frozenset[int]:
    keep = set(terminals)
    incident: dict[int, set[int]] = {}
    for e in edges:
        for v in graph.endpoints(e):
            incident.setdefault(v, set()).add(e)
    alive = set(edges)
    stack = [v for v, es in incident.items() if len(es) == 1 and v not in keep]
    while stack:
        v = stack.pop()
        es = incident[v]
        if len(es) != 1 or v in keep:
            continue
        (e,) = es
        alive.discard(e)
        es.clear()
        a, b = graph.endpoints(e)
        u = b if a == v else a
        incident[u].discard(e)
        if len(incident[u]) == 1 and u not in keep:
            stack.append(u)
    return frozenset(alive)


def metric_closure_mst(costs: CostView, points, terminals=None,
                       dist: np.ndarray | None = None) -> frozenset[int]:
    """MST of the shortest-path closure over ``points``, expanded to grid edges.

    ``dist`` may carry distance rows aligned with ``sorted(set(points))``.
    Leaves that are not in ``terminals`` (default: all points) are pruned.
    """
    pts = sorted(set(points))
    if len(pts) < 2:
        raise InstanceError("metric_closure_mst needs at least 2 points")
    if dist is None:
        dist = costs.distances(pts)
    n = len(pts)
    pair_edges = sorted(
        ((dist[i, pts[j]], i, j) for i in range(n) for j in range(i + 1, n)),
    )
    ds = _DisjointSet()
    union: set[int] = set()
    picked = 0
    for _, i, j in pair_edges:
        if ds.union(i, j):
            union.update(costs.backtrack(dist[i], pts[i], pts[j]))
            picked += 1
            if picked == n - 1:
                break
    return canonicalize_tree(costs, union, pts if terminals is None else terminals)


def route_net(costs: CostView, net: Net, first_iteration: bool, seed: int = 0,
              recompute_steiner: bool = False) -> tuple[RouteTree, Net]:
    """Route one net; returns the tree and the net carrying its Steiner points.

    Steiner points are (re)computed on the first iteration, or every time when
    ``recompute_steiner`` is set; otherwise the stored ones are reused.
    """
    terms = sorted(net.terminals)
    if first_iteration or recompute_steiner:
        dist_t = costs.distances(terms)
        steiner = find_steiner_candidates(costs, terms, dist=dist_t, seed=seed, net_id=net.id)
        net = replace(net, steiner_points=steiner)
        if steiner:
            rows = dict(zip(terms, dist_t))
            rows.update(zip(steiner, costs.distances(steiner)))
            pts = sorted(rows)
            dist = np.vstack([rows[p] for p in pts])
        else:
            pts, dist = terms, dist_t
    else:
        pts = sorted(set(terms) | set(net.steiner_points))
        dist = costs.distances(pts)
    edges = metric_closure_mst(costs, pts, terminals=terms, dist=dist)
    return RouteTree(net.id, edges, costs.tree_cost(edges)), net


def tree_problems(graph: GridGraph, edges, terminals) -> list[str]:
    """Structural defects of a route tree; empty when it is a valid spanning tree."""
    edges = set(edges)
    problems = []
    if not edges:
        return ["tree has no edges"]
    ds = _DisjointSet()
    verts: set[int] = set()
    for e in edges:
        if not 0 <= e < graph.n_edges:
            return [f"edge id {e} out of range"]
        a, b = graph.endpoints(e)
        verts.update((a, b))
        if not ds.union(a, b):
            problems.append(f"cycle through edge {graph.edge_label(e)}")
    roots = {ds.find(v) for v in verts}
    if len(roots) > 1:
        problems.append(f"tree is disconnected ({len(roots)} components)")
    missing = [t for t in terminals if t not in verts]
    if missing:
        problems.append(f"terminals not covered: {[graph.coords(t) for t in missing]}")
    return problems


def is_valid_tree(graph: GridGraph, edges, terminals) -> bool:
    return not tree_problems(graph, edges, terminals)
