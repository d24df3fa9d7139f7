"""Grid routing graph, nets, problem instances and the instance text format.

Instance file grammar (one directive per line, ``#`` starts a comment)::

    grid R C                      # required, must precede every other directive
    width W                       # optional, at most once; the W_min budget
    edge r1 c1 r2 c2 COST         # optional cost override for a 4-neighbour edge
    net ID r1 c1 r2 c2 [r c ...]  # one net; first coordinate pair is the source

Tokens are whitespace separated. Any token beyond the ones listed above is an
error, as is a malformed number, an off-grid coordinate or a duplicate id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np


class InstanceError(ValueError):
    """Invalid grid, net or instance data."""


class ParseError(InstanceError):
    """Malformed instance or routes text, with the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class GridGraph:
    """Immutable R x C grid with one undirected edge per pair of 4-neighbours.

    Vertex ``v`` sits at ``(v // cols, v % cols)``. Edges are numbered by
    scanning vertices in row-major order and emitting the rightward edge
    before the downward one, so edge ids are stable for a given shape.
    """

    def __init__(self, rows: int, cols: int, costs: Mapping[int, float] | None = None,
                 uniform_cost: float = 1.0):
        if rows < 1 or cols < 1 or rows * cols < 2:
            raise InstanceError(f"grid must have at least 2 vertices, got {rows}x{cols}")
        _check_cost(uniform_cost)
        self.rows = int(rows)
        self.cols = int(cols)
        ea, eb = [], []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    ea.append(v)
                    eb.append(v + 1)
                if r + 1 < rows:
                    ea.append(v)
                    eb.append(v + cols)
        self.edge_a = np.array(ea, dtype=np.int64)
        self.edge_b = np.array(eb, dtype=np.int64)
        base = np.full(len(ea), float(uniform_cost))
        for e, cost in (costs or {}).items():
            if not 0 <= e < len(ea):
                raise InstanceError(f"edge id {e} out of range")
            base[e] = _check_cost(cost)
        self.base_cost = base
        for arr in (self.edge_a, self.edge_b, self.base_cost):
            arr.setflags(write=False)

        self._index = {(a, b): e for e, (a, b) in enumerate(zip(ea, eb))}
        adj: list[list[tuple[int, int]]] = [[] for _ in range(rows * cols)]
        for e, (a, b) in enumerate(zip(ea, eb)):
            adj[a].append((b, e))
            adj[b].append((a, e))
        self.adjacency = tuple(tuple(sorted(nbrs, key=lambda t: t[1])) for nbrs in adj)

    @property
    def n_vertices(self) -> int:
        return self.rows * self.cols

    @property
    def n_edges(self) -> int:
        return len(self.edge_a)

    def vertex(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise InstanceError(f"coordinate ({r},{c}) outside {self.rows}x{self.cols} grid")
        return r * self.cols + c

    def coords(self, v: int) -> tuple[int, int]:
        return divmod(int(v), self.cols)

    def endpoints(self, e: int) -> tuple[int, int]:
        return int(self.edge_a[e]), int(self.edge_b[e])

    def edge_between(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self._index[key]
        except KeyError:
            raise InstanceError(f"vertices {self.coords(u)} and {self.coords(v)} are not adjacent") from None

    def edge_label(self, e: int) -> str:
        a, b = self.endpoints(e)
        (r1, c1), (r2, c2) = self.coords(a), self.coords(b)
        return f"({r1},{c1})-({r2},{c2})"

    def cost_overrides(self, default: float = 1.0) -> dict[int, float]:
        return {e: float(c) for e, c in enumerate(self.base_cost) if c != default}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridGraph):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and np.array_equal(self.base_cost, other.base_cost)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.base_cost.tobytes()))

    def __repr__(self) -> str:
        return f"GridGraph({self.rows}x{self.cols}, {self.n_edges} edges)"


def _check_cost(cost: float) -> float:
    cost = float(cost)
    if not math.isfinite(cost) or cost <= 0:
        raise InstanceError(f"edge cost must be positive and finite, got {cost!r}")
    return cost


def build_grid(rows: int, cols: int, uniform_cost: float = 1.0) -> GridGraph:
    return GridGraph(rows, cols, uniform_cost=uniform_cost)


@dataclass(frozen=True)
class Net:
    """A routing demand. ``terminals[0]`` is the source, the rest are sinks."""

    id: int
    terminals: tuple[int, ...]
    steiner_points: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.terminals) < 2:
            raise InstanceError(f"net {self.id} needs at least 2 terminals")
        if len(set(self.terminals)) != len(self.terminals):
            raise InstanceError(f"net {self.id} has repeated terminals")
        if set(self.steiner_points) & set(self.terminals):
            raise InstanceError(f"net {self.id} has a Steiner point on a terminal")

    @property
    def source(self) -> int:
        return self.terminals[0]

    @property
    def sinks(self) -> tuple[int, ...]:
        return self.terminals[1:]


@dataclass(frozen=True)
class Instance:
    graph: GridGraph
    nets: tuple[Net, ...]
    width: int | None = None  # W_min; None means "estimate from a lambda=0 pass"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.nets:
            raise InstanceError("instance has no nets")
        seen = set()
        for net in self.nets:
            if net.id in seen:
                raise InstanceError(f"duplicate net id {net.id}")
            seen.add(net.id)
            for v in net.terminals + net.steiner_points:
                if not 0 <= v < self.graph.n_vertices:
                    raise InstanceError(f"net {net.id} references vertex {v} outside the grid")
        if self.width is not None and self.width < 1:
            raise InstanceError(f"width must be a positive integer, got {self.width}")


def _ints(tokens: list[str], lineno: int, what: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers for {what}, got {' '.join(tokens)!r}", lineno) from None


def parse_instance(text: str, name: str = "") -> Instance:
    rows = cols = None
    width = None
    overrides: dict[int, float] = {}
    raw_nets: list[tuple[int, list[tuple[int, int]], int]] = []
    net_ids: set[int] = set()
    graph = None

    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        kw, args = tokens[0], tokens[1:]
        if kw == "grid":
            if rows is not None:
                raise ParseError("duplicate 'grid' directive", lineno)
            if len(args) != 2:
                raise ParseError("'grid' takes exactly 2 fields: R C", lineno)
            rows, cols = _ints(args, lineno, "grid size")
            if rows < 1 or cols < 1 or rows * cols < 2:
                raise ParseError(f"grid {rows}x{cols} needs positive dimensions and >= 2 vertices", lineno)
            graph = GridGraph(rows, cols)
            continue
        if graph is None:
            raise ParseError(f"'{kw}' before 'grid' directive", lineno)
        if kw == "width":
            if width is not None:
                raise ParseError("duplicate 'width' directive", lineno)
            if len(args) != 1:
                raise ParseError("'width' takes exactly 1 field", lineno)
            (width,) = _ints(args, lineno, "width")
            if width < 1:
                raise ParseError("width must be positive", lineno)
        elif kw == "edge":
            if len(args) != 5:
                raise ParseError("'edge' takes exactly 5 fields: r1 c1 r2 c2 COST", lineno)
            r1, c1, r2, c2 = _ints(args[:4], lineno, "edge endpoints")
            try:
                cost = float(args[4])
            except ValueError:
                raise ParseError(f"bad edge cost {args[4]!r}", lineno) from None
            try:
                e = graph.edge_between(graph.vertex(r1, c1), graph.vertex(r2, c2))
                _check_cost(cost)
            except InstanceError as exc:
                raise ParseError(str(exc), lineno) from None
            if e in overrides:
                raise ParseError(f"duplicate cost for edge {graph.edge_label(e)}", lineno)
            overrides[e] = cost
        elif kw == "net":
            if len(args) < 5 or len(args) % 2 == 0:
                raise ParseError("'net' takes an id followed by at least 2 coordinate pairs", lineno)
            vals = _ints(args, lineno, "net")
            net_id, coords = vals[0], vals[1:]
            if net_id in net_ids:
                raise ParseError(f"duplicate net id {net_id}", lineno)
            net_ids.add(net_id)
            pairs = list(zip(coords[0::2], coords[1::2]))
            for r, c in pairs:
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ParseError(f"terminal ({r},{c}) outside {rows}x{cols} grid", lineno)
            raw_nets.append((net_id, pairs, lineno))
        else:
            raise ParseError(f"unknown directive {kw!r}", lineno)

    if graph is None:
        raise ParseError("missing 'grid' directive")
    if overrides:
        graph = GridGraph(rows, cols, overrides)
    nets = []
    for net_id, pairs, lineno in raw_nets:
        try:
            nets.append(Net(net_id, tuple(graph.vertex(r, c) for r, c in pairs)))
        except InstanceError as exc:
            raise ParseError(str(exc), lineno) from None
    if not nets:
        raise ParseError("instance declares no nets")
    return Instance(graph, tuple(nets), width, name=name)


def load_instance(source) -> Instance:
    """Read an instance from a path, a text/binary stream, or ``bytes``."""
    if isinstance(source, bytes):
        return parse_instance(source.decode())
    if hasattr(source, "read"):
        data = source.read()
        return parse_instance(data.decode() if isinstance(data, bytes) else data)
    with open(source, encoding="utf-8") as fh:
        return parse_instance(fh.read(), name=str(source))


def dump_instance(instance: Instance) -> str:
    g = instance.graph
    lines = [f"grid {g.rows} {g.cols}"]
    if instance.width is not None:
        lines.append(f"width {instance.width}")
    for e, cost in sorted(g.cost_overrides().items()):
        a, b = g.endpoints(e)
        lines.append("edge {} {} {} {} {!r}".format(*g.coords(a), *g.coords(b), cost))
    for net in instance.nets:
        coords = " ".join(f"{r} {c}" for r, c in map(g.coords, net.terminals))
        lines.append(f"net {net.id} {coords}")
    return "\n".join(lines) + "\n"


def generate_synthetic(rows: int, cols: int, n_nets: int, terminals_per_net: int, seed: int,
                       width: int | None = None) -> Instance:
    """Random instance; each net draws its terminals without replacement."""
    if n_nets < 1:
        raise InstanceError("n_nets must be positive")
    if terminals_per_net < 2:
        raise InstanceError("terminals_per_net must be at least 2")
    graph = GridGraph(rows, cols)
    if terminals_per_net > graph.n_vertices:
        raise InstanceError(f"{terminals_per_net} terminals do not fit on a {rows}x{cols} grid")
    rng = np.random.default_rng(seed)
    nets = tuple(
        Net(i, tuple(int(v) for v in rng.choice(graph.n_vertices, terminals_per_net, replace=False)))
        for i in range(n_nets)
    )
    return Instance(graph, nets, width, name=f"gen-{rows}x{cols}-{n_nets}-{terminals_per_net}-s{seed}")


def parse_gen_spec(spec: str) -> tuple[int, int, int, int]:
    """Parse ``RxC:NETS:TERMS`` (e.g. ``50x50:1000:3``)."""
    try:
        dims, n_nets, terms = spec.split(":")
        rows, cols = dims.lower().split("x")
        return int(rows), int(cols), int(n_nets), int(terms)
    except ValueError:
        raise InstanceError(f"bad generator spec {spec!r}, expected RxC:NETS:TERMS") from None


def edges_touching(graph: GridGraph, edges: Iterable[int]) -> set[int]:
    verts: set[int] = set()
    for e in edges:
        verts.update(graph.endpoints(e))
    return verts
