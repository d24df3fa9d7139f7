"""Routes file, run report (flat text and JSON) and solution fingerprints.

Routes file: one line per net, ``net ID: (r1,c1)-(r2,c2) ...`` listing the
tree's edges in ascending edge-id order; ``#`` starts a comment.
"""

from __future__ import annotations

import json
import re

import numpy as np

from .grid import GridGraph, Instance, InstanceError, ParseError
from .metrics import MetricsReport
from .solution import Solution

_EDGE_RE = re.compile(r"^\((-?\d+),(-?\d+)\)-\((-?\d+),(-?\d+)\)$")
_NET_RE = re.compile(r"^net\s+(-?\d+):(.*)$")

REPORT_FORMAT = "lagroute-report/1"

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "lagroute run report",
    "type": "object",
    "required": ["format", "instance", "config", "metrics", "width", "history", "repair"],
    "properties": {
        "format": {"const": REPORT_FORMAT},
        "instance": {
            "type": "object",
            "required": ["name", "rows", "cols", "nets", "w_min"],
            "properties": {
                "name": {"type": "string"},
                "rows": {"type": "integer", "minimum": 1},
                "cols": {"type": "integer", "minimum": 1},
                "nets": {"type": "integer", "minimum": 1},
                "w_min": {"type": ["integer", "null"]},
            },
        },
        "config": {"type": "object"},
        "metrics": {
            "type": "object",
            "required": ["abs_violation", "total_excess", "violating_edges", "min_channel_width",
                         "width", "total_wire_length", "critical_path_delay", "runtime_seconds",
                         "threads"],
            "properties": {
                "abs_violation": {"type": "number", "minimum": 0},
                "total_excess": {"type": "integer", "minimum": 0},
                "violating_edges": {"type": "integer", "minimum": 0},
                "min_channel_width": {"type": "integer", "minimum": 0},
                "width": {"type": "integer", "minimum": 0},
                "total_wire_length": {"type": "integer", "minimum": 0},
                "critical_path_delay": {"type": "number", "minimum": 0},
                "runtime_seconds": {"type": "number", "minimum": 0},
                "threads": {"type": "integer", "minimum": 1},
            },
        },
        "width": {
            "type": "object",
            "required": ["initial", "final", "best_feasible"],
            "properties": {
                "initial": {"type": ["integer", "null"]},
                "final": {"type": "integer"},
                "best_feasible": {"type": ["integer", "null"]},
            },
        },
        "history": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["iteration", "width", "total_violation", "max_usage",
                             "total_wire_length", "step"],
            },
        },
        "repair": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["edge", "label", "d_before", "passes", "q_total", "outcome"],
                "properties": {
                    "outcome": {"enum": ["eliminated", "reduced", "no_path"]},
                },
            },
        },
    },
}


def format_routes(solution: Solution) -> str:
    g = solution.graph
    lines = []
    for net, tree in zip(solution.nets, solution.trees):
        edges = " ".join(g.edge_label(e) for e in sorted(tree.edges))
        lines.append(f"net {net.id}: {edges}")
    return "\n".join(lines) + "\n"


def parse_routes(text: str, graph: GridGraph) -> dict[int, frozenset[int]]:
    routes: dict[int, frozenset[int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _NET_RE.match(line)
        if not m:
            raise ParseError(f"expected 'net ID: edges...', got {line!r}", lineno)
        net_id = int(m.group(1))
        if net_id in routes:
            raise ParseError(f"duplicate net id {net_id}", lineno)
        edges = set()
        for tok in m.group(2).split():
            em = _EDGE_RE.match(tok)
            if not em:
                raise ParseError(f"bad edge token {tok!r}", lineno)
            r1, c1, r2, c2 = map(int, em.groups())
            try:
                edges.add(graph.edge_between(graph.vertex(r1, c1), graph.vertex(r2, c2)))
            except InstanceError as exc:
                raise ParseError(str(exc), lineno) from None
        routes[net_id] = frozenset(edges)
    return routes


def solution_from_routes(instance: Instance, routes: dict[int, frozenset[int]], width: int,
                         lam=None) -> Solution:
    missing = [net.id for net in instance.nets if net.id not in routes]
    if missing:
        raise InstanceError(f"routes file lacks nets {missing}")
    extra = set(routes) - {net.id for net in instance.nets}
    if extra:
        raise InstanceError(f"routes file has unknown nets {sorted(extra)}")
    return Solution.from_edge_sets(instance.graph, instance.nets,
                                   [routes[net.id] for net in instance.nets], width, lam)


def _history(solution: Solution) -> list[dict]:
    return [{"iteration": h.iteration, "width": h.width, "total_violation": h.total_violation,
             "max_usage": h.max_usage, "total_wire_length": h.total_wire_length, "step": h.step}
            for h in solution.history]


def build_report(instance: Instance, solution: Solution, metrics: MetricsReport,
                 config: dict | None = None) -> dict:
    g = instance.graph
    return {
        "format": REPORT_FORMAT,
        "instance": {"name": instance.name, "rows": g.rows, "cols": g.cols,
                     "nets": len(instance.nets), "w_min": instance.width},
        "config": config or {},
        "metrics": metrics.as_dict(),
        "width": {"initial": solution.initial_width, "final": solution.width,
                  "best_feasible": solution.best_feasible_width},
        "history": _history(solution),
        "repair": [r.as_dict(g) for r in solution.repair_report],
    }


def format_flat_report(report: dict) -> str:
    lines = []
    for key, value in report["metrics"].items():
        lines.append(f"{key} = {value}")
    for key, value in report["width"].items():
        lines.append(f"width.{key} = {value}")
    lines.append(f"iterations = {len(report['history'])}")
    lines.append(f"repair.edges = {len(report['repair'])}")
    for i, r in enumerate(report["repair"]):
        lines.append(f"repair.{i} = edge {r['label']} d_before={r['d_before']} passes={r['passes']} "
                     f"q_total={r['q_total']} outcome={r['outcome']}")
    return "\n".join(lines) + "\n"


def solution_fingerprint(solution: Solution) -> str:
    """Canonical serialisation of everything the engine computed (no timings)."""
    return json.dumps({
        "routes": format_routes(solution),
        "costs": [t.cost.hex() for t in solution.trees],
        "steiner": [list(n.steiner_points) for n in solution.nets],
        "usage": solution.usage.tolist(),
        "lam": [float(x).hex() for x in np.asarray(solution.lam)],
        "width": [solution.initial_width, solution.width, solution.best_feasible_width],
        "history": [[h.iteration, h.width, h.total_violation, h.max_usage, h.total_wire_length,
                     float(h.step).hex()] for h in solution.history],
        "repair": [r.as_dict() for r in solution.repair_report],
    }, sort_keys=True)
