"""SVG 1.1 rendering of a routed grid; over-capacity edges are drawn bold red."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

from .solution import Solution

PITCH = 40
MARGIN = 24
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b",
           "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#393b79")


def _xy(graph, v):
    r, c = graph.coords(v)
    return MARGIN + c * PITCH, MARGIN + r * PITCH


def render_svg(solution: Solution | None, graph=None, title: str = "") -> str:
    """Grid, per-net routes offset by net so overlaps stay visible, and violations.

    ``solution`` may be None to draw the bare grid of ``graph``.
    """
    graph = solution.graph if solution is not None else graph
    width = 2 * MARGIN + (graph.cols - 1) * PITCH
    height = 2 * MARGIN + (graph.rows - 1) * PITCH
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    if title:
        out.append(f"<title>{title}</title>")
    out.append('<g class="grid" stroke="#d0d0d0" stroke-width="1">')
    for e in range(graph.n_edges):
        a, b = graph.endpoints(e)
        (x1, y1), (x2, y2) = _xy(graph, a), _xy(graph, b)
        out.append(f'<line class="grid-edge" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    out.append("</g>")

    if solution is not None:
        n = len(solution.nets)
        spread = min(PITCH * 0.3, 2.0 * n)
        out.append('<g class="routes" stroke-width="1.5" fill="none">')
        for idx, (net, tree) in enumerate(zip(solution.nets, solution.trees)):
            color = PALETTE[idx % len(PALETTE)]
            off = 0.0 if n == 1 else spread * (idx / (n - 1) - 0.5)
            out.append(f'<g class="net" data-net="{net.id}" stroke="{color}">')
            for e in sorted(tree.edges):
                a, b = graph.endpoints(e)
                (x1, y1), (x2, y2) = _xy(graph, a), _xy(graph, b)
                dx, dy = (0, off) if y1 == y2 else (off, 0)
                out.append(f'<line class="net-route" x1="{x1 + dx:.2f}" y1="{y1 + dy:.2f}" '
                           f'x2="{x2 + dx:.2f}" y2="{y2 + dy:.2f}"/>')
            for t in net.terminals:
                x, y = _xy(graph, t)
                out.append(f'<circle class="terminal" cx="{x}" cy="{y}" r="3" fill="{color}"/>')
            out.append("</g>")
        out.append("</g>")
        out.append('<g class="violations" stroke="#d62728" stroke-width="5">')
        for e in solution.violating_edges():
            a, b = graph.endpoints(e)
            (x1, y1), (x2, y2) = _xy(graph, a), _xy(graph, b)
            out.append(f'<line class="violation" data-edge={quoteattr(graph.edge_label(e))} '
                       f'data-usage="{int(solution.usage[e])}" '
                       f'x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
