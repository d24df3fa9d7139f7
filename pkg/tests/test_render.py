import xml.etree.ElementTree as ET

from lagroute.grid import build_grid
from lagroute.render import render_svg
from lagroute.repair import repair_all

SVG = "{http://www.w3.org/2000/svg}"


def parse(svg):
    return ET.fromstring(svg)


def by_class(root, cls):
    return [el for el in root.iter() if el.get("class") == cls]


def test_grid_only():
    g = build_grid(3, 4)
    root = parse(render_svg(None, graph=g, title="empty"))
    assert root.tag == SVG + "svg"
    assert len(by_class(root, "grid-edge")) == g.n_edges
    assert by_class(root, "net-route") == []
    assert by_class(root, "violation") == []


def test_congested_violations_marked(congested_solution):
    root = parse(render_svg(congested_solution, title="congested"))
    marked = {el.get("data-edge"): int(el.get("data-usage")) for el in by_class(root, "violation")}
    assert marked == {"(0,0)-(1,0)": 42, "(0,1)-(1,1)": 43, "(0,3)-(1,3)": 41}
    assert len(by_class(root, "net")) == len(congested_solution.nets)
    assert len(by_class(root, "net-route")) == congested_solution.wire_length()


def test_repaired_congested_has_no_violations(congested_solution):
    repair_all(congested_solution)
    root = parse(render_svg(congested_solution))
    assert by_class(root, "violation") == []
