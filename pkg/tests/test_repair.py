import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import edge
from lagroute.engine import EngineConfig, run_engine
from lagroute.grid import Net, build_grid, generate_synthetic
from lagroute.repair import (
    ELIMINATED, NO_PATH, REDUCED, RepairConfig, compute_threshold, find_alternate_paths,
    k_shortest_paths, repair_all, repair_edge, total_excess, violation_record,
)
from lagroute.solution import Solution


def label_path(graph, path):
    return [graph.edge_label(e) for e in path]


def square_solution(top, bottom, width):
    """2x2 grid: ``top`` nets on edge (0,0)-(0,1) and ``bottom`` nets on (1,0)-(1,1)."""
    g = build_grid(2, 2)
    nets, sets = [], []
    for i in range(top):
        nets.append(Net(i, (0, 1)))
        sets.append({0})
    for i in range(bottom):
        nets.append(Net(top + i, (2, 3)))
        sets.append({3})
    return Solution.from_edge_sets(g, nets, sets, width)


def test_congested_violation_record(congested_solution):
    g = congested_solution.graph
    bf = edge(g, (0, 1), (1, 1))
    rec = violation_record(congested_solution, bf)
    assert rec.d == 3
    assert len(rec.nets_using) == 43
    with pytest.raises(ValueError):
        violation_record(congested_solution, edge(g, (0, 0), (0, 1)))


def test_congested_detour_and_threshold(congested_solution):
    g = congested_solution.graph
    bf = edge(g, (0, 1), (1, 1))
    paths = find_alternate_paths(congested_solution, bf, beta=3)
    # the only detour avoiding AE (42 > 40) within a 2x4 grid that reaches F from B
    best = paths[0]
    assert label_path(g, best.edges) == ["(0,1)-(0,2)", "(0,2)-(1,2)", "(1,1)-(1,2)"]
    assert best.threshold == 8
    assert compute_threshold(congested_solution, best.edges) == 8


def test_congested_repair_edge(congested_solution):
    g = congested_solution.graph
    bf = edge(g, (0, 1), (1, 1))
    before = congested_solution.usage.copy()
    rep = repair_edge(congested_solution, bf, RepairConfig())
    assert rep.d_before == 3
    assert rep.outcome == ELIMINATED
    assert [(p.d, p.threshold, p.q) for p in rep.passes] == [(3, 8, 3)]
    assert congested_solution.usage[bf] == 40
    for e in rep.passes[0].path:
        assert congested_solution.usage[e] == before[e] + 3
    assert np.array_equal(congested_solution.usage, congested_solution.recount())
    assert congested_solution.problems() == []


def test_congested_repair_all(congested_solution):
    before = congested_solution.total_violation()
    report = repair_all(congested_solution)
    assert before == 2 + 3 + 1
    assert [r.outcome for r in report] == [ELIMINATED] * 3
    assert congested_solution.total_violation() == 0
    assert congested_solution.max_usage() <= 40


def test_threshold_smaller_than_excess():
    sol = square_solution(top=10, bottom=3, width=5)
    rep = repair_edge(sol, 0)
    assert rep.d_before == 5
    assert [(p.d, p.threshold, p.q) for p in rep.passes] == [(5, 2, 2)]
    assert rep.outcome == REDUCED
    assert sol.usage.tolist() == [8, 2, 2, 5]
    assert np.array_equal(sol.usage, sol.recount())


def test_saturated_detour_gives_no_path():
    sol = square_solution(top=7, bottom=5, width=5)
    rep = repair_edge(sol, 0)
    assert rep.outcome == NO_PATH
    assert rep.passes == []
    assert sol.usage.tolist() == [7, 0, 0, 5]


def test_within_capacity_edge_is_a_no_op():
    sol = square_solution(top=2, bottom=0, width=5)
    rep = repair_edge(sol, 0)
    assert rep.outcome == ELIMINATED and rep.passes == []


def test_compute_threshold_example():
    g = build_grid(2, 2)
    sol = Solution.from_edge_sets(g, [Net(0, (0, 1))], [{0}], 40)
    sol.usage = np.array([32, 35, 30, 0])
    assert compute_threshold(sol, [0, 1, 2]) == 5


def test_beta_three_detours_on_interior_edge():
    g = build_grid(5, 5)
    e = edge(g, (2, 2), (2, 3))
    sol = Solution.from_edge_sets(g, [Net(0, (g.vertex(2, 2), g.vertex(2, 3)))], [{e}], 1)
    # brute force over all simple detours gives cheapest lengths 3, 3, 5, 5, ...
    paths = find_alternate_paths(sol, e, beta=3)
    assert [p.cost for p in paths] == [3.0, 3.0, 5.0]
    assert all(e not in p.edges for p in paths)
    assert len({p.edges for p in paths}) == 3


def test_yen_enumerates_every_simple_path_on_small_grid():
    g = build_grid(3, 3)
    cost = [1.0] * g.n_edges
    paths = k_shortest_paths(g, cost, [True] * g.n_edges, 0, 8, 50)
    assert len(paths) == 12
    assert len({tuple(p) for p in paths}) == 12
    lengths = [len(p) for p in paths]
    assert lengths == sorted(lengths)


def test_variants():
    assert RepairConfig.variant("base") == RepairConfig(beta=1, sort_nets=False)
    assert RepairConfig.variant("a", 5) == RepairConfig(beta=5, sort_nets=False)
    assert RepairConfig.variant("B").sort_nets
    with pytest.raises(ValueError):
        RepairConfig.variant("C")
    with pytest.raises(ValueError):
        RepairConfig(beta=0)


def test_variant_b_prefers_nets_already_on_the_detour():
    g = build_grid(2, 2)
    # nets 0 and 2 use only the top edge; net 1 is an L that already holds the right edge
    nets = [Net(0, (0, 1)), Net(1, (0, 3)), Net(2, (0, 1))]
    sets = [{0}, {0, 2}, {0}]
    sol = Solution.from_edge_sets(g, nets, sets, 2)
    rep = repair_edge(sol, 0, RepairConfig.variant("B"))
    assert [(p.threshold, p.q, p.nets) for p in rep.passes] == [(1, 1, (1,))]
    sol = Solution.from_edge_sets(g, nets, sets, 2)
    rep = repair_edge(sol, 0, RepairConfig.variant("A"))
    assert rep.passes[0].nets == (0,)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 7), st.integers(3, 7), st.integers(2, 25), st.integers(2, 4),
       st.integers(0, 10**6), st.sampled_from(["base", "A", "B"]))
def test_repair_is_capacity_safe(rows, cols, n_nets, terms, seed, variant):
    inst = generate_synthetic(rows, cols, n_nets, terms, seed)
    sol = run_engine(inst, EngineConfig(max_iter=1, repair_mode="off"))
    sol.width = max(1, sol.max_usage() - 1)
    before = sol.usage.copy()
    violation = sol.total_violation()
    report = repair_all(sol, RepairConfig.variant(variant))
    assert sol.total_violation() <= violation
    over = before > sol.width
    assert np.all(sol.usage[~over] <= sol.width)
    assert np.all(sol.usage[over] <= before[over])
    assert sol.problems() == []
    assert np.array_equal(sol.usage, sol.recount())
    for rep in report:
        for p in rep.passes:
            assert 1 <= p.q <= min(p.d, p.threshold)
    assert total_excess(sol.usage, sol.width) == sol.total_violation()
