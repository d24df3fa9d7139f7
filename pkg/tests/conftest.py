from __future__ import annotations

from pathlib import Path

import pytest

from lagroute import EngineConfig, load_instance, run_engine

DATA = Path(__file__).parent / "data"

_criteria: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def congested():
    return load_instance(DATA / "congested.rt")


@pytest.fixture
def congested_solution(congested):
    """The lambda = 0 routing of the congested example at W = 40, unrepaired."""
    return run_engine(congested, EngineConfig(max_iter=1, width_factor=1.0, repair_mode="off"))


def edge(graph, a, b):
    return graph.edge_between(graph.vertex(*a), graph.vertex(*b))


class CriterionRecorder:
    def __init__(self, name: str):
        self.name = name
        self.detail = ""

    def note(self, detail: str) -> None:
        self.detail = detail


@pytest.fixture
def criterion(request):
    """Records one acceptance criterion's outcome for the terminal summary."""
    rec = CriterionRecorder(request.node.name)
    yield rec


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    rec = item.funcargs.get("criterion") if hasattr(item, "funcargs") else None
    if rec is not None and report.when == "call":
        _criteria[item.name] = (report.passed, rec.detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in sorted(_criteria.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
