import json

import jsonschema
import pytest

from lagroute import cli
from lagroute.bench import BenchRow, format_bench, run_bench
from lagroute.engine import EngineConfig, run_engine
from lagroute.grid import ParseError, load_instance, parse_instance
from lagroute.reports import (
    REPORT_SCHEMA, format_routes, parse_routes, solution_fingerprint, solution_from_routes,
)


def run(argv):
    return cli.main([str(a) for a in argv])


def test_route_congested(tmp_path, data_dir, capsys):
    code = run(["route", "--input", data_dir / "congested.rt", "--width-factor", "1.0",
                "--out-dir", tmp_path, "--svg"])
    assert code == cli.EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["metrics"]["total_excess"] == 0
    repairs = {r["label"]: (r["d_before"], r["q_total"], r["outcome"]) for r in report["repair"]}
    assert repairs["(0,1)-(1,1)"] == (3, 3, "eliminated")
    out = capsys.readouterr().out
    assert "total_excess = 0" in out
    assert (tmp_path / "report.txt").read_text() == out
    assert (tmp_path / "solution.svg").read_text().startswith("<?xml")
    inst = load_instance(data_dir / "congested.rt")
    routes = parse_routes((tmp_path / "routes.txt").read_text(), inst.graph)
    assert len(routes) == len(inst.nets)


def test_route_threads_identical(tmp_path, data_dir):
    for t in (1, 8):
        assert run(["route", "--input", data_dir / "tiny.rt", "--threads", t,
                    "--out-dir", tmp_path / str(t)]) == cli.EXIT_OK
    assert (tmp_path / "1" / "routes.txt").read_bytes() == (tmp_path / "8" / "routes.txt").read_bytes()


def test_route_generated(tmp_path):
    code = run(["route", "--gen", "12x12:40:3", "--seed", 7, "--threads", 2, "--max-iter", 3,
                "--out-dir", tmp_path])
    assert code in (cli.EXIT_OK, cli.EXIT_VIOLATION)
    report = json.loads((tmp_path / "report.json").read_text())
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["instance"]["nets"] == 40
    assert len(report["history"]) <= 3


def test_route_residual_violation_exit_code(tmp_path):
    path = tmp_path / "jam.rt"
    path.write_text("grid 1 2\nwidth 1\nnet 0 0 0 0 1\nnet 1 0 0 0 1\n")
    code = run(["route", "--input", path, "--width-factor", "1.0", "--out-dir", tmp_path])
    assert code == cli.EXIT_VIOLATION
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["repair"][0]["outcome"] == "no_path"


def test_bad_input_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.rt"
    path.write_text("grid 2 2\nnet 0 0 0 5 5\n")
    assert run(["route", "--input", path, "--out-dir", tmp_path]) == cli.EXIT_INPUT
    assert "line 2" in capsys.readouterr().err
    assert run(["route", "--input", tmp_path / "missing.rt", "--out-dir", tmp_path]) == cli.EXIT_INPUT
    assert run(["route", "--gen", "3x3:x:2", "--out-dir", tmp_path]) == cli.EXIT_INPUT


def test_gen_and_render(tmp_path, capsys):
    inst_path = tmp_path / "g.rt"
    assert run(["gen", "5x5:4:2", "--seed", 3, "--width", 2, "-o", inst_path]) == cli.EXIT_OK
    inst = load_instance(inst_path)
    assert len(inst.nets) == 4 and inst.width == 2
    assert run(["gen", "5x5:4:2", "--seed", 3, "--width", 2]) == cli.EXIT_OK
    assert capsys.readouterr().out == inst_path.read_text()

    assert run(["route", "--input", inst_path, "--out-dir", tmp_path]) == cli.EXIT_OK
    svg = tmp_path / "out.svg"
    assert run(["render", "--input", inst_path, "--routes", tmp_path / "routes.txt", "--out", svg]) == 0
    assert 'class="net"' in svg.read_text()
    assert run(["render", "--input", inst_path, "--out", svg]) == 0
    assert 'class="net"' not in svg.read_text()


def test_render_needs_width(tmp_path, data_dir):
    inst_path = tmp_path / "nowidth.rt"
    inst_path.write_text("grid 2 2\nnet 0 0 0 1 1\n")
    routes = tmp_path / "r.txt"
    routes.write_text("net 0: (0,0)-(0,1) (0,1)-(1,1)\n")
    assert run(["render", "--input", inst_path, "--routes", routes, "--out", tmp_path / "x.svg"]) == 1
    assert run(["render", "--input", inst_path, "--routes", routes, "--width", 1,
                "--out", tmp_path / "x.svg"]) == 0


def test_bench(tmp_path, capsys):
    path = tmp_path / "one.rt"
    path.write_text("grid 3 3\nnet 0 0 0 2 2\n")
    out_json = tmp_path / "bench.json"
    assert run(["bench", "--input", path, "--threads-list", "1,2", "--json", out_json]) == 0
    rows = json.loads(out_json.read_text())
    assert [r["threads"] for r in rows] == [1, 2]
    assert "speedup" in capsys.readouterr().out


def test_bench_detects_nondeterminism(tmp_path, monkeypatch):
    path = tmp_path / "one.rt"
    path.write_text("grid 3 3\nnet 0 0 0 2 2\n")
    calls = []

    def flaky(instance, config):
        sol = run_engine(instance, config)
        calls.append(config.threads)
        if len(calls) > 1:
            sol.width += 1
        return sol

    monkeypatch.setattr(cli, "run_bench", lambda inst, cfg, counts: run_bench(inst, cfg, counts, runner=flaky))
    assert run(["bench", "--input", path, "--threads-list", "1,2"]) == cli.EXIT_NONDETERMINISTIC


def test_format_bench_reference_column():
    text = format_bench([BenchRow(1, 2.0, 1.0, None), BenchRow(4, 1.0, 2.0, 2.74)])
    assert "2.74" in text.splitlines()[2]


def test_routes_round_trip(data_dir):
    inst = load_instance(data_dir / "tiny.rt")
    sol = run_engine(inst)
    text = format_routes(sol)
    again = solution_from_routes(inst, parse_routes(text, inst.graph), sol.width)
    assert [t.edges for t in again.trees] == [t.edges for t in sol.trees]
    assert again.usage.tolist() == sol.usage.tolist()


@pytest.mark.parametrize("text", ["garbage\n", "net 0: (0,0)-(2,2)\n", "net 0: (0,0)-(0,1)\nnet 0: (0,0)-(0,1)\n",
                                  "net 0: 0,0-0,1\n"])
def test_parse_routes_errors(text):
    inst = parse_instance("grid 3 3\nnet 0 0 0 0 1\n")
    with pytest.raises(ParseError):
        parse_routes(text, inst.graph)


def test_fingerprint_sees_tiny_multiplier_changes(data_dir):
    inst = load_instance(data_dir / "tiny.rt")
    a = run_engine(inst, EngineConfig(max_iter=5))
    b = run_engine(inst, EngineConfig(max_iter=5))
    assert solution_fingerprint(a) == solution_fingerprint(b)
    b.lam[0] += 1e-12
    assert solution_fingerprint(a) != solution_fingerprint(b)
