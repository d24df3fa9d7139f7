"""Command-line front end.

Exit codes: 0 success with zero final violation, 1 input or I/O error,
2 residual violation after repair, 3 determinism failure in ``bench``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .bench import DeterminismError, format_bench, run_bench
from .engine import REPAIR_MODES, EngineConfig, run_engine
from .grid import InstanceError, dump_instance, generate_synthetic, load_instance, parse_gen_spec
from .metrics import compute_metrics
from .oracle import OracleSizeError, enumerate_routings
from .render import render_svg
from .repair import RepairConfig
from .reports import build_report, format_flat_report, format_routes, parse_routes, solution_from_routes

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_NONDETERMINISTIC = 0, 1, 2, 3

log = logging.getLogger("lagroute")


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="instance file")
    src.add_argument("--gen", metavar="RxC:NETS:TERMS", help="synthetic instance, e.g. 50x50:1000:3")
    p.add_argument("--seed", type=int, default=0)


def _add_engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--width-factor", type=float, default=1.2)
    p.add_argument("--beta", type=int, default=3)
    p.add_argument("--variant", choices=["base", "A", "B"], default="B")
    p.add_argument("--repair", choices=REPAIR_MODES, default="post")
    p.add_argument("--recompute-steiner", action="store_true")


def _instance(args):
    if args.input is not None:
        return load_instance(args.input)
    return generate_synthetic(*parse_gen_spec(args.gen), seed=args.seed)


def _engine_config(args, threads: int) -> EngineConfig:
    return EngineConfig(
        max_iter=args.max_iter, width_factor=args.width_factor, threads=threads, seed=args.seed,
        repair=RepairConfig.variant(args.variant, args.beta), repair_mode=args.repair,
        recompute_steiner=args.recompute_steiner)


def cmd_route(args) -> int:
    instance = _instance(args)
    config = _engine_config(args, args.threads)
    start = time.perf_counter()
    solution = run_engine(instance, config)
    elapsed = time.perf_counter() - start
    metrics = compute_metrics(solution, instance, elapsed, args.threads)
    report = build_report(instance, solution, metrics, {
        "max_iter": config.max_iter, "width_factor": config.width_factor, "threads": config.threads,
        "seed": config.seed, "beta": config.repair.beta, "variant": args.variant,
        "repair": config.repair_mode, "recompute_steiner": config.recompute_steiner})

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "routes.txt").write_text(format_routes(solution))
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    flat = format_flat_report(report)
    (out / "report.txt").write_text(flat)
    if args.svg:
        (out / "solution.svg").write_text(render_svg(solution, title=instance.name))
    sys.stdout.write(flat)
    return EXIT_OK if metrics.total_excess == 0 else EXIT_VIOLATION


def cmd_bench(args) -> int:
    instance = _instance(args)
    counts = [int(t) for t in args.threads_list.split(",")]
    try:
        rows = run_bench(instance, _engine_config(args, 1), counts)
    except DeterminismError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONDETERMINISTIC
    sys.stdout.write(format_bench(rows))
    if args.json:
        args.json.write_text(json.dumps([r.__dict__ for r in rows], indent=2) + "\n")
    return EXIT_OK


def cmd_render(args) -> int:
    instance = load_instance(args.input)
    if args.routes is None:
        svg = render_svg(None, graph=instance.graph, title=instance.name)
    else:
        width = args.width if args.width is not None else instance.width
        if width is None:
            raise InstanceError("no capacity: pass --width or add a 'width' line to the instance")
        routes = parse_routes(args.routes.read_text(), instance.graph)
        svg = render_svg(solution_from_routes(instance, routes, width), title=instance.name)
    args.out.write_text(svg)
    return EXIT_OK


def cmd_gen(args) -> int:
    instance = generate_synthetic(*parse_gen_spec(args.spec), seed=args.seed, width=args.width)
    text = dump_instance(instance)
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    instance = load_instance(args.input)
    res = enumerate_routings(instance, width=args.width)
    print(f"capacity = {res.capacity}")
    print(f"optimal_wire_length = {res.optimal_wire_length}")
    print(f"optimal_channel_width = {res.optimal_channel_width}")
    print(f"tree_counts = {list(res.tree_counts)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lagroute", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, metavar="{route,bench,render,gen}")

    p = sub.add_parser("route", help="route an instance and write routes/report files")
    _add_instance_args(p)
    _add_engine_args(p)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--svg", action="store_true", help="also write solution.svg")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("bench", help="time the engine at several thread counts")
    _add_instance_args(p)
    _add_engine_args(p)
    p.add_argument("--threads-list", default="1,2,4,8")
    p.add_argument("--json", type=Path)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="draw a routes file as SVG")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--routes", type=Path)
    p.add_argument("--width", type=int)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gen", help="write a synthetic instance file")
    p.add_argument("spec", metavar="RxC:NETS:TERMS")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle")  # debugging aid, not listed in help
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--width", type=int)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InstanceError, OracleSizeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
