"""Outer routing loop: parallel per-net Steiner routing, multiplier updates,
channel-width tightening, then feasibility repair.

Each iteration routes every net against a frozen multiplier vector, so nets
are independent and the phase is farmed out to worker processes (CPython
threads would serialise on the interpreter lock). Each task writes only its
own nets' results and the join preserves net order, so the outcome does not
depend on the worker count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import GridGraph, Instance, Net
from .lagrange import LagrangeState, edge_usage, update_multipliers
from .repair import RepairConfig, repair_all
from .solution import IterationRecord, Solution
from .steiner import CostView, RouteTree, route_net

logger = logging.getLogger(__name__)

REPAIR_MODES = ("post", "per-iter", "off")


@dataclass(frozen=True)
class EngineConfig:
    max_iter: int = 50
    width_factor: float = 1.2
    threads: int = 1
    seed: int = 0
    repair: RepairConfig = field(default_factory=RepairConfig)
    repair_mode: str = "post"
    recompute_steiner: bool = False
    chunks_per_thread: int = 4

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.width_factor < 1.0:
            raise ValueError("width_factor must be >= 1.0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.repair_mode not in REPAIR_MODES:
            raise ValueError(f"repair_mode must be one of {REPAIR_MODES}")


_worker: dict = {}


def _init_worker(graph: GridGraph, seed: int, recompute: bool) -> None:
    _worker.update(graph=graph, seed=seed, recompute=recompute)


def _route_chunk(lam: np.ndarray, nets: list[Net], first: bool):
    view = CostView(_worker["graph"], lam)
    out = []
    for net in nets:
        tree, routed = route_net(view, net, first, seed=_worker["seed"],
                                 recompute_steiner=_worker["recompute"])
        out.append((tree, routed.steiner_points))
    return out


class _Router:
    """Runs the per-net routing phase, in-process or on a process pool."""

    def __init__(self, graph: GridGraph, config: EngineConfig):
        self.graph = graph
        self.config = config
        self.pool = None

    def __enter__(self):
        if self.config.threads > 1:
            self.pool = ProcessPoolExecutor(
                self.config.threads, initializer=_init_worker,
                initargs=(self.graph, self.config.seed, self.config.recompute_steiner))
        else:
            _init_worker(self.graph, self.config.seed, self.config.recompute_steiner)
        return self

    def __exit__(self, *exc):
        if self.pool is not None:
            self.pool.shutdown()
            self.pool = None

    def route(self, nets: list[Net], lam: np.ndarray, first: bool) -> tuple[list[RouteTree], list[Net]]:
        if self.pool is None:
            results = _route_chunk(lam, nets, first)
        else:
            n_chunks = min(len(nets), self.config.threads * self.config.chunks_per_thread)
            bounds = np.linspace(0, len(nets), n_chunks + 1).astype(int)
            futures = [self.pool.submit(_route_chunk, lam, nets[lo:hi], first)
                       for lo, hi in zip(bounds[:-1], bounds[1:])]
            results = [r for f in futures for r in f.result()]
        trees = [tree for tree, _ in results]
        routed = [Net(net.id, net.terminals, pts) for net, (_, pts) in zip(nets, results)]
        return trees, routed


def initial_width(w_min: int, width_factor: float) -> int:
    return max(1, math.ceil(width_factor * w_min - 1e-9))


def width_schedule(solution: Solution, current_width: int) -> int:
    """Tighten ``W`` to one below the peak usage after a feasible iteration."""
    peak = solution.max_usage()
    if peak <= current_width:
        solution.best_feasible_width = current_width
        return max(1, peak - 1)
    return current_width


@dataclass
class _Iterate:
    """Compact copy of one iteration's routing, kept for incumbent selection."""

    iteration: int
    nets: tuple[Net, ...]
    flat_edges: np.ndarray
    offsets: np.ndarray
    costs: np.ndarray
    usage: np.ndarray

    @classmethod
    def capture(cls, iteration: int, solution: Solution) -> "_Iterate":
        sizes = [len(t.edges) for t in solution.trees]
        flat = np.fromiter((e for t in solution.trees for e in sorted(t.edges)), dtype=np.int32,
                           count=sum(sizes))
        return cls(iteration, solution.nets, flat, np.cumsum([0] + sizes),
                   np.array([t.cost for t in solution.trees]), solution.usage.copy())

    def key(self, width: int) -> tuple:
        excess = int(np.maximum(0, self.usage - width).sum())
        return excess, int(self.usage.max()), len(self.flat_edges), self.iteration

    def trees(self) -> list[RouteTree]:
        return [RouteTree(net.id, frozenset(self.flat_edges[lo:hi].tolist()), float(c))
                for net, lo, hi, c in zip(self.nets, self.offsets[:-1], self.offsets[1:], self.costs)]


def run_engine(instance: Instance, config: EngineConfig = EngineConfig(), observer=None) -> Solution:
    """Route ``instance``; return the best iterate at the final ``W``, repaired.

    Every iteration's routing is kept in compact form. Once the loop ends, the
    iterate with the least excess at the final budget (then lower peak usage,
    then shorter wire length, then earliest) becomes the solution. If repair
    cannot make it feasible, the same choice is redone at the narrowest width
    that some iteration satisfied.

    ``observer``, if given, is called as ``observer(record, lam)`` after each
    multiplier update, with a copy of the new multipliers.
    """
    graph = instance.graph
    nets = list(instance.nets)
    state = LagrangeState.initial(graph.n_edges)
    history: list[IterationRecord] = []
    iterates: list[_Iterate] = []
    best_feasible = None

    with _Router(graph, config) as router:
        trees, nets = router.route(nets, state.lam, first=True)
        if instance.width is None:
            w_min = int(edge_usage(graph.n_edges, trees).max())
            logger.info("estimated W_min = %d from the lambda=0 pass", w_min)
        else:
            w_min = instance.width
        width = start_width = initial_width(w_min, config.width_factor)

        for it in range(1, config.max_iter + 1):
            if it > 1:
                trees, nets = router.route(nets, state.lam, first=False)
            solution = Solution(graph, tuple(nets), list(trees), edge_usage(graph.n_edges, trees),
                                width, state.lam, best_feasible, start_width)
            if config.repair_mode == "per-iter":
                repair_all(solution, config.repair)
            iterates.append(_Iterate.capture(it, solution))
            violation = solution.total_violation()
            state = update_multipliers(state, solution.usage, width)
            history.append(IterationRecord(it, width, violation, solution.max_usage(),
                                           solution.wire_length(), state.last_step))
            logger.debug("iter %d: W=%d violation=%d step=%.4g", it, width, violation, state.last_step)
            if observer is not None:
                observer(history[-1], state.lam.copy())
            evaluated_width = width
            width = width_schedule(solution, width)
            best_feasible = solution.best_feasible_width
            if violation == 0 and width == evaluated_width:
                break

    def select(width: int) -> Solution:
        best = min(iterates, key=lambda r: r.key(width))
        sol = Solution(graph, best.nets, best.trees(), best.usage.copy(), width, state.lam,
                       best_feasible, start_width, history)
        if config.repair_mode == "post":
            sol.repair_report = repair_all(sol, config.repair)
        return sol

    solution = select(evaluated_width)
    if solution.total_violation() and best_feasible is not None and best_feasible != evaluated_width:
        # the last probe was too tight; fall back to the narrowest width that was met
        logger.info("W=%d left a residual violation; reverting to W=%d", evaluated_width, best_feasible)
        solution = select(best_feasible)
    if solution.max_usage() <= solution.width:
        solution.width = solution.max_usage()
    return solution
