"""Lagrange-relaxed parallel Steiner routing on grid graphs with feasibility repair."""

from .engine import EngineConfig, run_engine, width_schedule
from .grid import GridGraph, Instance, InstanceError, Net, ParseError, build_grid, generate_synthetic, load_instance
from .lagrange import LagrangeState, step_size, subgradient, update_multipliers
from .metrics import MetricsReport, compute_metrics, critical_path_delay, geo_mean
from .repair import RepairConfig, compute_threshold, find_alternate_paths, repair_all, repair_edge
from .solution import Solution
from .steiner import CostView, RouteTree, find_steiner_candidates, metric_closure_mst, route_net, shortest_path

__version__ = "0.1.0"

__all__ = [
    "CostView", "EngineConfig", "GridGraph", "Instance", "InstanceError", "LagrangeState", "MetricsReport",
    "Net", "ParseError", "RepairConfig", "RouteTree", "Solution", "build_grid", "compute_metrics",
    "compute_threshold", "critical_path_delay", "find_alternate_paths", "find_steiner_candidates",
    "generate_synthetic", "geo_mean", "load_instance", "metric_closure_mst", "repair_all", "repair_edge",
    "route_net", "run_engine", "shortest_path", "step_size", "subgradient", "update_multipliers",
    "width_schedule",
]
