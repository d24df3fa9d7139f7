"""Primal-dual sub-gradient update of the per-edge capacity multipliers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LagrangeState:
    """Multipliers ``lam`` and the bookkeeping of the last update.

    ``k`` is the index of the next update (starts at 1). ``last_step`` and
    ``kkt_vector`` record the step size and residual used by the previous one.
    """

    lam: np.ndarray
    k: int = 1
    last_step: float = 0.0
    kkt_vector: np.ndarray = field(default=None)

    @classmethod
    def initial(cls, n_edges: int) -> "LagrangeState":
        return cls(np.zeros(n_edges), 1, 0.0, np.zeros(n_edges))


def edge_usage(n_edges: int, trees) -> np.ndarray:
    """Number of route trees using each edge."""
    usage = np.zeros(n_edges, dtype=np.int64)
    for tree in trees:
        edges = getattr(tree, "edges", tree)
        if edges:
            usage[np.fromiter(edges, dtype=np.int64, count=len(edges))] += 1
    return usage


def subgradient(usage: np.ndarray, width: int) -> np.ndarray:
    """Clamped capacity excess ``max(0, usage - W)`` per edge."""
    return np.maximum(0, np.asarray(usage, dtype=np.float64) - width)


def kkt_residual(usage: np.ndarray, width: int) -> np.ndarray:
    # Dual feasibility holds by construction (lam >= 0), so only the primal
    # excess is left in the residual.
    return subgradient(usage, width)


def step_size(state: LagrangeState, kkt_vector: np.ndarray) -> float:
    """``(1/k) / ||T||_2``, or 0 once the residual vanishes."""
    if state.k < 1:
        raise ValueError("iteration counter must be >= 1")
    norm = float(np.linalg.norm(kkt_vector))
    if norm == 0.0:
        return 0.0
    return (1.0 / state.k) / norm


def update_multipliers(state: LagrangeState, usage: np.ndarray, width: int) -> LagrangeState:
    g = subgradient(usage, width)
    t = kkt_residual(usage, width)
    alpha = step_size(state, t)
    lam = state.lam + alpha * g if alpha else state.lam.copy()
    return LagrangeState(lam, state.k + 1, alpha, t)
