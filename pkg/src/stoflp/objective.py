"""Material-handling cost with the adaptive infeasibility penalty.

The penalized objective of a layout is::

    sum_{i != j} f_ij d_ij + p_inf * (V_feas - V_all) + sum_i Re_i * ReCost_i

where ``V_feas`` / ``V_all`` are the best handling costs seen so far over
fully feasible layouts / over all layouts.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .instance import ProblemInstance
from .slicing import Layout, rectilinear_distances


def handling_cost(layout: Layout, flow: np.ndarray) -> float:
    flow = np.asarray(flow, dtype=float)
    if flow.shape != (layout.n, layout.n):
        raise ValueError(f"flow matrix shape {flow.shape} does not match {layout.n} departments")
    d = rectilinear_distances(layout)
    np.fill_diagonal(d, 0.0)
    return float(np.sum(flow * d))


@dataclass
class PenaltyState:
    v_feas: float = float("inf")
    v_all: float = float("inf")
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def initialized(self) -> bool:
        return self.v_all != float("inf")

    @property
    def has_feasible(self) -> bool:
        return self.v_feas != float("inf")

    def update(self, cost: float, p_inf: int) -> None:
        with self._lock:
            if cost < self.v_all:
                self.v_all = cost
            if p_inf == 0 and cost < self.v_feas:
                self.v_feas = cost

    def gap(self) -> float:
        # no feasible layout yet: no penalty
        if not self.has_feasible:
            return 0.0
        return max(0.0, self.v_feas - self.v_all)

    def penalty(self, p_inf: int) -> float:
        return p_inf * self.gap() if p_inf else 0.0


@dataclass(frozen=True)
class RearrangementAssessment:
    moved: np.ndarray  # Re_i flags
    costs: np.ndarray  # ReCost_i

    @property
    def total(self) -> float:
        return float(np.dot(self.moved, self.costs))

    @classmethod
    def static(cls, n: int) -> RearrangementAssessment:
        return cls(np.zeros(n, dtype=bool), np.zeros(n))


def default_eps(instance: ProblemInstance) -> float:
    return 1e-6 * max(instance.width, instance.height)


def moved_flags(rects: np.ndarray, initial: np.ndarray, eps: float) -> np.ndarray:
    rects = np.asarray(rects, dtype=float)
    initial = np.asarray(initial, dtype=float)
    if rects.shape != initial.shape:
        raise ValueError("layouts cover different department sets")
    c = rects[:, :2] + rects[:, 2:] / 2
    c0 = initial[:, :2] + initial[:, 2:] / 2
    shift = np.abs(c - c0).sum(axis=1)
    resized = np.abs(rects[:, 2:] - initial[:, 2:]).max(axis=1)
    return (shift > eps) | (resized > eps)


def assess_rearrangement(
    layout: Layout,
    initial,
    eps: float,
    cost: float | np.ndarray = 0.0,
) -> RearrangementAssessment:
    """Flag departments whose centre moved or whose shape changed by more than ``eps``.

    ``initial`` may be a :class:`Layout` or an ``(n, 4)`` rect array.  ``cost``
    is the per-department rearrangement cost attached to the assessment.
    """
    rects0 = initial.rects if isinstance(initial, Layout) else initial
    moved = moved_flags(layout.rects, rects0, eps)
    costs = np.broadcast_to(np.asarray(cost, dtype=float), moved.shape).copy()
    return RearrangementAssessment(moved, costs)


def search_rearrangement(layout: Layout, instance: ProblemInstance) -> RearrangementAssessment:
    """Deterministic rearrangement term used during GA search (interval midpoint cost)."""
    if instance.initial_layout is None:
        return RearrangementAssessment.static(instance.n)
    lo, hi = instance.rearrange_cost
    return assess_rearrangement(layout, instance.initial_layout, default_eps(instance), (lo + hi) / 2)


def penalized_objective(
    layout: Layout,
    flow: np.ndarray,
    state: PenaltyState,
    rearr: RearrangementAssessment | None = None,
) -> float:
    cost = handling_cost(layout, flow)
    p_inf = layout.p_inf
    state.update(cost, p_inf)
    extra = rearr.total if rearr is not None else 0.0
    return cost + state.penalty(p_inf) + extra
