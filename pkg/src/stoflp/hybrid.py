"""Outer search over deterministic flow candidates ``mean + b * std``.

Each candidate gets a GA layout; all layouts are simulated on common random
flows and compared with one-way ANOVA.  While the ANOVA rejects equality, the
worst candidate is dropped and replaced by the average ``b`` of the two best.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import struct
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .ga import GaConfig, GaResult, run_ga
from .instance import ProblemInstance, candidate_flows
from .objective import default_eps, moved_flags
from .sim import SimConfig, SimSummary, simulate_batch
from .slicing import Layout
from .stats import AnovaTable, TukeyReport, one_way_anova, tukey_hsd

log = logging.getLogger(__name__)

DEFAULT_B_SET = (-1.0, 0.0, 1.0, 1.5, 2.0)
TRACE_FIELDS = ("iteration", "candidates", "means", "anova_p", "removed", "inserted", "note")


class HybridError(RuntimeError):
    """A candidate's GA run failed; ``trace`` holds the iterations completed so far."""

    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


@dataclass
class HybridConfig:
    initial_b_set: tuple[float, ...] = DEFAULT_B_SET
    time_limit: float = 3600.0
    alpha: float = 0.05
    ga: GaConfig = field(default_factory=GaConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    rng_seed: int = 0
    max_iterations: int = 50
    perturbation: float = 0.01

    def __post_init__(self):
        self.initial_b_set = tuple(float(b) for b in self.initial_b_set)
        if len(set(self.initial_b_set)) < 3:
            raise ValueError("the initial candidate set needs at least three distinct b values")


@dataclass
class FlowCandidate:
    b: float
    flow_matrix: np.ndarray
    result: GaResult | None = None
    sim_mean: float = math.nan

    @property
    def layout(self) -> Layout | None:
        return None if self.result is None else self.result.layout


@dataclass
class IterationRecord:
    iteration: int
    candidates: list[float]
    means: list[float]
    anova_p: float
    removed: float | None = None
    inserted: float | None = None
    note: str = ""


@dataclass
class HybridResult:
    layout: Layout
    b: float
    candidate: FlowCandidate
    trace: list[IterationRecord]
    summary: SimSummary
    anova: AnovaTable
    tukey: TukeyReport
    candidates: list[FlowCandidate]
    stop_reason: str


def candidate_seed(master: int, b: float) -> int:
    bits = struct.unpack("<II", struct.pack("<d", float(b)))
    return int(np.random.SeedSequence(master, spawn_key=bits).generate_state(1, np.uint64)[0])


def replacement(
    bs: list[float],
    means,
    retired: set[float] = frozenset(),
    step: float = 0.01,
) -> tuple[float, float, str]:
    """Pick the worst candidate to drop and the averaged ``b`` that replaces it.

    Returns ``(removed_b, new_b, note)``.  A new value that collides with a
    live or previously removed ``b`` is nudged by ``step`` toward the best
    candidate's side until it is unique.
    """
    order = np.argsort(np.asarray(means, dtype=float), kind="stable")
    worst = bs[int(order[-1])]
    best, second = bs[int(order[0])], bs[int(order[1])]
    new = (best + second) / 2
    note = ""
    taken = set(bs) | set(retired)
    direction = math.copysign(1.0, best - second) if best != second else 1.0
    while any(abs(new - t) <= 1e-12 for t in taken):
        new += step * direction
        note = "perturbed duplicate b"
    return worst, new, note


def _default_solver(instance, flow, ga_config):
    return run_ga(instance, flow, ga_config)


def run_hybrid(
    instance: ProblemInstance,
    config: HybridConfig | None = None,
    solver=None,
    simulator=None,
) -> HybridResult:
    config = config or HybridConfig()
    solver = solver or _default_solver
    simulator = simulator or simulate_batch
    if instance.flows.is_deterministic and instance.initial_layout is None:
        log.warning("flows are deterministic and there is no initial layout; the candidate search is vacuous")

    cands = [FlowCandidate(b, candidate_flows(instance.flows, b)) for b in config.initial_b_set]
    retired: set[float] = set()
    trace: list[IterationRecord] = []
    start = time.monotonic()
    iteration = 0
    while True:
        iteration += 1
        for c in cands:
            if c.result is None:
                ga_cfg = replace(config.ga, rng_seed=candidate_seed(config.rng_seed, c.b))
                try:
                    c.result = solver(instance, c.flow_matrix, ga_cfg)
                except Exception as exc:
                    raise HybridError(f"GA failed for b={_fmt_b(c.b)}: {exc}", trace) from exc
        summary = simulator([c.layout for c in cands], instance, None, config.sim)
        for c, m in zip(cands, summary.means):
            c.sim_mean = float(m)
        anova = one_way_anova(summary.groups)
        tukey = tukey_hsd(summary, config.alpha, labels=[_fmt_b(c.b) for c in cands])
        rec = IterationRecord(iteration, [c.b for c in cands], [c.sim_mean for c in cands], anova.p)
        trace.append(rec)
        log.info("iteration %d: b=%s p=%.4g", iteration, rec.candidates, anova.p)

        if anova.p >= config.alpha:
            reason = "equality not rejected"
            break
        if time.monotonic() - start > config.time_limit:
            reason = "time limit"
            break
        if iteration >= config.max_iterations:
            reason = "iteration limit"
            break
        removed, new_b, note = replacement([c.b for c in cands], summary.means, retired, config.perturbation)
        if note:
            log.info("b=%s collided with an earlier candidate; %s", new_b, note)
        rec.removed, rec.inserted, rec.note = removed, new_b, note
        retired.add(removed)
        cands = [c for c in cands if c.b != removed]
        cands.append(FlowCandidate(new_b, candidate_flows(instance.flows, new_b)))

    best = min(cands, key=lambda c: c.sim_mean)
    rec.note = (rec.note + "; " if rec.note else "") + f"stop: {reason}"
    return HybridResult(best.layout, best.b, best, trace, summary, anova, tukey, cands, reason)


def winner_moved(result: HybridResult, instance: ProblemInstance) -> np.ndarray:
    if instance.initial_layout is None:
        return np.zeros(instance.n, dtype=bool)
    return moved_flags(result.layout.rects, instance.initial_layout, default_eps(instance))


def _fmt_b(b: float) -> str:
    return f"{b:g}"


def write_trace(trace: list[IterationRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_FIELDS)
    for r in trace:
        w.writerow(
            [
                r.iteration,
                ";".join(_fmt_b(b) for b in r.candidates),
                ";".join(repr(m) for m in r.means),
                repr(r.anova_p),
                "" if r.removed is None else _fmt_b(r.removed),
                "" if r.inserted is None else _fmt_b(r.inserted),
                r.note,
            ]
        )


def trace_csv(trace: list[IterationRecord]) -> str:
    buf = io.StringIO()
    write_trace(trace, buf)
    return buf.getvalue()
