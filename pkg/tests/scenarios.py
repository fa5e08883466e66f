"""Shared hybrid-loop scenarios for the unit and acceptance suites."""

from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np

from stoflp.ga import seed_chromosome
from stoflp.instance import Department, FlowModel, ProblemInstance
from stoflp.sim import SimSummary
from stoflp.slicing import decode

# planted candidate means per iteration; the first row is the reported batch
PLANTED_MEANS = [
    {-1.0: 3316002, 0.0: 3370616, 1.0: 3461362, 1.5: 3424912, 2.0: 3443006},
    {-1.0: 3316002, 0.0: 3370616, 1.5: 3424912, 2.0: 3443006, -0.5: 3301000},
    {-1.0: 3316002, 0.0: 3370616, 1.5: 3424912, -0.5: 3301000, -0.75: 3290000},
    {-1.0: 3127460, 0.0: 3127470, -0.5: 3127465, -0.75: 3127455, -0.625: 3127449},
]
EXPECTED_TRACE = [(1.0, -0.5), (2.0, -0.75), (1.5, -0.625)]


def stochastic_instance(n=6, seed=0):
    rng = np.random.default_rng(seed)
    areas = rng.uniform(1, 4, n)
    side = math.sqrt(areas.sum())
    lower = rng.uniform(1, 10, (n, n))
    np.fill_diagonal(lower, 0)
    upper = 2 * lower
    depts = [Department(i + 1, float(a), 4.0) for i, a in enumerate(areas)]
    return ProblemInstance(side, side, depts, FlowModel(lower, upper))


class PlantedBatch:
    """Stub solver/simulator pair returning planted means keyed by candidate ``b``."""

    def __init__(self, instance, means=PLANTED_MEANS, reps=1000, noise=1000.0):
        self.instance = instance
        self.means = means
        self.calls = 0
        e = np.random.default_rng(0).normal(size=reps)
        self.noise = (e - e.mean()) / e.std(ddof=1) * noise

    def solver(self, instance, flow, ga_config):
        i, j = 0, 1
        mu, sd = instance.flows.mean[i, j], instance.flows.std[i, j]
        b = round(float((flow[i, j] - mu) / sd), 9)
        return SimpleNamespace(layout=SimpleNamespace(b=b), seed=ga_config.rng_seed)

    def simulator(self, layouts, instance, rearr, config):
        table = self.means[min(self.calls, len(self.means) - 1)]
        self.calls += 1
        return SimSummary(np.array([table[lay.b] + self.noise for lay in layouts]))


def dominant_rearrangement_instance(cost=1e7, seed=3):
    """n = 6 dynamic instance whose initial layout is reachable and moving anything is ruinous."""
    n = 6
    rng = np.random.default_rng(seed)
    areas = rng.uniform(2, 4, n)
    side = math.sqrt(areas.sum())
    lower = rng.uniform(0.5, 2, (n, n))
    lower[4, 5] = lower[5, 4] = 30  # heaviest pair
    lower[0, 1] = lower[1, 0] = 20  # second pair
    np.fill_diagonal(lower, 0)
    upper = lower * 1.5
    depts = [Department(i + 1, float(a), 1e6) for i, a in enumerate(areas)]
    static = ProblemInstance(side, side, depts, FlowModel(lower, upper))
    start = decode(seed_chromosome(static, static.flows.mean, rng), static)
    return ProblemInstance(side, side, depts, static.flows, start.rects, (cost, 1.1 * cost))


def zero_rearrangement_instance(seed=5):
    base = dominant_rearrangement_instance(seed=seed)
    return ProblemInstance(
        base.width, base.height, base.departments, base.flows, base.initial_layout, (0.0, 0.0)
    )
