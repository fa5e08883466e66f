from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from stoflp.instance import Department, FlowModel, ProblemInstance
from stoflp.objective import handling_cost
from stoflp.slicing import Chromosome, decode


def random_instance(n, rng, max_ratio=4.0, stochastic=False, aspect=None, flow_scale=10):
    areas = rng.uniform(1.0, 6.0, n)
    total = areas.sum()
    aspect = aspect if aspect is not None else rng.uniform(0.6, 1.6)
    width = math.sqrt(total * aspect)
    height = total / width
    lower = rng.integers(0, flow_scale, (n, n)).astype(float)
    np.fill_diagonal(lower, 0)
    upper = lower + (rng.integers(0, flow_scale, (n, n)) if stochastic else 0)
    np.fill_diagonal(upper, 0)
    depts = [Department(i + 1, float(a), max_ratio) for i, a in enumerate(areas)]
    return ProblemInstance(width, height, depts, FlowModel(lower, upper))


def all_chromosomes(n):
    for dept in itertools.permutations(range(1, n + 1)):
        for slices in itertools.permutations(range(1, n)):
            for orient in itertools.product((0, 1), repeat=n - 1):
                yield Chromosome(dept, slices, orient)


def enumerate_best(instance, flow):
    """Minimal handling cost over feasible layouts, by exhaustive enumeration."""
    best = math.inf
    best_any = math.inf
    for chrom in all_chromosomes(instance.n):
        layout = decode(chrom, instance)
        cost = handling_cost(layout, flow)
        best_any = min(best_any, cost)
        if layout.p_inf == 0:
            best = min(best, cost)
    return best, best_any


def reference_decode(chrom, width, height, areas):
    """Recursive slicing-tree decoder used as an independent oracle.

    Within a position range the first slice applied is the one that appears
    earliest in the slice row; it splits the range and each side recurses.
    """
    rank = {k: i for i, k in enumerate(chrom.slices)}
    orient = {k: chrom.orient[i] for i, k in enumerate(chrom.slices)}
    out = {}

    def area(p, q):
        return sum(areas[chrom.dept[i] - 1] for i in range(p, q + 1))

    def split(p, q, x, y, w, h):
        if p == q:
            out[chrom.dept[p]] = (x, y, w, h)
            return
        k = min(range(p + 1, q + 1), key=lambda s: rank[s])  # slice k sits between positions k-1, k (0-based)
        left, right = area(p, k - 1), area(k, q)
        if orient[k]:
            wl = w * left / (left + right)
            split(p, k - 1, x, y, wl, h)
            split(k, q, x + wl, y, w - wl, h)
        else:
            hl = h * left / (left + right)
            split(p, k - 1, x, y, w, hl)
            split(k, q, x, y + hl, w, h - hl)

    split(0, chrom.n - 1, 0.0, 0.0, width, height)
    return np.array([out[i] for i in range(1, chrom.n + 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
