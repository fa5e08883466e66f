"""Monte Carlo cost of fixed layouts under uniform random flows.

Every replication draws one flow matrix and applies it to all layouts in the
batch (common random numbers).  Replications are generated in fixed-size
blocks, each with its own seed derived from ``(rng_seed, block index)``, so
results do not depend on how blocks are spread over threads.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .instance import ProblemInstance
from .objective import default_eps, moved_flags
from .slicing import Layout, rectilinear_distances

BLOCK = 500


@dataclass
class SimConfig:
    replications: int = 10_000
    rng_seed: int = 0
    life_cycle_scale: float | None = None  # None: take it from the instance
    threads: int = 1

    def __post_init__(self):
        if self.replications < 2:
            raise ValueError("need at least two replications")


@dataclass
class SimSummary:
    samples: np.ndarray  # (layouts, replications)

    @property
    def means(self) -> np.ndarray:
        return self.samples.mean(axis=1)

    @property
    def variances(self) -> np.ndarray:
        # shifting by the first sample keeps constant rows at exactly zero
        return (self.samples - self.samples[:, :1]).var(axis=1, ddof=1)

    @property
    def counts(self) -> np.ndarray:
        return np.full(self.samples.shape[0], self.samples.shape[1])

    @property
    def groups(self) -> list[np.ndarray]:
        return list(self.samples)

    def write_csv(self, fh, labels=None) -> None:
        labels = labels or [str(i + 1) for i in range(self.samples.shape[0])]
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["layout", "replication", "cost"])
        for label, row in zip(labels, self.samples):
            for r, c in enumerate(row, start=1):
                w.writerow([label, r, repr(float(c))])


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def simulate_batch(
    layouts: list[Layout],
    instance: ProblemInstance,
    rearr=None,
    config: SimConfig | None = None,
) -> SimSummary:
    """Replication costs ``T * sum F_ij d_ij + sum_i Re_i * ReCost_i`` for every layout.

    ``rearr`` holds one boolean flag vector (or assessment with ``.moved``) per
    layout.  When omitted, flags are computed against the instance's initial
    layout, or all zero in static mode.
    """
    config = config or SimConfig()
    n = instance.n
    if not layouts:
        raise ValueError("no layouts to simulate")
    T = instance.life_cycle_scale if config.life_cycle_scale is None else config.life_cycle_scale

    if rearr is None:
        if instance.initial_layout is None:
            flags = np.zeros((len(layouts), n))
        else:
            eps = default_eps(instance)
            flags = np.array([moved_flags(l.rects, instance.initial_layout, eps) for l in layouts], dtype=float)
    else:
        flags = np.array([getattr(r, "moved", r) for r in rearr], dtype=float)
        if flags.shape != (len(layouts), n):
            raise ValueError("one rearrangement flag vector per layout is required")
    if flags.any() and instance.rearrange_cost is None:
        raise ValueError("rearrangement flags are set but the instance has no rearrangement cost")

    dist = np.stack([rectilinear_distances(l) for l in layouts])  # (L, n, n)
    lower, upper = instance.flows.lower, instance.flows.upper
    rc = instance.rearrange_cost
    reps = config.replications
    blocks = [(b, min(BLOCK, reps - b * BLOCK)) for b in range((reps + BLOCK - 1) // BLOCK)]

    def run_block(job):
        b, m = job
        rng = _block_rng(config.rng_seed, b)
        F = rng.uniform(lower, upper, size=(m, n, n))
        cost = T * np.einsum("rij,lij->lr", F, dist)
        if rc is not None:
            # departments share one cost draw per replication across layouts
            R = rng.uniform(rc[0], rc[1], size=(m, n))
            cost += flags @ R.T
        return cost

    if config.threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            parts = list(pool.map(run_block, blocks))
    else:
        parts = [run_block(job) for job in blocks]
    return SimSummary(np.concatenate(parts, axis=1))
