"""Island-model genetic algorithm over slicing-tree chromosomes."""

from __future__ import annotations

import csv
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .instance import ProblemInstance
from .objective import PenaltyState, handling_cost, search_rearrangement
from .slicing import Chromosome, Layout, decode

log = logging.getLogger(__name__)

# (low, high, low_inclusive, crossover, mutation, migration); bins partition [0, inf)
RATE_TABLE: tuple[tuple[float, float, bool, float, float, float], ...] = (
    (0.0, 0.0, True, 0.61, 0.31, 0.08),
    (0.0, 1.0, False, 0.67, 0.27, 0.06),
    (1.0, 2.0, True, 0.77, 0.19, 0.04),
    (2.0, 4.0, True, 0.80, 0.15, 0.05),
    (4.0, 6.0, True, 0.87, 0.10, 0.03),
    (6.0, 8.0, True, 0.89, 0.08, 0.03),
    (8.0, math.inf, True, 0.92, 0.05, 0.02),
)


@dataclass
class GaConfig:
    population_size: int = 70
    islands: int = 4
    stall_limit: int = 300
    max_generations: int = 1000
    rate_table: tuple = RATE_TABLE
    rng_seed: int = 0
    flip_prob: float = 0.5
    threads: int = 1

    def __post_init__(self):
        # the published table's last row sums to 0.99; any shortfall goes to mutation
        for row in self.rate_table:
            if abs(sum(row[3:]) - 1.0) > 0.01 + 1e-9:
                raise ValueError(f"rate row {row} does not sum to 1")
        if self.population_size < 4:
            raise ValueError("population_size must be at least 4")
        if self.islands < 1:
            raise ValueError("need at least one island")


class ImprovementHistory:
    """Improvement percentages of the last five generations."""

    def __init__(self, window: int = 5):
        self.values: deque[float] = deque(maxlen=window)

    def record(self, prev_best: float, new_best: float) -> float:
        if prev_best > 0 and math.isfinite(prev_best):
            pct = max(0.0, 100.0 * (prev_best - new_best) / prev_best)
        else:
            pct = 0.0
        self.values.append(pct)
        return pct

    @property
    def impr(self) -> float:
        return sum(self.values) / len(self.values) if self.values else 0.0


def operator_shares(impr: float | ImprovementHistory, table=RATE_TABLE) -> tuple[float, float, float]:
    if isinstance(impr, ImprovementHistory):
        impr = impr.impr
    if impr < 0:
        raise ValueError("improvement percentage cannot be negative")
    for lo, hi, lo_inclusive, cx, mut, mig in table:
        if lo == hi:
            if impr == lo:
                return cx, mut, mig
        elif (impr >= lo if lo_inclusive else impr > lo) and impr < hi:
            return cx, mut, mig
    raise ValueError(f"rate table does not cover Impr = {impr}")


# -- heuristic seeding --------------------------------------------------------------


def top_pairs(flow: np.ndarray) -> tuple[tuple[int, int], tuple[int, int]]:
    """The two disjoint department pairs (1-based) with the largest two-way flow."""
    s = flow + flow.T
    n = s.shape[0]
    iu, ju = np.triu_indices(n, 1)
    order = np.argsort(-s[iu, ju], kind="stable")
    first = (int(iu[order[0]]) + 1, int(ju[order[0]]) + 1)
    for k in order[1:]:
        pair = (int(iu[k]) + 1, int(ju[k]) + 1)
        if not set(pair) & set(first):
            return first, pair
    raise ValueError("need at least four departments for two disjoint pairs")


def seed_chromosome(
    instance: ProblemInstance,
    flow: np.ndarray,
    rng: np.random.Generator,
    pairs: tuple[tuple[int, int], tuple[int, int]] | None = None,
) -> Chromosome:
    """Random chromosome that keeps the two heaviest-flow pairs adjacent.

    The heaviest pair sits at the end of the department row with slice
    ``n-1`` applied last; the second pair sits at the start with slice 2
    immediately followed by slice 1.
    """
    n = instance.n
    if n < 5:
        log.info("n=%d is too small for heuristic seeding; using a random chromosome", n)
        return Chromosome.random(n, rng)
    first, second = pairs or top_pairs(flow)
    head = list(first)
    if rng.integers(2):
        head.reverse()
    rest = [d for d in range(1, n + 1) if d not in first and d not in second]
    middle = [rest[i] for i in rng.permutation(len(rest))]
    dept = [*second, *middle, *head]

    slices: list[int | None] = [None] * (n - 1)
    slices[n - 2] = n - 1
    pos = int(rng.integers(1, n - 1))  # 1..n-2
    if pos != n - 2:
        slices[pos - 1], slices[pos] = 2, 1
    elif rng.integers(2):
        slices[n - 4], slices[n - 3] = 2, 1
    else:
        slices[0], slices[1] = 2, 1
    free = [i for i, v in enumerate(slices) if v is None]
    numbers = list(range(3, n - 1))
    for i, k in zip(free, rng.permutation(len(numbers))):
        slices[i] = numbers[k]
    orient = tuple(int(b) for b in rng.integers(0, 2, n - 1))
    return Chromosome(tuple(dept), tuple(slices), orient)


# -- recombination ------------------------------------------------------------------


def _one_point(head_parent, tail_parent, c):
    head = list(head_parent[:c])
    taken = set(head)
    tail = [g for g in tail_parent[c:] if g not in taken]
    taken.update(tail)
    missing = [g for g in tail_parent if g not in taken]
    return tuple(head + missing + tail)


def _two_point(outer_parent, middle_parent, c1, c2):
    middle = list(middle_parent[c1:c2])
    taken = set(middle)
    rest = [g for g in outer_parent if g not in taken]
    return tuple(rest[:c1] + middle + rest[c1:])


def one_point_crossover(p1: Chromosome, p2: Chromosome, rng=None, cut: int | None = None):
    n = p1.n
    if p2.n != n:
        raise ValueError("parents differ in size")
    c = cut if cut is not None else int(rng.integers(1, n))
    cs = min(c, n - 2)
    c1 = Chromosome(
        _one_point(p1.dept, p2.dept, c),
        _one_point(p1.slices, p2.slices, cs),
        p1.orient[:cs] + p2.orient[cs:],
    )
    c2 = Chromosome(
        _one_point(p2.dept, p1.dept, c),
        _one_point(p2.slices, p1.slices, cs),
        p2.orient[:cs] + p1.orient[cs:],
    )
    return c1, c2


def two_point_crossover(p1: Chromosome, p2: Chromosome, rng=None, cuts: tuple[int, int] | None = None):
    """Child 1 takes parent 2's middle segment ``(c1, c2]`` and parent 1's order elsewhere."""
    n = p1.n
    if p2.n != n:
        raise ValueError("parents differ in size")
    if cuts is None and n > 2:
        a = 1 + int(rng.integers(n - 1))
        b = 1 + int(rng.integers(n - 2))
        if b >= a:
            b += 1
        a, b = min(a, b), max(a, b)
    elif cuts is None:
        a, b = 0, 1
    else:
        a, b = cuts
    sa, sb = min(a, n - 2), min(b, n - 1)
    c1 = Chromosome(
        _two_point(p1.dept, p2.dept, a, b),
        _two_point(p1.slices, p2.slices, sa, sb),
        p1.orient[:sa] + p2.orient[sa:sb] + p1.orient[sb:],
    )
    c2 = Chromosome(
        _two_point(p2.dept, p1.dept, a, b),
        _two_point(p2.slices, p1.slices, sa, sb),
        p2.orient[:sa] + p1.orient[sa:sb] + p2.orient[sb:],
    )
    return c1, c2


def swap_positions(n: int) -> tuple[int, int]:
    """Inclusive 1-based position range eligible for the mutation swap."""
    if n >= 6:
        return 3, n - 2
    if n >= 4:
        return 2, n - 1
    return 1, n


def mutate(
    parent: Chromosome,
    rng: np.random.Generator,
    positions: tuple[int, int] | None = None,
    flip_prob: float = 0.5,
) -> Chromosome:
    """Swap two interior department positions; optionally flip one orientation bit."""
    n = parent.n
    if positions is None:
        lo, hi = swap_positions(n)
        a = lo + int(rng.integers(hi - lo + 1))
        b = lo + int(rng.integers(hi - lo))
        if b >= a:
            b += 1
        a, b = min(a, b), max(a, b)
    else:
        a, b = positions
    dept = list(parent.dept)
    dept[a - 1], dept[b - 1] = dept[b - 1], dept[a - 1]
    orient = parent.orient
    if flip_prob > 0 and rng is not None and rng.random() < flip_prob:
        k = int(rng.integers(len(orient)))
        orient = orient[:k] + (1 - orient[k],) + orient[k + 1 :]
    return Chromosome(tuple(dept), parent.slices, orient)


# -- evaluation ---------------------------------------------------------------------


@dataclass(frozen=True)
class Individual:
    chrom: Chromosome
    handling: float
    p_inf: int
    rearrangement: float

    def fitness(self, gap: float) -> float:
        return self.handling + self.p_inf * gap + self.rearrangement


class Evaluator:
    """Caches the pure, state-independent part of a chromosome's objective."""

    def __init__(self, instance: ProblemInstance, flow: np.ndarray):
        self.instance = instance
        self.flow = np.asarray(flow, dtype=float)
        self.cache: dict[Chromosome, Individual] = {}
        self.dynamic = instance.initial_layout is not None

    def __call__(self, chrom: Chromosome) -> Individual:
        hit = self.cache.get(chrom)
        if hit is not None:
            return hit
        layout = decode(chrom, self.instance, validate=False)
        rearr = search_rearrangement(layout, self.instance).total if self.dynamic else 0.0
        ind = Individual(chrom, handling_cost(layout, self.flow), layout.p_inf, rearr)
        self.cache[chrom] = ind
        return ind


def migrate(islands: list[list], share: float | list[float], population_size: int, key) -> list[list]:
    """Ring migration: the ``ceil(share * P)`` best of island k replace the worst of island k+1."""
    k = len(islands)
    if k < 2:
        return [list(p) for p in islands]
    shares = share if isinstance(share, (list, tuple)) else [share] * k
    ranked = [sorted(pop, key=key) for pop in islands]
    out = [list(r) for r in ranked]
    for src in range(k):
        m = min(math.ceil(shares[src] * population_size), population_size - 1)
        if m <= 0:
            continue
        dst = (src + 1) % k
        out[dst] = out[dst][: len(out[dst]) - m] + ranked[src][:m]
    return out


@dataclass
class GenerationRecord:
    generation: int
    island: int
    best: float
    mean: float
    impr: float
    crossover: float
    mutation: float
    migration: float


LOG_FIELDS = ("generation", "island", "best", "mean", "impr", "crossover", "mutation", "migration")


def write_generation_log(records: list[GenerationRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(LOG_FIELDS)
    for r in records:
        w.writerow([r.generation, r.island, repr(r.best), repr(r.mean), repr(r.impr), r.crossover, r.mutation, r.migration])


@dataclass
class GaResult:
    chromosome: Chromosome
    layout: Layout
    objective: float
    handling: float
    generations: int
    log: list[GenerationRecord] = field(repr=False)
    state: PenaltyState = field(repr=False)


def _breed(pop, fits, shares, size, evaluate, rng, flip_prob):
    best = min(range(len(pop)), key=fits.__getitem__)
    offspring = [pop[best]]  # elitism
    n_cx = 2 * int(shares[0] * size // 2)
    n_cx = min(n_cx, 2 * ((size - 1) // 2))
    n_mut = size - 1 - n_cx
    # binary tournaments, drawn up front
    draws = rng.integers(len(pop), size=(n_cx + n_mut, 2)).tolist()
    winners = [pop[i] if fits[i] <= fits[j] else pop[j] for i, j in draws]
    for k in range(0, n_cx, 2):
        a, b = winners[k].chrom, winners[k + 1].chrom
        if rng.random() < 0.5:
            kids = one_point_crossover(a, b, rng)
        else:
            kids = two_point_crossover(a, b, rng)
        offspring.extend(evaluate(c) for c in kids)
    for parent in winners[n_cx:]:
        offspring.append(evaluate(mutate(parent.chrom, rng, flip_prob=flip_prob)))
    return offspring


def run_ga(
    instance: ProblemInstance,
    flow: np.ndarray,
    config: GaConfig | None = None,
    state: PenaltyState | None = None,
) -> GaResult:
    config = config or GaConfig()
    flow = np.asarray(flow, dtype=float)
    if flow.shape != (instance.n, instance.n):
        raise ValueError("flow matrix does not match the instance")
    state = state if state is not None else PenaltyState()
    evaluate = Evaluator(instance, flow)
    size, k = config.population_size, config.islands
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(config.rng_seed).spawn(k)]

    pairs = top_pairs(flow) if instance.n >= 5 else None
    pops = [[evaluate(seed_chromosome(instance, flow, rng, pairs)) for _ in range(size)] for rng in rngs]
    for pop in pops:
        for ind in pop:
            state.update(ind.handling, ind.p_inf)

    def key(ind):
        return (ind.fitness(state.gap()), ind.p_inf)

    histories = [ImprovementHistory() for _ in range(k)]
    island_best = [min(ind.fitness(state.gap()) for ind in pop) for pop in pops]
    incumbent = min((ind for pop in pops for ind in pop), key=key)
    records: list[GenerationRecord] = []
    stall = 0
    generation = 0
    pool = ThreadPoolExecutor(config.threads) if config.threads > 1 and k > 1 else None
    try:
        while generation < config.max_generations and stall < config.stall_limit:
            generation += 1
            gap = state.gap()
            shares = [operator_shares(h, config.rate_table) for h in histories]
            jobs = []
            for i in range(k):
                fits = [ind.fitness(gap) for ind in pops[i]]
                jobs.append((pops[i], fits, shares[i], size, evaluate, rngs[i], config.flip_prob))
            if pool is not None:
                new = list(pool.map(lambda job: _breed(*job), jobs))
            else:
                new = [_breed(*job) for job in jobs]
            # synchronisation barrier: penalty state is updated in island order
            for pop in new:
                for ind in pop:
                    state.update(ind.handling, ind.p_inf)
            pops = migrate(new, [s[2] for s in shares], size, key)

            gap = state.gap()
            improved = False
            best_now = incumbent.fitness(gap)
            for pop in pops:
                cand = min(pop, key=key)
                value = cand.fitness(gap)
                if value < best_now - 1e-12 * max(1.0, abs(best_now)) or (
                    value <= best_now and cand.p_inf < incumbent.p_inf
                ):
                    incumbent, best_now, improved = cand, value, True
            stall = 0 if improved else stall + 1

            for i, pop in enumerate(pops):
                fits = [ind.fitness(gap) for ind in pop]
                best = min(fits)
                histories[i].record(island_best[i], best)
                island_best[i] = best
                records.append(
                    GenerationRecord(generation, i + 1, best, float(np.mean(fits)), histories[i].impr, *shares[i])
                )
    finally:
        if pool is not None:
            pool.shutdown()

    layout = decode(incumbent.chrom, instance)
    return GaResult(
        chromosome=incumbent.chrom,
        layout=layout,
        objective=incumbent.fitness(state.gap()),
        handling=incumbent.handling,
        generations=generation,
        log=records,
        state=state,
    )
