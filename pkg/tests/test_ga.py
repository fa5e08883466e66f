import io
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import enumerate_best, random_instance
from stoflp.ga import (
    RATE_TABLE,
    GaConfig,
    ImprovementHistory,
    Individual,
    migrate,
    mutate,
    one_point_crossover,
    operator_shares,
    run_ga,
    seed_chromosome,
    swap_positions,
    top_pairs,
    two_point_crossover,
    write_generation_log,
)
from stoflp.objective import handling_cost
from stoflp.slicing import Chromosome, count_solutions, decode


def chrom(dept):
    n = len(dept)
    return Chromosome(tuple(dept), tuple(range(1, n)), (0,) * (n - 1))


@st.composite
def parent_pairs(draw, n_min=2, n_max=15):
    n = draw(st.integers(n_min, n_max))

    def one():
        return Chromosome(
            tuple(draw(st.permutations(range(1, n + 1)))),
            tuple(draw(st.permutations(range(1, n)))),
            tuple(draw(st.lists(st.integers(0, 1), min_size=n - 1, max_size=n - 1))),
        )

    return one(), one()


# -- golden vectors -----------------------------------------------------------------


def test_one_point_golden():
    p1 = chrom((8, 4, 2, 6, 7, 3, 9, 1, 5))
    p2 = chrom((2, 9, 5, 8, 3, 4, 6, 7, 1))
    c1, c2 = one_point_crossover(p1, p2, cut=4)
    assert c1.dept == (8, 4, 2, 6, 9, 5, 3, 7, 1)
    assert c2.dept == (2, 9, 5, 8, 4, 6, 7, 3, 1)


def test_two_point_golden():
    p1 = chrom((1, 9, 7, 5, 6, 4, 2, 3, 8))
    p2 = chrom((6, 5, 3, 9, 8, 4, 7, 2, 1))
    c1, c2 = two_point_crossover(p1, p2, cuts=(4, 7))
    assert c1.dept == (1, 9, 5, 6, 8, 4, 7, 2, 3)
    assert c2.dept == (5, 3, 9, 8, 6, 4, 2, 7, 1)


def test_mutation_golden():
    parent = chrom((4, 8, 6, 3, 9, 2, 7, 5, 1))
    child = mutate(parent, None, positions=(3, 6), flip_prob=0)
    assert child.dept == (4, 8, 2, 3, 9, 6, 7, 5, 1)
    assert mutate(child, None, positions=(3, 6), flip_prob=0) == parent


@settings(max_examples=200, deadline=None)
@given(parent_pairs(), st.integers(0, 2**32 - 1))
def test_identical_parents_reproduce(pair, seed):
    p = pair[0]
    rng = np.random.default_rng(seed)
    assert one_point_crossover(p, p, rng) == (p, p)
    assert two_point_crossover(p, p, rng) == (p, p)


@settings(max_examples=100, deadline=None)
@given(parent_pairs(n_min=3))
def test_zero_width_middle_reproduces_parents(pair):
    p1, p2 = pair
    for c in range(1, p1.n - 1):
        assert two_point_crossover(p1, p2, cuts=(c, c)) == (p1, p2)


def test_operators_preserve_validity_at_scale():
    rng = np.random.default_rng(3)
    applications = 0
    while applications < 100_000:
        n = int(rng.integers(2, 13))
        a, b = Chromosome.random(n, rng), Chromosome.random(n, rng)
        for child in (*one_point_crossover(a, b, rng), *two_point_crossover(a, b, rng), mutate(a, rng)):
            child.validate()
        applications += 5


@settings(max_examples=300, deadline=None)
@given(parent_pairs(), st.integers(0, 2**32 - 1))
def test_one_point_structure(pair, seed):
    p1, p2 = pair
    n = p1.n
    rng = np.random.default_rng(seed)
    c = int(rng.integers(1, n))
    c1, c2 = one_point_crossover(p1, p2, cut=c)
    for child, head_parent, tail_parent in ((c1, p1, p2), (c2, p2, p1)):
        head = head_parent.dept[:c]
        tail = [g for g in tail_parent.dept[c:] if g not in head]
        missing = [g for g in tail_parent.dept if g not in head and g not in tail]
        assert child.dept == (*head, *missing, *tail)


def test_swap_positions_ranges():
    assert swap_positions(9) == (3, 7)
    assert swap_positions(6) == (3, 4)
    assert swap_positions(5) == (2, 4)
    assert swap_positions(4) == (2, 3)
    assert swap_positions(3) == (1, 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 9])
def test_mutation_swaps_inside_range(n):
    rng = np.random.default_rng(n)
    lo, hi = swap_positions(n)
    parent = chrom(tuple(range(1, n + 1)))
    for _ in range(500):
        child = mutate(parent, rng, flip_prob=0)
        diff = [i + 1 for i in range(n) if child.dept[i] != parent.dept[i]]
        assert len(diff) == 2 and lo <= diff[0] < diff[1] <= hi


def test_mutation_flip_probability():
    rng = np.random.default_rng(1)
    parent = chrom(tuple(range(1, 10)))
    flips = sum(mutate(parent, rng).orient != parent.orient for _ in range(4000))
    assert abs(flips / 4000 - 0.5) < 0.03
    assert all(mutate(parent, rng, flip_prob=0).orient == parent.orient for _ in range(100))


# -- rate table -----------------------------------------------------------------------

RATE_ROWS = [
    (0.0, (0.61, 0.31, 0.08)),
    (0.5, (0.67, 0.27, 0.06)),
    (1.0, (0.77, 0.19, 0.04)),
    (3.0, (0.80, 0.15, 0.05)),
    (5.0, (0.87, 0.10, 0.03)),
    (7.0, (0.89, 0.08, 0.03)),
    (100.0, (0.92, 0.05, 0.02)),
]


@pytest.mark.parametrize("impr, shares", RATE_ROWS)
def test_rate_table_rows(impr, shares):
    assert operator_shares(impr) == shares


@settings(max_examples=500)
@given(st.floats(0, 1e6))
def test_rate_table_lookup_is_total(impr):
    hits = []
    for lo, hi, inclusive, *_ in RATE_TABLE:
        if lo == hi:
            hits.append(impr == lo)
        else:
            hits.append((impr >= lo if inclusive else impr > lo) and impr < hi)
    assert sum(hits) == 1
    operator_shares(impr)


def test_rate_table_row_sums():
    sums = [sum(r[3:]) for r in RATE_TABLE]
    assert all(abs(s - 1) < 1e-9 for s in sums[:-1])
    # the published top row sums to 0.99
    assert sums[-1] == pytest.approx(0.99)
    with pytest.raises(ValueError):
        GaConfig(rate_table=((0.0, math.inf, True, 0.5, 0.2, 0.1),))


def test_improvement_history():
    h = ImprovementHistory()
    assert h.impr == 0
    assert h.record(100, 90) == pytest.approx(10)
    assert h.record(90, 95) == 0  # floored
    for _ in range(5):
        h.record(100, 100)
    assert h.impr == 0
    h.record(200, 100)
    assert h.impr == pytest.approx(10)
    assert operator_shares(h) == (0.92, 0.05, 0.02)


# -- seeding --------------------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(st.integers(5, 14), st.integers(0, 2**32 - 1))
def test_seeded_structure(n, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(n, rng, stochastic=True)
    flow = inst.flows.mean
    first, second = top_pairs(flow)
    c = seed_chromosome(inst, flow, rng).validate()
    assert set(c.dept[-2:]) == set(first)
    assert c.dept[:2] == second
    assert c.slices[-1] == n - 1
    i = c.slices.index(2)
    assert c.slices[i + 1] == 1


def test_seeded_space_n5_matches_formula():
    n = 5
    flow = np.zeros((n, n))
    flow[3, 4] = flow[4, 3] = 9  # top pair (4, 5)
    flow[0, 1] = 5  # second pair (1, 2)
    inst = random_instance(n, np.random.default_rng(0))
    reached = set()
    rng = np.random.default_rng(1)
    for _ in range(20_000):
        reached.add(seed_chromosome(inst, flow, rng))
    assert len(reached) == count_solutions(5, seeded=True) == 64


def test_seeded_small_n_falls_back(caplog):
    rng = np.random.default_rng(0)
    inst = random_instance(4, rng)
    with caplog.at_level("INFO"):
        seed_chromosome(inst, inst.flows.mean, rng).validate()
    assert "too small" in caplog.text


def test_top_pairs_disjoint():
    flow = np.zeros((5, 5))
    flow[0, 1] = 10
    flow[1, 2] = 9  # overlaps the top pair, skipped
    flow[3, 4] = 4
    assert top_pairs(flow) == ((1, 2), (4, 5))


# -- migration ------------------------------------------------------------------------


def _pop(values):
    return [Individual(chrom((1, 2)), float(v), 0, 0.0) for v in values]


def test_migration_ring():
    islands = [_pop([10 * k + j for j in range(5)]) for k in range(4)]
    out = migrate(islands, 0.2, 5, key=lambda ind: ind.handling)  # m = 1
    for k in range(4):
        assert len(out[k]) == 5
        champion = min(ind.handling for ind in islands[k])
        assert champion in [ind.handling for ind in out[(k + 1) % 4]]
        # the successor's worst is gone
        worst = max(ind.handling for ind in islands[(k + 1) % 4])
        assert worst not in [ind.handling for ind in out[(k + 1) % 4]]
    best_before = min(ind.handling for pop in islands for ind in pop)
    assert min(ind.handling for pop in out for ind in pop) == best_before


@settings(max_examples=100)
@given(st.integers(2, 6), st.integers(2, 30), st.floats(0, 0.5), st.integers(0, 2**32 - 1))
def test_migration_properties(k, size, share, seed):
    rng = np.random.default_rng(seed)
    islands = [_pop(rng.uniform(0, 100, size)) for _ in range(k)]
    out = migrate(islands, share, size, key=lambda ind: ind.handling)
    assert [len(p) for p in out] == [size] * k
    best = min(ind.handling for pop in islands for ind in pop)
    assert min(ind.handling for pop in out for ind in pop) == best
    m = min(math.ceil(share * size), size - 1)
    for s in range(k):
        top = sorted(ind.handling for ind in islands[s])[:m]
        got = Counter(ind.handling for ind in out[(s + 1) % k])
        assert all(got[v] >= 1 for v in top)


# -- whole GA -------------------------------------------------------------------------

SMALL = GaConfig(population_size=30, islands=2, stall_limit=60, max_generations=300)


def _feasible_instance(n, rng):
    while True:
        inst = random_instance(n, rng, max_ratio=3.0)
        best, _ = enumerate_best(inst, inst.flows.mean)
        if math.isfinite(best):
            return inst, best


@pytest.mark.parametrize("n", [3, 4])
def test_ga_matches_enumeration(n):
    rng = np.random.default_rng(100 + n)
    for trial in range(3):
        inst, best = _feasible_instance(n, rng)
        res = run_ga(inst, inst.flows.mean, GaConfig(rng_seed=trial))
        assert res.layout.p_inf == 0
        assert res.handling == pytest.approx(best, rel=1e-9)
        assert handling_cost(res.layout, inst.flows.mean) == pytest.approx(res.handling, rel=1e-12)


def test_ga_deterministic_and_logged():
    rng = np.random.default_rng(8)
    inst = random_instance(8, rng)
    a = run_ga(inst, inst.flows.mean, SMALL)
    b = run_ga(inst, inst.flows.mean, SMALL)
    assert a.chromosome == b.chromosome and a.objective == b.objective
    fa, fb = io.StringIO(), io.StringIO()
    write_generation_log(a.log, fa)
    write_generation_log(b.log, fb)
    assert fa.getvalue() == fb.getvalue()
    header = fa.getvalue().splitlines()[0]
    assert header == "generation,island,best,mean,impr,crossover,mutation,migration"
    assert len(a.log) == a.generations * SMALL.islands


def test_ga_thread_count_invariant():
    rng = np.random.default_rng(9)
    inst = random_instance(9, rng)
    cfg = GaConfig(population_size=30, islands=4, stall_limit=30, max_generations=100, rng_seed=4)
    one = run_ga(inst, inst.flows.mean, cfg)
    four = run_ga(inst, inst.flows.mean, GaConfig(**{**cfg.__dict__, "threads": 4}))
    assert one.chromosome == four.chromosome
    assert [r.best for r in one.log] == [r.best for r in four.log]


def test_ga_stopping_rules():
    rng = np.random.default_rng(10)
    inst = random_instance(6, rng)
    res = run_ga(inst, inst.flows.mean, GaConfig(population_size=10, islands=2, stall_limit=5, max_generations=1000))
    assert res.generations < 1000
    res = run_ga(inst, inst.flows.mean, GaConfig(population_size=10, islands=2, stall_limit=10**6, max_generations=25))
    assert res.generations == 25


def test_ga_best_never_worsens():
    rng = np.random.default_rng(12)
    inst = random_instance(9, rng, max_ratio=1e9)  # everything feasible, so the penalty gap stays 0
    res = run_ga(inst, inst.flows.mean, GaConfig(population_size=30, islands=3, stall_limit=50, max_generations=200))
    per_gen = {}
    for r in res.log:
        per_gen[r.generation] = min(per_gen.get(r.generation, math.inf), r.best)
    series = [per_gen[g] for g in sorted(per_gen)]
    assert all(b <= a for a, b in zip(series, series[1:]))
    assert res.objective == series[-1]


def test_ga_result_consistent():
    rng = np.random.default_rng(13)
    inst = random_instance(7, rng)
    res = run_ga(inst, inst.flows.mean, SMALL)
    assert decode(res.chromosome, inst) == res.layout
    assert res.objective == pytest.approx(res.handling + res.layout.p_inf * res.state.gap())


def test_ga_rejects_bad_flow_shape():
    inst = random_instance(4, np.random.default_rng(0))
    with pytest.raises(ValueError):
        run_ga(inst, np.zeros((3, 3)), SMALL)


def test_offspring_counts():
    from stoflp.ga import _breed

    rng = np.random.default_rng(0)
    pop = [Individual(Chromosome.random(6, rng), float(i), 0, 0.0) for i in range(70)]
    fits = [ind.handling for ind in pop]
    calls = Counter()

    def evaluate(c):
        calls["n"] += 1
        return Individual(c, 0.0, 0, 0.0)

    for shares in (0.61, 0.67, 0.92):
        calls.clear()
        out = _breed(pop, fits, (shares, 0.0, 0.0), 70, evaluate, rng, 0.5)
        assert len(out) == 70
        assert out[0] is pop[0]  # elitism
        assert calls["n"] == 69
