from collections import Counter

import numpy as np
import pytest
from scipy import stats

from oversched.builder import Objective, build_raw, split_order
from oversched.model import Alternative, Altitude, GeneratorParams, ProblemInstance, Resource, TaskRequest, TimeWindow, generate_instance
from oversched.search import (
    SearchConfig,
    alls,
    alls_inverted,
    exhaustive_oracle,
    genitor,
    hbss,
    hbss_sample,
    leap_length,
    rls,
    selection_probabilities,
    swo,
)
from oversched.search.genitor import crossover_size, linear_rank_index
from oversched.search.hbss import exponential_bias
from oversched.search.swo import initial_priority, rank_distances, reprioritize, trouble_makers
from reference import enumerate_optimum, tiny_instance

C, O = Objective.CONFLICTS, Objective.OVERLAPS
ALGS = {
    "rls": rls,
    "alls": alls,
    "alls_inverted": alls_inverted,
    "genitor": lambda i, c: genitor(i, c, population=20),
    "swo": swo,
    "swo1": lambda i, c: swo(i, c, moves="one"),
    "swo_top": lambda i, c: swo(i, c, moves=3, perturb_swaps=5),
    "swo_random": lambda i, c: swo(i, c, start="random"),
    "hbss": hbss,
}


def single(rid, dur, lb, ub, res="A", low=False):
    return TaskRequest(rid, dur, Altitude.LOW if low else Altitude.HIGH, (Alternative(res, TimeWindow(lb, ub)),))


@pytest.fixture(scope="module")
def busy():
    return generate_instance(GeneratorParams.desk_r_shaped(n_low=30, n_high=35), 11)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(max_evaluations=0)
    with pytest.raises(ValueError):
        SearchConfig(trace_stride=0)
    with pytest.raises(ValueError):
        SearchConfig(builder="fancy")
    assert SearchConfig(objective="overlaps").objective is O


@pytest.mark.parametrize("name", sorted(ALGS))
@pytest.mark.parametrize("obj", [C, O])
def test_common_contract(busy, name, obj):
    cfg = SearchConfig(objective=obj, max_evaluations=750, seed=3, target=None)
    a, b = ALGS[name](busy, cfg), ALGS[name](busy, cfg)
    assert a == b
    assert a.evaluations_used == 750
    assert list(a.trace.evaluations) == list(range(100, 701, 100)) + [750]
    assert all(x >= y for x, y in zip(a.trace.best, a.trace.best[1:]))
    assert a.trace.best[-1] == a.best_value
    assert build_raw(busy, a.best_permutation.as_array(), obj).value == a.best_value


@pytest.mark.parametrize("name", sorted(ALGS))
def test_split_builder_option(busy, name):
    r = ALGS[name](busy, SearchConfig(max_evaluations=300, seed=1, builder="split"))
    assert build_raw(busy, split_order(busy, r.best_permutation.as_array()), C).value == r.best_value


def test_zero_instance_stops_after_one_evaluation():
    i = ProblemInstance((single(1, 2, 0, 9), single(2, 2, 20, 29)), (Resource("A", "S"),))
    for alg in ALGS.values():
        r = alg(i, SearchConfig(seed=0))
        assert r.best_value == 0 and r.evaluations_used == 1 and r.trace.best[-1] == 0


def test_leap_schedule():
    assert [leap_length(e) for e in (0, 799, 800, 1600, 7199, 7200, 9000)] == [10, 10, 9, 8, 2, 1, 1]
    assert [leap_length(e, inverted=True) for e in (0, 800, 7999)] == [10, 11, 19]


def test_alls_with_unit_leap_is_rls(busy):
    cfg = SearchConfig(max_evaluations=500, seed=7, target=None)
    assert alls(busy, cfg, initial_leap=1).best_value == rls(busy, cfg).best_value
    assert alls(busy, cfg, initial_leap=1).trace == rls(busy, cfg).trace
    with pytest.raises(ValueError):
        alls(busy, cfg, initial_leap=0)


def test_linear_rank_selection_bias():
    size = 200
    u = np.random.default_rng(0).random(200_000)
    idx = np.array([linear_rank_index(x, size, 1.5) for x in u])
    hist = np.bincount(idx, minlength=size) / len(u)
    best, median = hist[:10].mean(), hist[95:105].mean()
    assert best / median == pytest.approx(1.5, rel=0.05)
    assert idx.min() == 0 and idx.max() == size - 1


def test_crossover_size_rules():
    rng = np.random.default_rng(0)
    sizes = {crossover_size(30, "third", rng) for _ in range(2000)}
    assert sizes == set(range(11, 20))
    assert crossover_size(2, "third", rng) == 1
    assert crossover_size(9, 4, rng) == 4


def test_genitor_budget_and_errors():
    i = tiny_instance(np.random.default_rng(2), 4)
    r = genitor(i, SearchConfig(max_evaluations=2, seed=0, target=None), population=2)
    assert r.evaluations_used == 2
    with pytest.raises(ValueError):
        genitor(i, SearchConfig(), k_positions=5)
    with pytest.raises(ValueError):
        genitor(i, SearchConfig(), population=1)


def test_swo_initial_priority_sorted():
    reqs = (single(1, 5, 0, 49), single(2, 5, 0, 9), single(3, 5, 0, 19), single(4, 5, 0, 5))
    i = ProblemInstance(reqs, (Resource("A", "S"),))
    assert initial_priority(i) == [4, 2, 3, 1]


def test_rank_distances():
    for m in range(1, 30):
        d = rank_distances(m)
        assert d == [1 + ((j - 1) * 5) // m for j in range(1, m + 1)]
        assert d[0] == 1 and max(d) <= 5 and d == sorted(d)
    assert rank_distances(5) == [1, 2, 3, 4, 5]


def test_reprioritize_variants():
    perm = list(range(1, 11))
    rng = np.random.default_rng(0)
    # conflicts: each bumped request moves forward 5, lower id first
    assert reprioritize(perm, {7: 1, 9: 1}, C) == [1, 7, 2, 9, 3, 4, 5, 6, 8, 10]
    # overlaps: ranked by contribution, smallest moved first with the smallest distance
    out = reprioritize(perm, {10: 4, 3: 9}, O)
    assert out == [3, 1, 2, 4, 5, 6, 7, 8, 10, 9]
    # top-k: largest contributors only
    out = reprioritize(perm, {10: 4, 8: 9, 6: 1}, O, moves=2)
    assert out == [1, 2, 8, 3, 10, 4, 5, 6, 7, 9]
    # one: a single trouble maker moves
    out = reprioritize(perm, {10: 1, 8: 1}, C, moves="one", rng=rng)
    assert sum(a != b for a, b in zip(out, perm)) == 6
    with pytest.raises(ValueError):
        reprioritize(perm, {1: 1}, C, moves=0)
    assert reprioritize(perm, {}, C) == perm


def test_reprioritize_keeps_other_orders():
    rng = np.random.default_rng(5)
    for _ in range(300):
        n = int(rng.integers(2, 25))
        perm = list(rng.permutation(n) + 1)
        k = int(rng.integers(1, n + 1))
        trouble = {int(r): int(rng.integers(1, 9)) for r in rng.choice(perm, size=k, replace=False)}
        for moves in ("all", "one", 2):
            out = reprioritize(perm, trouble, O, moves=moves, rng=rng)
            assert sorted(out) == sorted(perm)
            still = [v for v in perm if v not in trouble]
            assert [v for v in out if v not in trouble] == still
            if moves == "one":
                moved = [r for r in trouble if out.index(r) < perm.index(r)]
                assert len(moved) <= 1
                for r in moved:
                    assert out.index(r) == max(0, perm.index(r) - 5)


def test_swo_errors():
    i = tiny_instance(np.random.default_rng(0), 4)
    with pytest.raises(ValueError):
        swo(i, SearchConfig(), moves=0)
    with pytest.raises(ValueError):
        swo(i, SearchConfig(), start="middle")


def test_trouble_makers(busy):
    raw = build_raw(busy, np.arange(1, busy.n + 1), C)
    assert set(trouble_makers(raw, C)) == {i + 1 for i in np.flatnonzero(raw.status == 1)}
    raw = build_raw(busy, np.arange(1, busy.n + 1), O)
    t = trouble_makers(raw, O)
    assert sum(t.values()) == raw.value and all(v > 0 for v in t.values())


def test_hbss_probabilities():
    p = selection_probabilities([1, 2, 3])
    assert p.sum() == pytest.approx(1.0)
    assert np.allclose(p, [0.6652, 0.2447, 0.0900], atol=5e-5)
    assert selection_probabilities([4]).tolist() == [1.0]


def sequential_sample(ranking, rng, weights):
    left, out = list(ranking), []
    w = list(weights)
    while left:
        k = rng.choice(len(left), p=np.array(w) / sum(w))
        out.append(left.pop(k))
        w.pop(k)
    return tuple(out)


def test_hbss_gumbel_matches_sequential_sampling():
    rng = np.random.default_rng(1)
    ranking = np.array([3, 1, 4, 2])
    draws = 40_000
    fast = Counter(tuple(hbss_sample(ranking, rng)) for _ in range(draws))
    w = exponential_bias(np.arange(1, 5))
    slow = Counter(sequential_sample(ranking, rng, w) for _ in range(draws))
    keys = sorted(set(fast) | set(slow))
    table = np.array([[fast[k] for k in keys], [slow[k] for k in keys]])
    table = table[:, table.sum(axis=0) >= 10]
    assert stats.chi2_contingency(table).pvalue > 0.001


def test_hbss_uniform_bias_is_uniform():
    rng = np.random.default_rng(2)
    counts = Counter(tuple(hbss_sample(np.arange(1, 5), rng, bias=lambda r: np.ones_like(r))) for _ in range(24_000))
    assert len(counts) == 24
    assert stats.chisquare(list(counts.values())).pvalue > 0.001


def test_hbss_handles_long_rankings():
    out = hbss_sample(np.arange(1, 2001), np.random.default_rng(0))
    assert sorted(out.tolist()) == list(range(1, 2001))


def test_oracle_small_cases():
    one = ProblemInstance((single(1, 3, 0, 9),), (Resource("A", "S"),))
    assert exhaustive_oracle(one)[0] == 0
    pair = ProblemInstance((single(1, 5, 0, 4), single(2, 5, 0, 4)), (Resource("A", "S"),))
    value, perm = exhaustive_oracle(pair, C)
    assert value == 1 and len(perm) == 2
    with pytest.raises(ValueError):
        exhaustive_oracle(tiny_instance(np.random.default_rng(0), 10))


def test_oracle_agrees_with_second_enumerator():
    rng = np.random.default_rng(17)
    for _ in range(50):
        i = tiny_instance(rng, int(rng.integers(1, 7)), n_res=2, horizon=20)
        for obj in (C, O):
            value, perm = exhaustive_oracle(i, obj)
            assert value == enumerate_optimum(i, obj.value)
            assert build_raw(i, perm.as_array(), obj).value == value
