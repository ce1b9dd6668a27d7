import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from oversched.model import (
    Alternative,
    Altitude,
    GeneratorParams,
    InstanceFormatError,
    Permutation,
    ProblemInstance,
    Resource,
    TaskRequest,
    TimeWindow,
    check_bijection,
    generate_instance,
    load_instance,
    parse_instance,
    random_permutation,
    save_instance,
    serialize_instance,
)
from reference import tiny_instance

MINIMAL = """\
# two antennas at one station
instance mini horizon 100
resource A station S
resource B station S
request 1 dur 5 alt low
win A 10 14
win B 10 14
request 2 dur 3 alt high   # trailing comment
win B 0 20
"""


def test_minimal_file_parses():
    inst = parse_instance(MINIMAL)
    assert inst.n == 2
    assert inst.name == "mini" and inst.horizon == 100
    assert [a.resource for a in inst.request(1).alternatives] == ["A", "B"]
    assert inst.request(2).altitude is Altitude.HIGH
    assert inst.low_ids == (1,) and inst.high_ids == (2,)


def test_window_shorter_than_duration_is_rejected():
    text = "resource A station S\nrequest 1 dur 15 alt low\nwin A 0 10\n"
    with pytest.raises(InstanceFormatError, match="window cannot fit duration") as err:
        parse_instance(text)
    assert err.value.line == 3


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("resource A station S\nresource A station T\n", 2, "duplicate resource"),
        ("resource A station S\nrequest 1 dur 5 alt low\nwin A 0 9\nrequest 1 dur 5 alt low\n", 4, "duplicate request"),
        ("resource A station S\nrequest 1 dur 5 alt low\nwin Z 0 9\n", 3, "unknown resource"),
        ("resource A station S\nrequest 1 dur x alt low\n", 2, "integer"),
        ("resource A station S\nbogus line\n", 2, "unknown record"),
        ("win A 0 9\n", 1, "before any"),
        ("resource A station S\nrequest 1 dur 5 alt mid\nwin A 0 9\n", 2, "altitude"),
        ("resource A station S\nrequest 1 dur 5 alt low\n", 2, "no 'win'"),
        ("resource A station S\nrequest 2 dur 5 alt low\nwin A 0 9\n", 2, "without gaps"),
    ],
)
def test_malformed_lines_report_line_numbers(text, line, fragment):
    with pytest.raises(InstanceFormatError, match=fragment) as err:
        parse_instance(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_requests_may_appear_out_of_order():
    text = "resource A station S\nrequest 2 dur 1 alt high\nwin A 0 5\nrequest 1 dur 2 alt low\nwin A 3 4\n"
    inst = parse_instance(text)
    assert [r.duration for r in inst.requests] == [2, 1]


def test_round_trip_on_generated_corpus():
    for seed in range(40):
        params = GeneratorParams.desk_r_shaped(n_low=seed % 7, n_high=1 + seed % 5)
        inst = generate_instance(params, seed)
        text = serialize_instance(inst)
        again = parse_instance(text)
        assert again == inst
        assert serialize_instance(again) == text
    rng = np.random.default_rng(0)
    for _ in range(40):
        inst = tiny_instance(rng, int(rng.integers(1, 9)))
        assert parse_instance(serialize_instance(inst)) == inst


def test_save_and_load(tmp_path):
    inst = generate_instance(GeneratorParams.a_shaped(n_low=4, n_high=5), 3)
    save_instance(inst, tmp_path / "i.txt")
    assert load_instance(tmp_path / "i.txt") == inst


def test_type_invariants():
    with pytest.raises(ValueError):
        TimeWindow(5, 4)
    with pytest.raises(ValueError, match="window cannot fit"):
        TaskRequest(1, 10, Altitude.LOW, (Alternative("A", TimeWindow(0, 8)),))
    with pytest.raises(ValueError):
        TaskRequest(1, 0, Altitude.LOW, (Alternative("A", TimeWindow(0, 8)),))
    with pytest.raises(ValueError):
        TaskRequest(1, 1, Altitude.LOW, ())
    req = TaskRequest(1, 2, Altitude.LOW, (Alternative("A", TimeWindow(0, 1)),))
    with pytest.raises(ValueError, match="unknown resource"):
        ProblemInstance((req,), (Resource("B", "S"),))
    with pytest.raises(ValueError, match="1..n"):
        ProblemInstance((TaskRequest(2, 2, Altitude.LOW, req.alternatives),), (Resource("A", "S"),))


def test_a_shaped_preset_size():
    inst = generate_instance(GeneratorParams.a_shaped(), 1)
    assert inst.n == 322
    assert len(inst.low_ids) == 153 and len(inst.high_ids) == 169
    assert len(inst.resources) == 16
    assert len({r.station for r in inst.resources}) == 9


def test_generator_shape_invariants():
    params = GeneratorParams.r_shaped()
    inst = generate_instance(params, 7)
    station = {r.id: r.station for r in inst.resources}
    roster = Counter(station.values())
    for r in inst.requests:
        if r.is_low:
            assert len({station[a.resource] for a in r.alternatives}) == 1
            assert all(a.window.length == r.duration for a in r.alternatives)
            assert len(r.alternatives) == roster[station[r.alternatives[0].resource]]
            assert 10 <= r.duration <= 20
        else:
            assert all(a.window.length - r.duration >= 1 for a in r.alternatives)
            assert 4 <= len(r.alternatives) <= 14
            assert len({a.resource for a in r.alternatives}) == len(r.alternatives)
            assert 20 <= r.duration <= 60
        assert all(0 <= a.window.lb and a.window.ub < inst.horizon for a in r.alternatives)


def test_generator_is_deterministic():
    p = GeneratorParams.desk_r_shaped()
    assert serialize_instance(generate_instance(p, 5)) == serialize_instance(generate_instance(p, 5))
    assert serialize_instance(generate_instance(p, 5)) != serialize_instance(generate_instance(p, 6))


@pytest.mark.parametrize(
    "kw",
    [dict(n_low=0, n_high=0), dict(n_low=1, n_high=1, stations=()), dict(n_low=1, n_high=1, stations=(0,)),
     dict(n_low=1, n_high=1, low_duration=(5, 2)), dict(n_low=1, n_high=1, horizon=50)],
)
def test_generator_rejects_bad_params(kw):
    with pytest.raises(ValueError):
        generate_instance(GeneratorParams(**kw), 0)


def test_random_permutation_basics():
    assert random_permutation(1, 0).order == (1,)
    assert random_permutation(4, 9) == random_permutation(4, 9)
    assert sorted(random_permutation(4, 9)) == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        random_permutation(0, 0)


def test_random_permutation_is_uniform():
    seq = np.random.SeedSequence(2024)
    counts = Counter(random_permutation(3, s).order for s in seq.spawn(10_000))
    assert set(counts) == set(itertools.permutations((1, 2, 3)))
    freqs = np.array([counts[p] for p in sorted(counts)]) / 10_000
    assert np.all(np.abs(freqs - 1 / 6) <= 0.02)
    assert stats.chisquare(list(counts.values())).pvalue > 0.001


@given(st.lists(st.integers(1, 12), min_size=1, max_size=12))
@settings(max_examples=200, deadline=None)
def test_permutation_rejects_non_bijections(values):
    ok = sorted(values) == list(range(1, len(values) + 1))
    if ok:
        assert Permutation(tuple(values)).order == tuple(values)
    else:
        with pytest.raises(ValueError):
            Permutation(tuple(values))


def test_check_bijection_length():
    with pytest.raises(ValueError):
        check_bijection([1, 2], 3)
