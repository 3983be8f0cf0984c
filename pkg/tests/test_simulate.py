import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpool import combinatorics as comb
from qpool.design import build_set_containment
from qpool.disjunct import check_fully, measure_exhaustive
from qpool.errors import HypothesisViolation, IndexOutOfRange, TooManyFlips
from qpool.simulate import decode, encode, inject_errors, run_trial, simulate


def decode_oracle(m, positive_rows, e):
    pos = set(positive_rows)
    return frozenset(c for c in range(m.col_count)
                     if sum(1 for r in m.column_rows(c) if r not in pos) <= e // 2)


def test_encode_examples(macula_234):
    m = macula_234
    assert encode(m, []).positive_rows() == []
    assert encode(m, [2]).positive_rows() == m.column_rows(2)
    assert encode(m, range(4)).positive_rows() == list(range(6))
    with pytest.raises(IndexOutOfRange):
        encode(m, [4])


def test_inject_examples(ngo_du_135):
    out = encode(ngo_du_135, [3, 70])
    assert inject_errors(out, t=0, seed=1) == out
    once = inject_errors(out, {5})
    assert once.distance(out) == 1
    assert inject_errors(once, {5}) == out
    for seed in range(20):
        for t in (1, 7, 31):
            assert inject_errors(out, t=t, seed=seed, trial=seed).distance(out) == t
    with pytest.raises(TooManyFlips):
        inject_errors(out, t=32, seed=0)
    with pytest.raises(IndexOutOfRange):
        inject_errors(out, {31})
    with pytest.raises(ValueError):
        inject_errors(out, t=2)


def test_decode_examples(ngo_du_135):
    m = ngo_du_135
    assert decode(m, encode(m, []), 1) == frozenset()
    # weight 7: with e = 13 every column tolerates 6 negative hits, still empty
    assert decode(m, encode(m, []), 13) == frozenset()
    assert decode(m, encode(m, []), 14) == frozenset(range(155))
    with pytest.raises(HypothesisViolation):
        decode(m, encode(m, []), -1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 154), max_size=6), st.sets(st.integers(0, 30), max_size=4),
       st.integers(0, 9))
def test_decode_matches_oracle(ngo_du_135, positives, flips, e):
    m = ngo_du_135
    out = inject_errors(encode(m, positives), flips)
    assert decode(m, out, e) == decode_oracle(m, out.positive_rows(), e)


def _exhaustive_guarantee(m, s, e):
    cols = range(m.col_count)
    flip_sets = [f for t in range(e // 2 + 1) for f in itertools.combinations(range(m.row_count), t)]
    cases = 0
    for size in range(s + 1):
        for pos in itertools.combinations(cols, size):
            clean = encode(m, pos)
            for f in flip_sets:
                assert decode(m, inject_errors(clean, f), e) == frozenset(pos), (pos, f)
                cases += 1
    return cases


@pytest.mark.parametrize("d,k,n,s", [(2, 3, 5, 1), (2, 3, 5, 2), (2, 4, 6, 1), (3, 5, 7, 1), (3, 5, 7, 2)])
def test_exhaustive_guarantee_set_designs(d, k, n, s):
    m = build_set_containment(d, k, n)
    e = comb.bound_macula(d, k, n, s).bound
    assert measure_exhaustive(m, s).e_measured == e
    assert _exhaustive_guarantee(m, s, e) > 0


def test_exhaustive_guarantee_lines_in_solids(ngo_du_135):
    assert check_fully(ngo_du_135, 2, 1).certified
    assert _exhaustive_guarantee(ngo_du_135, 2, 1) == comb.binom(155, 2) + 155 + 1


def test_simulate_guaranteed_regime(ngo_du_135):
    rep = simulate(ngo_du_135, 2, 1, 0, 10_000, seed=42)
    assert rep.successes == rep.trials == 10_000
    assert not rep.out_of_guarantee and rep.failures == ()


def test_simulate_beyond_budget_flags_and_replays(ngo_du_135):
    m = ngo_du_135
    rep = simulate(m, 1, 1, 31, 50, seed=9)
    assert rep.out_of_guarantee and rep.successes < rep.trials
    assert len(rep.failures) <= 16
    for f in rep.failures:
        pos, flipped, decoded = run_trial(m, 1, 1, 31, 9, f.trial)
        assert (pos, flipped, tuple(sorted(decoded))) == (f.positives, f.flipped, f.decoded)
    assert rep.to_dict()["seed"] == "0000000000000009"
    with pytest.raises(TooManyFlips):
        simulate(m, 1, 1, 32, 1, seed=0)


def test_simulate_draws_every_size(ngo_du_135):
    sizes = {len(run_trial(ngo_du_135, 2, 1, 0, 3, t)[0]) for t in range(60)}
    assert sizes == {0, 1, 2}


@pytest.mark.parametrize("workers", [2, 8])
def test_simulate_worker_independence(ngo_du_135, workers):
    a = simulate(ngo_du_135, 2, 3, 1, 400, seed=123)
    b = simulate(ngo_du_135, 2, 3, 1, 400, seed=123, workers=workers)
    assert a == b
    assert a.to_dict() == b.to_dict()


def test_simulate_seed_changes_draws(ngo_du_135):
    a = [run_trial(ngo_du_135, 2, 1, 3, 1, t)[:2] for t in range(20)]
    b = [run_trial(ngo_du_135, 2, 1, 3, 2, t)[:2] for t in range(20)]
    assert a != b
    assert len({p for p, _ in a}) > 5
