from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qpool import combinatorics as comb
from qpool.combinatorics import Bound
from qpool.errors import HypothesisViolation, NonPrimePower, UnknownBound


# -- Gaussian coefficients --------------------------------------------------

@pytest.mark.parametrize("args,value", [
    ((2, 7, 0), 1), ((2, 3, 5), 0), ((2, 5, 2), 155), ((3, 2, 1), 4),
    ((2, 4, -1), 0), ((5, 0, 0), 1), ((4, 3, 3), 1),
])
def test_gaussian_examples(args, value):
    assert comb.gaussian(*args) == value


def test_gaussian_rejects_non_prime_power():
    with pytest.raises(NonPrimePower):
        comb.gaussian(6, 4, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_gaussian_symmetry_and_pascal(q):
    for m2 in range(13):
        for m1 in range(m2 + 1):
            g = comb.gaussian(q, m2, m1)
            assert g == comb.gaussian(q, m2, m2 - m1)
            if m2 >= 1:
                assert g == comb.gaussian(q, m2 - 1, m1 - 1) + q**m1 * comb.gaussian(q, m2 - 1, m1)


@pytest.mark.parametrize("q,n", [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 3), (3, 4), (3, 5)])
def test_gaussian_counts_brute_force_subspaces(q, n):
    levels = oracles.subspaces(q, n)
    for k in range(n + 1):
        assert comb.gaussian(q, n, k) == len(levels[k])


def test_gaussian_tends_to_binomial_at_q1_limit():
    # [m2, m1]_q is a polynomial in q; its coefficient sum is C(m2, m1).
    # Reading it at q large: [m2, m1]_q ~ q^(m1(m2-m1)).
    for m2 in range(1, 9):
        for m1 in range(m2 + 1):
            g = comb.gaussian(1 << 20, m2, m1)
            assert g >> (20 * m1 * (m2 - m1)) >= 1


def test_big_values_exact():
    assert comb.gaussian(2, 60, 30) % 2 == 1
    assert len(str(comb.gaussian(2, 60, 8))) > 100


# -- Lemma 2.2 counting ------------------------------------------------------

def _brute_fixed_intersection(q, j, r, n, m):
    V = oracles.space(q, n)
    unit = [V.code[tuple(int(t == c) for t in range(n))] for c in range(n)]
    P0 = V.span(unit[:m])
    Q0 = V.span(unit[:j])
    return sum(1 for Q in oracles.subspaces(q, n)[r] if Q & P0 == Q0)


@pytest.mark.parametrize("args,value", [((2, 1, 2, 4, 2), 6), ((2, 2, 2, 5, 3), 1), ((2, 0, 1, 3, 1), 6)])
def test_count_fixed_intersection_examples(args, value):
    assert comb.count_fixed_intersection(*args) == value
    assert _brute_fixed_intersection(*args) == value


@pytest.mark.parametrize("args", [
    (2, 3, 2, 5, 3),    # j > r
    (2, 0, 3, 5, 3),    # j < r + m - n
    (2, 1, 2, 4, 5),    # m > n
    (2, 3, 3, 6, 2),    # j > m
])
def test_count_fixed_intersection_hypotheses(args):
    with pytest.raises(HypothesisViolation):
        comb.count_fixed_intersection(*args)


def test_profile_is_non_increasing():
    prof = comb.fixed_intersection_profile(2, 1, 3, 8, 2)
    assert len(prof) == 8 + 1 - 2 - 3 + 1
    assert all(a >= b for a, b in zip(prof, prof[1:]))


# -- bounds ------------------------------------------------------------------

def test_macula_examples():
    assert comb.bound_macula(2, 3, 4, 1).bound == 1
    assert comb.bound_macula(2, 3, 4, 2).bound == 0
    br = comb.bound_macula(3, 6, 9, 1)
    assert br.fully_claimed and br.theorem_used is Bound.SET_CONTAINMENT
    with pytest.raises(HypothesisViolation, match="s <= d"):
        comb.bound_macula(2, 3, 4, 3)
    with pytest.raises(HypothesisViolation):
        comb.bound_macula(3, 3, 4, 1)


def test_set_intersection_examples():
    br = comb.bound_set_intersection(1, 2, 3, 8, 1)
    assert br.bound == 1 and not br.fully_claimed
    assert br.theorem_used is Bound.SET_INTERSECTION
    with pytest.raises(HypothesisViolation, match="d-i"):
        comb.bound_set_intersection(1, 2, 3, 6, 1)
    with pytest.raises(HypothesisViolation):
        comb.bound_set_intersection(1, 3, 4, 20, 1)   # i below floor((d+1)/2)


def test_set_intersection_degenerates_to_macula():
    checked = 0
    for n in range(3, 30):
        for k in range(2, n):
            for d in range(1, k):
                for s in range(1, d + 1):
                    if n - k - s * (k - d) < 0:
                        continue
                    checked += 1
                    assert (comb.bound_set_intersection(d, d, k, n, s).bound
                            == comb.bound_macula(d, k, n, s).bound)
    assert checked > 500


def test_ngo_du_examples():
    assert comb.bound_ngo_du(2, 2, 8, 60, 2).bound == 6111
    assert comb.bound_ngo_du(2, 4, 8, 60, 8).bound == 110855
    br = comb.bound_ngo_du(2, 1, 3, 5, 2)
    assert br.bound == 1 and br.fully_claimed
    assert br.theorem_used is Bound.Q_CONTAINMENT
    assert not comb.bound_ngo_du(2, 4, 8, 60, 8).fully_claimed   # s_bar > q+1
    assert comb.bound_ngo_du(2, 4, 8, 60, 3).fully_claimed
    with pytest.raises(HypothesisViolation, match="k-d >= 2"):
        comb.bound_ngo_du(2, 2, 3, 5, 1)
    with pytest.raises(HypothesisViolation, match="s_bar"):
        comb.bound_ngo_du(2, 1, 3, 5, 3)


def test_guo_wang_q_examples():
    assert comb.bound_guo_wang_q(2, 1, 2, 8, 60, 2).bound == 36893488146882232319 == 2**65 - 2**29 - 1
    assert comb.bound_guo_wang_q(2, 2, 3, 8, 60, 4).bound == 599519146661432524799
    assert comb.bound_guo_wang_q(2, 3, 3, 8, 60, 2) == comb.bound_ngo_du(2, 3, 8, 60, 2)
    br = comb.bound_guo_wang_q(2, 1, 2, 3, 7, 1)
    assert br.bound == 127
    assert (br.q_exponent, br.gaussian_factor, br.private_row_factor) == (5, 1, 4)
    assert br.theorem_used is Bound.Q_INTERSECTION_WIDE and not br.fully_claimed


def test_guo_wang_q_dispatch():
    assert comb.bound_guo_wang_q(2, 1, 3, 4, 10, 1).theorem_used is Bound.Q_INTERSECTION_NARROW
    assert comb.bound_guo_wang_q(2, 2, 3, 4, 10, 1).theorem_used is Bound.Q_INTERSECTION_WIDE
    with pytest.raises(UnknownBound):
        comb.bound_guo_wang_q(2, 0, 2, 4, 10, 1)
    with pytest.raises(UnknownBound):
        comb.bound_guo_wang_q(2, 2, 2, 3, 10, 1)      # i = d, k-d = 1
    with pytest.raises(HypothesisViolation):
        comb.bound_guo_wang_q(2, 3, 2, 4, 10, 1)      # i > d
    with pytest.raises(HypothesisViolation):
        comb.bound_guo_wang_q(2, 1, 2, 3, 6, 1)       # n too small


def test_narrow_formula_by_hand():
    # q=2, i=1, d=3, k=4, n=10, s_bar=1: exponent (d-i)((s+1)k-i) = 2*7,
    # Gaussian [10-8, 2]_2 = 1, alpha = 2^3 [3,0]_2 = 8.
    br = comb.bound_guo_wang_q(2, 1, 3, 4, 10, 1)
    assert (br.q_exponent, br.gaussian_factor, br.private_row_factor) == (14, 1, 8)
    assert br.bound == 2**17 - 1


def test_wide_formula_degenerates_at_i_equal_d():
    for q in (2, 3):
        for k in range(3, 9):
            for d in range(1, k - 1):
                for n in (k + 1, k + 5, 60):
                    for s_bar in range(1, comb.max_s_bar(q, k, d) + 1):
                        assert (comb.bound_guo_wang_q(q, d, d, k, n, s_bar)
                                == comb.bound_ngo_du(q, d, k, n, s_bar))
                        if n - k - s_bar * (k - d) < 0:
                            continue
                        assert (comb._wide(q, d, d, k, n, s_bar).bound
                                == comb.bound_ngo_du(q, d, k, n, s_bar).bound)


def _valid_q_tuples():
    for q in (2, 3):
        for k in range(3, 9):
            for d in range(1, k):
                for i in range(1, d + 1):
                    for n in (k + 1, 2 * k + 3, 40, 60):
                        for s_bar in range(1, comb.max_s_bar(q, k, i) + 2):
                            yield q, i, d, k, n, s_bar


def test_breakdown_product_and_alpha_positivity():
    seen = 0
    for q, i, d, k, n, s_bar in _valid_q_tuples():
        try:
            br = comb.bound_guo_wang_q(q, i, d, k, n, s_bar)
        except (HypothesisViolation, UnknownBound):
            continue
        seen += 1
        assert s_bar <= comb.max_s_bar(q, k, i)
        assert br.private_row_factor > 0
        assert br.bound >= 0
        assert br.bound + 1 == q**br.q_exponent * br.gaussian_factor * br.private_row_factor
    assert seen > 100


@pytest.mark.parametrize("q,k,i", [(2, 8, 1), (2, 8, 2), (2, 8, 3), (3, 5, 2), (4, 4, 1), (2, 3, 1)])
def test_s_bar_precondition_edge(q, k, i):
    top = comb.max_s_bar(q, k, i)
    assert Fraction(top) <= Fraction(q * (q**(k - 1) - 1), q**(k - i) - 1) < top + 1
    assert comb.private_factor(q, i, k, top) > 0
    with pytest.raises(HypothesisViolation, match="s_bar"):
        comb._check_s_bar(q, k, i, top + 1)


def test_max_s_bar_table_values():
    assert [comb.max_s_bar(2, 8, i) for i in (1, 2, 3)] == [2, 4, 8]
    with pytest.raises(HypothesisViolation):
        comb.max_s_bar(2, 3, 3)


# -- reference table and ratio ----------------------------------------------------

def test_table1_reports_side_by_side():
    rows = {(r["i"], r["d"]): r for r in comb.table1()}
    assert len(rows) == 6
    assert all(r["e1_match"] for r in rows.values())
    assert rows[1, 2]["e1_computed"] == 6111
    assert rows[2, 4]["e1_computed"] == 155495
    assert rows[3, 4]["e2_printed"] == 800925501358079 == 2**36 * 11655 - 1
    assert rows[3, 4]["e2_computed"] == 2**57 * 11655 - 1
    assert not rows[3, 4]["e2_match"] and not rows[1, 4]["e2_match"]
    assert rows[1, 4]["e2_computed"] == 2**75 * comb.gaussian(2, 36, 3) - 1
    for key in [(1, 2), (1, 3), (2, 3), (2, 4)]:
        assert rows[key]["e2_match"], key
    assert rows[1, 3]["theorem"] == "q-intersection-narrow"
    assert rows[2, 3]["theorem"] == "q-intersection-wide"


def test_ratio_examples():
    assert comb.test_to_item_ratio(2, 1, 2, 3) == 1
    r = comb.test_to_item_ratio(2, 2, 3, 7)
    assert r == Fraction(2667, 11811)
    assert (r.numerator, r.denominator) == (7, 31)


def test_ratio_decreasing_in_n():
    for q in (2, 3):
        for d, k in [(1, 2), (2, 3), (1, 3), (2, 4)]:
            vals = [comb.test_to_item_ratio(q, d, k, n) for n in range(max(7, k + 1), 21)]
            assert all(a > b for a, b in zip(vals, vals[1:]))


@given(st.integers(0, 40), st.integers(-3, 45))
def test_binom_conventions(a, b):
    v = comb.binom(a, b)
    if b < 0 or b > a:
        assert v == 0
    else:
        assert v == comb.binom(a, a - b) > 0
