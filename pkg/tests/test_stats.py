import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps
from scipy.special import betainc as sp_betainc

from peerscope.errors import DegenerateInput
from peerscope.stats import (
    RunningStats,
    betainc,
    eta_squared,
    mean_sem,
    pearson,
    summarize_groups,
    t_two_sided_p,
    welch_t,
)

# a 0.01 grid keeps squares away from underflow
finite = st.integers(-100_000, 100_000).map(lambda k: k / 100)


def test_mean_sem_examples():
    m, s = mean_sem([1, 2, 3])
    assert m == 2.0
    assert s == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    assert mean_sem([5, 5, 5, 5]) == (5.0, 0.0)
    with pytest.raises(DegenerateInput):
        mean_sem([])
    with pytest.raises(DegenerateInput):
        mean_sem([1.0])


def test_pearson_examples():
    xs = [1.0, 2.0, 3.0, 4.0]
    assert pearson(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0, abs=1e-12)
    assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-12)
    assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)
    with pytest.raises(DegenerateInput):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(DegenerateInput):
        pearson([1, 2], [1, 2])


def test_eta_squared_examples():
    assert eta_squared([[0, 0], [1, 1]]) == 1.0
    assert eta_squared({"a": [0, 1], "b": [0, 1]}) == 0.0
    # SS_between = 1, SS_total = 2
    assert eta_squared([[0, 1], [1, 2]]) == 0.5
    with pytest.raises(DegenerateInput):
        eta_squared([[3, 3], [3, 3]])
    with pytest.raises(DegenerateInput):
        eta_squared([[1, 2, 3]])


def test_welch_examples_against_scipy():
    t, dof, p = welch_t([1, 2, 3, 4], [3, 4, 5, 6])
    ref = sps.ttest_ind([1, 2, 3, 4], [3, 4, 5, 6], equal_var=False)
    assert t == pytest.approx(-2.1908902300206643, abs=1e-12)
    assert dof == pytest.approx(6.0, abs=1e-12)
    assert t == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, abs=1e-10)
    t0, _, p0 = welch_t([1, 2, 3], [1, 2, 3])
    assert t0 == 0.0 and p0 == 1.0
    with pytest.raises(DegenerateInput):
        welch_t([0, 0, 0, 0], [1, 1, 1, 1])


@given(
    st.floats(min_value=0.05, max_value=200),
    st.floats(min_value=0.05, max_value=200),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_betainc_matches_scipy(a, b, x):
    assert betainc(a, b, x) == pytest.approx(float(sp_betainc(a, b, x)), abs=1e-9)


@given(st.floats(min_value=-50, max_value=50), st.floats(min_value=1.0, max_value=5000))
def test_t_p_value_matches_scipy(t, dof):
    assert t_two_sided_p(t, dof) == pytest.approx(2 * sps.t.sf(abs(t), dof), abs=1e-9)


@given(st.lists(finite, min_size=3, max_size=30).filter(lambda v: len(set(v)) > 1),
       st.floats(min_value=0.1, max_value=10), st.floats(min_value=-100, max_value=100))
def test_pearson_affine_invariance(xs, scale, shift):
    ys = [x * x + i for i, x in enumerate(xs)]
    if len(set(ys)) < 2:
        return
    r = pearson(xs, ys)
    assert pearson([scale * x + shift for x in xs], ys) == pytest.approx(r, abs=1e-9)
    assert pearson(xs, [scale * y + shift for y in ys]) == pytest.approx(r, abs=1e-9)
    assert -1.0 <= r <= 1.0


@given(st.lists(finite, min_size=2, max_size=20), st.lists(finite, min_size=2, max_size=20), finite)
def test_eta_shift_invariant_and_bounded(a, b, shift):
    try:
        eta = eta_squared([a, b])
    except DegenerateInput:
        return
    assert 0.0 <= eta <= 1.0
    assert eta_squared([[x + shift for x in a], [x + shift for x in b]]) == pytest.approx(eta, abs=1e-6)


@given(st.lists(finite, min_size=2, max_size=20), st.lists(finite, min_size=2, max_size=20), st.randoms())
def test_welch_antisymmetric_and_permutation_invariant(a, b, rnd):
    try:
        t, dof, p = welch_t(a, b)
    except DegenerateInput:
        return
    t2, dof2, p2 = welch_t(b, a)
    assert t2 == pytest.approx(-t, rel=1e-12, abs=1e-12)
    assert dof2 == pytest.approx(dof, rel=1e-12)
    a2 = list(a)
    rnd.shuffle(a2)
    assert welch_t(a2, b)[0] == pytest.approx(t, rel=1e-9, abs=1e-9)
    assert 0.0 <= p <= 1.0


@given(st.lists(finite, min_size=2, max_size=50))
def test_running_stats_matches_two_pass(xs):
    s = RunningStats()
    s.extend(xs)
    exact = RunningStats.of(xs)
    assert s.n == exact.n
    assert s.mean == pytest.approx(exact.mean, abs=1e-9)
    assert s.variance == pytest.approx(exact.variance, rel=1e-7, abs=1e-7)
    assert exact.sem == pytest.approx(np.std(xs, ddof=1) / math.sqrt(len(xs)), rel=1e-9, abs=1e-12)


def test_summarize_groups_two_and_three_groups():
    two = summarize_groups({"accepted": RunningStats.of([1, 2, 3, 4]), "rejected": RunningStats.of([3, 4, 5, 6])})
    assert [g.label for g in two] == ["accepted", "rejected"]
    assert two[0].t == pytest.approx(-2.1908902300206643)
    assert two[0].eta_squared == two[1].eta_squared
    three = summarize_groups({k: RunningStats.of(v) for k, v in {"a": [1, 2], "b": [2, 3], "c": [5, 6]}.items()})
    assert all(g.t is None and g.p is None for g in three)
    assert three[0].eta_squared == pytest.approx(eta_squared([[1, 2], [2, 3], [5, 6]]))
    sparse_groups = summarize_groups({"a": RunningStats.of([1.0]), "b": RunningStats()})
    assert sparse_groups[0].sem is None and sparse_groups[1].mean is None
    assert sparse_groups[0].eta_squared is None
