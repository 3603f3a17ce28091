import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from hanso.annotation import LabelClass
from hanso.evaluate import (
    BinaryTarget,
    auc,
    binarize,
    mean_std_compare,
    roc_curve,
    student_t_sf,
    youden_j,
)
from oracles import brute_force_roc, pair_counting_auc, t_two_sided_p_by_quadrature


def test_binarize():
    assert binarize(LabelClass.BILATERAL) is BinaryTarget.BILATERAL
    for c in (LabelClass.NONE, LabelClass.PRESENT, LabelClass.UNILATERAL):
        assert binarize(c) is BinaryTarget.NOT_BILATERAL
    assert binarize("present") is BinaryTarget.NOT_BILATERAL


def test_roc_simple_cases():
    curve = roc_curve([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0])
    assert any(p.fpr == 0.0 and p.tpr == 1.0 for p in curve)
    assert auc(curve) == 1.0
    y = youden_j(curve)
    assert (y.j, y.threshold, y.fpr, y.tpr) == (1.0, 0.8, 0.0, 1.0)

    flat = roc_curve([0.5] * 4, [1, 0, 1, 0])
    assert [(p.fpr, p.tpr) for p in flat] == [(0.0, 0.0), (1.0, 1.0)]
    assert flat[0].threshold == math.inf
    assert auc(flat) == 0.5
    assert youden_j(flat).j == 0.0

    with pytest.raises(ValueError):
        roc_curve([0.1, 0.2], [1, 1])


def test_youden_hand_case():
    y = youden_j(roc_curve([0.9, 0.8, 0.4, 0.2], [1, 1, 0, 0]))
    assert y.j == 1.0 and y.threshold == 0.8


def test_youden_tie_breaks():
    # points (fpr, tpr): (0,0) (0,.5) (.5,.5) (.5,1) (1,1); J = .5 at (0,.5) and (.5,1)
    y = youden_j(roc_curve([4, 3, 2, 1], [1, 0, 1, 0]))
    assert (y.fpr, y.tpr, y.threshold) == (0.0, 0.5, 4.0)


def test_roc_matches_brute_force_on_random_cases():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = 8
        scores = rng.integers(0, 5, size=n) / 4.0  # plenty of ties
        targets = rng.integers(0, 2, size=n)
        if targets.min() == targets.max():
            continue
        got = [(p.threshold, p.fpr, p.tpr) for p in roc_curve(scores, targets)]
        ref = brute_force_roc(list(scores), list(targets))
        assert len(got) == len(ref)
        for g, r in zip(got, ref):
            assert g == pytest.approx(r, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 6), st.integers(0, 1)), min_size=2, max_size=30).filter(
        lambda xs: len({t for _, t in xs}) == 2
    )
)
def test_auc_properties(pairs):
    scores = [s / 3.0 for s, _ in pairs]
    targets = [t for _, t in pairs]
    curve = roc_curve(scores, targets)
    a = auc(curve)
    assert a == pytest.approx(pair_counting_auc(scores, targets), abs=1e-12)
    assert 0.0 <= a <= 1.0
    assert auc(roc_curve([-s for s in scores], targets)) == pytest.approx(1.0 - a, abs=1e-12)
    for p, q in zip(curve, curve[1:]):
        assert q.fpr >= p.fpr and q.tpr >= p.tpr and q.threshold < p.threshold
    y = youden_j(curve)
    assert any((p.threshold, p.fpr, p.tpr) == (y.threshold, y.fpr, y.tpr) for p in curve)
    assert y.j == y.tpr - y.fpr
    assert y.j == max(p.tpr - p.fpr for p in curve)


# --------------------------------------------------------------------------
# Welch


def test_t_tail_against_quadrature():
    for df in (1.0, 2.5, 9.0, 24.98, 300.0):
        for t in (0.0, 0.3, 1.7, 2.455, 6.0):
            assert 2 * student_t_sf(t, df) == pytest.approx(t_two_sided_p_by_quadrature(t, df), rel=1e-9, abs=1e-14)
    assert student_t_sf(-1.0, 5.0) == pytest.approx(1 - student_t_sf(1.0, 5.0), abs=1e-15)


def test_welch_textbook_fixture():
    a = [27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4]
    b = [27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4]
    r = mean_std_compare(a, b)
    # commonly quoted rounding of this example: t = -2.46, df = 25.0, p = 0.021
    assert round(r.t, 2) == -2.46 and round(r.df, 1) == 25.0 and round(r.p_two_sided, 3) == 0.021
    assert r.p_two_sided == pytest.approx(t_two_sided_p_by_quadrature(r.t, r.df), rel=1e-9)
    ref = stats.ttest_ind(a, b, equal_var=False)
    assert r.t == pytest.approx(ref.statistic, rel=1e-12)
    assert r.p_two_sided == pytest.approx(ref.pvalue, rel=1e-9)


def test_welch_degenerate_and_separated():
    r = mean_std_compare([0.5, 0.5, 0.5], [0.5, 0.5])
    assert r.t == 0.0 and r.p_two_sided == 1.0
    rng = np.random.default_rng(1)
    base = rng.normal(size=10) * 1e-3
    r = mean_std_compare(base + 10, base)
    assert r.p_two_sided < 0.001
    r = mean_std_compare([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert r.t == 0.0 and r.p_two_sided == pytest.approx(1.0)
    with pytest.raises(ValueError):
        mean_std_compare([1.0], [1.0, 2.0])
