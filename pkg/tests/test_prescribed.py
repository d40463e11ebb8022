import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfricci.errors import PathFailure, ScalingFailure
from hopfricci.geometry import (
    DiagonalForm3,
    FibrationFamily,
    FourParamForm,
    Su2Metric,
    ricci_four_param,
    ricci_su2,
    ricci_two_summand,
)
from hopfricci.prescribed import (
    CBranch,
    ContinuationConfig,
    berger_closed_form,
    c_cubic_coefficients,
    c_from_cubic,
    c_function,
    homotopy_start,
    solvability_predicates,
    solve_four_param_homotopy,
    solve_four_param_symmetric,
    solve_su2,
    solve_two_summand,
    spu1_closed_form,
    two_summand_threshold,
)

SQRT73 = math.sqrt(73.0)
target = st.floats(min_value=0.05, max_value=20.0)


# -- SU(2) ------------------------------------------------------------------


def test_su2_round_target():
    res = solve_su2((1, 1, 1))
    assert res.metric.as_array() == pytest.approx([2, 2, 2], abs=1e-12)
    assert res.kappa == pytest.approx(2.0, abs=1e-12)


def test_su2_berger_target():
    res = solve_su2(DiagonalForm3(2, 1, 1))
    x = res.metric.as_array()
    assert res.kappa == pytest.approx(6 - 2 * math.sqrt(5), abs=1e-12)
    assert x[0] / x[1] == pytest.approx(math.sqrt(5) - 1, rel=1e-12)
    assert x[1] == pytest.approx(x[2], rel=1e-12)
    assert x.sum() == pytest.approx(6.0, rel=1e-14)


def test_su2_generic_target_matches_cubic():
    res = solve_su2((1, 2, 3))
    assert res.residual < 1e-10
    assert res.kappa == pytest.approx(c_function(1, 2, 3).c, rel=1e-8)


@settings(max_examples=60, deadline=None)
@given(target, target, target)
def test_su2_residual_contract(a, b, c):
    res = solve_su2((a, b, c))
    r = ricci_su2(res.metric).as_array()
    assert np.max(np.abs(r - res.kappa * np.array([a, b, c]))) <= 1e-10 * res.kappa * max(a, b, c)


@settings(max_examples=40, deadline=None)
@given(target, target, target, st.integers(0, 2**32 - 1))
def test_su2_solution_independent_of_initialization(a, b, c, seed):
    rng = np.random.default_rng(seed)
    ref = solve_su2((a, b, c)).metric.as_array()
    for _ in range(5):
        other = solve_su2((a, b, c), x0=rng.uniform(0.05, 10, 3)).metric.as_array()
        assert np.max(np.abs(other - ref)) < 1e-8


def test_su2_rejects_nonpositive_target():
    with pytest.raises(ValueError):
        solve_su2((1, 0, 1))


# -- c-function ------------------------------------------------------------


def test_c_function_examples():
    assert c_function(1, 1, 1).c == pytest.approx(2.0, abs=1e-14)
    r = c_function(2, 1, 1)
    assert r.branch is CBranch.DEGENERATE_CLOSED_FORM
    assert r.c == pytest.approx(6 - 2 * math.sqrt(5), abs=1e-14)
    g = c_function(1, 2, 3)
    assert g.branch is CBranch.GENERIC_CUBIC
    assert g.c == pytest.approx(solve_su2((1, 2, 3)).kappa, rel=1e-8)


def test_c_function_root_satisfies_cubic():
    r = c_function(1, 2, 3)
    x = r.metric.as_array()
    # Z is x3/x1 for the labelling with T1 the smallest and T3 the largest
    coeffs = c_cubic_coefficients(1.0, 2.0, 3.0)
    Z = x[2] / x[0]
    scale = np.sum(np.abs(coeffs) * np.abs(Z) ** np.arange(3, -1, -1))
    assert abs(np.polyval(coeffs, Z)) <= 1e-10 * scale


def test_c_function_is_symmetric():
    base = c_function(0.3, 1.7, 4.0).c
    for perm in [(1.7, 0.3, 4.0), (4.0, 1.7, 0.3), (1.7, 4.0, 0.3)]:
        assert c_function(*perm).c == pytest.approx(base, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(target, target, target)
def test_c_function_matches_newton(a, b, c):
    assert c_function(a, b, c).c == pytest.approx(solve_su2((a, b, c)).kappa, rel=1e-8)


def test_closed_form_cubic_newton_agree_on_symmetric_grid():
    grid = np.linspace(0.05, 5.0, 20)
    for d in grid:
        for p in grid:
            closed = c_function(d, p, p).c
            assert closed == pytest.approx(c_from_cubic(d, p, p).c, rel=1e-8)
            assert closed == pytest.approx(solve_su2((d, p, p)).kappa, rel=1e-8)


def test_berger_closed_form_is_the_textbook_expression():
    for d, p in [(0.1, 0.6), (2.0, 1.0), (3.0, 0.2)]:
        rho, c = berger_closed_form(d, p)
        root = math.sqrt(d * d + 8 * d * p)
        assert rho == pytest.approx((-d + root) / (2 * p), rel=1e-12)
        assert c == pytest.approx((d + 4 * p - root) / p**2, rel=1e-10)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 3), st.data())
def test_c_bound_under_ratio_bound(n, data):
    lo = 1.0 / (2 * n + 4)
    t = [data.draw(st.floats(min_value=lo * (1 + 1e-9), max_value=50.0)) for _ in range(3)]
    assert c_function(*t).c < 4 * n + 8


# -- two-summand ------------------------------------------------------------


def test_two_summand_examples():
    sp1 = FibrationFamily("sp1", 1)
    res = solve_two_summand(sp1, 1, 1)
    assert res.metric.t == pytest.approx(1.0, abs=1e-14) and res.kappa == pytest.approx(6.0, abs=1e-13)
    res = solve_two_summand(sp1, 0.5, 1)
    r = (-3 + SQRT73) / 8
    assert res.metric.t == pytest.approx(r, rel=1e-14)
    assert res.kappa == pytest.approx(12 - 6 * r, rel=1e-14)
    A, B = ricci_two_summand(res.metric).coefficients()
    assert A == pytest.approx(res.kappa * 0.5, rel=1e-13)
    assert solve_two_summand(sp1, 1 / 6, 1) is None


@pytest.mark.parametrize(
    "kind,n,expected",
    [("sp1", 1, 1 / 6), ("sp1", 2, 1 / 8), ("sp1", 3, 1 / 10), ("spin7", 1, 3 / 14), ("cp1", 1, 1 / 3), ("cp1", 2, 1 / 4), ("circle", 2, 0.0)],
)
def test_two_summand_thresholds(kind, n, expected):
    fam = FibrationFamily(kind, n)
    assert two_summand_threshold(fam) == pytest.approx(expected, abs=1e-15)
    ratios = np.arange(max(expected - 0.05, 1e-4), expected + 0.05, 1e-4)
    solvable = np.array([solve_two_summand(fam, q, 1.0) is not None for q in ratios])
    assert np.count_nonzero(solvable[1:] != solvable[:-1]) == (0 if expected == 0 else 1)
    assert np.all(solvable == (ratios > expected))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["circle", "sp1", "spin7", "cp1"]), st.integers(1, 4), target, target)
def test_two_summand_residual(kind, n, a, b):
    fam = FibrationFamily(kind, 1 if kind == "spin7" else n)
    res = solve_two_summand(fam, a, b)
    if res is None:
        assert a / b <= two_summand_threshold(fam) * (1 + 1e-12)
        return
    A, B = ricci_two_summand(res.metric).coefficients()
    assert A == pytest.approx(res.kappa * a, rel=1e-10)
    assert B == pytest.approx(res.kappa * b, rel=1e-10)


# -- four-parameter ---------------------------------------------------------


def test_homotopy_round_target():
    res = solve_four_param_homotopy(FourParamForm(1, 1, 1, 1, 1))
    assert res.metric.fiber == pytest.approx([1, 1, 1], abs=1e-8)
    assert res.kappa == pytest.approx(6.0, abs=1e-8)
    assert res.path_report.last_lambda == 4.0


def test_homotopy_matches_two_summand():
    res = solve_four_param_homotopy(FourParamForm(1, 0.5, 0.5, 0.5, 1))
    r = (-3 + SQRT73) / 8
    assert res.metric.fiber == pytest.approx([r, r, r], rel=1e-8)
    assert res.kappa == pytest.approx(12 - 6 * r, rel=1e-8)


def test_homotopy_inherits_symmetry():
    res = solve_four_param_homotopy(FourParamForm(1, 2, 1, 1, 1))
    assert res.residual < 1e-10 and res.kappa > 0
    assert res.metric.x2 == pytest.approx(res.metric.x3, rel=1e-10)


def test_homotopy_scale_of_target():
    a = solve_four_param_homotopy(FourParamForm(2, 1.0, 0.7, 1.3, 1.0))
    b = solve_four_param_homotopy(FourParamForm(2, 3.0, 2.1, 3.9, 3.0))
    assert b.metric.fiber == pytest.approx(a.metric.fiber, rel=1e-9)
    assert b.kappa == pytest.approx(a.kappa / 3.0, rel=1e-9)


def test_homotopy_start_solves_lambda_zero_system():
    n, tau = 1, np.array([0.7, 1.0, 1.6])
    z = homotopy_start(n, tau)
    x, c = z[:3], z[3]
    assert c == pytest.approx(4 * n + 8 - 2 * x.sum(), abs=1e-12)
    r = ricci_su2(Su2Metric(*x)).as_array()
    assert r == pytest.approx(c * tau, rel=1e-10)


def test_homotopy_scaling_failure():
    # b/T_i = 20: the SU(2) constant exceeds 4n + 8, no start point exists
    with pytest.raises(ScalingFailure):
        solve_four_param_homotopy(FourParamForm(1, 0.05, 0.05, 0.05, 1))


def test_homotopy_box_guard():
    cfg = ContinuationConfig(box=(0.9, 1.1))
    with pytest.raises(PathFailure) as info:
        solve_four_param_homotopy(FourParamForm(1, 3, 1, 1, 1), cfg)
    assert 0.0 <= info.value.last_lambda < 4.0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2), st.data())
def test_homotopy_residual_contract(n, data):
    lo = 1.0 / (2 * n + 4)
    t = [data.draw(st.floats(min_value=lo * 1.001, max_value=10.0)) for _ in range(3)]
    T = FourParamForm(n, *t, 1.0)
    res = solve_four_param_homotopy(T)
    ric = np.array(ricci_four_param(res.metric).coefficients())
    assert np.max(np.abs(ric - res.kappa * np.array(T.coefficients()))) < 1e-8 * max(1.0, res.kappa * max(t))
    lo_box, hi_box = ContinuationConfig().box
    for state in res.path_report.states:
        assert np.all(state.point > lo_box) and np.all(state.point < hi_box)


def test_spu1_closed_form_examples():
    f = spu1_closed_form(1, 1, 1, 1)
    assert (f.fiber_ratio, f.c_value, f.condition_holds) == (pytest.approx(1.0), pytest.approx(2.0), True)
    f = spu1_closed_form(1, 2, 1, 1)
    assert f.fiber_ratio == pytest.approx(math.sqrt(5) - 1, rel=1e-14)
    assert f.c_value == pytest.approx(6 - 2 * math.sqrt(5), rel=1e-13)
    f = spu1_closed_form(1, 0.1, 0.6, 1)
    assert f.c_value == pytest.approx(5.0, abs=1e-12) and f.condition_holds


def test_solvability_predicates_examples():
    p = solvability_predicates(FourParamForm(1, 1, 1, 1, 1))
    assert (p.ratio_bound, p.c_condition) == (True, True)
    p = solvability_predicates(FourParamForm(1, 0.1, 0.6, 0.6, 1))
    assert (p.ratio_bound, p.c_condition) == (False, True)
    p = solvability_predicates(FourParamForm(1, 1, 1, 1, 10))
    assert not p.ratio_bound
    assert p.c_value == pytest.approx(20.0) and not p.c_condition


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3), target, target, target)
def test_ratio_bound_implies_c_condition(n, a, b, c):
    p = solvability_predicates(FourParamForm(n, a, b, c, 1.0))
    if p.ratio_bound:
        assert p.c_condition


def test_symmetric_reduction():
    res = solve_four_param_symmetric(FourParamForm(1, 0.5, 0.5, 0.5, 1))
    hom = solve_four_param_homotopy(FourParamForm(1, 0.5, 0.5, 0.5, 1))
    assert res.metric.fiber == pytest.approx(hom.metric.fiber, rel=1e-8)
    assert res.kappa == pytest.approx(hom.kappa, rel=1e-8)
    assert solve_four_param_symmetric(FourParamForm(1, 0.1, 0.1, 0.1, 1)) is None
    with pytest.raises(ValueError):
        solve_four_param_symmetric(FourParamForm(1, 0.5, 0.6, 0.5, 1))
