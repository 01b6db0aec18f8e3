import numpy as np
import pytest

from xshap import (
    InvalidArgumentError,
    NonPositiveValueError,
    RankDeficientError,
    WlsProblem,
    arithmetic_mean,
    geometric_mean,
    solve_wls,
    solve_wls_constrained,
)


def test_arithmetic_mean_values():
    assert arithmetic_mean([1.0, 2.0, 3.0]) == 2.0
    assert arithmetic_mean([5.0]) == 5.0
    assert arithmetic_mean([-1.0, 1.0]) == 0.0


def test_arithmetic_mean_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        arithmetic_mean([])
    with pytest.raises(InvalidArgumentError):
        arithmetic_mean([1.0, np.nan])
    with pytest.raises(InvalidArgumentError):
        arithmetic_mean([np.inf])


def test_geometric_mean_values():
    assert geometric_mean([1.0, 4.0]) == pytest.approx(2.0, rel=1e-14)
    assert geometric_mean([2.0, 2.0, 2.0]) == pytest.approx(2.0, rel=1e-14)
    assert geometric_mean([1.0, 10.0, 100.0]) == pytest.approx(10.0, rel=1e-14)


def test_geometric_mean_reports_offending_index():
    with pytest.raises(NonPositiveValueError) as excinfo:
        geometric_mean([2.0, 3.0, 0.0, 4.0])
    assert excinfo.value.index == 2
    with pytest.raises(NonPositiveValueError) as excinfo:
        geometric_mean([-1.0, 1.0])
    assert excinfo.value.index == 0


def test_geometric_mean_is_overflow_safe():
    # the raw product would overflow float64; the log-space path must not
    assert geometric_mean([1e300, 1e300, 1e300]) == pytest.approx(1e300, rel=1e-12)
    assert geometric_mean([1e-300, 1e300]) == pytest.approx(1.0, rel=1e-12)


def test_am_gm_inequality_on_random_vectors(rng):
    for _ in range(300):
        n = int(rng.integers(1, 20))
        v = np.exp(rng.normal(0.0, 2.0, n))
        gm, am = geometric_mean(v), arithmetic_mean(v)
        assert gm <= am * (1.0 + 1e-12)
        if np.ptp(v) > 1e-9 * v.max():
            assert gm < am
    # equality within tolerance iff all entries equal
    const = np.full(7, 3.25)
    assert geometric_mean(const) == pytest.approx(arithmetic_mean(const), abs=1e-12)


def test_geometric_mean_scales_linearly(rng):
    for _ in range(50):
        v = np.exp(rng.normal(0.0, 1.0, int(rng.integers(1, 12))))
        c = float(np.exp(rng.normal()))
        assert geometric_mean(c * v) == pytest.approx(c * geometric_mean(v), rel=1e-12)


def test_solve_wls_identity_design_interpolates():
    r = np.array([3.0, -1.0, 2.5])
    problem = WlsProblem(design=np.eye(3), weights=np.ones(3), response=r)
    np.testing.assert_allclose(solve_wls(problem), r, rtol=1e-12)


def test_solve_wls_weighted_scalar():
    # minimize 1*c^2 + 3*(c-4)^2  ->  c = 3
    problem = WlsProblem(
        design=np.array([[1.0], [1.0]]),
        weights=np.array([1.0, 3.0]),
        response=np.array([0.0, 4.0]),
    )
    np.testing.assert_allclose(solve_wls(problem), [3.0], rtol=1e-12)


def test_solve_wls_matches_dense_normal_equation_oracle(rng):
    design = rng.normal(size=(8, 3))
    weights = np.exp(rng.normal(size=8))
    response = rng.normal(size=8)
    # independent oracle: explicitly inverted weighted normal equations
    w = np.diag(weights)
    expected = np.linalg.inv(design.T @ w @ design) @ (design.T @ w @ response)
    got = solve_wls(WlsProblem(design=design, weights=weights, response=response))
    np.testing.assert_allclose(got, expected, atol=1e-10)


def test_solve_wls_recovers_consistent_systems(rng):
    for _ in range(25):
        k, p = int(rng.integers(4, 12)), int(rng.integers(1, 4))
        design = rng.normal(size=(k, p))
        truth = rng.normal(size=p)
        problem = WlsProblem(
            design=design, weights=np.exp(rng.normal(size=k)), response=design @ truth
        )
        np.testing.assert_allclose(solve_wls(problem), truth, atol=1e-10)


def test_solve_wls_rank_deficient_reports_condition():
    design = np.column_stack([np.ones(5), np.ones(5)])  # duplicate columns
    problem = WlsProblem(design=design, weights=np.ones(5), response=np.arange(5.0))
    with pytest.raises(RankDeficientError) as excinfo:
        solve_wls(problem)
    assert excinfo.value.condition is None or excinfo.value.condition > 1e12


def test_wls_problem_validation():
    with pytest.raises(RankDeficientError):
        WlsProblem(design=np.ones((1, 2)), weights=np.ones(1), response=np.ones(1))
    with pytest.raises(NonPositiveValueError):
        WlsProblem(design=np.ones((2, 1)), weights=np.array([1.0, 0.0]), response=np.ones(2))
    with pytest.raises(InvalidArgumentError):
        WlsProblem(design=np.full((2, 1), np.nan), weights=np.ones(2), response=np.ones(2))
    with pytest.raises(InvalidArgumentError):
        solve_wls(
            WlsProblem(
                design=np.ones((2, 1)),
                weights=np.ones(2),
                response=np.ones(2),
                sum_constraint=1.0,
            )
        )


def test_constrained_single_coefficient_is_pinned():
    problem = WlsProblem(
        design=np.ones((3, 1)),
        weights=np.ones(3),
        response=np.array([10.0, 20.0, 30.0]),
        sum_constraint=-2.5,
    )
    np.testing.assert_array_equal(solve_wls_constrained(problem), [-2.5])


def test_constrained_symmetric_problem_splits_evenly():
    design = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
    problem = WlsProblem(
        design=design, weights=np.ones(3), response=np.array([4.0, 4.0, 4.0]), sum_constraint=4.0
    )
    np.testing.assert_allclose(solve_wls_constrained(problem), [2.0, 2.0], atol=1e-12)


def _lagrange_oracle(design, weights, response, total):
    """KKT system for the equality-constrained weighted least squares."""
    p = design.shape[1]
    w = np.diag(weights)
    kkt = np.zeros((p + 1, p + 1))
    kkt[:p, :p] = 2.0 * design.T @ w @ design
    kkt[:p, p] = 1.0
    kkt[p, :p] = 1.0
    rhs = np.concatenate([2.0 * design.T @ w @ response, [total]])
    return np.linalg.solve(kkt, rhs)[:p]


def test_constrained_matches_lagrange_oracle(rng):
    design = rng.normal(size=(10, 4))
    weights = np.exp(rng.normal(size=10))
    response = rng.normal(size=10)
    problem = WlsProblem(design=design, weights=weights, response=response, sum_constraint=1.0)
    got = solve_wls_constrained(problem)
    expected = _lagrange_oracle(design, weights, response, 1.0)
    np.testing.assert_allclose(got, expected, atol=1e-10)
    assert abs(got.sum() - 1.0) <= 1e-12


def test_constrained_sum_holds_on_random_problems(rng):
    for _ in range(50):
        k, p = int(rng.integers(3, 15)), int(rng.integers(1, 6))
        if k < p - 1:
            continue
        total = float(rng.normal())
        problem = WlsProblem(
            design=rng.normal(size=(k, p)),
            weights=np.exp(rng.normal(size=k)),
            response=rng.normal(size=k),
            sum_constraint=total,
        )
        try:
            coeffs = solve_wls_constrained(problem)
        except RankDeficientError:
            continue
        assert abs(coeffs.sum() - total) <= 1e-12


def test_constrained_degenerate_columns_resolve_symmetrically():
    # three identical columns: the optimum is non-unique; the canonical
    # minimum-norm answer splits the constrained total evenly
    design = np.ones((5, 3))
    problem = WlsProblem(
        design=design, weights=np.ones(5), response=np.arange(5.0), sum_constraint=1.0
    )
    np.testing.assert_allclose(solve_wls_constrained(problem), [1 / 3] * 3, atol=1e-10)


def test_constrained_underdetermined_by_count_raises():
    with pytest.raises(RankDeficientError):
        WlsProblem(
            design=np.eye(4)[:2], weights=np.ones(2), response=np.ones(2), sum_constraint=1.0
        )
