import json

import numpy as np
import pytest

from sqrtreg import (
    DimensionError,
    GroundTruth,
    RegressionProblem,
    SimulationConfig,
    generate_problem,
    inner_n,
    norm_n,
    prediction_error_l2,
    residual,
)


def test_norm_n_basics():
    assert norm_n(np.zeros(5)) == 0.0
    assert norm_n(np.array([3.0, 4.0])) == pytest.approx(np.sqrt(25 / 2))
    assert norm_n(np.array([])) == 0.0


def test_norm_n_squared_times_n_is_sum_of_squares():
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = rng.standard_normal(rng.integers(1, 40)) * rng.uniform(0.01, 100)
        assert norm_n(v) ** 2 * v.size == pytest.approx(np.sum(v ** 2), rel=1e-12)


def test_inner_n():
    u = np.array([1.0, 2.0, 3.0])
    v = np.array([4.0, 5.0, 6.0])
    assert inner_n(u, v) == pytest.approx((4 + 10 + 18) / 3)
    with pytest.raises(DimensionError):
        inner_n(u, v[:2])


def test_problem_validation():
    with pytest.raises(DimensionError, match="rows"):
        RegressionProblem(X=np.eye(3), Y=np.ones(2))
    with pytest.raises(ValueError, match="NaN"):
        RegressionProblem(X=np.array([[np.nan, 0.0]]), Y=np.ones(1))
    with pytest.raises(ValueError, match="NaN"):
        RegressionProblem(X=np.ones((2, 2)), Y=np.array([1.0, np.inf]))
    prob = RegressionProblem(X=np.eye(2), Y=np.ones(2))
    assert (prob.n, prob.p) == (2, 2)
    with pytest.raises(ValueError):
        prob.X[0, 0] = 5.0  # immutable


def test_residual_examples():
    prob = RegressionProblem(X=np.eye(2), Y=np.array([3.0, 1.0]))
    np.testing.assert_allclose(residual(prob, np.zeros(2)), prob.Y)
    np.testing.assert_allclose(residual(prob, np.array([1.0, 1.0])), [2.0, 0.0])
    with pytest.raises(DimensionError, match="beta"):
        residual(prob, np.ones(3))


def test_residual_on_simulated_data_recovers_noise_exactly():
    problem, truth = generate_problem(SimulationConfig(n=15, p=10, repetitions=1, seed=4))
    np.testing.assert_array_equal(residual(problem, truth.beta0), truth.noise)


def test_residual_is_affine():
    rng = np.random.default_rng(1)
    prob = RegressionProblem(X=rng.standard_normal((12, 7)), Y=rng.standard_normal(12))
    for _ in range(50):
        b1, b2 = rng.standard_normal(7), rng.standard_normal(7)
        lhs = residual(prob, b1) - residual(prob, b2)
        np.testing.assert_allclose(lhs, -prob.X @ (b1 - b2), atol=1e-12)


def test_prediction_error_examples():
    prob = RegressionProblem(X=np.eye(2), Y=np.zeros(2))
    assert prediction_error_l2(prob, np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 0.0
    assert prediction_error_l2(prob, np.zeros(2), np.array([1.0, 0.0])) == pytest.approx(1.0)


def test_prediction_error_matches_direct_recomputation():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((5, 3))
    prob = RegressionProblem(X=X, Y=rng.standard_normal(5))
    bh, b0 = rng.standard_normal(3), rng.standard_normal(3)
    expected = np.sqrt(np.sum((X @ (b0 - bh)) ** 2))
    assert prediction_error_l2(prob, bh, b0) == pytest.approx(expected, rel=1e-12)


def test_prediction_error_is_not_scaled_by_n():
    # duplicate every row: the metric must grow by sqrt(2), not stay fixed
    rng = np.random.default_rng(3)
    X = rng.standard_normal((4, 3))
    p1 = RegressionProblem(X=X, Y=np.zeros(4))
    p2 = RegressionProblem(X=np.vstack([X, X]), Y=np.zeros(8))
    bh, b0 = rng.standard_normal(3), rng.standard_normal(3)
    assert prediction_error_l2(p2, bh, b0) == pytest.approx(
        np.sqrt(2) * prediction_error_l2(p1, bh, b0)
    )


def test_problem_json_roundtrip(tmp_path):
    rng = np.random.default_rng(5)
    prob = RegressionProblem(X=rng.standard_normal((6, 4)), Y=rng.standard_normal(6))
    path = tmp_path / "problem.json"
    prob.to_json(path)
    back = RegressionProblem.from_json(path)
    np.testing.assert_array_equal(back.X, prob.X)
    np.testing.assert_array_equal(back.Y, prob.Y)
    # document the exact field names
    data = json.loads(path.read_text())
    assert set(data) == {"X", "Y"}


def test_problem_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(6)
    prob = RegressionProblem(X=rng.standard_normal((6, 4)), Y=rng.standard_normal(6))
    xp, yp = tmp_path / "X.csv", tmp_path / "Y.csv"
    prob.to_csv(xp, yp)
    back = RegressionProblem.from_csv(xp, yp)
    np.testing.assert_allclose(back.X, prob.X, atol=1e-14)
    np.testing.assert_allclose(back.Y, prob.Y, atol=1e-14)


def test_ground_truth_active_set_must_match_support():
    beta0 = np.array([1.0, 0.0, 2.0])
    GroundTruth(beta0=beta0, sigma=1.0, noise=np.zeros(4), active_set=(0, 2))
    with pytest.raises(ValueError, match="active_set"):
        GroundTruth(beta0=beta0, sigma=1.0, noise=np.zeros(4), active_set=(0, 1))
    with pytest.raises(ValueError, match="sigma"):
        GroundTruth(beta0=beta0, sigma=-1.0, noise=np.zeros(4), active_set=(0, 2))
