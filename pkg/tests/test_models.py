import numpy as np
import pytest

from xshap import (
    LogGlm,
    NonPositiveValueError,
    RankDeficientError,
    ShapeError,
    fit_gbt,
    fit_log_glm,
)
from xshap.models import RegressionTree


def test_log_glm_prediction_values():
    glm = LogGlm(alpha=0.0, betas=np.array([1.0, 2.0]))
    assert glm.predict([[0.0, 0.0]])[0] == 1.0
    assert glm.predict([[1.0, 0.0]])[0] == pytest.approx(np.e, rel=1e-15)
    flat = LogGlm(alpha=1.0, betas=np.zeros(3))
    np.testing.assert_allclose(flat.predict([[4.0, -2.0, 7.0]]), [np.e], rtol=1e-15)


def test_log_glm_shape_check():
    glm = LogGlm(alpha=0.0, betas=np.array([1.0, 2.0]))
    with pytest.raises(ShapeError):
        glm.predict([[1.0, 2.0, 3.0]])


def test_fit_log_glm_round_trips_noiseless_data(rng):
    truth = LogGlm(alpha=0.3, betas=np.array([1.0, -2.0]))
    X = rng.normal(size=(40, 2))
    fitted = fit_log_glm(X, truth.predict(X))
    assert fitted.alpha == pytest.approx(0.3, abs=1e-8)
    np.testing.assert_allclose(fitted.betas, truth.betas, atol=1e-8)


def test_fit_log_glm_constant_target(rng):
    X = rng.normal(size=(20, 3))
    fitted = fit_log_glm(X, np.full(20, 7.5))
    assert fitted.alpha == pytest.approx(np.log(7.5), abs=1e-10)
    np.testing.assert_allclose(fitted.betas, np.zeros(3), atol=1e-10)


def test_fit_log_glm_underdetermined():
    with pytest.raises(RankDeficientError):
        fit_log_glm(np.eye(3), np.ones(3))  # n = m: one row short of m + 1


def test_fit_log_glm_rejects_non_positive_target(rng):
    X = rng.normal(size=(10, 2))
    y = np.abs(rng.normal(size=10)) + 0.1
    y[4] = 0.0
    with pytest.raises(NonPositiveValueError) as excinfo:
        fit_log_glm(X, y)
    assert excinfo.value.index == 4


def test_gbt_constant_target_is_reproduced(rng):
    X = rng.normal(size=(30, 4))
    model = fit_gbt(X, np.full(30, 3.75), n_trees=5, max_depth=4)
    np.testing.assert_allclose(model.predict(X), np.full(30, 3.75), rtol=1e-12)


def test_gbt_single_stump_recovers_step_function():
    X = np.linspace(0.0, 1.0, 16).reshape(-1, 1)
    y = np.where(X[:, 0] <= 0.5, 2.0, 6.0)
    model = fit_gbt(X, y, n_trees=1, max_depth=1, learning_rate=1.0)
    np.testing.assert_allclose(model.predict(X), y, rtol=1e-10)
    # the stump must match a hand-built tree splitting at the step
    stump = model.trees[0]
    assert stump.feature[0] == 0
    lo = X[X[:, 0] <= stump.threshold[0], 0].max()
    hi = X[X[:, 0] > stump.threshold[0], 0].min()
    assert lo <= 0.5 < hi
    hand = RegressionTree(
        feature=np.array([0, -1, -1], dtype=np.int32),
        threshold=np.array([stump.threshold[0], np.nan, np.nan]),
        left=np.array([1, -1, -1], dtype=np.int32),
        right=np.array([2, -1, -1], dtype=np.int32),
        value=np.array([0.0, np.log(2.0) - model.base_score, np.log(6.0) - model.base_score]),
    )
    np.testing.assert_allclose(stump.predict(X), hand.predict(X), rtol=1e-12)


def test_gbt_training_loss_is_non_increasing(rng):
    X = rng.normal(size=(60, 3))
    y = np.exp(0.2 + X @ np.array([0.5, -0.3, 0.8]) + 0.3 * rng.normal(size=60))
    model = fit_gbt(X, y, n_trees=25, max_depth=2, learning_rate=0.3)
    z = np.log(y)
    raw = np.full(60, model.base_score)
    losses = [np.mean((z - raw) ** 2)]
    for tree in model.trees:
        raw = raw + model.learning_rate * tree.predict(X)
        losses.append(np.mean((z - raw) ** 2))
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


def test_gbt_predictions_are_strictly_positive(rng):
    X = rng.normal(size=(50, 5))
    y = np.exp(rng.normal(size=50))
    model = fit_gbt(X, y, n_trees=20, max_depth=3)
    probe = rng.normal(size=(200, 5)) * 5.0
    assert np.all(model.predict(probe) > 0.0)


def test_gbt_fit_and_predict_are_deterministic(rng):
    X = rng.normal(size=(40, 3))
    y = np.exp(rng.normal(size=40))
    a = fit_gbt(X, y, n_trees=10, max_depth=3)
    b = fit_gbt(X, y, n_trees=10, max_depth=3)
    probe = rng.normal(size=(64, 3))
    assert np.array_equal(a.predict(probe), b.predict(probe))
    assert np.array_equal(a.predict(probe), a.predict(probe.copy()))


def test_glm_prediction_is_deterministic(rng):
    glm = LogGlm(alpha=0.1, betas=rng.normal(size=6))
    probe = rng.normal(size=(128, 6))
    assert np.array_equal(glm.predict(probe), glm.predict(probe.copy()))
