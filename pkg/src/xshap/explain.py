"""Additive and multiplicative Shapley-value attributions for any predictor.

The value of a coalition is interventional: active features are pinned to the
explained observation, inactive ones are substituted row-by-row from a
reference sample, the predictor is applied, and the results are averaged —
arithmetically for additive attributions, geometrically for multiplicative
ones.  Both the budgeted regression estimators and the exact brute-force
oracles share this single convention, which is what makes them agree at full
enumeration.

Estimators solve an equality-constrained weighted regression whose constraint
pins the sum (log-sum) of contributions to the prediction gap, so the
reconstruction identity

    baseline + sum(contributions)   = prediction   (additive)
    baseline * prod(contributions)  = prediction   (multiplicative)

holds to machine precision by construction, not as an approximation target.

Explanations of distinct observations are independent; ``explain_batch`` can
fan them out over worker threads.  Within one explanation every reduction runs
in a fixed order, so results are bit-for-bit identical regardless of worker
count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coalitions import CoalitionPlan, shapley_weight
from .errors import (
    ExplanationError,
    InvalidArgumentError,
    NonPositivePredictionError,
    RankDeficientError,
    ShapeError,
    TooManyFeaturesError,
)
from .numerics import WlsProblem, seq_mean, seq_sum, solve_wls_constrained

# Reconstruction identity tolerance (relative).
LOCAL_ACCURACY_RTOL = 1e-10
# Exact enumeration is 2^m predictor sweeps; beyond this it stops being cheap.
MAX_ORACLE_FEATURES = 12
# Perturbed datasets are evaluated in batches of at most this many rows.
MAX_BATCH_ROWS = 1 << 18


def as_predict_fn(model):
    """Accept either a bare callable or an object with a .predict method."""
    if callable(model) and not hasattr(model, "predict"):
        return model
    predict = getattr(model, "predict", None)
    if predict is None:
        raise InvalidArgumentError("model must be callable or expose a .predict method")
    return predict


def is_parallel_safe(model) -> bool:
    return bool(getattr(model, "parallel_safe", True))


def _check_row(x, m: int) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size != m:
        raise ShapeError(f"observation must be a vector of length {m}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("observation contains non-finite entries")
    return arr


@dataclass(frozen=True)
class AdditiveExplanation:
    """Baseline plus per-feature terms that sum to the prediction."""

    baseline: float
    contributions: np.ndarray
    prediction: float

    def __post_init__(self):
        contrib = np.asarray(self.contributions, dtype=np.float64)
        if contrib.ndim != 1 or contrib.size == 0:
            raise InvalidArgumentError("contributions must be a non-empty vector")
        if not np.all(np.isfinite(contrib)):
            raise InvalidArgumentError("contributions contain non-finite entries")
        object.__setattr__(self, "contributions", contrib)
        gap = abs(self.baseline + seq_sum(contrib) - self.prediction)
        if gap > LOCAL_ACCURACY_RTOL * max(1.0, abs(self.prediction)):
            raise ExplanationError(
                f"additive reconstruction off by {gap:.3e} for prediction {self.prediction}"
            )

    @property
    def m(self) -> int:
        return self.contributions.size


@dataclass(frozen=True)
class MultiplicativeExplanation:
    """Positive baseline and per-feature factors whose product is the prediction."""

    baseline: float
    contributions: np.ndarray
    prediction: float

    def __post_init__(self):
        contrib = np.asarray(self.contributions, dtype=np.float64)
        if contrib.ndim != 1 or contrib.size == 0:
            raise InvalidArgumentError("contributions must be a non-empty vector")
        if not np.all(np.isfinite(contrib)) or np.any(contrib <= 0.0):
            raise InvalidArgumentError("multiplicative contributions must be finite and > 0")
        if not (self.baseline > 0.0 and self.prediction > 0.0):
            raise InvalidArgumentError("baseline and prediction must be > 0")
        object.__setattr__(self, "contributions", contrib)
        log_product = np.log(self.baseline) + seq_sum(np.log(contrib))
        gap = abs(np.exp(log_product) - self.prediction) / self.prediction
        if gap > LOCAL_ACCURACY_RTOL:
            raise ExplanationError(
                f"multiplicative reconstruction off by {gap:.3e} (relative) "
                f"for prediction {self.prediction}"
            )

    @property
    def m(self) -> int:
        return self.contributions.size


class ReferenceSet:
    """A reference sample bound to one predictor, with cached baselines.

    The additive baseline is the arithmetic mean of the predictor over the
    sample; the multiplicative baseline is the geometric mean and exists only
    when every cached prediction is strictly positive.
    """

    def __init__(self, table: np.ndarray, predictions: np.ndarray):
        table = np.asarray(table, dtype=np.float64)
        predictions = np.asarray(predictions, dtype=np.float64)
        if table.ndim != 2 or table.shape[0] == 0 or table.shape[1] == 0:
            raise ShapeError(f"reference table must be n x m with n, m >= 1, got {table.shape}")
        if predictions.shape != (table.shape[0],):
            raise ShapeError("cached predictions must match the reference rows")
        if not np.all(np.isfinite(table)) or not np.all(np.isfinite(predictions)):
            raise InvalidArgumentError("reference data contains non-finite entries")
        self.table = table
        self.predictions = predictions
        self.additive_baseline = float(seq_mean(predictions))
        if np.all(predictions > 0.0):
            self._log_baseline = float(seq_mean(np.log(predictions)))
        else:
            self._log_baseline = None

    @classmethod
    def build(cls, model, table) -> "ReferenceSet":
        table = np.asarray(table, dtype=np.float64)
        return cls(table, as_predict_fn(model)(table))

    @property
    def n(self) -> int:
        return self.table.shape[0]

    @property
    def m(self) -> int:
        return self.table.shape[1]

    @property
    def multiplicative_baseline(self) -> float:
        if self._log_baseline is None:
            bad = int(np.flatnonzero(self.predictions <= 0.0)[0])
            raise NonPositivePredictionError(
                f"reference prediction {self.predictions[bad]} at row {bad} is not > 0; "
                "multiplicative mode needs a strictly positive predictor",
                index=bad,
            )
        return float(np.exp(self._log_baseline))


def build_perturbed_dataset(x, ref: ReferenceSet, mask) -> np.ndarray:
    """Reference rows with the mask-active columns overwritten by ``x``."""
    x = _check_row(x, ref.m)
    mask = np.asarray(mask)
    if mask.shape != (ref.m,):
        raise ShapeError(f"mask must have length {ref.m}, got shape {mask.shape}")
    return np.where(mask.astype(bool), x, ref.table)


def _predict_block(predict, block: np.ndarray, log: bool) -> np.ndarray:
    preds = np.asarray(predict(block), dtype=np.float64)
    if preds.shape != (block.shape[0],):
        raise ShapeError(
            f"predictor returned shape {preds.shape} for {block.shape[0]} rows"
        )
    if not log:
        return preds
    if np.any(preds <= 0.0) or not np.all(np.isfinite(preds)):
        offenders = ~np.isfinite(preds) | (preds <= 0.0)
        bad = int(np.flatnonzero(offenders)[0])
        raise NonPositivePredictionError(
            f"prediction {preds[bad]} is not strictly positive; multiplicative "
            "attributions need a positive-valued model",
            index=bad,
        )
    return np.log(preds)


def _coalition_values(predict, x: np.ndarray, ref: ReferenceSet, masks: np.ndarray, log: bool) -> np.ndarray:
    """Per-coalition (log-)mean of the predictor over the perturbed datasets.

    Coalitions are stacked into batches of at most MAX_BATCH_ROWS rows per
    predictor call; per-row predictions do not depend on batching, so the
    chunk size never changes the result.
    """
    k = masks.shape[0]
    n = ref.n
    values = np.empty(k)
    chunk = max(1, MAX_BATCH_ROWS // n)
    active = masks.astype(bool)
    for start in range(0, k, chunk):
        part = active[start : start + chunk]
        block = np.where(part[:, None, :], x[None, None, :], ref.table[None, :, :])
        preds = _predict_block(predict, block.reshape(-1, ref.m), log)
        values[start : start + chunk] = seq_mean(preds.reshape(part.shape[0], n), axis=1)
    return values


def coalition_value_additive(model, x, ref: ReferenceSet, mask) -> float:
    """Arithmetic mean of the predictor over the perturbed coalition dataset."""
    x = _check_row(x, ref.m)
    mask = np.asarray(mask).reshape(1, -1)
    if mask.shape[1] != ref.m:
        raise ShapeError(f"mask must have length {ref.m}")
    return float(_coalition_values(as_predict_fn(model), x, ref, mask, log=False)[0])


def coalition_value_multiplicative(model, x, ref: ReferenceSet, mask) -> float:
    """Geometric mean of the predictor over the perturbed coalition dataset."""
    x = _check_row(x, ref.m)
    mask = np.asarray(mask).reshape(1, -1)
    if mask.shape[1] != ref.m:
        raise ShapeError(f"mask must have length {ref.m}")
    return float(np.exp(_coalition_values(as_predict_fn(model), x, ref, mask, log=True)[0]))


def _solve_plan(plan: CoalitionPlan, response: np.ndarray, total: float) -> np.ndarray:
    try:
        problem = WlsProblem(
            design=plan.masks.astype(np.float64),
            weights=plan.weights,
            response=response,
            sum_constraint=total,
        )
        return solve_wls_constrained(problem)
    except RankDeficientError as exc:
        raise ExplanationError(
            f"coalition regression is rank deficient with {len(plan)} coalitions for "
            f"m = {plan.m}; increase the coalition budget ({exc})"
        ) from exc


def kernel_shap_explain(model, x, ref: ReferenceSet, plan: CoalitionPlan) -> AdditiveExplanation:
    """Budgeted additive attribution via constrained weighted regression.

    The regression response is the gap between each coalition's value and the
    additive baseline; the constraint pins the contribution sum to
    f(x) - baseline, which enforces the reconstruction identity exactly.
    """
    if plan.m != ref.m:
        raise ShapeError(f"plan is for m = {plan.m} but reference has m = {ref.m}")
    predict = as_predict_fn(model)
    x = _check_row(x, ref.m)
    fx = float(_predict_block(predict, x[None, :], log=False)[0])
    response = _coalition_values(predict, x, ref, plan.masks, log=False) - ref.additive_baseline
    coeffs = _solve_plan(plan, response, fx - ref.additive_baseline)
    return AdditiveExplanation(baseline=ref.additive_baseline, contributions=coeffs, prediction=fx)


def x_shap_explain(model, x, ref: ReferenceSet, plan: CoalitionPlan) -> MultiplicativeExplanation:
    """Budgeted multiplicative attribution.

    Coalition-to-baseline ratio gaps are taken in log space, the same
    constrained regression is solved there, and the coefficients are
    exponentiated into per-feature factors.
    """
    if plan.m != ref.m:
        raise ShapeError(f"plan is for m = {plan.m} but reference has m = {ref.m}")
    predict = as_predict_fn(model)
    x = _check_row(x, ref.m)
    log_baseline = np.log(ref.multiplicative_baseline)
    log_fx = float(_predict_block(predict, x[None, :], log=True)[0])
    response = _coalition_values(predict, x, ref, plan.masks, log=True) - log_baseline
    coeffs = _solve_plan(plan, response, log_fx - log_baseline)
    return MultiplicativeExplanation(
        baseline=ref.multiplicative_baseline,
        contributions=np.exp(coeffs),
        prediction=float(np.exp(log_fx)),
    )


def _subgame_features(m: int, features) -> list[int]:
    if features is None:
        features = range(m)
    feats = [int(j) for j in features]
    if len(feats) == 0:
        raise InvalidArgumentError("subgame needs at least one feature")
    if len(set(feats)) != len(feats) or not all(0 <= j < m for j in feats):
        raise InvalidArgumentError(f"features must be distinct indices in [0, {m})")
    if len(feats) > MAX_ORACLE_FEATURES:
        raise TooManyFeaturesError(
            f"exact enumeration over {len(feats)} features needs 2^{len(feats)} sweeps; "
            f"the cap is {MAX_ORACLE_FEATURES}"
        )
    return feats


def _subgame_value_table(predict, x, ref: ReferenceSet, feats: list[int], log: bool) -> np.ndarray:
    """Coalition values for every subset of ``feats``, indexed by bitmask."""
    s = len(feats)
    count = 1 << s
    bits = (np.arange(count)[:, None] >> np.arange(s)[None, :]) & 1
    masks = np.zeros((count, ref.m), dtype=np.uint8)
    masks[:, feats] = bits
    return _coalition_values(predict, x, ref, masks, log=log)


def _shapley_from_value_table(values: np.ndarray, s: int) -> np.ndarray:
    """Brute-force Shapley sum over a 2^s value table."""
    weight_by_size = np.array([shapley_weight(s, size) for size in range(s)])
    indices = np.arange(1 << s)
    popcount = np.array([int(i).bit_count() for i in range(1 << s)])
    phi = np.empty(s)
    for i in range(s):
        bit = 1 << i
        without = indices[(indices & bit) == 0]
        w = weight_by_size[popcount[without]]
        phi[i] = float(w @ (values[without + bit] - values[without]))
    return phi


def exact_additive_shapley(model, x, ref: ReferenceSet, features=None) -> AdditiveExplanation:
    """Exact additive Shapley attribution by full coalition enumeration.

    ``features`` restricts the game to a subset of players (the rest stay
    permanently inactive); excluded features get a zero contribution and the
    reported prediction is the restricted full-coalition value.
    """
    x = _check_row(x, ref.m)
    feats = _subgame_features(ref.m, features)
    predict = as_predict_fn(model)
    values = _subgame_value_table(predict, x, ref, feats, log=False)
    phi = _shapley_from_value_table(values, len(feats))
    contributions = np.zeros(ref.m)
    contributions[feats] = phi
    return AdditiveExplanation(
        baseline=ref.additive_baseline,
        contributions=contributions,
        prediction=float(values[-1]),
    )


def exact_multiplicative_shapley(model, x, ref: ReferenceSet, features=None) -> MultiplicativeExplanation:
    """Exact multiplicative Shapley attribution by full coalition enumeration.

    Works on log coalition values (geometric means), then exponentiates, so a
    feature outside the game (or one the model ignores) gets a factor of
    exactly 1.
    """
    x = _check_row(x, ref.m)
    feats = _subgame_features(ref.m, features)
    predict = as_predict_fn(model)
    baseline = ref.multiplicative_baseline
    values = _subgame_value_table(predict, x, ref, feats, log=True)
    phi = _shapley_from_value_table(values, len(feats))
    contributions = np.ones(ref.m)
    contributions[feats] = np.exp(phi)
    return MultiplicativeExplanation(
        baseline=baseline,
        contributions=contributions,
        prediction=float(np.exp(values[-1])),
    )


def glm_closed_form_contributions(glm, x, table) -> MultiplicativeExplanation:
    """Closed-form factors of a log-link GLM against a perturbation table.

    Factor j is exp(beta_j * (x_j - mean of column j)); the baseline is
    exp(alpha) times the product of exp(beta_j * column mean).  With the
    reference table as ``table`` this coincides with the exact oracle.
    """
    table = np.asarray(table, dtype=np.float64)
    if table.ndim != 2 or table.shape[1] != glm.n_features:
        raise ShapeError(f"table must be n x {glm.n_features}, got shape {table.shape}")
    x = _check_row(x, glm.n_features)
    col_means = seq_mean(table, axis=0)
    contributions = np.exp(glm.betas * (x - col_means))
    baseline = float(np.exp(glm.alpha + seq_sum(glm.betas * col_means)))
    prediction = float(glm.predict(x[None, :])[0])
    return MultiplicativeExplanation(
        baseline=baseline, contributions=contributions, prediction=prediction
    )


def explain_batch(model, X, ref: ReferenceSet, plan: CoalitionPlan, mode: str = "multiplicative", jobs: int = 1):
    """Explain each row of X; rows fan out over ``jobs`` worker threads.

    Output order follows row order regardless of scheduling, and predictors
    that are not parallel safe (external subprocesses) are served serially.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != ref.m:
        raise ShapeError(f"X must be n x {ref.m}, got shape {X.shape}")
    if mode == "multiplicative":
        explain_one = lambda row: x_shap_explain(model, row, ref, plan)
    elif mode == "additive":
        explain_one = lambda row: kernel_shap_explain(model, row, ref, plan)
    else:
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    rows = list(X)
    if jobs <= 1 or len(rows) <= 1 or not is_parallel_safe(model):
        return [explain_one(row) for row in rows]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(explain_one, rows))
