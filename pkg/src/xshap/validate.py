"""Quantitative self-checks behind the ``validate`` command.

Each function returns plain floats/dicts so the CLI can serialise them and the
test-suite can assert on them directly: reconstruction-error statistics over a
batch, contribution convergence against the coalition budget, equivalence of
the budgeted estimators with the exact oracles, and the closed-form
reconciliation for log-link GLMs.
"""

from __future__ import annotations

import numpy as np

from .coalitions import enumerate_coalitions
from .explain import (
    AdditiveExplanation,
    MultiplicativeExplanation,
    ReferenceSet,
    exact_additive_shapley,
    exact_multiplicative_shapley,
    explain_batch,
    glm_closed_form_contributions,
    kernel_shap_explain,
    x_shap_explain,
)
from .errors import InvalidArgumentError
from .numerics import seq_sum


def reconstruction_ape(explanation) -> float:
    """Absolute percentage error of the efficiency identity for one explanation."""
    if isinstance(explanation, MultiplicativeExplanation):
        recon = float(
            np.exp(np.log(explanation.baseline) + seq_sum(np.log(explanation.contributions)))
        )
    elif isinstance(explanation, AdditiveExplanation):
        recon = float(explanation.baseline + seq_sum(explanation.contributions))
    else:
        raise InvalidArgumentError(f"not an explanation: {type(explanation).__name__}")
    return abs(recon - explanation.prediction) / abs(explanation.prediction)


def local_accuracy_stats(explanations) -> dict:
    """mean/median/std/max of the reconstruction APE over a batch."""
    apes = np.array([reconstruction_ape(e) for e in explanations])
    if apes.size == 0:
        raise InvalidArgumentError("no explanations to score")
    return {
        "count": int(apes.size),
        "mean_ape": float(apes.mean()),
        "median_ape": float(np.median(apes)),
        "std_ape": float(apes.std()),
        "max_ape": float(apes.max()),
    }


def _relative_gap(a: np.ndarray, b: np.ndarray, atol: float = 1e-12) -> float:
    """Largest |a - b| / max(|b|, atol) over all components."""
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), atol)))


def convergence_curve(model, rows, ref: ReferenceSet, budgets, mode: str = "multiplicative", jobs: int = 1):
    """Max relative contribution change of each budget against the largest one.

    Returns (budgets, errors) where errors[i] is the worst relative deviation
    of any contribution at budgets[i] from its value at budgets[-1]; the last
    entry is 0 by construction.  Budgets are truncated to the full enumeration
    when they exceed it, and deduplicated.
    """
    rows = np.asarray(rows, dtype=np.float64)
    full = 2**ref.m - 2
    capped = sorted({min(int(b), full) for b in budgets})
    if len(capped) < 2:
        raise InvalidArgumentError("need at least two distinct budgets")
    per_budget = []
    for budget in capped:
        plan = enumerate_coalitions(ref.m, budget)
        explanations = explain_batch(model, rows, ref, plan, mode=mode, jobs=jobs)
        per_budget.append(np.vstack([e.contributions for e in explanations]))
    final = per_budget[-1]
    scale = np.maximum(np.abs(final), 1e-12)
    errors = [float(np.max(np.abs(contrib - final) / scale)) for contrib in per_budget]
    return capped, errors


def oracle_equivalence_check(model, rows, ref: ReferenceSet, rtol: float = 1e-8, atol: float = 1e-12) -> dict:
    """Budgeted estimators at full enumeration vs the brute-force oracles."""
    rows = np.asarray(rows, dtype=np.float64)
    plan = enumerate_coalitions(ref.m, 2**ref.m - 2)
    worst_mult = 0.0
    worst_add = 0.0
    for x in rows:
        est_mult = x_shap_explain(model, x, ref, plan)
        oracle_mult = exact_multiplicative_shapley(model, x, ref)
        worst_mult = max(worst_mult, _relative_gap(est_mult.contributions, oracle_mult.contributions, atol))
        est_add = kernel_shap_explain(model, x, ref, plan)
        oracle_add = exact_additive_shapley(model, x, ref)
        worst_add = max(worst_add, _relative_gap(est_add.contributions, oracle_add.contributions, atol))
    return {
        "rows": int(rows.shape[0]),
        "max_rel_multiplicative": worst_mult,
        "max_rel_additive": worst_add,
        "tolerance": rtol,
        "passed": worst_mult <= rtol and worst_add <= rtol,
    }


def glm_reconciliation_check(glm, rows, ref: ReferenceSet, rtol: float = 1e-6, baseline_rtol: float = 1e-8) -> dict:
    """Exact oracle vs the closed-form factors of a log-link GLM.

    The closed form is evaluated against the reference table, whose rows are
    the perturbation distribution the oracle actually samples from.
    """
    rows = np.asarray(rows, dtype=np.float64)
    worst = 0.0
    worst_baseline = 0.0
    for x in rows:
        oracle = exact_multiplicative_shapley(glm, x, ref)
        closed = glm_closed_form_contributions(glm, x, ref.table)
        worst = max(worst, _relative_gap(oracle.contributions, closed.contributions))
        worst_baseline = max(
            worst_baseline, abs(oracle.baseline - closed.baseline) / closed.baseline
        )
    return {
        "rows": int(rows.shape[0]),
        "max_rel_contributions": worst,
        "max_rel_baseline": worst_baseline,
        "tolerance": rtol,
        "baseline_tolerance": baseline_rtol,
        "passed": worst <= rtol and worst_baseline <= baseline_rtol,
    }
