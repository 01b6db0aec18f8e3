"""Shared numerical kernels: means and (constrained) weighted least squares.

Everything here is a pure function over immutable inputs and can be called
from any number of workers.  Reductions run in a fixed sequential
left-to-right order so results are bit-for-bit reproducible, and geometric
means are taken in log space so huge products cannot overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import InvalidArgumentError, NonPositiveValueError, RankDeficientError

# Condition-number threshold on the weighted normal matrix beyond which the
# solve is refused as rank deficient.
CONDITION_LIMIT = 1e12


def seq_sum(a: np.ndarray, axis: int | None = None):
    """Strict left-to-right sequential sum (np.add.accumulate, last slice)."""
    a = np.asarray(a, dtype=np.float64)
    if axis is None:
        if a.size == 0:
            return 0.0
        return float(np.add.accumulate(a.ravel())[-1])
    acc = np.add.accumulate(a, axis=axis)
    return np.take(acc, -1, axis=axis)


def seq_mean(a: np.ndarray, axis: int | None = None):
    """Sequential-sum mean along ``axis`` (whole array if None)."""
    a = np.asarray(a, dtype=np.float64)
    n = a.size if axis is None else a.shape[axis]
    return seq_sum(a, axis=axis) / n


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidArgumentError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise InvalidArgumentError(f"{name}[{bad}] is not finite")
    return arr


def arithmetic_mean(v) -> float:
    """Mean of a non-empty vector of finite reals."""
    arr = _as_vector(v, "v")
    return float(seq_mean(arr))


def geometric_mean(v) -> float:
    """Geometric mean of a non-empty vector of strictly positive reals.

    Computed as exp of the mean of logs; raises NonPositiveValueError with
    the index of the first offending entry if any value is <= 0.
    """
    arr = _as_vector(v, "v")
    if np.any(arr <= 0.0):
        bad = int(np.flatnonzero(arr <= 0.0)[0])
        raise NonPositiveValueError(
            f"geometric mean requires strictly positive values; v[{bad}] = {arr[bad]}",
            index=bad,
        )
    return float(np.exp(seq_mean(np.log(arr))))


@dataclass(frozen=True)
class WlsProblem:
    """A weighted least-squares problem, optionally with a sum constraint.

    ``design`` is K x p, ``weights`` and ``response`` have length K, and all
    weights are strictly positive.  When ``sum_constraint`` is set, the
    coefficients are required to add up to it exactly and only K >= p - 1
    rows are needed; unconstrained problems need K >= p.
    """

    design: np.ndarray
    weights: np.ndarray
    response: np.ndarray
    sum_constraint: float | None = field(default=None)

    def __post_init__(self):
        design = np.asarray(self.design, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        response = np.asarray(self.response, dtype=np.float64)
        if design.ndim != 2:
            raise InvalidArgumentError(f"design must be 2-D, got shape {design.shape}")
        k, p = design.shape
        if p < 1:
            raise InvalidArgumentError("design needs at least one column")
        if weights.shape != (k,) or response.shape != (k,):
            raise InvalidArgumentError(
                f"weights/response must have length {k}, got {weights.shape} and {response.shape}"
            )
        for name, arr in (("design", design), ("weights", weights), ("response", response)):
            if not np.all(np.isfinite(arr)):
                raise InvalidArgumentError(f"{name} contains non-finite entries")
        if np.any(weights <= 0.0):
            bad = int(np.flatnonzero(weights <= 0.0)[0])
            raise NonPositiveValueError(f"weights[{bad}] = {weights[bad]} is not > 0", index=bad)
        needed = p - 1 if self.sum_constraint is not None else p
        if k < needed:
            raise RankDeficientError(
                f"underdetermined system: {k} rows for {p} coefficients"
                + (" (constrained)" if self.sum_constraint is not None else "")
            )
        if self.sum_constraint is not None and not np.isfinite(self.sum_constraint):
            raise InvalidArgumentError("sum_constraint must be finite")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "response", response)

    @property
    def n_coefficients(self) -> int:
        return self.design.shape[1]


def _solve_normal_equations(design: np.ndarray, weights: np.ndarray, response: np.ndarray) -> np.ndarray:
    """Solve min ||sqrt(W)(r - C b)||^2 via the SPD normal equations."""
    weighted = design * weights[:, None]
    normal = design.T @ weighted
    rhs = weighted.T @ response
    cond = float(np.linalg.cond(normal))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise RankDeficientError(
            f"normal matrix condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}",
            condition=cond,
        )
    try:
        factor = cho_factor(normal, lower=True)
    except LinAlgError as exc:
        raise RankDeficientError(
            f"normal matrix is not positive definite ({exc})", condition=cond
        ) from exc
    return cho_solve(factor, rhs)


def solve_wls(problem: WlsProblem) -> np.ndarray:
    """Coefficients minimising the weighted squared residual, unconstrained."""
    if problem.sum_constraint is not None:
        raise InvalidArgumentError("problem carries a sum constraint; use solve_wls_constrained")
    return _solve_normal_equations(problem.design, problem.weights, problem.response)


def _minimum_norm_constrained(design, weights, response, total) -> np.ndarray:
    """Canonical solution when collinear columns leave the optimum non-unique.

    Solves the optimality (KKT) system of the constrained problem with a
    minimum-norm least-squares solve; exchange-symmetric inputs therefore get
    the symmetric split.  Raises if the optimality system is inconsistent.
    """
    p = design.shape[1]
    weighted = design * weights[:, None]
    kkt = np.zeros((p + 1, p + 1))
    kkt[:p, :p] = 2.0 * design.T @ weighted
    kkt[:p, p] = 1.0
    kkt[p, :p] = 1.0
    rhs = np.concatenate([2.0 * weighted.T @ response, [total]])
    solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    gap = np.linalg.norm(kkt @ solution - rhs)
    if gap > 1e-8 * (1.0 + np.linalg.norm(rhs)):
        raise RankDeficientError(
            f"constrained optimality system is inconsistent (residual {gap:.3e})"
        )
    beta = solution[:p]
    # re-pin the constraint exactly; the uniform shift is at rounding level
    return beta + (total - seq_sum(beta)) / p


def solve_wls_constrained(problem: WlsProblem) -> np.ndarray:
    """Weighted least squares subject to sum(coefficients) == sum_constraint.

    The last coefficient is eliminated through the constraint, the reduced
    unconstrained problem is solved, and the eliminated coefficient is
    recovered by back-substitution, so the constraint holds to machine
    precision by construction.  Underdetermined systems (fewer rows than
    free coefficients) raise; collinear columns with a non-unique optimum
    resolve to the minimum-norm solution of the optimality system.
    """
    if problem.sum_constraint is None:
        raise InvalidArgumentError("problem has no sum constraint; use solve_wls")
    total = float(problem.sum_constraint)
    design = problem.design
    p = design.shape[1]
    if p == 1:
        # the constraint pins the single coefficient regardless of the data
        return np.array([total])
    last = design[:, -1]
    reduced_design = design[:, :-1] - last[:, None]
    reduced_response = problem.response - total * last
    try:
        head = _solve_normal_equations(reduced_design, problem.weights, reduced_response)
    except RankDeficientError:
        return _minimum_norm_constrained(design, problem.weights, problem.response, total)
    return np.append(head, total - seq_sum(head))
