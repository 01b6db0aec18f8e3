"""Aggregation of multiplicative explanations.

Group contributions, local/global feature importance, partial dependence and
summary-plot data are all geometric-mean reductions over a batch of
explanations sharing one baseline.  Everything is a pure function of the
batch: permuting batch rows or calling from several workers cannot change any
output beyond reduction roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, ShapeError
from .explain import MultiplicativeExplanation
from .numerics import seq_mean


@dataclass(frozen=True)
class ExplanationBatch:
    """Multiplicative explanations for several observations of one model.

    ``contributions`` is n x m, ``predictions`` length n, ``feature_values``
    the matching observation rows; all explanations share one baseline.
    """

    baseline: float
    contributions: np.ndarray
    predictions: np.ndarray
    feature_values: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        contrib = np.asarray(self.contributions, dtype=np.float64)
        preds = np.asarray(self.predictions, dtype=np.float64)
        values = np.asarray(self.feature_values, dtype=np.float64)
        if contrib.ndim != 2 or contrib.shape[0] == 0:
            raise InvalidArgumentError("batch needs at least one explanation")
        n, m = contrib.shape
        if preds.shape != (n,) or values.shape != (n, m):
            raise ShapeError("predictions/feature_values do not match the contributions")
        if np.any(contrib <= 0.0) or np.any(preds <= 0.0) or self.baseline <= 0.0:
            raise InvalidArgumentError("multiplicative batches must be strictly positive")
        if self.feature_names is not None and len(self.feature_names) != m:
            raise InvalidArgumentError(f"expected {m} feature names")
        object.__setattr__(self, "contributions", contrib)
        object.__setattr__(self, "predictions", preds)
        object.__setattr__(self, "feature_values", values)

    @classmethod
    def from_explanations(cls, explanations, observations, feature_names=None) -> "ExplanationBatch":
        explanations = list(explanations)
        if not explanations:
            raise InvalidArgumentError("batch needs at least one explanation")
        baseline = explanations[0].baseline
        for i, e in enumerate(explanations):
            if not isinstance(e, MultiplicativeExplanation):
                raise InvalidArgumentError("batch members must be multiplicative explanations")
            if e.m != explanations[0].m:
                raise InvalidArgumentError(f"explanation {i} has m = {e.m}, expected {explanations[0].m}")
            if e.baseline != baseline:
                raise InvalidArgumentError(
                    f"explanation {i} has baseline {e.baseline}, expected {baseline}; "
                    "batch members must share one reference set"
                )
        return cls(
            baseline=float(baseline),
            contributions=np.vstack([e.contributions for e in explanations]),
            predictions=np.array([e.prediction for e in explanations]),
            feature_values=np.asarray(observations, dtype=np.float64),
            feature_names=tuple(feature_names) if feature_names is not None else None,
        )

    @property
    def n(self) -> int:
        return self.contributions.shape[0]

    @property
    def m(self) -> int:
        return self.contributions.shape[1]

    def prediction_geomean(self) -> float:
        """Geometric mean of the batch predictions."""
        return float(np.exp(seq_mean(np.log(self.predictions))))


@dataclass(frozen=True)
class GroupSpec:
    """A labelled, non-empty subset of batch rows."""

    members: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        members = tuple(int(i) for i in self.members)
        if not members:
            raise InvalidArgumentError("group must have at least one member")
        if len(set(members)) != len(members):
            raise InvalidArgumentError("group members must be distinct")
        object.__setattr__(self, "members", members)

    def validate(self, n: int) -> None:
        for i in self.members:
            if not 0 <= i < n:
                raise InvalidArgumentError(f"group member {i} is out of range for {n} rows")


def group_contribution(batch: ExplanationBatch, group: GroupSpec) -> np.ndarray:
    """Per-feature geometric mean of the factors over the group members."""
    group.validate(batch.n)
    rows = batch.contributions[list(group.members)]
    return np.exp(seq_mean(np.log(rows), axis=0))


def local_importance(explanation: MultiplicativeExplanation) -> np.ndarray:
    """max(factor, 1/factor): the pull of each feature regardless of direction."""
    c = explanation.contributions
    return np.maximum(c, 1.0 / c)


def global_importance(batch: ExplanationBatch) -> np.ndarray:
    """Geometric mean over the batch of the local importances (always >= 1)."""
    imp = np.maximum(batch.contributions, 1.0 / batch.contributions)
    return np.exp(seq_mean(np.log(imp), axis=0))


@dataclass(frozen=True)
class PartialDependenceCurve:
    """Binned partial dependence of one feature.

    ``values[b]`` is NaN when bin b holds no observations (the bin is then
    absent from serialised output); ``counts`` carries the bin occupancy.
    """

    feature: int
    edges: np.ndarray
    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
            raise InvalidArgumentError("edges must be strictly increasing with >= 2 entries")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))


def _bin_index(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Left-closed, right-open bins; the last bin is closed on the right."""
    idx = np.digitize(values, edges, right=False) - 1
    idx[values == edges[-1]] = edges.size - 2
    return idx


def partial_dependence(batch: ExplanationBatch, feature: int, edges=None, bins: int = 25) -> PartialDependenceCurve:
    """Partial dependence of one feature from the contribution factors.

    Per non-empty bin: (geomean of the feature's factors inside the bin over
    the geomean of all its factors) times the geomean of the batch
    predictions.  Default edges are ``bins`` equal-width intervals over the
    observed range of the feature.
    """
    if not 0 <= feature < batch.m:
        raise InvalidArgumentError(f"feature index {feature} out of range for m = {batch.m}")
    values = batch.feature_values[:, feature]
    if edges is None:
        lo, hi = float(values.min()), float(values.max())
        if hi <= lo:
            hi = lo + 1.0  # degenerate constant column: one artificial bin
        edges = np.linspace(lo, hi, bins + 1)
    edges = np.asarray(edges, dtype=np.float64)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
        raise InvalidArgumentError("edges must be strictly increasing with >= 2 entries")
    if values.min() < edges[0] or values.max() > edges[-1]:
        raise InvalidArgumentError("edges must cover the observed range of the feature")

    idx = _bin_index(values, edges)
    log_psi = np.log(batch.contributions[:, feature])
    overall = seq_mean(log_psi)
    scale = np.log(batch.prediction_geomean())
    n_bins = edges.size - 1
    out = np.full(n_bins, np.nan)
    counts = np.zeros(n_bins, dtype=np.int64)
    for b in range(n_bins):
        members = np.flatnonzero(idx == b)
        counts[b] = members.size
        if members.size:
            out[b] = np.exp(seq_mean(log_psi[members]) - overall + scale)
    if not counts.any():
        raise InvalidArgumentError("every bin is empty")
    return PartialDependenceCurve(feature=feature, edges=edges, values=out, counts=counts)


@dataclass(frozen=True)
class SummaryData:
    """Per-feature (value, factor) pairs ordered by global importance.

    ``order`` lists feature indices by descending importance (ties keep index
    order); ``pairs[k]`` belongs to feature ``order[k]``.
    """

    order: np.ndarray
    importance: np.ndarray
    pairs: tuple[np.ndarray, ...]
    feature_names: tuple[str, ...] | None = field(default=None)


def summary_data(batch: ExplanationBatch, trim_quantile: float | None = None) -> SummaryData:
    """Scatter data behind a contribution summary: one (value, factor) pair
    per observation and feature, features ranked by global importance.

    ``trim_quantile`` optionally drops the most extreme factors per feature
    (display trimming, off by default); it never affects the importances.
    """
    if trim_quantile is not None and not 0.0 <= trim_quantile < 0.5:
        raise InvalidArgumentError("trim_quantile must lie in [0, 0.5)")
    importance = global_importance(batch)
    order = np.argsort(-importance, kind="stable")
    pairs = []
    for j in order:
        col = batch.contributions[:, j]
        vals = batch.feature_values[:, j]
        keep = np.ones(batch.n, dtype=bool)
        if trim_quantile:
            lo, hi = np.quantile(col, [trim_quantile, 1.0 - trim_quantile])
            keep = (col >= lo) & (col <= hi)
            if not keep.any():
                keep[:] = True
        pairs.append(np.column_stack([vals[keep], col[keep]]))
    names = batch.feature_names
    return SummaryData(
        order=order.astype(np.int64),
        importance=importance[order],
        pairs=tuple(pairs),
        feature_names=names,
    )
