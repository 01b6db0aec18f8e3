"""Predictors to be explained.

Three families are provided:

* ``LogGlm`` — exp-linear model, strictly positive by construction, fitted by
  ordinary least squares on the log target.
* ``TreeEnsemble`` — a small gradient-boosted ensemble of binary regression
  trees trained on the log target (squared-error loss, exact greedy splits),
  so its predictions are strictly positive as well.
* ``ExternalModel`` — a bridge to an arbitrary model served by a subprocess
  over a line-oriented protocol (see the class docstring for the wire format).

All predictors are deterministic: identical input matrices produce bitwise
identical outputs.  ``mode == "multiplicative"`` promises strictly positive
predictions; every predictor also works for additive explanations.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ExternalModelError,
    InvalidArgumentError,
    NonPositivePredictionError,
    NonPositiveValueError,
    RankDeficientError,
    ShapeError,
)
from .numerics import WlsProblem, seq_mean, solve_wls

PROTOCOL_VERSION = 1
HANDSHAKE = f"XSHAP-PROTO {PROTOCOL_VERSION}"


def _check_matrix(X, m: int | None = None) -> np.ndarray:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ShapeError(f"expected a non-empty n x m matrix, got shape {arr.shape}")
    if m is not None and arr.shape[1] != m:
        raise ShapeError(f"matrix has {arr.shape[1]} columns, expected {m}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("matrix contains non-finite entries")
    return arr


def _check_positive_target(y) -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError(f"target must be a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        finite = np.isfinite(arr)
        offenders = ~finite | (arr <= 0.0)
        bad = int(np.flatnonzero(offenders)[0])
        raise NonPositiveValueError(f"target[{bad}] = {arr[bad]} is not strictly positive", index=bad)
    return arr


@dataclass(frozen=True)
class LogGlm:
    """Exp-linear predictor: yhat = exp(alpha) * prod_j exp(betas[j] * x[j])."""

    alpha: float
    betas: np.ndarray

    mode = "multiplicative"
    parallel_safe = True

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 1:
            raise InvalidArgumentError("betas must be a 1-D vector")
        object.__setattr__(self, "betas", betas)

    @property
    def n_features(self) -> int:
        return self.betas.size

    def predict(self, X) -> np.ndarray:
        X = _check_matrix(X, self.n_features)
        return np.exp(self.alpha + X @ self.betas)


def fit_log_glm(X, y) -> LogGlm:
    """Least squares of ln(y) on X with intercept.

    Exact on noiseless exp-linear data; requires strictly positive targets
    and at least m + 1 rows.
    """
    X = _check_matrix(X)
    y = _check_positive_target(y)
    n, m = X.shape
    if y.size != n:
        raise ShapeError(f"target length {y.size} does not match {n} rows")
    if n < m + 1:
        raise RankDeficientError(f"need at least {m + 1} rows to fit {m} features plus intercept, got {n}")
    design = np.hstack([np.ones((n, 1)), X])
    coeffs = solve_wls(WlsProblem(design=design, weights=np.ones(n), response=np.log(y)))
    return LogGlm(alpha=float(coeffs[0]), betas=coeffs[1:])


@dataclass(frozen=True)
class RegressionTree:
    """Flat-array binary regression tree; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[node]
            active = np.flatnonzero(feat >= 0)
            if active.size == 0:
                return self.value[node]
            at = node[active]
            go_left = X[active, feat[active]] <= self.threshold[at]
            node[active] = np.where(go_left, self.left[at], self.right[at])


def _best_split(X: np.ndarray, residual: np.ndarray, idx: np.ndarray):
    """Exact greedy split minimising SSE; None when nothing improves.

    Ties break toward the lowest feature index and then the lowest
    threshold, so tree growth is fully deterministic.
    """
    n = idx.size
    r = residual[idx]
    no_split_score = r.sum() ** 2 / n
    best_gain = 0.0
    best = None
    for j in range(X.shape[1]):
        xv = X[idx, j]
        order = np.argsort(xv, kind="stable")
        xs = xv[order]
        prefix = np.cumsum(r[order])
        cuts = np.flatnonzero(xs[1:] > xs[:-1])
        if cuts.size == 0:
            continue
        n_left = cuts + 1.0
        left_sum = prefix[cuts]
        right_sum = prefix[-1] - left_sum
        score = left_sum**2 / n_left + right_sum**2 / (n - n_left)
        k = int(np.argmax(score))
        gain = float(score[k] - no_split_score)
        if gain > best_gain:
            best_gain = gain
            best = (j, float(0.5 * (xs[cuts[k]] + xs[cuts[k] + 1])))
    return best


def _grow_tree(X: np.ndarray, residual: np.ndarray, max_depth: int) -> RegressionTree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def build(idx: np.ndarray, depth: int) -> int:
        node = len(feature)
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        value.append(float(seq_mean(residual[idx])))
        if depth >= max_depth or idx.size < 2:
            return node
        split = _best_split(X, residual, idx)
        if split is None:
            return node
        j, t = split
        feature[node] = j
        threshold[node] = t
        go_left = X[idx, j] <= t
        left[node] = build(idx[go_left], depth + 1)
        right[node] = build(idx[~go_left], depth + 1)
        return node

    build(np.arange(X.shape[0]), 0)
    return RegressionTree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value, dtype=np.float64),
    )


@dataclass(frozen=True)
class TreeEnsemble:
    """Gradient-boosted regression trees, usually over the log target.

    With ``log_target`` set the raw boosted score is exponentiated, which
    guarantees strictly positive predictions without clamping.
    """

    trees: tuple[RegressionTree, ...]
    learning_rate: float
    base_score: float
    log_target: bool = True
    n_features: int = field(default=0)

    parallel_safe = True

    @property
    def mode(self) -> str:
        return "multiplicative" if self.log_target else "additive"

    def raw_score(self, X) -> np.ndarray:
        X = _check_matrix(X, self.n_features or None)
        score = np.full(X.shape[0], self.base_score)
        for tree in self.trees:  # fixed order: bitwise reproducible
            score += self.learning_rate * tree.predict(X)
        return score

    def predict(self, X) -> np.ndarray:
        raw = self.raw_score(X)
        return np.exp(raw) if self.log_target else raw


def fit_gbt(X, y, n_trees: int = 100, max_depth: int = 3, learning_rate: float = 0.1) -> TreeEnsemble:
    """Boost squared-error trees on ln(y); base score is the mean of ln(y)."""
    X = _check_matrix(X)
    y = _check_positive_target(y)
    if y.size != X.shape[0]:
        raise ShapeError(f"target length {y.size} does not match {X.shape[0]} rows")
    if n_trees < 1 or max_depth < 1:
        raise InvalidArgumentError("need n_trees >= 1 and max_depth >= 1")
    if not 0.0 < learning_rate:
        raise InvalidArgumentError("learning_rate must be > 0")
    z = np.log(y)
    base = float(seq_mean(z))
    residual = z - base
    trees = []
    for _ in range(n_trees):
        tree = _grow_tree(X, residual, max_depth)
        residual = residual - learning_rate * tree.predict(X)
        trees.append(tree)
    return TreeEnsemble(
        trees=tuple(trees),
        learning_rate=learning_rate,
        base_score=base,
        log_target=True,
        n_features=X.shape[1],
    )


class ExternalModel:
    """Arbitrary model hosted by a subprocess over a line protocol.

    Wire format (UTF-8 text, '\\n' terminators):

    * handshake — engine sends ``XSHAP-PROTO 1``; the model replies ``OK``;
    * request — ``PREDICT <n> <m>`` followed by n lines of m comma-separated
      decimal floats (shortest round-trip formatting);
    * response — n lines, one decimal float each;
    * shutdown — ``BYE``.

    Not parallel safe: all rows of one request travel through a single
    channel, so callers must serialise access.
    """

    parallel_safe = False

    def __init__(self, command: str | list[str], mode: str = "multiplicative"):
        if mode not in ("multiplicative", "additive"):
            raise InvalidArgumentError(f"unknown mode {mode!r}")
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise InvalidArgumentError("empty external model command")
        self.mode = mode
        self._proc: subprocess.Popen | None = None
        self._stderr = None

    def _diagnostics(self) -> str:
        if self._stderr is None:
            return ""
        try:
            self._stderr.flush()
            self._stderr.seek(0)
            return self._stderr.read().decode("utf-8", errors="replace").strip()
        except OSError:
            return ""

    def _fail(self, message: str) -> ExternalModelError:
        diag = self._diagnostics()
        self.close(graceful=False)
        return ExternalModelError(message + (f" [stderr: {diag}]" if diag else ""), diagnostics=diag)

    def _ensure_started(self) -> subprocess.Popen:
        if self._proc is not None and self._proc.poll() is None:
            return self._proc
        self._stderr = tempfile.TemporaryFile()
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=self._stderr,
                text=True,
            )
        except OSError as exc:
            raise ExternalModelError(f"failed to launch {self.command!r}: {exc}") from exc
        self._send(HANDSHAKE)
        reply = self._proc.stdout.readline().strip()
        if reply != "OK":
            raise self._fail(f"handshake failed: expected 'OK', got {reply!r}")
        return self._proc

    def _send(self, line: str) -> None:
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise self._fail(f"external model pipe closed while writing: {exc}") from exc

    def predict(self, X) -> np.ndarray:
        X = _check_matrix(X)
        n, m = X.shape
        proc = self._ensure_started()
        self._send(f"PREDICT {n} {m}")
        for row in X:
            self._send(",".join(repr(float(v)) for v in row))
        out = np.empty(n)
        for i in range(n):
            line = proc.stdout.readline()
            if line == "":
                raise self._fail(f"reply truncated after {i} of {n} lines")
            try:
                out[i] = float(line.strip())
            except ValueError:
                raise self._fail(f"non-numeric reply line {i}: {line.strip()!r}") from None
        if not np.all(np.isfinite(out)):
            raise self._fail("external model returned non-finite predictions")
        if self.mode == "multiplicative" and np.any(out <= 0.0):
            bad = int(np.flatnonzero(out <= 0.0)[0])
            self.close(graceful=False)
            raise NonPositivePredictionError(
                f"external model returned non-positive prediction {out[bad]} at row {bad} "
                "in multiplicative mode",
                index=bad,
            )
        return out

    def close(self, graceful: bool = True) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            if graceful and proc.poll() is None:
                proc.stdin.write("BYE\n")
                proc.stdin.flush()
        except (BrokenPipeError, OSError):
            pass
        try:
            proc.stdin.close()
        except OSError:
            pass
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()
        if self._stderr is not None:
            self._stderr.close()
            self._stderr = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
