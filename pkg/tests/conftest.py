import numpy as np
import pytest


class ExpQuadratic:
    """Strictly positive model with genuine feature interactions.

    predict(X) = exp(a + X @ b + scale * sum((X @ Q) * X, axis=1)) with a
    seeded random a, b, Q.  Closed-form, deterministic, and cheap, which makes
    it a good subject for brute-force oracles.
    """

    parallel_safe = True
    mode = "multiplicative"

    def __init__(self, m: int, seed: int, scale: float = 0.25):
        rng = np.random.default_rng(seed)
        self.a = float(rng.uniform(-0.5, 0.5))
        self.b = rng.uniform(-1.0, 1.0, m) / np.sqrt(m)
        self.q = rng.uniform(-1.0, 1.0, (m, m)) / m
        self.scale = scale
        self.m = m

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        return np.exp(self.a + X @ self.b + self.scale * ((X @ self.q) * X).sum(axis=1))


class ColumnSubsetModel:
    """Delegates to an inner model on a subset of columns.

    The dropped columns cannot influence the output, not even at the last
    bit, because they are sliced away before the inner predict runs.
    """

    parallel_safe = True
    mode = "multiplicative"

    def __init__(self, inner, keep):
        self.inner = inner
        self.keep = list(keep)

    def predict(self, X):
        return self.inner.predict(np.asarray(X, dtype=np.float64)[:, self.keep])


class LogOfModel:
    """ln(f): turns a positive model into the matching additive target."""

    parallel_safe = True
    mode = "additive"

    def __init__(self, inner):
        self.inner = inner

    def predict(self, X):
        return np.log(self.inner.predict(X))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
