"""Coalition masks, Shapley combinatorial weights, and budgeted enumeration.

A coalition is a 1-D 0/1 mask over the m features.  Enumeration follows the
Kernel SHAP importance order: size-1 masks each immediately followed by its
complement, then size-2 masks with complements, and so on inward, stopping at
the budget (or at full enumeration of the 2^m - 2 proper non-empty masks,
whichever comes first).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


def shapley_weight(m: int, s: int) -> float:
    """The classic permutation fraction s!(m-s-1)!/m! for a size-s coalition.

    Exact: evaluated with arbitrary-precision integer factorials before the
    final division.
    """
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    if not 0 <= s <= m - 1:
        raise InvalidArgumentError(f"s must be in [0, {m - 1}], got {s}")
    return math.factorial(s) * math.factorial(m - s - 1) / math.factorial(m)


def kernel_weight(m: int, s: int) -> float:
    """Regression kernel weight (m-1) / (binom(m,s) * s * (m-s)).

    Symmetric in s <-> m-s.  The empty and full coalitions (s = 0 or m) have
    infinite weight and are excluded from regressions, so they are rejected.
    """
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    if not 1 <= s <= m - 1:
        raise InvalidArgumentError(
            f"s must be in [1, {m - 1}], got {s} (empty/full coalitions carry infinite weight)"
        )
    return (m - 1) / (math.comb(m, s) * s * (m - s))


def as_mask(mask, m: int | None = None) -> np.ndarray:
    """Validate and return a 0/1 mask as a 1-D uint8 array."""
    arr = np.asarray(mask)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidArgumentError(f"mask must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise InvalidArgumentError("mask entries must be 0 or 1")
    if m is not None and arr.size != m:
        raise InvalidArgumentError(f"mask has length {arr.size}, expected {m}")
    return arr.astype(np.uint8)


def complement(mask) -> np.ndarray:
    """Bitwise-flipped mask; an involution."""
    return (1 - as_mask(mask)).astype(np.uint8)


@dataclass(frozen=True)
class CoalitionPlan:
    """Ordered distinct coalition masks with their regression weights.

    ``masks`` is K x m (uint8), ``weights`` length K and strictly positive in
    non-increasing order; the empty and full masks never appear.
    """

    masks: np.ndarray
    weights: np.ndarray
    m: int

    def __post_init__(self):
        masks = np.asarray(self.masks, dtype=np.uint8)
        weights = np.asarray(self.weights, dtype=np.float64)
        if masks.ndim != 2 or masks.shape[1] != self.m:
            raise InvalidArgumentError(f"masks must be K x {self.m}, got shape {masks.shape}")
        if weights.shape != (masks.shape[0],):
            raise InvalidArgumentError("weights length must match mask count")
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.masks.shape[0]

    @property
    def sizes(self) -> np.ndarray:
        """Coalition sizes (popcounts), consistent with the masks."""
        return self.masks.sum(axis=1).astype(np.int64)


def enumerate_coalitions(m: int, budget: int) -> CoalitionPlan:
    """Enumerate up to ``budget`` coalitions in decreasing kernel weight.

    Within a size round masks are ordered lexicographically by their active
    feature indices; each mask is immediately followed by its complement, and
    masks already emitted are skipped (this matters for m = 2 and for the
    central round when m is even).  A budget of at least 2^m - 2 silently
    yields the full enumeration.
    """
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    if budget < 2:
        raise InvalidArgumentError(f"budget must be >= 2, got {budget}")
    limit = min(budget, 2**m - 2)
    masks: list[np.ndarray] = []
    seen: set[bytes] = set()

    def emit(mask: np.ndarray) -> None:
        key = mask.tobytes()
        if key not in seen:
            seen.add(key)
            masks.append(mask)

    for size in range(1, m // 2 + 1):
        for combo in itertools.combinations(range(m), size):
            if len(masks) >= limit:
                break
            mask = np.zeros(m, dtype=np.uint8)
            mask[list(combo)] = 1
            emit(mask)
            if len(masks) >= limit:
                break
            emit((1 - mask).astype(np.uint8))
        if len(masks) >= limit:
            break

    stacked = np.vstack(masks) if masks else np.zeros((0, m), dtype=np.uint8)
    sizes = stacked.sum(axis=1)
    weights = np.array([kernel_weight(m, int(s)) for s in sizes], dtype=np.float64)
    return CoalitionPlan(masks=stacked, weights=weights, m=m)
