import itertools

import numpy as np
import pytest

from xshap import (
    InvalidArgumentError,
    complement,
    enumerate_coalitions,
    kernel_weight,
    shapley_weight,
)


def test_shapley_weight_values():
    assert shapley_weight(1, 0) == 1.0
    assert shapley_weight(2, 0) == 0.5
    assert shapley_weight(3, 1) == pytest.approx(1.0 / 6.0, rel=1e-15)


def test_shapley_weight_range_check():
    with pytest.raises(InvalidArgumentError):
        shapley_weight(3, 3)
    with pytest.raises(InvalidArgumentError):
        shapley_weight(3, -1)


@pytest.mark.parametrize("m", range(1, 11))
def test_shapley_weights_sum_to_one_over_excluded_subsets(m):
    # brute force over all 2^(m-1) subsets not containing one fixed feature
    others = range(m - 1)
    total = 0.0
    for size in range(m):
        for _ in itertools.combinations(others, size):
            total += shapley_weight(m, size)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_kernel_weight_values():
    assert kernel_weight(2, 1) == 0.5
    assert kernel_weight(4, 1) == 0.25
    assert kernel_weight(4, 2) == pytest.approx(3.0 / 24.0, rel=1e-15)


def test_kernel_weight_symmetry():
    for m in range(2, 12):
        for s in range(1, m):
            assert kernel_weight(m, s) == pytest.approx(kernel_weight(m, m - s), rel=1e-15)


def test_kernel_weight_rejects_empty_and_full():
    with pytest.raises(InvalidArgumentError):
        kernel_weight(4, 0)
    with pytest.raises(InvalidArgumentError):
        kernel_weight(4, 4)


def test_complement_examples():
    np.testing.assert_array_equal(complement([1, 0, 1]), [0, 1, 0])
    np.testing.assert_array_equal(complement([0, 0, 0]), [1, 1, 1])
    np.testing.assert_array_equal(complement([1, 1, 1, 1]), [0, 0, 0, 0])


def test_complement_is_an_involution(rng):
    for _ in range(20):
        mask = rng.integers(0, 2, int(rng.integers(1, 12)))
        np.testing.assert_array_equal(complement(complement(mask)), mask)


def test_enumerate_two_features():
    plan = enumerate_coalitions(2, budget=10)
    assert len(plan) == 2
    np.testing.assert_array_equal(plan.masks, [[1, 0], [0, 1]])
    np.testing.assert_allclose(plan.weights, [0.5, 0.5])


def test_enumerate_three_features_order():
    plan = enumerate_coalitions(3, budget=6)
    expected = [
        [1, 0, 0],
        [0, 1, 1],
        [0, 1, 0],
        [1, 0, 1],
        [0, 0, 1],
        [1, 1, 0],
    ]
    np.testing.assert_array_equal(plan.masks, expected)


def test_enumerate_budget_cuts_before_middle_sizes():
    plan = enumerate_coalitions(4, budget=8)
    assert len(plan) == 8
    sizes = set(plan.sizes.tolist())
    assert sizes == {1, 3}


def test_enumerate_never_emits_empty_full_or_duplicates(rng):
    for m in range(1, 9):
        budget = int(rng.integers(2, 40))
        plan = enumerate_coalitions(m, budget)
        sizes = plan.sizes
        assert np.all(sizes >= 1) and np.all(sizes <= m - 1 if m > 1 else sizes <= 0)
        keys = {mask.tobytes() for mask in plan.masks}
        assert len(keys) == len(plan)


def test_enumerate_weights_are_non_increasing(rng):
    for _ in range(10):
        m = int(rng.integers(2, 10))
        budget = int(rng.integers(2, 2**m + 5))
        plan = enumerate_coalitions(m, budget)
        assert np.all(np.diff(plan.weights) <= 1e-15)


@pytest.mark.parametrize("m", range(2, 9))
def test_enumerate_full_budget_covers_every_proper_coalition(m):
    plan = enumerate_coalitions(m, budget=2**m - 2)
    assert len(plan) == 2**m - 2
    got = {mask.tobytes() for mask in plan.masks}
    want = set()
    for bits in itertools.product((0, 1), repeat=m):
        if 0 < sum(bits) < m:
            want.add(np.array(bits, dtype=np.uint8).tobytes())
    assert got == want
    # asking for more silently truncates to the same full enumeration
    assert len(enumerate_coalitions(m, budget=10**6)) == 2**m - 2


def test_enumerate_even_budgets_are_complement_closed():
    for m in (5, 6, 8):
        for budget in (4, 10, 24):
            plan = enumerate_coalitions(m, budget)
            keys = {mask.tobytes() for mask in plan.masks}
            for mask in plan.masks:
                assert complement(mask).tobytes() in keys


def test_enumerate_rejects_tiny_budget():
    with pytest.raises(InvalidArgumentError):
        enumerate_coalitions(4, budget=1)
