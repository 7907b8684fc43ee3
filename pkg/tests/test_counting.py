import math
from functools import lru_cache

import pytest

from compact_avl.counting import (
    count_by_size_height, count_enumerated, enumerate_all, max_height, max_size, min_height,
    min_size,
)
from compact_avl.errors import ResourceLimitError
from compact_avl.growth import count_exact, growth_bracket, builtin
from compact_avl.tree import TreeClass, to_text, validate

# [DERIVED] frozen from the brute-force filter below (n <= 10) and exhaustive enumeration
AVL_COUNTS = [1, 2, 1, 4, 6, 4, 17, 32, 44, 60, 70, 184, 476, 872]
LLAVL_COUNTS = [1, 1, 1, 1, 2, 2, 2, 3, 5, 7, 9, 11, 13, 17]


@lru_cache(maxsize=None)
def _all_binary(n):
    """Every binary tree shape with n nodes as (shape, height)."""
    if n == 0:
        return ((None, -1),)
    out = []
    for i in range(n):
        for ls, lh in _all_binary(i):
            for rs, rh in _all_binary(n - 1 - i):
                out.append(((ls, rs), 1 + max(lh, rh)))
    return tuple(out)


def _brute_count(n, left_leaning):
    def ok(shape):
        if shape is None:
            return True, -1
        lok, lh = ok(shape[0])
        rok, rh = ok(shape[1])
        good = lok and rok and abs(lh - rh) <= 1 and (not left_leaning or lh >= rh)
        return good, 1 + max(lh, rh)
    return sum(1 for s, _ in _all_binary(n) if ok(s)[0])


def test_brute_force_oracle_matches_frozen_counts():
    for n in range(1, 11):
        assert _brute_count(n, False) == AVL_COUNTS[n - 1]
        assert _brute_count(n, True) == LLAVL_COUNTS[n - 1]


def test_five_node_count():
    assert count_by_size_height(5).total(5) == 6
    assert count_exact(5)[4] == 6
    assert count_exact(1) == [1]


@pytest.mark.parametrize("cls,expected", [(TreeClass.AVL, AVL_COUNTS), (TreeClass.LLAVL, LLAVL_COUNTS)])
def test_counts_match_enumeration(cls, expected):
    table = count_by_size_height(14, cls)
    for n in range(1, 15):
        assert table.total(n) == count_enumerated(n, cls) == expected[n - 1]
    assert table.totals()[1:] == expected


def test_small_enumerations():
    assert len(list(enumerate_all(1))) == 1
    assert len(list(enumerate_all(2, "avl"))) == 2
    assert len(list(enumerate_all(2, "llavl"))) == 1


def test_enumeration_unique_valid_and_height_ordered():
    for cls in TreeClass:
        for n in range(1, 13):
            trees = list(enumerate_all(n, cls))
            assert len({to_text(t) for t in trees}) == len(trees)
            assert all(validate(t).valid for t in trees)
            heights = [t.height for t in trees]
            assert heights == sorted(heights)


def test_enumeration_order_is_canonical():
    texts = [to_text(t) for t in enumerate_all(4)]
    # height 2 only; left size 1 before 2; a 2-node subtree with left size 0 first
    assert texts == ["((..)(.(..)))", "((..)((..).))", "((.(..))(..))", "(((..).)(..))"]


def test_enumeration_limit():
    with pytest.raises(ResourceLimitError):
        next(enumerate_all(17))
    with pytest.raises(ValueError):
        next(enumerate_all(0))


def test_counts_vanish_below_minimum_size():
    table = count_by_size_height(200)
    assert [min_size(h) for h in range(-1, 6)] == [0, 1, 2, 4, 7, 12, 20]
    for h in range(table.max_height + 1):
        for n in range(0, 201):
            if n < min_size(h) or n > max_size(h):
                assert table(n, h) == 0
            elif n <= 200:
                assert table(n, h) > 0


def test_height_range_helpers():
    for n in range(1, 300):
        assert min_size(max_height(n)) <= n < min_size(max_height(n) + 1)
        assert max_size(min_height(n)) >= n > max_size(min_height(n) - 1)


def test_empty_subtree_convention():
    table = count_by_size_height(3)
    assert table(0, -1) == 1
    assert table(2, 1) == 2 and table(3, 1) == 1
    assert count_by_size_height(3, "llavl")(2, 1) == 1


def test_growth_ratio_of_counts():
    a = count_exact(1001)
    ratio = a[1000] / a[999]
    assert abs(ratio - 1 / 0.5219) / (1 / 0.5219) < 0.05


def test_subexponential_residual():
    a = count_exact(1000)
    alpha_upper = float(growth_bracket(builtin("avl")).alpha_upper)
    rate = math.log2(1 / alpha_upper)

    def residual(n):
        return math.log2(a[n - 1]) - n * rate
    increments = (residual(1000) - residual(500)) / 500
    assert abs(increments) < 0.01


def test_count_limit():
    with pytest.raises(ResourceLimitError):
        count_exact(20_000)
