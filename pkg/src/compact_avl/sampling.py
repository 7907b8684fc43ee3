"""Uniform random shapes by the recursive method.

Small sizes draw with exact big-integer counts. Large sizes use count
tables rescaled by ``rho**n`` (``rho`` the growth constant) so every entry
fits in a double; those tables are built with FFT convolutions and the
per-node draws run in the compiled :func:`kernels.sample_shape`.
"""
from __future__ import annotations

import random
from functools import lru_cache
from typing import Union

import numpy as np

from . import kernels
from .counting import count_by_size_height, height_pairs, max_size, min_size, unbalanced_weight
from .errors import ResourceLimitError
from .growth import growth_constant
from .tree import AvlTree, TreeClass

DEFAULT_SEED = 2897
EXACT_SAMPLE_LIMIT = 1024
SAMPLE_LIMIT = 300_000


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


def sample_uniform(n: int, seed: int = DEFAULT_SEED,
                   class_tag: Union[str, TreeClass] = TreeClass.AVL,
                   method: str = "auto", limit: int = SAMPLE_LIMIT) -> AvlTree:
    """A shape drawn uniformly from all shapes with ``n`` nodes.

    ``method`` is ``"exact"`` (big integers), ``"float"`` (scaled tables) or
    ``"auto"``, which picks exact up to ``EXACT_SAMPLE_LIMIT`` nodes.
    """
    class_tag = TreeClass.parse(class_tag)
    seed = _check_seed(seed)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > limit:
        raise ResourceLimitError(f"sampling limited to n <= {limit}, got {n}")
    if method == "auto":
        method = "exact" if n <= EXACT_SAMPLE_LIMIT else "float"
    if method == "exact":
        return _sample_exact(n, seed, class_tag)
    if method == "float":
        return _sample_float(n, seed, class_tag)
    raise ValueError(f"unknown sampling method {method!r}")


def _sample_exact(n: int, seed: int, class_tag: TreeClass) -> AvlTree:
    table = count_by_size_height(n, class_tag)
    rng = random.Random(seed)
    r = rng.randrange(table.total(n))
    root_h = 0
    for root_h in range(table.max_height + 1):
        r -= table(n, root_h)
        if r < 0:
            break
    left: list[int] = []
    right: list[int] = []
    stack = [(n, root_h, -1, 0)]
    while stack:
        m, g, parent, side = stack.pop()
        v = len(left)
        left.append(-1)
        right.append(-1)
        if parent >= 0:
            (left if side == 0 else right)[parent] = v
        if g == 0:
            continue
        r = rng.randrange(table(m, g))
        pick = None
        for hl, hr in height_pairs(class_tag, g):
            for i in range(m):
                w = table(i, hl) * table(m - 1 - i, hr)
                if r < w:
                    pick = (i, hl, hr)
                    break
                r -= w
            if pick:
                break
        i, hl, hr = pick
        if hr >= 0:
            stack.append((m - 1 - i, hr, v, 1))
        if hl >= 0:
            stack.append((i, hl, v, 0))
    return AvlTree._from_preorder(np.array(left), np.array(right), class_tag)


@lru_cache(maxsize=4)
def scaled_table(class_tag: TreeClass, size: int):
    """``(table, minsize, maxsize)`` with ``table[h+1, m] ~ c(m, h) * rho**m``."""
    rho = growth_constant(class_tag)
    k = unbalanced_weight(class_tag)
    rows = [np.zeros(size + 1), np.zeros(size + 1)]
    rows[0][0] = 1.0
    rows[1][1] = rho
    h = 1
    while min_size(h) <= size:
        a, b = rows[-1], rows[-2]
        prod = _fft_convolve(a, a + k * b, size)
        cur = np.zeros(size + 1)
        cur[1:] = rho * prod[:size]
        lo, hi = min_size(h), min(max_size(h), size)
        cur[:lo] = 0.0
        cur[hi + 1:] = 0.0
        np.clip(cur, 0.0, None, out=cur)
        rows.append(cur)
        h += 1
    heights = np.arange(-1, len(rows) - 1)
    minsize = np.array([min_size(int(g)) for g in heights], dtype=np.int64)
    maxsize = np.array([min(max_size(int(g)), size) for g in heights], dtype=np.int64)
    return np.vstack(rows), minsize, maxsize


def _fft_convolve(a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    length = 1 << (2 * a.size - 1).bit_length()
    out = np.fft.irfft(np.fft.rfft(a, length) * np.fft.rfft(b, length), length)
    return out[:size + 1]


def _table_size(n: int) -> int:
    return max(1024, 1 << (n - 1).bit_length())


def _sample_float(n: int, seed: int, class_tag: TreeClass) -> AvlTree:
    table, minsize, maxsize = scaled_table(class_tag, _table_size(n))
    rng = np.random.default_rng(seed)
    weights = table[:, n]
    root_h = int(np.searchsorted(np.cumsum(weights), rng.random() * weights.sum(), side="right")) - 1
    root_h = min(max(root_h, 0), table.shape[0] - 2)
    while weights[root_h + 1] == 0.0:
        root_h -= 1
    uniforms = rng.random(n)
    ncases = len(height_pairs(class_tag, 2))
    left, right = kernels.sample_shape(table, minsize, maxsize, np.int64(n), np.int64(root_h),
                                       uniforms, np.int64(ncases))
    return AvlTree._from_preorder(left, right, class_tag)
