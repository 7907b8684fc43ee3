"""Exhaustive enumeration and exact size-by-height counts of tree shapes."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from .errors import ResourceLimitError
from .poly import Poly
from .tree import AvlTree, TreeClass

ENUMERATION_LIMIT = 16


def unbalanced_weight(class_tag: TreeClass) -> int:
    """Number of ordered ways to pair subtrees of heights h-1 and h-2."""
    return 2 if class_tag is TreeClass.AVL else 1


def height_pairs(class_tag: TreeClass, h: int) -> tuple[tuple[int, int], ...]:
    """(left height, right height) combinations allowed under a root of height ``h``."""
    if class_tag is TreeClass.AVL:
        return ((h - 1, h - 1), (h - 1, h - 2), (h - 2, h - 1))
    return ((h - 1, h - 1), (h - 1, h - 2))


def min_size(h: int) -> int:
    """Fewest nodes in a shape of height ``h``: N(h) = N(h-1) + N(h-2) + 1."""
    a, b = 0, 1  # N(-1), N(0)
    if h < 0:
        return 0
    for _ in range(h):
        a, b = b, a + b + 1
    return b


def max_size(h: int) -> int:
    return (1 << (h + 1)) - 1 if h >= 0 else 0


def max_height(n: int) -> int:
    """Largest height any shape with ``n`` nodes can have."""
    h = 0
    while min_size(h + 1) <= n:
        h += 1
    return h


def min_height(n: int) -> int:
    return max(n, 1).bit_length() - 1


@dataclass(frozen=True)
class CountTable:
    """``c(n, h)``: number of shapes with ``n`` nodes and height ``h``, for n <= n_max.

    ``rows[h]`` holds the coefficients of the height-``h`` counting polynomial
    truncated at degree ``n_max`` (index = number of nodes).
    """

    class_tag: TreeClass
    n_max: int
    rows: tuple[tuple[int, ...], ...]

    def __call__(self, n: int, h: int) -> int:
        if h == -1:
            return 1 if n == 0 else 0
        if h < 0 or h >= len(self.rows):
            return 0
        row = self.rows[h]
        return row[n] if 0 <= n < len(row) else 0

    @property
    def max_height(self) -> int:
        return len(self.rows) - 1

    def total(self, n: int) -> int:
        return sum(self(n, h) for h in range(len(self.rows)))

    def totals(self) -> list[int]:
        """``[a_0, a_1, ..., a_{n_max}]`` (``a_0 = 0``: the empty tree is excluded)."""
        out = [0] * (self.n_max + 1)
        for row in self.rows:
            for n, c in enumerate(row):
                out[n] += c
        return out

    def poly(self, h: int) -> Poly:
        if h == -1:
            return Poly([1])
        return Poly(self.rows[h] if 0 <= h < len(self.rows) else ())


@lru_cache(maxsize=8)
def _table(class_tag: TreeClass, n_max: int) -> CountTable:
    k = unbalanced_weight(class_tag)
    prev2 = Poly([1], n_max)          # height -1: the empty subtree, c(0,-1) = 1
    prev1 = Poly([0, 1], n_max)       # height 0: a single node
    rows = [prev1.coeffs]
    h = 1
    while min_size(h) <= n_max:
        # sum over i + j = n - 1 of c(i,h-1)c(j,h-1) + k c(i,h-1)c(j,h-2)
        cur = (prev1 * (prev1 + prev2 * k)).shift(1)
        rows.append(cur.coeffs)
        prev2, prev1 = prev1, Poly(cur.coeffs, n_max)
        h += 1
    padded = tuple(tuple(r) + (0,) * (n_max + 1 - len(r)) for r in rows)
    return CountTable(class_tag, n_max, padded)


def count_by_size_height(n_max: int, class_tag: Union[str, TreeClass] = TreeClass.AVL) -> CountTable:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return _table(TreeClass.parse(class_tag), int(n_max))


# --------------------------------------------------------------------------
# exhaustive enumeration
# --------------------------------------------------------------------------

def _shapes(class_tag: TreeClass, limit: int):
    """Canonically ordered shapes grouped as ``by_size[n] = [(height, shape), ...]``."""
    by_size: list[list] = [[(-1, None)]]
    for n in range(1, limit + 1):
        found = []
        for h in range(min_height(n), max_height(n) + 1):
            allowed = set(height_pairs(class_tag, h))
            for i in range(n):
                for hl, lsub in by_size[i]:
                    for hr, rsub in by_size[n - 1 - i]:
                        if (hl, hr) in allowed:
                            found.append((h, (lsub, rsub)))
        by_size.append(found)
    return by_size


@lru_cache(maxsize=4)
def _shapes_cached(class_tag: TreeClass, limit: int):
    return _shapes(class_tag, limit)


def enumerate_all(n: int, class_tag: Union[str, TreeClass] = TreeClass.AVL,
                  limit: int = ENUMERATION_LIMIT) -> Iterator[AvlTree]:
    """Yield every shape with ``n`` nodes once, ordered by height, then left
    subtree size, then (recursively) left subtree order, then right."""
    class_tag = TreeClass.parse(class_tag)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > limit:
        raise ResourceLimitError(f"exhaustive enumeration limited to n <= {limit}, got {n}")
    shapes = _shapes_cached(class_tag, max(n, min(limit, 12)))[n]
    for _, shape in shapes:
        yield AvlTree.from_nested(shape, class_tag)


def count_enumerated(n: int, class_tag=TreeClass.AVL) -> int:
    return sum(1 for _ in enumerate_all(n, class_tag))
