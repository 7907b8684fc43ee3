"""AVL / left-leaning AVL tree shapes, validation, node statistics and serializers.

Shapes are stored as an index arena: two ``int64`` arrays ``left`` and
``right`` with ``-1`` for a missing child. Nodes are always numbered in
pre-order, so the root is node 0, every child has a larger index than its
parent, and two equal shapes have identical arrays.
"""
from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import kernels
from .errors import FormatError, InvalidTreeError, StructureError


class TreeClass(enum.Enum):
    AVL = "avl"
    LLAVL = "llavl"

    @classmethod
    def parse(cls, value: Union[str, "TreeClass"]) -> "TreeClass":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown tree class {value!r}; expected 'avl' or 'llavl'") from None


class NodeClass(enum.IntEnum):
    """Role of a node in the codec's statistics."""

    DEPTH0 = 0
    DEPTH1_BALANCED = 1
    DEPTH1_LEFT = 2
    DEPTH1_RIGHT = 3
    DEPTH2_UNBALANCED = 4
    UPPER = 5


class Balance(enum.IntEnum):
    """Balance symbol of a node of depth >= 1 (the codec's alphabet order)."""

    BALANCED = 0
    LEFT = 1
    RIGHT = 2


_STRUCT_MESSAGES = {
    kernels.BAD_INDEX: "child index out of range",
    kernels.REVISITED: "a node is reachable twice (cycle or shared child)",
    kernels.UNREACHED: "some nodes are not reachable from the root",
}


class AvlTree:
    """An immutable binary tree shape tagged with the class it claims to belong to.

    Construction only checks that the arrays form one rooted binary tree;
    use :func:`validate` for the balance condition.
    """

    __slots__ = ("left", "right", "class_tag", "_heights")

    def __init__(self, left, right, class_tag: Union[str, TreeClass] = TreeClass.AVL,
                 root: int = 0):
        left = np.asarray(left, dtype=np.int64)
        right = np.asarray(right, dtype=np.int64)
        if left.ndim != 1 or left.shape != right.shape:
            raise StructureError("left and right must be 1-d arrays of equal length")
        if left.size == 0:
            raise StructureError("empty tree: at least one node is required")
        status, new_left, new_right = kernels.preorder_relabel(left, right, np.int64(root))
        if status != kernels.OK:
            raise StructureError(_STRUCT_MESSAGES.get(int(status), "malformed tree"))
        new_left.flags.writeable = False
        new_right.flags.writeable = False
        self.left = new_left
        self.right = new_right
        self.class_tag = TreeClass.parse(class_tag)
        self._heights = None

    @classmethod
    def _from_preorder(cls, left, right, class_tag) -> "AvlTree":
        # trusted fast path for kernels that already emit pre-order arenas
        obj = cls.__new__(cls)
        left = np.ascontiguousarray(left, dtype=np.int64)
        right = np.ascontiguousarray(right, dtype=np.int64)
        left.flags.writeable = False
        right.flags.writeable = False
        obj.left = left
        obj.right = right
        obj.class_tag = TreeClass.parse(class_tag)
        obj._heights = None
        return obj

    @property
    def n(self) -> int:
        return int(self.left.shape[0])

    @property
    def root(self) -> int:
        return 0

    @property
    def heights(self) -> np.ndarray:
        """Per-node subtree height (a leaf has height 0)."""
        if self._heights is None:
            h = kernels.subtree_heights(self.left, self.right)
            h.flags.writeable = False
            self._heights = h
        return self._heights

    @property
    def height(self) -> int:
        return int(self.heights[0])

    def child_heights(self) -> tuple[np.ndarray, np.ndarray]:
        h = self.heights
        hl = np.where(self.left >= 0, h[self.left], -1)
        hr = np.where(self.right >= 0, h[self.right], -1)
        return hl, hr

    def with_class(self, class_tag) -> "AvlTree":
        return AvlTree._from_preorder(self.left, self.right, class_tag)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AvlTree):
            return NotImplemented
        return (self.class_tag == other.class_tag and self.n == other.n
                and np.array_equal(self.left, other.left)
                and np.array_equal(self.right, other.right))

    def __hash__(self):
        return hash((self.class_tag, self.left.tobytes(), self.right.tobytes()))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        shape = to_text(self) if self.n <= 12 else f"n={self.n}"
        return f"AvlTree({self.class_tag.value}, {shape})"

    @classmethod
    def from_nested(cls, shape, class_tag=TreeClass.AVL) -> "AvlTree":
        """Build from nested tuples: ``None`` is empty, ``(left, right)`` a node."""
        if shape is None:
            raise StructureError("empty tree: at least one node is required")
        left: list[int] = []
        right: list[int] = []
        stack = [(shape, -1, 0)]
        while stack:
            node, parent, side = stack.pop()
            v = len(left)
            left.append(-1)
            right.append(-1)
            if parent >= 0:
                (left if side == 0 else right)[parent] = v
            lsub, rsub = node
            if rsub is not None:
                stack.append((rsub, v, 1))
            if lsub is not None:
                stack.append((lsub, v, 0))
        return cls._from_preorder(np.array(left), np.array(right), class_tag)

    def to_nested(self):
        built: list = [None] * self.n
        for v in range(self.n - 1, -1, -1):
            lc, rc = self.left[v], self.right[v]
            built[v] = (built[lc] if lc >= 0 else None, built[rc] if rc >= 0 else None)
        return built[0]


def single_node(class_tag=TreeClass.AVL) -> AvlTree:
    return AvlTree._from_preorder(np.array([-1]), np.array([-1]), class_tag)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    node: Optional[int] = None
    left_height: Optional[int] = None
    right_height: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def validate(tree: AvlTree) -> ValidationReport:
    """Check the balance rule (and left-leaning rule for LLAVL) at every node.

    The report names the first offending node in pre-order.
    """
    hl, hr = tree.child_heights()
    diff = hl - hr
    bad = np.abs(diff) > 1
    if tree.class_tag is TreeClass.LLAVL:
        bad |= diff < 0
    idx = np.flatnonzero(bad)
    if idx.size == 0:
        assert tree.height <= 1.4405 * math.log2(tree.n + 2), "AVL height bound violated"
        return ValidationReport(True)
    v = int(idx[0])
    if abs(int(diff[v])) > 1:
        reason = f"subtree heights differ by {abs(int(diff[v]))}"
    else:
        reason = "right subtree taller than left in a left-leaning tree"
    return ValidationReport(False, v, int(hl[v]), int(hr[v]), reason)


def require_valid(tree: AvlTree) -> None:
    report = validate(tree)
    if not report:
        raise InvalidTreeError(
            f"node {report.node} (pre-order) violates the {tree.class_tag.value} rule: "
            f"{report.reason} (left height {report.left_height}, right height {report.right_height})")


# --------------------------------------------------------------------------
# statistics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeStats:
    """Exact node counters: leaves ``a``, unbalanced/balanced depth-1 nodes
    ``b1``/``b2``, unbalanced depth-2 nodes ``c`` and the remaining ``d``."""

    n: int
    height: int
    a: int
    b1: int
    b2: int
    c: int
    d: int

    @property
    def b(self) -> int:
        return self.b1 + self.b2

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.a, self.n)

    @property
    def beta(self) -> Fraction:
        return Fraction(self.b, self.n)

    @property
    def beta2(self) -> Optional[Fraction]:
        return Fraction(self.b2, self.b) if self.b else None

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.c, self.n)

    def as_dict(self) -> dict:
        return {
            "n": self.n, "height": self.height, "a": self.a, "b1": self.b1,
            "b2": self.b2, "b": self.b, "c": self.c, "d": self.d,
            "alpha": float(self.alpha), "beta": float(self.beta),
            "beta2": None if self.beta2 is None else float(self.beta2),
            "gamma": float(self.gamma),
        }


def node_classes(tree: AvlTree) -> np.ndarray:
    """:class:`NodeClass` code of every node (pre-order), as an int8 array."""
    h = tree.heights
    hl, hr = tree.child_heights()
    out = np.full(tree.n, NodeClass.UPPER, dtype=np.int8)
    out[h == 0] = NodeClass.DEPTH0
    d1 = h == 1
    out[d1 & (hl == hr)] = NodeClass.DEPTH1_BALANCED
    out[d1 & (hl > hr)] = NodeClass.DEPTH1_LEFT
    out[d1 & (hl < hr)] = NodeClass.DEPTH1_RIGHT
    out[(h == 2) & (hl != hr)] = NodeClass.DEPTH2_UNBALANCED
    return out


def balance_symbols(tree: AvlTree) -> np.ndarray:
    """:class:`Balance` symbol per node (leaves get BALANCED)."""
    hl, hr = tree.child_heights()
    sym = np.zeros(tree.n, dtype=np.int64)
    sym[hl > hr] = Balance.LEFT
    sym[hl < hr] = Balance.RIGHT
    return sym


def compute_stats(tree: AvlTree) -> TreeStats:
    counts = np.bincount(node_classes(tree), minlength=len(NodeClass))
    a = int(counts[NodeClass.DEPTH0])
    b2 = int(counts[NodeClass.DEPTH1_BALANCED])
    b1 = int(counts[NodeClass.DEPTH1_LEFT] + counts[NodeClass.DEPTH1_RIGHT])
    c = int(counts[NodeClass.DEPTH2_UNBALANCED])
    return TreeStats(tree.n, tree.height, a, b1, b2, c, tree.n - a - b1 - b2 - c)


# --------------------------------------------------------------------------
# text format:  tree := "." | "(" tree tree ")"
# --------------------------------------------------------------------------

def to_text(tree: AvlTree) -> str:
    parts: list[str] = []
    stack: list[int] = [0]
    left, right = tree.left, tree.right
    while stack:
        v = stack.pop()
        if v == -2:
            parts.append(")")
        elif v == -1:
            parts.append(".")
        else:
            parts.append("(")
            stack.append(-2)
            stack.append(int(right[v]))
            stack.append(int(left[v]))
    return "".join(parts)


def from_text(text: str, class_tag=TreeClass.AVL, check: bool = True) -> AvlTree:
    """Parse the parenthesised text form; whitespace is ignored."""
    left: list[int] = []
    right: list[int] = []
    stack: list[list[int]] = []  # [node, filled slots]
    done = False
    for pos, ch in enumerate(text):
        if ch.isspace():
            continue
        if done:
            raise FormatError(f"trailing input at offset {pos}")
        if ch == "(":
            v = len(left)
            left.append(-1)
            right.append(-1)
            if stack:
                _fill(stack, left, right, v, pos)
            stack.append([v, 0])
        elif ch == ".":
            if not stack:
                raise FormatError("empty tree: at least one node is required")
            _fill(stack, left, right, -1, pos)
        elif ch == ")":
            if not stack or stack[-1][1] != 2:
                raise FormatError(f"unexpected ')' at offset {pos}")
            stack.pop()
            if not stack:
                done = True
        else:
            raise FormatError(f"unexpected character {ch!r} at offset {pos}")
    if not done:
        raise FormatError("unterminated tree text")
    tree = AvlTree._from_preorder(np.array(left), np.array(right), class_tag)
    if check:
        require_valid(tree)
    return tree


def _fill(stack, left, right, child, pos):
    top = stack[-1]
    if top[1] == 0:
        left[top[0]] = child
    elif top[1] == 1:
        right[top[0]] = child
    else:
        raise FormatError(f"node has more than two children at offset {pos}")
    top[1] += 1


# --------------------------------------------------------------------------
# level-order bitmap of the extended tree
# --------------------------------------------------------------------------

def to_bitmap(tree: AvlTree) -> np.ndarray:
    """Level-order bits of the extended tree (1 = node, 0 = external), length 2n+1."""
    chunks = []
    level = np.zeros(1, dtype=np.int64)
    while level.size:
        chunks.append((level >= 0).astype(np.uint8))
        inner = level[level >= 0]
        nxt = np.empty(2 * inner.size, dtype=np.int64)
        nxt[0::2] = tree.left[inner]
        nxt[1::2] = tree.right[inner]
        level = nxt
    return np.concatenate(chunks)


def rank1(bits: np.ndarray, x: int) -> int:
    """Number of ones in positions 1..x (1-indexed), by a linear scan."""
    return int(np.count_nonzero(bits[:x]))


def from_bitmap(bits, class_tag=TreeClass.AVL, check: bool = True) -> AvlTree:
    """Invert :func:`to_bitmap`; children of the node at position x sit at
    positions ``2*rank(x)`` and ``2*rank(x)+1``."""
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise FormatError("bitmap text may contain only '0' and '1'")
        bits = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
    bits = np.asarray(bits, dtype=np.uint8)
    length = bits.size
    n = int(np.count_nonzero(bits))
    if n == 0 or bits[0] != 1:
        raise FormatError("bitmap must start with the root's 1 bit")
    if length != 2 * n + 1:
        raise FormatError(f"bitmap length {length} != 2n+1 for n={n}")
    ranks = np.cumsum(bits, dtype=np.int64)
    # every position after the first must already be announced by an earlier node
    positions = np.arange(2, length + 1)
    if np.any(positions > 2 * ranks[:-1] + 1):
        raise FormatError("bitmap is not a level-order traversal of an extended tree")
    ones = np.flatnonzero(bits) + 1          # 1-indexed positions of nodes
    node_at = np.full(length + 2, -1, dtype=np.int64)
    node_at[ones] = np.arange(n)
    r = ranks[ones - 1]
    left = node_at[2 * r]
    right = node_at[2 * r + 1]
    tree = AvlTree(left, right, class_tag)
    if check:
        require_valid(tree)
    return tree


def bitmap_to_str(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)


LOB_SUFFIX = ".lob"


def pack_lob(tree: AvlTree) -> bytes:
    """``.lob`` layout: n as little-endian u64, then the bitmap packed MSB-first."""
    return struct.pack("<Q", tree.n) + np.packbits(to_bitmap(tree)).tobytes()


def unpack_lob(data: bytes, class_tag=TreeClass.AVL, check: bool = True) -> AvlTree:
    if len(data) < 8:
        raise FormatError("truncated .lob header")
    (n,) = struct.unpack_from("<Q", data)
    nbits = 2 * n + 1
    if len(data) - 8 != (nbits + 7) // 8:
        raise FormatError(f".lob payload size does not match n={n}")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8, offset=8))[:nbits]
    return from_bitmap(bits, class_tag, check)


def read_tree(path: Union[str, Path], class_tag=TreeClass.AVL, check: bool = True) -> AvlTree:
    """Read a tree from a ``.lob`` file or a text file (chosen by suffix)."""
    path = Path(path)
    if path.suffix == LOB_SUFFIX:
        return unpack_lob(path.read_bytes(), class_tag, check)
    return from_text(path.read_text(encoding="utf-8"), class_tag, check)


def write_tree(tree: AvlTree, path: Union[str, Path], fmt: Optional[str] = None) -> None:
    path = Path(path)
    fmt = fmt or ("lob" if path.suffix == LOB_SUFFIX else "text")
    if fmt == "lob":
        path.write_bytes(pack_lob(tree))
    elif fmt == "text":
        path.write_text(to_text(tree) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unsupported tree format {fmt!r}")
