"""Compact encoding of AVL and LLAVL shapes from per-node balance symbols.

Every node of depth >= 1 contributes one symbol in pre-order: balanced,
left taller or right taller (LLAVL trees only need the first two). Nodes of
depth >= 2 use a uniform model. Depth-1 nodes use a model skewed by the
exact counts ``b1``/``b2`` unless leaves make up at least 40% of the tree.
The header carries ``H, n, a, b, b2`` so the decoder can rebuild both the
model sequence and the shape by propagating depths down from the root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from . import kernels
from .coder import MAX_TOTAL, SymbolModel, encode_symbols, model_table
from .counting import max_size, min_size
from .errors import FormatError, IntegrityError, ResourceLimitError, TruncatedStreamError
from .tree import AvlTree, TreeClass, TreeStats, balance_symbols, compute_stats, require_valid

LOG2_3 = math.log2(3)
MAGIC = b"AVLC"
VERSION = 1
DECODE_LIMIT = 1 << 26
CLASS_CODES = {TreeClass.AVL: 0, TreeClass.LLAVL: 1}


# --------------------------------------------------------------------------
# bit I/O and Elias-delta integers
# --------------------------------------------------------------------------

class BitWriter:
    def __init__(self):
        self.bits: list[int] = []

    def write(self, value: int, width: int) -> None:
        for i in range(width - 1, -1, -1):
            self.bits.append((value >> i) & 1)

    def __len__(self) -> int:
        return len(self.bits)

    def to_bytes(self) -> bytes:
        return np.packbits(np.array(self.bits, dtype=np.uint8)).tobytes()


class BitReader:
    def __init__(self, data: bytes):
        self._bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
        self.pos = 0

    def read(self, width: int) -> int:
        if self.pos + width > self._bits.size:
            raise TruncatedStreamError("bit stream ended inside a header field")
        v = 0
        for b in self._bits[self.pos:self.pos + width]:
            v = (v << 1) | int(b)
        self.pos += width
        return v


def elias_delta_write(w: BitWriter, x: int) -> None:
    """Write ``x >= 1``."""
    if x < 1:
        raise ValueError("Elias-delta codes positive integers")
    nbits = x.bit_length()
    lbits = nbits.bit_length()
    w.write(0, lbits - 1)
    w.write(nbits, lbits)
    w.write(x & ((1 << (nbits - 1)) - 1), nbits - 1)


def elias_delta_read(r: BitReader) -> int:
    zeros = 0
    while r.read(1) == 0:
        zeros += 1
        if zeros > 6:
            raise FormatError("Elias-delta length prefix too long")
    nbits = (1 << zeros) | r.read(zeros)
    if nbits > 64:
        raise FormatError("Elias-delta value exceeds 64 bits")
    return (1 << (nbits - 1)) | r.read(nbits - 1)


def elias_delta_length(x: int) -> int:
    nbits = x.bit_length()
    return 2 * (nbits.bit_length() - 1) + nbits


# --------------------------------------------------------------------------
# header, models
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Header:
    class_tag: TreeClass
    H: int
    n: int
    a: int
    b: int
    b2: int

    @classmethod
    def from_stats(cls, stats: TreeStats, class_tag: TreeClass) -> "Header":
        return cls(class_tag, stats.height, stats.n, stats.a, stats.b, stats.b2)

    @property
    def b1(self) -> int:
        return self.b - self.b2

    @property
    def fields(self) -> tuple[int, ...]:
        return (self.H, self.n, self.a, self.b, self.b2)

    def write(self, w: BitWriter) -> None:
        for v in self.fields:
            elias_delta_write(w, v + 1)

    @classmethod
    def read(cls, r: BitReader, class_tag: TreeClass) -> "Header":
        return cls(class_tag, *(elias_delta_read(r) - 1 for _ in range(5)))

    @property
    def bit_length(self) -> int:
        """Class bit plus the five delta-coded fields."""
        return 1 + sum(elias_delta_length(v + 1) for v in self.fields)

    def check(self) -> None:
        """Reject headers no shape can satisfy."""
        H, n, a, b, b2 = self.fields
        if n < 1:
            raise IntegrityError("header claims an empty tree")
        if n > DECODE_LIMIT:
            raise ResourceLimitError(f"header claims {n} nodes; limit is {DECODE_LIMIT}")
        if not min_size(H) <= n <= max_size(H):
            raise IntegrityError(f"no shape of height {H} has {n} nodes")
        if not (1 <= a <= n and b2 <= b <= n - a and a + b <= n):
            raise IntegrityError("inconsistent leaf / depth-1 counts in header")


def uniform_depth1(n: int, a: int) -> bool:
    """Leaves are at least 40% of the nodes (exact rational test)."""
    return 5 * a >= 2 * n


def _fit(freqs: list[int]) -> list[int]:
    while sum(freqs) > MAX_TOTAL:
        freqs = [max(1, f >> 1) for f in freqs]
    return freqs


def model_palette(header: Header) -> tuple[SymbolModel, SymbolModel]:
    """``(upper, depth1)`` models, derived from header fields alone."""
    k = 3 if header.class_tag is TreeClass.AVL else 2
    upper = SymbolModel.uniform(k)
    if uniform_depth1(header.n, header.a):
        return upper, upper
    b1, b2 = header.b1, header.b2
    if k == 3:
        freqs = [2 * b2 + 1, b1 + 1, b1 + 1]
    else:
        freqs = [b2 + 1, b1 + 1]
    return upper, SymbolModel(_fit(freqs))


# --------------------------------------------------------------------------
# encoded form
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EncodedTree:
    header: Header
    payload: bytes
    symbol_count: int
    ideal_bits: float = field(compare=False)

    @property
    def header_bits(self) -> int:
        return self.header.bit_length

    @property
    def payload_bits(self) -> int:
        return 8 * len(self.payload)

    @property
    def total_bits(self) -> int:
        return self.header_bits + self.payload_bits

    @property
    def bits_per_node(self) -> float:
        return self.total_bits / self.header.n

    def accounting(self) -> dict:
        return {
            "n": self.header.n,
            "header_bits": self.header_bits,
            "payload_bits": self.payload_bits,
            "ideal_bits": self.ideal_bits,
            "bits_per_node": self.bits_per_node,
        }


def _symbol_stream(tree: AvlTree):
    h = tree.heights
    coded = h >= 1
    symbols = balance_symbols(tree)[coded]
    model_index = (h[coded] == 1).astype(np.int64)
    return symbols, model_index


def encode(tree: AvlTree) -> EncodedTree:
    require_valid(tree)
    header = Header.from_stats(compute_stats(tree), tree.class_tag)
    palette = model_palette(header)
    symbols, model_index = _symbol_stream(tree)
    if symbols.size == 0:
        return EncodedTree(header, b"", 0, 0.0)
    payload = encode_symbols(symbols, model_index, palette)
    ideal = _ideal(symbols, model_index, palette)
    return EncodedTree(header, payload, int(symbols.size), ideal)


def _ideal(symbols: np.ndarray, model_index: np.ndarray, palette) -> float:
    total = 0.0
    for row, model in enumerate(palette):
        counts = np.bincount(symbols[model_index == row], minlength=len(model))
        total += sum(int(c) * model.cost(s) for s, c in enumerate(counts) if c)
    return total


_STATUS_ERRORS = {
    kernels.CORRUPT: "payload contains an impossible code value",
    kernels.OVERFLOW: "payload describes a tree of a different size than the header",
}


def decode(enc: EncodedTree) -> AvlTree:
    header = enc.header
    header.check()
    cum, ksym = model_table(model_palette(header))
    data = np.frombuffer(enc.payload, dtype=np.uint8)
    status, left, right, used = kernels.decode_tree(data, np.int64(header.H), np.int64(header.n), cum, ksym)
    if status == kernels.TRUNCATED:
        raise TruncatedStreamError("payload ended before the tree was complete")
    if status != kernels.OK:
        raise IntegrityError(_STATUS_ERRORS.get(status, f"decoder status {status}"))
    if used != len(enc.payload):
        raise IntegrityError(f"{len(enc.payload) - used} unused payload bytes")
    tree = AvlTree._from_preorder(left, right, header.class_tag)
    if Header.from_stats(compute_stats(tree), header.class_tag) != header:
        raise IntegrityError("decoded tree statistics disagree with the header")
    return tree


# --------------------------------------------------------------------------
# analytic bounds
# --------------------------------------------------------------------------

def _xlog(p: float) -> float:
    """``p * log2(1/p)`` with 0 * log(1/0) = 0."""
    return 0.0 if p <= 0.0 else -p * math.log2(p)


def depth1_cost(beta2: float, class_tag: TreeClass) -> float:
    """Bits per depth-1 node under the skewed model at balanced share ``beta2``."""
    if class_tag is TreeClass.AVL:
        # unbalanced nodes additionally choose a side
        return _xlog(beta2) + (0.0 if beta2 >= 1.0 else (1 - beta2) * math.log2(2 / (1 - beta2)))
    return _xlog(beta2) + _xlog(1.0 - beta2)


def predicted_bound(stats: TreeStats, class_tag: Union[str, TreeClass] = TreeClass.AVL) -> float:
    """Payload size the model choice is designed to achieve, in bits."""
    class_tag = TreeClass.parse(class_tag)
    upper = LOG2_3 if class_tag is TreeClass.AVL else 1.0
    n, a, b = stats.n, stats.a, stats.b
    if uniform_depth1(n, a) or b == 0:
        return (n - a) * upper
    return b * depth1_cost(stats.b2 / b, class_tag) + (n - a - b) * upper


def worst_case_rate(alpha: float, class_tag: Union[str, TreeClass] = TreeClass.AVL) -> float:
    """Bits per node of ``a X/3 + (n - 4a/3) * upper`` with ``beta2`` at its cap."""
    class_tag = TreeClass.parse(class_tag)
    upper = LOG2_3 if class_tag is TreeClass.AVL else 1.0
    beta2 = min(max((3 * alpha - 1) / (1 - alpha), 0.0), 1.0)
    return alpha * depth1_cost(beta2, class_tag) / 3 + (1 - 4 * alpha / 3) * upper


def worst_case_max(class_tag: Union[str, TreeClass] = TreeClass.AVL,
                   lo: float = 1 / 3, hi: float = 0.4) -> tuple[float, float]:
    """``(alpha, rate)`` maximizing :func:`worst_case_rate` on ``[lo, hi]``."""
    from scipy.optimize import minimize_scalar

    class_tag = TreeClass.parse(class_tag)
    res = minimize_scalar(lambda x: -worst_case_rate(x, class_tag), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-10})
    return float(res.x), -float(res.fun)


def slack_bits(n: int) -> float:
    return 12 * math.log2(max(n, 1)) + 64


def size_bound(n: int, class_tag: Union[str, TreeClass] = TreeClass.AVL) -> float:
    """Total-size budget: the worst-case rate times ``n`` plus logarithmic slack."""
    rate = 0.99933 if TreeClass.parse(class_tag) is TreeClass.AVL else 0.5912
    return rate * n + slack_bits(n)


def measure(tree: AvlTree) -> dict:
    enc = encode(tree)
    out = enc.accounting()
    out["predicted_bound"] = predicted_bound(compute_stats(tree), tree.class_tag)
    return out


# --------------------------------------------------------------------------
# .avlc files
# --------------------------------------------------------------------------

def pack(enc: EncodedTree) -> bytes:
    w = BitWriter()
    enc.header.write(w)
    return MAGIC + bytes([VERSION, CLASS_CODES[enc.header.class_tag]]) + w.to_bytes() + enc.payload


def unpack(data: bytes) -> EncodedTree:
    data = bytes(data)
    if len(data) < 6 or data[:4] != MAGIC:
        raise FormatError("not an .avlc archive (bad magic)")
    if data[4] != VERSION:
        raise FormatError(f"unsupported .avlc version {data[4]}")
    classes = {v: k for k, v in CLASS_CODES.items()}
    if data[5] not in classes:
        raise FormatError(f"unknown class byte {data[5]}")
    reader = BitReader(data[6:])
    header = Header.read(reader, classes[data[5]])
    body = 6 + (reader.pos + 7) // 8
    # ideal size is not stored in the archive
    return EncodedTree(header, data[body:], header.n - header.a, float("nan"))


def write_encoded(enc: EncodedTree, path: Union[str, Path]) -> None:
    Path(path).write_bytes(pack(enc))


def read_encoded(path: Union[str, Path]) -> EncodedTree:
    return unpack(Path(path).read_bytes())
