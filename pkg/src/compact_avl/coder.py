"""Renormalizing integer range coder with exact frequency models.

The interval is held as a 33-bit ``low`` and a 32-bit ``range`` that is
renormalized byte-wise to stay at or above 2**24. A symbol with cumulative
frequencies ``[lo, hi)`` out of ``total`` maps the range to
``[range*lo//total, range*hi//total)``; the last symbol therefore keeps the
full remainder and no code space is wasted to truncation. Carries are
resolved with a pending-byte counter. The stream carries no header; its
length is ``4 + (number of renormalization shifts)`` bytes.

:class:`RangeEncoder` / :class:`RangeDecoder` are the incremental reference
implementation that accepts a different model per call; :func:`encode_symbols`
and :func:`decode_symbols` run the same arithmetic in a compiled batch loop.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import IntegrityError, ModelError, TruncatedStreamError

MAX_TOTAL = 1 << 24
RANGE_BOTTOM = 1 << 24
SLACK_BITS = 64


class SymbolModel:
    """Immutable frequency table: every symbol has a frequency of at least one."""

    __slots__ = ("freqs", "cumulative", "total")

    def __init__(self, freqs: Iterable[int]):
        freqs = tuple(int(f) for f in freqs)
        if len(freqs) < 2:
            raise ModelError("a model needs at least two symbols")
        if min(freqs) < 1:
            raise ModelError("zero or negative frequency; smooth the counts first")
        total = sum(freqs)
        if total > MAX_TOTAL:
            raise ModelError(f"frequency total {total} exceeds 2**24")
        cum = [0]
        for f in freqs:
            cum.append(cum[-1] + f)
        self.freqs = freqs
        self.cumulative = tuple(cum)
        self.total = total

    @classmethod
    def uniform(cls, k: int) -> "SymbolModel":
        return cls([1] * k)

    def __len__(self) -> int:
        return len(self.freqs)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolModel) and self.freqs == other.freqs

    def __hash__(self):
        return hash(self.freqs)

    def __repr__(self) -> str:
        return f"SymbolModel({list(self.freqs)})"

    def cost(self, symbol: int) -> float:
        """Ideal code length of ``symbol`` in bits."""
        return math.log2(self.total / self.freqs[symbol])


def ideal_bits(models: Sequence[SymbolModel], symbols: Sequence[int]) -> float:
    return sum(m.cost(s) for m, s in zip(models, symbols))


class RangeEncoder:
    def __init__(self):
        self.low = 0
        self.range = 0xFFFFFFFF
        self._cache = 0
        self._pending = 1
        self._skip_first = True
        self._out = bytearray()
        self._finished = False

    def _shift_low(self) -> None:
        low = self.low
        if (low & 0xFFFFFFFF) < 0xFF000000 or low > 0xFFFFFFFF:
            carry = low >> 32
            byte = self._cache
            for _ in range(self._pending):
                if self._skip_first:
                    # the leading cached byte can never receive a carry
                    self._skip_first = False
                else:
                    self._out.append((byte + carry) & 0xFF)
                byte = 0xFF
            self._pending = 0
            self._cache = (low >> 24) & 0xFF
        self._pending += 1
        self.low = (low & 0x00FFFFFF) << 8

    def encode(self, model: SymbolModel, symbol: int) -> None:
        if self._finished:
            raise RuntimeError("encoder already finished")
        if not 0 <= symbol < len(model):
            raise IndexError(f"symbol {symbol} outside model of size {len(model)}")
        cum, total = model.cumulative, model.total
        lo = self.range * cum[symbol] // total
        hi = self.range * cum[symbol + 1] // total
        self.low += lo
        self.range = hi - lo
        while self.range < RANGE_BOTTOM:
            self.range <<= 8
            self._shift_low()

    def finish(self) -> bytes:
        if not self._finished:
            for _ in range(5):
                self._shift_low()
            self._finished = True
        return bytes(self._out)


class RangeDecoder:
    def __init__(self, data: bytes):
        self._data = bytes(data)
        if len(self._data) < 4:
            raise TruncatedStreamError("range-coded stream shorter than 4 bytes")
        self.code = int.from_bytes(self._data[:4], "big")
        self.range = 0xFFFFFFFF
        self._pos = 4
        if self.code >= self.range:
            raise IntegrityError("stream does not start with a valid code value")

    def decode(self, model: SymbolModel) -> int:
        cum, total, rng, code = model.cumulative, model.total, self.range, self.code
        lo_s, hi_s = 0, len(model) - 1
        while lo_s < hi_s:
            mid = (lo_s + hi_s) // 2
            if rng * cum[mid + 1] // total > code:
                hi_s = mid
            else:
                lo_s = mid + 1
        lo = rng * cum[lo_s] // total
        hi = rng * cum[lo_s + 1] // total
        if code >= hi:
            raise IntegrityError("code value falls outside every symbol interval")
        self.code = code - lo
        self.range = hi - lo
        while self.range < RANGE_BOTTOM:
            if self._pos >= len(self._data):
                raise TruncatedStreamError("range-coded stream ended early")
            self.code = (self.code << 8) | self._data[self._pos]
            self._pos += 1
            self.range <<= 8
        return lo_s

    @property
    def consumed(self) -> int:
        return self._pos


def encode_message(models: Sequence[SymbolModel], symbols: Sequence[int]) -> bytes:
    enc = RangeEncoder()
    for m, s in zip(models, symbols, strict=True):
        enc.encode(m, s)
    return enc.finish()


def decode_message(data: bytes, models: Sequence[SymbolModel]) -> list[int]:
    if not models:
        return []
    dec = RangeDecoder(data)
    return [dec.decode(m) for m in models]


# --------------------------------------------------------------------------
# batch interface over a small palette of models
# --------------------------------------------------------------------------

def model_table(models: Sequence[SymbolModel]) -> tuple[np.ndarray, np.ndarray]:
    """Stack cumulative tables into ``(cum[M, K+1], ksym[M])`` for the kernels."""
    width = max(len(m) for m in models) + 1
    cum = np.zeros((len(models), width), dtype=np.int64)
    for i, m in enumerate(models):
        cum[i, :len(m) + 1] = m.cumulative
    ksym = np.array([len(m) for m in models], dtype=np.int64)
    return cum, ksym


def encode_symbols(symbols, model_index, palette: Sequence[SymbolModel]) -> bytes:
    """Encode ``symbols[i]`` with ``palette[model_index[i]]``."""
    symbols = np.ascontiguousarray(symbols, dtype=np.int64)
    model_index = np.ascontiguousarray(model_index, dtype=np.int64)
    if symbols.shape != model_index.shape:
        raise ValueError("symbols and model_index must have the same length")
    cum, ksym = model_table(palette)
    if symbols.size and (symbols.min() < 0 or np.any(symbols >= ksym[model_index])):
        raise IndexError("symbol outside its model")
    return kernels.encode_batch(symbols, model_index, cum, ksym).tobytes()


def decode_symbols(data: bytes, model_index, palette: Sequence[SymbolModel]) -> np.ndarray:
    model_index = np.ascontiguousarray(model_index, dtype=np.int64)
    cum, ksym = model_table(palette)
    buf = np.frombuffer(bytes(data), dtype=np.uint8)
    status, syms = kernels.decode_batch(buf, model_index, cum, ksym)
    if status == kernels.TRUNCATED:
        raise TruncatedStreamError("range-coded stream ended early")
    if status != kernels.OK:
        raise IntegrityError("range-coded stream is corrupt")
    return syms
