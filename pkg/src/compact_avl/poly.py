"""Dense polynomials with non-negative big-integer coefficients.

Multiplication packs both operands into single integers (Kronecker
substitution) so the heavy lifting happens inside one big-integer product;
gmpy2 is used for that product when it is installed.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

try:
    import gmpy2
except ImportError:  # pragma: no cover - exercised only without gmpy2
    gmpy2 = None

# below this many coefficients schoolbook convolution is faster than packing
_SCHOOLBOOK_LIMIT = 24


def _bigmul(x: int, y: int) -> int:
    if gmpy2 is not None and x.bit_length() > 50_000 and y.bit_length() > 50_000:
        return int(gmpy2.mpz(x) * gmpy2.mpz(y))
    return x * y


def _pack(coeffs: Sequence[int], width: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(width, "little") for c in coeffs), "little")


def _unpack(value: int, width: int, count: int) -> list[int]:
    raw = value.to_bytes(width * count, "little")
    return [int.from_bytes(raw[i:i + width], "little") for i in range(0, width * count, width)]


def convolve(a: Sequence[int], b: Sequence[int], limit: Optional[int] = None) -> list[int]:
    """Coefficients of the product of ``a`` and ``b``, keeping degrees <= ``limit``."""
    if not a or not b:
        return []
    size = len(a) + len(b) - 1
    if limit is not None:
        size = min(size, limit + 1)
        a = a[:size]
        b = b[:size]
    if size <= 0:
        return []
    if min(len(a), len(b)) <= _SCHOOLBOOK_LIMIT:
        out = [0] * size
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), size - i)):
                    out[i + j] += x * b[j]
        return out
    # each product coefficient is a sum of at most min(len) terms
    bits = max(a).bit_length() + max(b).bit_length() + min(len(a), len(b)).bit_length() + 1
    width = (bits + 7) // 8
    prod = _bigmul(_pack(a, width), _pack(b, width))
    full = len(a) + len(b) - 1
    return _unpack(prod, width, full)[:size]


class Poly:
    """Polynomial in ``z`` with non-negative integer coefficients (index = degree).

    ``trunc`` is the largest retained degree (``None`` keeps everything);
    sums and products of truncated operands truncate at the smaller bound.
    """

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: Iterable[int] = (), trunc: Optional[int] = None):
        cs = [int(c) for c in coeffs]
        if trunc is not None:
            if trunc < 0:
                raise ValueError("truncation degree must be non-negative")
            del cs[trunc + 1:]
        if any(c < 0 for c in cs):
            raise ValueError("coefficients must be non-negative")
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.trunc = trunc

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1, trunc: Optional[int] = None) -> "Poly":
        return cls([0] * degree + [coeff], trunc)

    @staticmethod
    def _common(t1: Optional[int], t2: Optional[int]) -> Optional[int]:
        if t1 is None:
            return t2
        if t2 is None:
            return t1
        return min(t1, t2)

    def __add__(self, other) -> "Poly":
        if isinstance(other, int):
            other = Poly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out, self._common(self.trunc, other.trunc))

    __radd__ = __add__

    def __mul__(self, other) -> "Poly":
        if isinstance(other, int):
            if other < 0:
                raise ValueError("scalar must be non-negative")
            return Poly([c * other for c in self.coeffs], self.trunc)
        trunc = self._common(self.trunc, other.trunc)
        return Poly(convolve(self.coeffs, other.coeffs, trunc), trunc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result = Poly([1], self.trunc)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "Poly":
        """Multiply by ``z**k``."""
        return Poly([0] * k + list(self.coeffs), self.trunc)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == ((other,) if other else ())
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __getitem__(self, degree: int) -> int:
        return self.coeffs[degree] if 0 <= degree < len(self.coeffs) else 0

    @property
    def degree(self) -> int:
        """Largest degree with a non-zero coefficient (-1 for the zero polynomial)."""
        return len(self.coeffs) - 1

    @property
    def valuation(self) -> int:
        """Smallest degree with a non-zero coefficient (-1 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1

    def is_constant(self) -> bool:
        return self.degree <= 0

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = [f"{c}*z^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return "Poly(" + " + ".join(terms) + ")"
