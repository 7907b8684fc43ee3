"""Height-indexed polynomial recursions and their exponential growth constant.

A recursion ``F_h = f(F_{h-1}, ..., F_{h-c})`` with non-negative ``f`` and
non-constant seeds ``F_0 .. F_{c-1}`` defines counting polynomials. With
``C`` the positive fixed point of ``f(t, ..., t) = t`` and ``alpha_h`` the
positive root of ``F_h(z) = C``, the ``alpha_h`` converge to the radius of
convergence of ``sum_h F_h``; maxima and minima over sliding windows of
``c`` heights give a monotone bracket around the limit.

All root finding is bisection on monotone functions, evaluated in mpmath at
``DPS`` decimal digits. ``F_h(z)`` is evaluated pointwise by running the
recursion on numbers, so heights far beyond explicit expansion are cheap.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Union

import mpmath
from mpmath import mp, mpf

from .counting import count_by_size_height
from .errors import FormatError, NoFixedPointError, ResourceLimitError
from .poly import Poly
from .tree import TreeClass

DPS = 60
ROOT_TOL = mpf("1e-45")
COUNT_LIMIT = 10_000
DEGREE_BUDGET = 1 << 20


@dataclass(frozen=True)
class RecursionSpec:
    """``f`` as monomials ``(coeff, (e_1, ..., e_c))`` where ``x_j`` stands for ``F_{h-j}``."""

    c: int
    monomials: tuple[tuple[int, tuple[int, ...]], ...]
    initial: tuple[Poly, ...]
    name: str = "custom"

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("arity c must be positive")
        if len(self.initial) != self.c:
            raise ValueError(f"need exactly c={self.c} initial polynomials")
        for coeff, exps in self.monomials:
            if coeff < 0 or len(exps) != self.c or any(e < 0 for e in exps):
                raise ValueError(f"bad monomial {(coeff, exps)!r}")
        for p in self.initial:
            if p.is_constant():
                raise ValueError("initial polynomials must be non-constant")

    def apply(self, prev: Sequence):
        """Evaluate ``f`` with ``prev[j-1]`` substituted for ``x_j``."""
        total = None
        for coeff, exps in self.monomials:
            if coeff == 0:
                continue
            term = None
            for value, e in zip(prev, exps):
                for _ in range(e):
                    term = value if term is None else term * value
            if term is None:
                term = prev[0] * 0 + 1
            term = term * coeff
            total = term if total is None else total + term
        if total is None:
            return prev[0] * 0
        return total

    def on_diagonal(self, t):
        return self.apply([t] * self.c)

    def linear_weight(self) -> int:
        """Sum of coefficients of degree-one monomials."""
        return sum(coeff for coeff, exps in self.monomials if sum(exps) == 1)


AVL_RECURSION = RecursionSpec(
    2, ((1, (2, 0)), (2, (1, 1))), (Poly([0, 1]), Poly([0, 0, 1])), "avl")
LLAVL_RECURSION = RecursionSpec(
    2, ((1, (2, 0)), (1, (1, 1))), (Poly([0, 1]), Poly([0, 0, 1])), "llavl")


def builtin(class_tag: Union[str, TreeClass]) -> RecursionSpec:
    return AVL_RECURSION if TreeClass.parse(class_tag) is TreeClass.AVL else LLAVL_RECURSION


# --------------------------------------------------------------------------
# text format
# --------------------------------------------------------------------------

def parse_spec(text: str, name: str = "custom") -> RecursionSpec:
    """Parse ``c=<int>``, then monomial lines ``coeff e1 .. ec``, then the last
    ``c`` lines as seed polynomials (ascending coefficients). ``#`` starts a comment."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("empty recursion file")
    m = re.fullmatch(r"c\s*=\s*(\d+)", lines[0])
    if not m:
        raise FormatError("first line must be 'c=<int>'")
    c = int(m.group(1))
    body = lines[1:]
    if c < 1 or len(body) < c + 1:
        raise FormatError(f"need at least one monomial and {c} seed lines")
    try:
        rows = [[int(tok) for tok in ln.split()] for ln in body]
    except ValueError as exc:
        raise FormatError(f"non-integer token: {exc}") from None
    mono_rows, seed_rows = rows[:-c], rows[-c:]
    for row in mono_rows:
        if len(row) != c + 1:
            raise FormatError(f"monomial line needs {c + 1} integers, got {row}")
    try:
        return RecursionSpec(
            c,
            tuple((row[0], tuple(row[1:])) for row in mono_rows),
            tuple(Poly(row) for row in seed_rows),
            name,
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_spec(spec: RecursionSpec) -> str:
    lines = [f"c={spec.c}"]
    lines += [" ".join(str(v) for v in (coeff, *exps)) for coeff, exps in spec.monomials]
    lines += [" ".join(str(v) for v in (p.coeffs or (0,))) for p in spec.initial]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# structure
# --------------------------------------------------------------------------

def dependence_lags(spec: RecursionSpec) -> set[int]:
    return {j + 1 for coeff, exps in spec.monomials if coeff
            for j, e in enumerate(exps) if e > 0}


def is_recursive_dependent(spec: RecursionSpec) -> bool:
    """True iff the lags ``f`` actually depends on have gcd 1.

    With non-negative coefficients nothing cancels, so repeated substitution
    reaches every large enough lag exactly when the lag set generates the
    integers; a common divisor splits the heights into independent classes.
    """
    lags = dependence_lags(spec)
    return bool(lags) and math.gcd(*lags) == 1


def degree_sequence(spec: RecursionSpec, h: int) -> list[int]:
    """Exact degrees of ``F_0 .. F_h`` (no cancellation with non-negative terms)."""
    degs = [p.degree for p in spec.initial]
    while len(degs) <= h:
        prev = degs[::-1][:spec.c]
        degs.append(max((sum(e * d for e, d in zip(exps, prev))
                         for coeff, exps in spec.monomials if coeff), default=-1))
    return degs[:h + 1]


def iterate(spec: RecursionSpec, h: int, truncation_degree: Optional[int] = None,
            degree_budget: int = DEGREE_BUDGET) -> Poly:
    """Explicit ``F_h``, optionally truncated above ``truncation_degree``."""
    if h < 0:
        raise ValueError("h must be >= 0")
    if truncation_degree is None and degree_sequence(spec, h)[-1] > degree_budget:
        raise ResourceLimitError(
            f"F_{h} has degree above the budget {degree_budget}; pass truncation_degree")
    polys = [Poly(p.coeffs, truncation_degree) for p in spec.initial]
    for _ in range(spec.c, h + 1):
        polys.append(spec.apply(polys[::-1][:spec.c]))
        del polys[0]
    return polys[-1] if h >= spec.c else polys[h]


def evaluate_all(spec: RecursionSpec, z, h: int) -> list:
    """``[F_0(z), ..., F_h(z)]`` computed by running the recursion on numbers."""
    vals = [p(z) for p in spec.initial[:h + 1]]
    while len(vals) <= h:
        vals.append(spec.apply(vals[:-spec.c - 1:-1]))
    return vals


# --------------------------------------------------------------------------
# roots
# --------------------------------------------------------------------------

def _bisect(fn, lo, hi, tol, max_iter=400):
    """Shrink ``[lo, hi]`` with ``fn(lo) < 0 <= fn(hi)`` below width ``tol``."""
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def fixed_point_bracket(spec: RecursionSpec, tol=ROOT_TOL) -> tuple[mpf, mpf]:
    """Bracket of the positive solution of ``f(t, ..., t) = t``."""
    with mp.workdps(DPS):
        tol = mpf(tol)

        def g(t):
            return spec.on_diagonal(t) - t

        lo = None
        t = mpf(1)
        for _ in range(200):
            if g(t) < 0:
                lo = t
                break
            t /= 2
        if lo is None:
            raise NoFixedPointError("f(t,...,t) - t is never negative for small t > 0")
        hi = lo
        for _ in range(200):
            if g(hi) > 0:
                break
            hi *= 2
        else:
            raise NoFixedPointError("f(t,...,t) - t never becomes positive")
        return _bisect(g, lo, hi, tol)


def fixed_point(spec: RecursionSpec, tol: float = 1e-14) -> float:
    """The positive fixed point ``C`` of ``f`` on the diagonal."""
    lo, hi = fixed_point_bracket(spec, min(mpf(tol), ROOT_TOL))
    return float((lo + hi) / 2)


def alpha_h_bracket(spec: RecursionSpec, h: int, tol=ROOT_TOL,
                    C: Optional[mpf] = None) -> tuple[mpf, mpf]:
    """Bracket ``[lo, hi]`` of the positive root of ``F_h(z) = C``."""
    with mp.workdps(DPS):
        if C is None:
            c_lo, c_hi = fixed_point_bracket(spec)
            C = (c_lo + c_hi) / 2

        def fn(z):
            return evaluate_all(spec, z, h)[h] - C

        hi = mpf(1)
        for _ in range(200):
            if fn(hi) >= 0:
                break
            hi *= 2
        else:  # pragma: no cover - non-constant non-negative polynomials always cross
            raise ArithmeticError(f"F_{h} never reaches C")
        return _bisect(fn, mpf(0), hi, mpf(tol))


def alpha_h(spec: RecursionSpec, h: int, tol: float = 1e-12) -> float:
    lo, hi = alpha_h_bracket(spec, h, tol)
    return float((lo + hi) / 2)


# --------------------------------------------------------------------------
# growth bracket
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthReport:
    """Bracket on the growth constant from window maxima/minima of ``alpha_h``."""

    C_lower: mpf
    C_upper: mpf
    alpha_lower: mpf
    alpha_upper: mpf
    h_reached: int
    converged: bool
    monotone: bool
    upper_indices: tuple[int, ...]
    lower_indices: tuple[int, ...]
    upper_values: tuple[mpf, ...] = field(repr=False)
    lower_values: tuple[mpf, ...] = field(repr=False)

    @property
    def width(self) -> float:
        return float(self.alpha_upper - self.alpha_lower)

    @property
    def bits_per_node_lower_bound(self) -> float:
        with mp.workdps(DPS):
            return float(mpmath.log(1 / self.alpha_upper, 2))

    def as_dict(self) -> dict:
        return {
            "C": [float(self.C_lower), float(self.C_upper)],
            "alpha": [float(self.alpha_lower), float(self.alpha_upper)],
            "width": self.width,
            "h_reached": self.h_reached,
            "converged": self.converged,
            "monotone": self.monotone,
            "bits_per_node_lower_bound": self.bits_per_node_lower_bound,
        }


def growth_bracket(spec: RecursionSpec, tol: float = 1e-12, h_max: int = 45,
                   root_tol=ROOT_TOL, require_dependent: bool = True) -> GrowthReport:
    """Narrow ``[alpha_{l_j}, alpha_{u_i}]`` until its width is below ``tol``.

    ``u_{i+1}`` (``l_{j+1}``) is the first index of the largest (smallest)
    ``alpha`` among the ``c`` heights following ``u_i`` (``l_j``).
    """
    if require_dependent and not is_recursive_dependent(spec):
        raise ValueError(f"recursion {spec.name!r} is not recursive-dependent")
    c = spec.c
    with mp.workdps(DPS):
        C_lo, C_hi = fixed_point_bracket(spec)
        C = (C_lo + C_hi) / 2
        root_tol = mpf(root_tol)
        brackets: list[tuple[mpf, mpf]] = []

        def value(h):
            while len(brackets) <= h:
                brackets.append(alpha_h_bracket(spec, len(brackets), root_tol, C))
            lo, hi = brackets[h]
            return (lo + hi) / 2

        def pick(start, best):
            window = range(start, start + c)
            vals = [value(j) for j in window]
            target = best(vals)
            return window[vals.index(target)]

        if h_max < c - 1:
            raise ValueError(f"h_max must be at least c-1 = {c - 1}")
        ups = [pick(0, max)]
        lows = [pick(0, min)]
        monotone = True
        converged = False
        while True:
            if brackets[ups[-1]][1] - brackets[lows[-1]][0] < tol:
                converged = True
                break
            if ups[-1] + c > h_max or lows[-1] + c > h_max:
                break
            ups.append(pick(ups[-1] + 1, max))
            lows.append(pick(lows[-1] + 1, min))
            if value(ups[-1]) > value(ups[-2]) + root_tol:
                monotone = False
            if value(lows[-1]) < value(lows[-2]) - root_tol:
                monotone = False
        return GrowthReport(
            C_lower=C_lo, C_upper=C_hi,
            alpha_lower=brackets[lows[-1]][0], alpha_upper=brackets[ups[-1]][1],
            h_reached=len(brackets) - 1, converged=converged, monotone=monotone,
            upper_indices=tuple(ups), lower_indices=tuple(lows),
            upper_values=tuple(value(j) for j in ups),
            lower_values=tuple(value(j) for j in lows),
        )


@lru_cache(maxsize=4)
def growth_constant(class_tag: TreeClass) -> float:
    """Limit of ``alpha_h`` for a built-in class, to double precision."""
    report = growth_bracket(builtin(class_tag), tol=1e-15)
    return float((report.alpha_lower + report.alpha_upper) / 2)


@dataclass(frozen=True)
class TableRow:
    h: int
    alpha: mpf

    @property
    def parity(self) -> str:
        return "even" if self.h % 2 == 0 else "odd"


def convergence_table(spec: RecursionSpec, h_max: int = 45, root_tol=ROOT_TOL) -> list[TableRow]:
    """``alpha_h`` for ``h = 0..h_max`` at full working precision."""
    with mp.workdps(DPS):
        c_lo, c_hi = fixed_point_bracket(spec)
        C = (c_lo + c_hi) / 2
        rows = []
        for h in range(h_max + 1):
            lo, hi = alpha_h_bracket(spec, h, root_tol, C)
            rows.append(TableRow(h, (lo + hi) / 2))
        return rows


def format_alpha(value, digits: int = 30) -> str:
    with mp.workdps(DPS):
        return mpmath.nstr(value, digits, strip_zeros=False)


# --------------------------------------------------------------------------
# exact counts
# --------------------------------------------------------------------------

def count_exact(n_max: int, class_tag: Union[str, TreeClass] = TreeClass.AVL,
                limit: int = COUNT_LIMIT) -> list[int]:
    """``[a_1, ..., a_{n_max}]``: number of shapes with n nodes."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > limit:
        raise ResourceLimitError(f"exact counting limited to n <= {limit}, got {n_max}")
    return count_by_size_height(n_max, class_tag).totals()[1:]
