"""Self-check suite producing ``CHECK <name> PASS|FAIL <details>`` lines."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Optional

from . import codec
from .counting import count_by_size_height, enumerate_all
from .errors import AvlError
from .growth import builtin, fixed_point, growth_bracket
from .sampling import DEFAULT_SEED, sample_uniform
from .tree import TreeClass, compute_stats

LEMMA_LIMIT = 14
GROWTH_TARGETS = {TreeClass.AVL: (0.5219, 1 / 3), TreeClass.LLAVL: (0.67418, 1 / 2)}
CORPUS_SIZES = (100, 1000, 10_000)
# brackets at this width still hold the four-/five-digit constants strictly inside
GROWTH_TOL = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"CHECK {self.name} {status} {self.details}".rstrip()


def _roundtrip_exhaustive(class_tag: TreeClass, max_n: int) -> CheckResult:
    total = 0
    for n in range(1, max_n + 1):
        for t in enumerate_all(n, class_tag):
            total += 1
            if codec.decode(codec.encode(t)) != t:
                return CheckResult(f"roundtrip_{class_tag.value}", False, f"n={n} shape={t.to_nested()}")
    return CheckResult(f"roundtrip_{class_tag.value}", True, f"trees={total} max_n={max_n}")


def _counts(class_tag: TreeClass, upto: int) -> Iterator[CheckResult]:
    table = count_by_size_height(upto, class_tag)
    prefix = "count" if class_tag is TreeClass.AVL else "count_llavl"
    for n in range(1, upto + 1):
        expected = sum(1 for _ in enumerate_all(n, class_tag))
        got = table.total(n)
        yield CheckResult(f"{prefix}_n{n}", got == expected, f"expected={expected} got={got}")


def _lemmas(upto: int) -> Iterator[CheckResult]:
    beta_bad = beta2_bad = leaf_bad = None
    checked = capped = 0
    min_beta = None
    for n in range(3, upto + 1):
        for t in enumerate_all(n, TreeClass.AVL):
            s = compute_stats(t)
            checked += 1
            if min_beta is None or s.beta < min_beta:
                min_beta = s.beta
            if not s.beta > Fraction(1, 6) and beta_bad is None:
                beta_bad = (n, t.to_nested())
            if s.a > 3 * s.b and leaf_bad is None:
                leaf_bad = (n, t.to_nested())
            if s.alpha <= Fraction(2, 5) and s.b:
                capped += 1
                if s.beta2 > (3 * s.alpha - 1) / (1 - s.alpha) and beta2_bad is None:
                    beta2_bad = (n, t.to_nested())
    yield CheckResult("lemma_beta", beta_bad is None,
                      f"trees={checked} min_beta={min_beta}" if beta_bad is None else f"counterexample={beta_bad}")
    yield CheckResult("lemma_beta2", beta2_bad is None,
                      f"trees={capped}" if beta2_bad is None else f"counterexample={beta2_bad}")
    yield CheckResult("lemma_leaves", leaf_bad is None,
                      f"trees={checked}" if leaf_bad is None else f"counterexample={leaf_bad}")


def _size_bounds(class_tag: TreeClass, trials: int, seed: int) -> CheckResult:
    worst = None
    for n in CORPUS_SIZES:
        for i in range(trials):
            t = sample_uniform(n, seed + i, class_tag)
            enc = codec.encode(t)
            ok = (codec.decode(enc) == t and enc.total_bits <= codec.size_bound(n, class_tag)
                  and enc.payload_bits <= enc.ideal_bits + 64)
            if not ok:
                return CheckResult(f"size_bound_{class_tag.value}", False,
                                   f"n={n} seed={seed + i} bits={enc.total_bits}")
            margin = enc.total_bits / codec.size_bound(n, class_tag)
            worst = margin if worst is None else max(worst, margin)
    return CheckResult(f"size_bound_{class_tag.value}", True,
                       f"trials={trials * len(CORPUS_SIZES)} worst_ratio={worst:.4f}")


def _growth(class_tag: TreeClass, h_max: int) -> Iterator[CheckResult]:
    target, c_expected = GROWTH_TARGETS[class_tag]
    spec = builtin(class_tag)
    c = fixed_point(spec)
    yield CheckResult(f"fixed_point_{class_tag.value}", abs(c - c_expected) < 1e-12, f"C={c!r}")
    r = growth_bracket(spec, tol=GROWTH_TOL, h_max=h_max)
    lo, hi = float(r.alpha_lower), float(r.alpha_upper)
    ok = r.converged and r.monotone and r.width < 1e-3 and lo <= target <= hi
    yield CheckResult(f"growth_{class_tag.value}", ok,
                      f"bracket=[{lo:.12f},{hi:.12f}] h={r.h_reached} "
                      f"bits_lower_bound={r.bits_per_node_lower_bound:.6f}")


def _roundtrip_file(path: Path) -> CheckResult:
    try:
        data = path.read_bytes()
        enc = codec.unpack(data)
        tree = codec.decode(enc)
        again = codec.pack(codec.encode(tree))
    except (AvlError, OSError, ValueError) as exc:
        return CheckResult("roundtrip", False, f"file={path} error={type(exc).__name__}: {exc}")
    return CheckResult("roundtrip", again == data, f"file={path} n={tree.n}")


def run_verify(max_n: int = 12, trials: int = 3, seed: int = DEFAULT_SEED, h_max: int = 45,
               input_path: Optional[Path] = None,
               emit: Callable[[str], None] = print) -> int:
    """Run every check, emitting one line each; returns 0 iff all pass."""
    lemma_n = min(max_n + 2, LEMMA_LIMIT)

    def checks() -> Iterator[CheckResult]:
        if input_path is not None:
            yield _roundtrip_file(Path(input_path))
        for cls in TreeClass:
            yield _roundtrip_exhaustive(cls, max_n)
        for cls in TreeClass:
            yield from _counts(cls, lemma_n)
        yield from _lemmas(lemma_n)
        for cls in TreeClass:
            yield _size_bounds(cls, trials, seed)
        for cls in TreeClass:
            yield from _growth(cls, h_max)

    first_failure = None
    for result in checks():
        emit(result.line())
        if not result.passed and first_failure is None:
            first_failure = result.name
    if first_failure is None:
        emit("RESULT PASS")
        return 0
    emit(f"RESULT FAIL first={first_failure}")
    return 1
