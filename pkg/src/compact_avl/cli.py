"""``compact-avl`` command line: generation, coding, statistics, counting,
growth tables, self-verification and size benchmarks.

Exit codes: 0 success, 1 a check failed, 2 growth bracket did not converge,
3 bad input (unreadable file, invalid tree, corrupt archive, limits).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import codec
from .counting import count_by_size_height
from .errors import AvlError
from .growth import builtin, convergence_table, format_alpha, growth_bracket, parse_spec
from .sampling import DEFAULT_SEED, sample_uniform
from .tree import AvlTree, TreeClass, compute_stats, pack_lob, read_tree, to_text, write_tree
from .verify import run_verify

EXIT_OK, EXIT_CHECK, EXIT_UNCONVERGED, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    """Inconsistent flags or unusable input; maps to exit code 3."""


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _emit_tree(tree: AvlTree, out: Optional[str], fmt: Optional[str]) -> None:
    fmt = fmt or ("lob" if out and out.endswith(".lob") else "text")
    if fmt not in ("text", "lob", "json"):
        raise InputError(f"trees can be written as text, lob or json, not {fmt}")
    if out is None:
        if fmt == "lob":
            sys.stdout.buffer.write(pack_lob(tree))
        elif fmt == "json":
            print(_json({"class": tree.class_tag.value, "n": tree.n, "tree": to_text(tree)}))
        else:
            print(to_text(tree))
    elif fmt == "json":
        Path(out).write_text(_json({"class": tree.class_tag.value, "n": tree.n, "tree": to_text(tree)}) + "\n")
    else:
        write_tree(tree, out, fmt)


def _load_tree(args) -> AvlTree:
    if args.input:
        return read_tree(args.input, args.cls)
    if args.n is None:
        raise InputError("give --in FILE or --n N (with --seed) to sample a tree")
    return sample_uniform(args.n, args.seed, args.cls)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.n is None:
        raise InputError("gen requires --n")
    _emit_tree(sample_uniform(args.n, args.seed, args.cls), args.out, args.format)
    return EXIT_OK


def cmd_encode(args) -> int:
    tree = _load_tree(args)
    enc = codec.encode(tree)
    if args.out:
        codec.write_encoded(enc, args.out)
    record = enc.accounting()
    record["predicted_bound"] = codec.predicted_bound(compute_stats(tree), tree.class_tag)
    print(_json(record))
    return EXIT_OK


def cmd_decode(args) -> int:
    if not args.input or not args.input.endswith(".avlc"):
        raise InputError("decode requires an .avlc file via --in")
    tree = codec.decode(codec.read_encoded(args.input))
    _emit_tree(tree, args.out, args.format)
    return EXIT_OK


def cmd_stats(args) -> int:
    tree = _load_tree(args)
    record = compute_stats(tree).as_dict()
    record["class"] = tree.class_tag.value
    print(_json(record))
    return EXIT_OK


def cmd_count(args) -> int:
    table = count_by_size_height(args.max_n, args.cls)
    totals = table.totals()
    if args.format == "json":
        print(_json({"class": args.cls, "counts": totals[1:]}))
    else:
        print("n,count")
        for n in range(1, args.max_n + 1):
            print(f"{n},{totals[n]}")
    return EXIT_OK


def cmd_alpha(args) -> int:
    if args.spec:
        spec = parse_spec(Path(args.spec).read_text(encoding="utf-8"), name=Path(args.spec).stem)
    else:
        spec = builtin(args.cls)
    report = growth_bracket(spec, tol=args.tol, h_max=args.h_max)
    print("h,alpha_h,parity")
    for row in convergence_table(spec, report.h_reached):
        print(f"{row.h},{format_alpha(row.alpha)},{row.parity}")
    print(f"# bracket=[{format_alpha(report.alpha_lower)},{format_alpha(report.alpha_upper)}]"
          f" width={report.width:.3e} converged={str(report.converged).lower()}"
          f" monotone={str(report.monotone).lower()}"
          f" log2(1/alpha_upper)={report.bits_per_node_lower_bound:.6f}")
    return EXIT_OK if report.converged else EXIT_UNCONVERGED


def cmd_verify(args) -> int:
    return run_verify(max_n=args.max_n, trials=args.trials, seed=args.seed,
                      h_max=args.h_max, input_path=args.input)


def bench_trials(n: int, trials: int, seed: int, class_tag) -> list[float]:
    """bits_per_node for trials ``i = 0..trials-1`` using seed ``seed + i``, in trial order."""
    return [codec.encode(sample_uniform(n, seed + i, class_tag)).bits_per_node for i in range(trials)]


def cmd_bench(args) -> int:
    if args.n is None:
        raise InputError("bench requires --n")
    if args.trials < 1:
        raise InputError("--trials must be positive")
    vals = bench_trials(args.n, args.trials, args.seed, args.cls)
    print(_json({"class": args.cls, "n": args.n, "trials": args.trials, "seed": args.seed,
                 "min": min(vals), "mean": sum(vals) / len(vals), "max": max(vals)}))
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen, "encode": cmd_encode, "decode": cmd_decode, "stats": cmd_stats,
    "count": cmd_count, "alpha": cmd_alpha, "verify": cmd_verify, "bench": cmd_bench,
}


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="compact-avl", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--class", dest="cls", choices=[c.value for c in TreeClass], default="avl")
    p.add_argument("--n", type=int)
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--h-max", type=int, default=45)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--in", dest="input")
    p.add_argument("--out")
    p.add_argument("--format", choices=["text", "lob", "avlc", "csv", "json"])
    p.add_argument("--spec")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (InputError, AvlError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
