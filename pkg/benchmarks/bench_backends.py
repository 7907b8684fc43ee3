"""Time the hot kernels under the numba and pure-numpy backends.

Each backend runs in its own interpreter because the choice is fixed at
import time. Usage: ``python3 benchmarks/bench_backends.py [--n 20000] [--repeat 3]``
"""
import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKER = textwrap.dedent("""
    import json, sys, time
    import numpy as np
    from compact_avl import BACKEND, codec
    from compact_avl.kernels import subtree_heights
    from compact_avl.sampling import sample_uniform

    n, repeat = int(sys.argv[1]), int(sys.argv[2])
    sample_uniform(min(n, 2000), 0); codec.decode(codec.encode(sample_uniform(50, 0)))  # warm-up / JIT

    def best(fn):
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter(); fn(); times.append(time.perf_counter() - t0)
        return min(times)

    tree = sample_uniform(n, 1)
    enc = codec.encode(tree)
    out = {
        "backend": BACKEND,
        "sample": best(lambda: sample_uniform(n, 1)),
        "heights": best(lambda: subtree_heights(tree.left, tree.right)),
        "encode": best(lambda: codec.encode(tree)),
        "decode": best(lambda: codec.decode(enc)),
    }
    print(json.dumps(out))
""")


def run(backend: str, n: int, repeat: int) -> dict:
    env = dict(os.environ, COMPACT_AVL_BACKEND=backend)
    env.pop("NUMBA_DISABLE_JIT", None)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = run("numba", args.n, args.repeat), run("numpy", args.n, args.repeat)
    print(f"n={args.n}, best of {args.repeat} (seconds)")
    print(f"{'stage':<10}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for stage in ("sample", "heights", "encode", "decode"):
        a, b = fast[stage], slow[stage]
        print(f"{stage:<10}{a:>12.5f}{b:>12.5f}{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
