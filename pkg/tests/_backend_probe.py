"""Print a digest of kernel outputs for the active backend (run as a subprocess)."""
import hashlib
import json

import numpy as np

from compact_avl import BACKEND, codec
from compact_avl.kernels import subtree_heights
from compact_avl.sampling import sample_uniform
from compact_avl.tree import to_bitmap


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


out = {"backend": BACKEND}
for n, seed, cls in [(1, 0, "avl"), (300, 5, "avl"), (300, 5, "llavl"), (5000, 17, "avl"), (5000, 17, "llavl")]:
    t = sample_uniform(n, seed, cls)
    enc = codec.encode(t)
    assert codec.decode(enc) == t
    key = f"{cls}-{n}-{seed}"
    out[key] = {
        "shape": digest(np.asarray(to_bitmap(t), dtype=np.uint8).tobytes()),
        "heights": digest(np.asarray(subtree_heights(t.left, t.right), dtype=np.int64).tobytes()),
        "archive": digest(codec.pack(enc)),
    }
print(json.dumps(out, sort_keys=True))
