import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

PROBE = Path(__file__).with_name("_backend_probe.py")


def _run(backend, extra_env=None):
    env = dict(os.environ, COMPACT_AVL_BACKEND=backend)
    env.pop("NUMBA_DISABLE_JIT", None)
    env.update(extra_env or {})
    return subprocess.run([sys.executable, str(PROBE)], capture_output=True, text=True, env=env, timeout=600)


@pytest.fixture(scope="module")
def digests():
    out = {}
    for backend in ("numba", "numpy"):
        proc = _run(backend)
        assert proc.returncode == 0, proc.stderr
        out[backend] = json.loads(proc.stdout)
    return out


def test_backend_flag_is_honoured(digests):
    assert digests["numba"]["backend"] == "numba"
    assert digests["numpy"]["backend"] == "numpy"


def test_backends_agree_bit_for_bit(digests):
    a = {k: v for k, v in digests["numba"].items() if k != "backend"}
    b = {k: v for k, v in digests["numpy"].items() if k != "backend"}
    assert a == b and len(a) == 5


def test_disable_jit_selects_numpy():
    proc = _run("numba", {"NUMBA_DISABLE_JIT": "1"})
    assert proc.returncode == 0 and json.loads(proc.stdout)["backend"] == "numpy"


def test_unknown_backend_fails_at_import():
    proc = subprocess.run([sys.executable, "-c", "import compact_avl"], capture_output=True, text=True,
                          env=dict(os.environ, COMPACT_AVL_BACKEND="cuda"), timeout=120)
    assert proc.returncode != 0 and "COMPACT_AVL_BACKEND" in proc.stderr
