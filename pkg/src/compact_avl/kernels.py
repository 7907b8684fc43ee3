"""Hot inner loops: tree relabelling, heights, range coding, sampling.

Every function here is compiled with numba when the numba backend is active
(see :mod:`compact_avl._backend`) and otherwise runs as ordinary Python on
numpy arrays. Kernels report failures through integer status codes because
compiled code cannot raise the package's exception types; callers translate.
"""
from __future__ import annotations

import numpy as np

from ._backend import USE_NUMBA, jit

# status codes shared with callers
OK = 0
TRUNCATED = 1
CORRUPT = 2
OVERFLOW = 3
BAD_INDEX = 4
REVISITED = 5
UNREACHED = 6

TOP = 1 << 24
MASK32 = 0xFFFFFFFF
RANGE_INIT = 0xFFFFFFFF


@jit
def preorder_relabel(left, right, root):
    """Renumber nodes in pre-order starting from ``root``.

    Returns ``(status, new_left, new_right)``; status is OK, BAD_INDEX,
    REVISITED (cycle or shared child) or UNREACHED (detached nodes).
    """
    n = left.shape[0]
    new_left = np.full(n, -1, np.int64)
    new_right = np.full(n, -1, np.int64)
    new_id = np.full(n, -1, np.int64)
    parent_new = np.full(n, -1, np.int64)
    side = np.zeros(n, np.int64)
    stack = np.empty(n + 1, np.int64)
    if root < 0 or root >= n:
        return BAD_INDEX, new_left, new_right
    sp = 0
    stack[sp] = root
    sp += 1
    count = 0
    while sp > 0:
        sp -= 1
        v = stack[sp]
        if new_id[v] >= 0:
            return REVISITED, new_left, new_right
        new_id[v] = count
        p = parent_new[v]
        if p >= 0:
            if side[v] == 0:
                new_left[p] = count
            else:
                new_right[p] = count
        count += 1
        r = right[v]
        lc = left[v]
        if r >= n or lc >= n or r < -1 or lc < -1:
            return BAD_INDEX, new_left, new_right
        if sp + 2 > n + 1:
            return REVISITED, new_left, new_right
        if r >= 0:
            if parent_new[r] >= 0 or new_id[r] >= 0 or r == root:
                return REVISITED, new_left, new_right
            parent_new[r] = new_id[v]
            side[r] = 1
            stack[sp] = r
            sp += 1
        if lc >= 0:
            if parent_new[lc] >= 0 or new_id[lc] >= 0 or lc == root:
                return REVISITED, new_left, new_right
            parent_new[lc] = new_id[v]
            side[lc] = 0
            stack[sp] = lc
            sp += 1
    if count != n:
        return UNREACHED, new_left, new_right
    return OK, new_left, new_right


@jit
def _heights_sweep(left, right):
    n = left.shape[0]
    h = np.empty(n, np.int64)
    for v in range(n - 1, -1, -1):
        hl = -1
        hr = -1
        if left[v] >= 0:
            hl = h[left[v]]
        if right[v] >= 0:
            hr = h[right[v]]
        h[v] = 1 + (hl if hl > hr else hr)
    return h


def _heights_levels(left, right):
    n = left.shape[0]
    levels = []
    frontier = np.zeros(1, dtype=np.int64)
    while frontier.size:
        levels.append(frontier)
        kids = np.concatenate((left[frontier], right[frontier]))
        frontier = kids[kids >= 0]
    h = np.full(n, -1, dtype=np.int64)
    for lvl in reversed(levels):
        lc = left[lvl]
        rc = right[lvl]
        hl = np.where(lc >= 0, h[lc], -1)
        hr = np.where(rc >= 0, h[rc], -1)
        h[lvl] = 1 + np.maximum(hl, hr)
    return h


def subtree_heights(left, right):
    """Height of the subtree rooted at every node of a pre-ordered tree."""
    if USE_NUMBA:
        return _heights_sweep(left, right)
    return _heights_levels(left, right)


# --------------------------------------------------------------------------
# range coder primitives (32-bit range, 33-bit low, byte-wise carry cache)
# --------------------------------------------------------------------------

@jit
def _shift_low(low, cache, cache_size, out, pos):
    if (low & MASK32) < 0xFF000000 or low > MASK32:
        carry = low >> 32
        temp = cache
        while True:
            # pos starts at -1: the very first cached byte is always zero
            if pos >= 0:
                out[pos] = (temp + carry) & 0xFF
            pos += 1
            temp = 0xFF
            cache_size -= 1
            if cache_size == 0:
                break
        cache = (low >> 24) & 0xFF
    cache_size += 1
    low = (low & 0x00FFFFFF) << 8
    return low, cache, cache_size, pos


@jit
def encode_step(low, rng, cum_lo, cum_hi, total, cache, cache_size, out, pos):
    lo = rng * cum_lo // total
    hi = rng * cum_hi // total
    low += lo
    rng = hi - lo
    while rng < TOP:
        rng <<= 8
        low, cache, cache_size, pos = _shift_low(low, cache, cache_size, out, pos)
    return low, rng, cache, cache_size, pos


@jit
def encode_flush(low, cache, cache_size, out, pos):
    for _ in range(5):
        low, cache, cache_size, pos = _shift_low(low, cache, cache_size, out, pos)
    return pos


@jit
def decode_init(data):
    """Returns ``(status, code, rng, pos)``."""
    if data.shape[0] < 4:
        return TRUNCATED, 0, RANGE_INIT, 0
    code = 0
    for i in range(4):
        code = (code << 8) | np.int64(data[i])
    if code >= RANGE_INIT:
        return CORRUPT, code, RANGE_INIT, 4
    return OK, code, RANGE_INIT, 4


@jit
def decode_step(data, pos, code, rng, cum_row, k):
    """Decode one symbol under ``cum_row[:k+1]``; returns ``(status, sym, code, rng, pos)``."""
    total = cum_row[k]
    a = 0
    b = k - 1
    while a < b:
        mid = (a + b) // 2
        if rng * cum_row[mid + 1] // total > code:
            b = mid
        else:
            a = mid + 1
    lo = rng * cum_row[a] // total
    hi = rng * cum_row[a + 1] // total
    if code < lo or code >= hi:
        return CORRUPT, a, code, rng, pos
    code -= lo
    rng = hi - lo
    while rng < TOP:
        if pos >= data.shape[0]:
            return TRUNCATED, a, code, rng, pos
        code = (code << 8) | np.int64(data[pos])
        pos += 1
        rng <<= 8
    return OK, a, code, rng, pos


@jit
def encode_batch(symbols, models, cum, ksym):
    """Encode ``symbols[i]`` under model row ``models[i]`` of ``cum``; returns bytes array."""
    m = symbols.shape[0]
    out = np.zeros(4 * m + 8, np.uint8)
    low = 0
    rng = RANGE_INIT
    cache = 0
    cache_size = 1
    pos = -1
    for i in range(m):
        row = models[i]
        s = symbols[i]
        low, rng, cache, cache_size, pos = encode_step(
            low, rng, cum[row, s], cum[row, s + 1], cum[row, ksym[row]],
            cache, cache_size, out, pos)
    pos = encode_flush(low, cache, cache_size, out, pos)
    return out[:pos]


@jit
def decode_batch(data, models, cum, ksym):
    """Inverse of :func:`encode_batch`; returns ``(status, symbols)``."""
    m = models.shape[0]
    syms = np.zeros(m, np.int64)
    if m == 0:
        return OK, syms
    status, code, rng, pos = decode_init(data)
    if status != OK:
        return status, syms
    for i in range(m):
        row = models[i]
        status, s, code, rng, pos = decode_step(data, pos, code, rng, cum[row], ksym[row])
        if status != OK:
            return status, syms
        syms[i] = s
    return OK, syms


@jit
def decode_tree(data, height, n, cum, ksym):
    """Rebuild a pre-ordered shape from balance symbols by depth propagation.

    Model row 0 codes nodes of depth >= 2, row 1 codes depth-1 nodes. Symbol 0
    means equal child depths, 1 a taller left child, 2 a taller right child.
    Returns ``(status, left, right, bytes_consumed)``.
    """
    left = np.full(n, -1, np.int64)
    right = np.full(n, -1, np.int64)
    if height == 0:
        if n != 1:
            return OVERFLOW, left, right, 0
        return OK, left, right, 0
    status, code, rng, pos = decode_init(data)
    if status != OK:
        return status, left, right, pos
    st_depth = np.empty(n + 2, np.int64)
    st_parent = np.empty(n + 2, np.int64)
    st_side = np.empty(n + 2, np.int64)
    sp = 0
    st_depth[0] = height
    st_parent[0] = -1
    st_side[0] = 0
    sp = 1
    count = 0
    while sp > 0:
        sp -= 1
        d = st_depth[sp]
        p = st_parent[sp]
        v = count
        count += 1
        if p >= 0:
            if st_side[sp] == 0:
                left[p] = v
            else:
                right[p] = v
        if d == 0:
            continue
        row = 1 if d == 1 else 0
        status, s, code, rng, pos = decode_step(data, pos, code, rng, cum[row], ksym[row])
        if status != OK:
            return status, left, right, pos
        dl = d - 1
        dr = d - 1
        if s == 1:
            dr = d - 2
        elif s == 2:
            dl = d - 2
        pending = 0
        if dl >= 0:
            pending += 1
        if dr >= 0:
            pending += 1
        if count + sp + pending > n:
            return OVERFLOW, left, right, pos
        if dr >= 0:
            st_depth[sp] = dr
            st_parent[sp] = v
            st_side[sp] = 1
            sp += 1
        if dl >= 0:
            st_depth[sp] = dl
            st_parent[sp] = v
            st_side[sp] = 0
            sp += 1
    if count != n:
        return OVERFLOW, left, right, pos
    return OK, left, right, pos


# --------------------------------------------------------------------------
# recursive-method sampler over scaled floating-point count tables
# --------------------------------------------------------------------------

@jit
def sample_shape(table, minsize, maxsize, n, root_h, uniforms, ncases):
    """Draw a shape with ``n`` nodes and height ``root_h``.

    ``table[h + 1, m]`` is proportional to the number of shapes with ``m``
    nodes and height ``h`` (row 0 is the empty subtree). Each internal node
    consumes one uniform from ``uniforms``. Returns ``(left, right)``.
    """
    left = np.full(n, -1, np.int64)
    right = np.full(n, -1, np.int64)
    st_m = np.empty(n + 2, np.int64)
    st_g = np.empty(n + 2, np.int64)
    st_p = np.empty(n + 2, np.int64)
    st_s = np.empty(n + 2, np.int64)
    st_m[0] = n
    st_g[0] = root_h
    st_p[0] = -1
    st_s[0] = 0
    sp = 1
    count = 0
    ui = 0
    while sp > 0:
        sp -= 1
        m = st_m[sp]
        g = st_g[sp]
        p = st_p[sp]
        v = count
        count += 1
        if p >= 0:
            if st_s[sp] == 0:
                left[p] = v
            else:
                right[p] = v
        if g == 0:
            continue
        m1 = m - 1
        total = 0.0
        for case in range(ncases):
            hl = g - 1
            hr = g - 1
            if case == 1:
                hr = g - 2
            elif case == 2:
                hl = g - 2
            ilo = max(minsize[hl + 1], m1 - maxsize[hr + 1])
            ihi = min(maxsize[hl + 1], m1 - minsize[hr + 1])
            for i in range(ilo, ihi + 1):
                total += table[hl + 1, i] * table[hr + 1, m1 - i]
        target = uniforms[ui] * total
        ui += 1
        acc = 0.0
        best_l = -1
        best_hl = 0
        best_hr = 0
        found = False
        for case in range(ncases):
            hl = g - 1
            hr = g - 1
            if case == 1:
                hr = g - 2
            elif case == 2:
                hl = g - 2
            ilo = max(minsize[hl + 1], m1 - maxsize[hr + 1])
            ihi = min(maxsize[hl + 1], m1 - minsize[hr + 1])
            for i in range(ilo, ihi + 1):
                w = table[hl + 1, i] * table[hr + 1, m1 - i]
                if w > 0.0:
                    best_l = i
                    best_hl = hl
                    best_hr = hr
                    acc += w
                    if acc > target:
                        found = True
                        break
            if found:
                break
        i = best_l
        if best_hr >= 0:
            st_m[sp] = m1 - i
            st_g[sp] = best_hr
            st_p[sp] = v
            st_s[sp] = 1
            sp += 1
        if best_hl >= 0:
            st_m[sp] = i
            st_g[sp] = best_hl
            st_p[sp] = v
            st_s[sp] = 0
            sp += 1
    return left, right
