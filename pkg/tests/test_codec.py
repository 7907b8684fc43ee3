import math
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from compact_avl import codec
from compact_avl.coder import SymbolModel
from compact_avl.counting import enumerate_all
from compact_avl.errors import (AvlError, FormatError, IntegrityError, InvalidTreeError,
                                TruncatedStreamError)
from compact_avl.sampling import sample_uniform
from compact_avl.tree import TreeClass, TreeStats, compute_stats, single_node

from conftest import LEAF, nested_tree

LOG2_3 = math.log2(3)


# ---------------------------------------------------------------- Elias-delta

@given(st.integers(1, 2**63))
def test_elias_delta_roundtrip(x):
    w = codec.BitWriter()
    codec.elias_delta_write(w, x)
    assert len(w) == codec.elias_delta_length(x)
    assert codec.elias_delta_read(codec.BitReader(w.to_bytes())) == x


def test_elias_delta_known_codes():
    # 1 -> "1", 2 -> "0100", 17 -> "001010001"
    for x, code in [(1, "1"), (2, "0100"), (17, "001010001")]:
        w = codec.BitWriter()
        codec.elias_delta_write(w, x)
        assert "".join(map(str, w.bits)) == code
    with pytest.raises(ValueError):
        codec.elias_delta_write(codec.BitWriter(), 0)


# ---------------------------------------------------------------- encoding examples

def test_single_node_is_header_only():
    enc = codec.encode(single_node())
    assert enc.payload == b"" and enc.payload_bits == 0 and enc.symbol_count == 0
    assert codec.decode(enc) == single_node()
    # class bit; H, b, b2 code 1 as '1'; n and a code 2 as '0100'
    assert enc.header_bits == 1 + 3 * 1 + 2 * 4
    assert codec.measure(single_node())["payload_bits"] == 0


def test_complete_three_uses_one_uniform_symbol():
    t = nested_tree((LEAF, LEAF))
    enc = codec.encode(t)
    assert enc.symbol_count == 1
    assert enc.ideal_bits == pytest.approx(LOG2_3)
    assert enc.payload_bits <= LOG2_3 + 64
    assert codec.decode(enc) == t


def test_coloured_example_ideal_payload(stats_example_tree):
    enc = codec.encode(stats_example_tree)
    # alpha = 1/2 >= 0.4, so every coded node uses the uniform ternary model
    assert enc.symbol_count == 6
    assert enc.ideal_bits == pytest.approx(6 * LOG2_3, abs=1e-12)


def test_skewed_model_selected_below_threshold():
    for seed in range(10):
        t = sample_uniform(3000, seed)
        s = compute_stats(t)
        upper, depth1 = codec.model_palette(codec.Header.from_stats(s, TreeClass.AVL))
        assert upper == SymbolModel.uniform(3)
        if 5 * s.a < 2 * s.n:
            assert depth1 == SymbolModel([2 * s.b2 + 1, s.b1 + 1, s.b1 + 1])
        else:
            assert depth1 == upper


def test_threshold_tie_uses_uniform():
    assert codec.uniform_depth1(10, 4)
    assert not codec.uniform_depth1(10, 3)


def test_llavl_palette():
    h = codec.Header(TreeClass.LLAVL, 20, 30000, 11000, 8000, 3000)
    upper, depth1 = codec.model_palette(h)
    assert upper == SymbolModel([1, 1]) and depth1 == SymbolModel([3001, 5001])


def test_oversized_frequencies_are_scaled_deterministically():
    h = codec.Header(TreeClass.AVL, 40, 30_000_000, 11_000_000, 8_000_000, 3_000_000)
    _, depth1 = codec.model_palette(h)
    assert depth1.total <= 1 << 24
    assert codec.model_palette(h) == codec.model_palette(replace(h))


def test_invalid_tree_rejected():
    with pytest.raises(InvalidTreeError):
        codec.encode(nested_tree(((LEAF, None), None)))
    with pytest.raises(InvalidTreeError):
        codec.encode(nested_tree((None, LEAF), TreeClass.LLAVL))


# ---------------------------------------------------------------- round trips

@pytest.mark.parametrize("cls", list(TreeClass))
def test_exhaustive_roundtrip(cls):
    for n in range(1, 13):
        for t in enumerate_all(n, cls):
            enc = codec.encode(t)
            assert codec.decode(enc) == t
            assert codec.decode(codec.unpack(codec.pack(enc))) == t
            assert enc.total_bits <= codec.size_bound(n, cls)


@given(st.integers(1, 20_000), st.integers(0, 2**64 - 1), st.sampled_from(list(TreeClass)))
def test_random_roundtrip_and_bounds(n, seed, cls):
    t = sample_uniform(n, seed, cls)
    enc = codec.encode(t)
    assert codec.decode(enc) == t
    assert enc.payload_bits <= enc.ideal_bits + 64
    assert enc.total_bits <= codec.size_bound(n, cls)
    rec = codec.measure(t)
    assert rec["payload_bits"] <= rec["predicted_bound"] + 12 * math.log2(n) + 64
    assert rec["bits_per_node"] == pytest.approx((enc.header_bits + enc.payload_bits) / n)


def test_large_trees_below_one_bit_per_node():
    for seed in range(3):
        assert codec.encode(sample_uniform(100_000, seed)).bits_per_node < 1.0
        assert codec.encode(sample_uniform(100_000, seed, "llavl")).bits_per_node < 0.60


# ---------------------------------------------------------------- corruption

def test_header_height_mismatch_is_integrity_error():
    enc = codec.encode(nested_tree((LEAF, LEAF)))
    bad = replace(enc, header=replace(enc.header, H=2))
    with pytest.raises(IntegrityError):
        codec.decode(bad)


def test_header_stats_mismatch_is_integrity_error():
    t = sample_uniform(200, 3)
    enc = codec.encode(t)
    for field in ("a", "b", "b2"):
        value = getattr(enc.header, field)
        bad = replace(enc, header=replace(enc.header, **{field: max(0, value - 1)}))
        with pytest.raises((IntegrityError, TruncatedStreamError)):
            codec.decode(bad)


def test_counter_mismatch_with_identical_models():
    t = nested_tree(((LEAF, LEAF), (LEAF, LEAF)))      # alpha = 4/7, models ignore b and b2
    enc = codec.encode(t)
    bad = replace(enc, header=replace(enc.header, b2=1))
    assert codec.model_palette(bad.header) == codec.model_palette(enc.header)
    with pytest.raises(IntegrityError, match="statistics"):
        codec.decode(bad)


def test_truncated_payload():
    enc = codec.encode(sample_uniform(2000, 1))
    with pytest.raises(TruncatedStreamError):
        codec.decode(replace(enc, payload=enc.payload[:-20]))


def test_trailing_payload_bytes():
    enc = codec.encode(sample_uniform(2000, 1))
    with pytest.raises(IntegrityError):
        codec.decode(replace(enc, payload=enc.payload + b"\x00"))


@given(st.binary(max_size=64), st.integers(1, 40))
def test_random_payloads_never_crash(payload, n):
    t = sample_uniform(n, 9)
    enc = replace(codec.encode(t), payload=payload)
    try:
        out = codec.decode(enc)
    except AvlError:
        return
    assert compute_stats(out).a == enc.header.a and out.n == n


def test_archive_format():
    enc = codec.encode(sample_uniform(50, 4, "llavl"))
    data = codec.pack(enc)
    assert data[:4] == b"AVLC" and data[4] == 1 and data[5] == 1
    assert codec.unpack(data) == enc
    for bad in (b"XXXX" + data[4:], data[:4] + b"\x09" + data[5:], data[:5] + b"\x07" + data[6:], b"AVL"):
        with pytest.raises(FormatError):
            codec.unpack(bad)
    with pytest.raises(TruncatedStreamError):
        codec.unpack(data[:7])


def test_archive_files(tmp_path):
    t = sample_uniform(999, 2)
    codec.write_encoded(codec.encode(t), tmp_path / "t.avlc")
    assert codec.decode(codec.read_encoded(tmp_path / "t.avlc")) == t


# ---------------------------------------------------------------- analytic bounds

def _stats(n, a, b1, b2):
    return TreeStats(n, 0, a, b1, b2, 0, n - a - b1 - b2)


def test_bound_at_threshold():
    s = _stats(1000, 400, 150, 100)
    assert codec.predicted_bound(s) == pytest.approx(600 * LOG2_3)
    assert codec.predicted_bound(s) / 1000 == pytest.approx(0.951, abs=1e-3)


def test_bound_below_threshold_uses_x():
    s = _stats(1000, 350, 200, 100)
    beta2 = 100 / 300
    x = beta2 * math.log2(1 / beta2) + (1 - beta2) * math.log2(2 / (1 - beta2))
    assert codec.predicted_bound(s) == pytest.approx(300 * x + 350 * LOG2_3)
    s0 = _stats(1000, 350, 300, 0)       # 0 * log(1/0) = 0
    assert codec.predicted_bound(s0) == pytest.approx(300 * 1.0 + 350 * LOG2_3)
    sl = _stats(1000, 350, 200, 100)
    xs = beta2 * math.log2(1 / beta2) + (1 - beta2) * math.log2(1 / (1 - beta2))
    assert codec.predicted_bound(sl, "llavl") == pytest.approx(300 * xs + 350)


def test_worst_case_maximum_avl():
    alpha, rate = codec.worst_case_max("avl")
    assert alpha == pytest.approx(0.3449, abs=5e-4)
    assert rate <= 0.99933 + 5e-6
    assert rate == pytest.approx(0.99933, abs=1e-5)


def test_worst_case_maximum_llavl():
    _, rate = codec.worst_case_max("llavl")
    assert rate <= 0.5912


def test_predicted_bound_dominates_ideal_payload():
    for seed in range(20):
        for cls in TreeClass:
            t = sample_uniform(5000, seed, cls)
            enc = codec.encode(t)
            assert enc.ideal_bits <= codec.predicted_bound(compute_stats(t), cls) + 12 * math.log2(5000)
