import pytest
from hypothesis import given, strategies as st

from compact_avl.poly import Poly, convolve

coeff = st.integers(0, 2**80)
coeffs = st.lists(coeff, max_size=60)


def schoolbook(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@given(coeffs, coeffs)
def test_convolve_matches_schoolbook(a, b):
    assert convolve(a, b) == schoolbook(a, b)


@given(coeffs, coeffs, st.integers(0, 80))
def test_truncated_convolve(a, b, limit):
    assert convolve(a, b, limit) == schoolbook(a, b)[:limit + 1]


@given(coeffs, coeffs, coeffs)
def test_ring_laws(a, b, c):
    p, q, r = Poly(a), Poly(b), Poly(c)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert (p + q) + r == p + (q + r)


def test_large_operands_use_big_multiplication():
    a = [3**200 + i for i in range(400)]      # > 50k bits once packed
    b = [7**150 + i for i in range(300)]
    assert convolve(a, b) == schoolbook(a, b)


def test_truncation_propagates():
    p = Poly([1, 1], trunc=3)
    assert (p ** 5).coeffs == (1, 5, 10, 10)
    assert (p * Poly([1, 1])).trunc == 3
    assert (Poly([1, 2]) + Poly([1], trunc=0)).coeffs == (2,)


def test_basic_operations():
    z = Poly.monomial(1)
    assert z.shift(2) == Poly.monomial(3)
    assert (z * z + 2 * z) == Poly([0, 2, 1])
    assert Poly([0, 0, 3, 0]).degree == 2
    assert Poly([0, 0, 3]).valuation == 2
    assert Poly().degree == -1 and Poly().valuation == -1
    assert Poly([5]).is_constant() and not z.is_constant()
    assert Poly([1, 2, 3])(2) == 17
    assert Poly([1, 2])[5] == 0
    assert Poly([4]) == 4 and Poly() == 0
    assert repr(Poly([0, 2])) == "Poly(2*z^1)"


def test_rejects_negative():
    with pytest.raises(ValueError):
        Poly([1, -1])
    with pytest.raises(ValueError):
        Poly([1]) * -2
    with pytest.raises(ValueError):
        Poly([1], trunc=-1)
