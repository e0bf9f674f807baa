import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from invset import padic
from invset.padic import STANDARD, UNNORMALIZED, DiskAddress, DiskEntry, PadicInt


def pad(p, *digits):
    return PadicInt(p, tuple(digits))


def test_example_distances():
    x, y = pad(4, 1, 3, 0), pad(4, 1, 2, 2)
    assert padic.valuation(x, y) == 1
    assert padic.distance(x, y) == F(1, 4)
    assert padic.distance(x, y, UNNORMALIZED) == 1
    z = pad(4, 2, 3, 0)
    assert padic.distance(x, z) == 1
    assert padic.distance(x, z, UNNORMALIZED) == 4
    assert padic.distance(x, x) == 0


def test_metric_errors():
    with pytest.raises(ValueError):
        padic.distance(pad(3, 1), pad(4, 1))
    with pytest.raises(ValueError):
        padic.distance(pad(3, 1), pad(3, 1, 2))
    with pytest.raises(ValueError):
        padic.distance(pad(3, 1), pad(3, 2), "other")


def test_digit_validation():
    with pytest.raises(ValueError):
        pad(3, 3)
    with pytest.raises(ValueError):
        PadicInt(1, (0,))


def test_carry_example():
    # 3 + 2 = 5 = 1 + 1*4 in base 4
    assert padic.add(pad(4, 3, 0), pad(4, 2, 0)).digits == (1, 1)
    # -1 + 1 = 0 with the carry falling off the end
    assert padic.add(pad(4, 3, 3, 3), pad(4, 1, 0, 0)).digits == (0, 0, 0)


def test_truncates_to_min_depth():
    assert padic.add(pad(5, 1, 2, 3), pad(5, 4, 4)).depth == 2


params = st.tuples(st.integers(2, 12), st.integers(1, 8)).flatmap(
    lambda pd: st.tuples(st.just(pd[0]), st.just(pd[1]),
                         st.integers(0, pd[0] ** pd[1] - 1), st.integers(0, pd[0] ** pd[1] - 1),
                         st.integers(0, pd[0] ** pd[1] - 1)))


@given(params)
def test_arithmetic_matches_integer_oracle(t):
    p, depth, a, b, _ = t
    x, y = PadicInt.from_int(a, p, depth), PadicInt.from_int(b, p, depth)
    mod = p**depth
    assert (x + y).to_int() == (a + b) % mod
    assert (x * y).to_int() == (a * b) % mod
    assert x.to_int() == a


@given(params)
def test_strong_triangle(t):
    p, depth, a, b, c = t
    x, y, z = (PadicInt.from_int(v, p, depth) for v in (a, b, c))
    for conv in (STANDARD, UNNORMALIZED):
        dxz = padic.distance(x, z, conv)
        assert dxz <= max(padic.distance(x, y, conv), padic.distance(y, z, conv))
        assert padic.distance(x, y, conv) == padic.distance(y, x, conv)


@given(params)
def test_translation_invariance(t):
    p, depth, a, b, c = t
    x, y, z = (PadicInt.from_int(v, p, depth) for v in (a, b, c))
    assert padic.distance(x + z, y + z) == padic.distance(x, y)


@given(params)
def test_standard_distance_is_integer_oracle(t):
    # |a - b|_p computed from the integer difference
    p, depth, a, b, _ = t
    x, y = PadicInt.from_int(a, p, depth), PadicInt.from_int(b, p, depth)
    diff = (a - b) % p**depth
    if diff == 0:
        expected = F(0)
    else:
        v = 0
        while diff % p == 0:
            diff //= p
            v += 1
        expected = F(p) ** -v
    assert padic.distance(x, y) == expected
    assert padic.distance(x, y, UNNORMALIZED) == expected * p


def test_address_round_trip_random():
    rng = random.Random(7)
    for _ in range(1000):
        p, depth = rng.randint(2, 10), rng.randint(1, 6)
        x = PadicInt(p, tuple(rng.randrange(p) for _ in range(depth)))
        addr = padic.padic_to_address(x)
        assert padic.address_to_padic(addr) == x
        assert PadicInt.from_dict(json.loads(json.dumps(x.to_dict()))) == x


def test_address_labels():
    addr = padic.padic_to_address(pad(4, 1, 2))
    assert addr.entries == (DiskEntry(0, 1, "~a"), DiskEntry(1, 2, "b"))


def test_address_validation():
    with pytest.raises(ValueError):
        DiskAddress(4, (DiskEntry(0, 1, "b"),))
    with pytest.raises(ValueError):
        DiskAddress(4, (DiskEntry(1, 1, "a"),))
    with pytest.raises(ValueError):
        DiskAddress(4, (DiskEntry(0, 4, "a"),))
    custom = DiskAddress(3, (DiskEntry(0, 2, "red"),), alphabets=(("red", "blue"),))
    assert padic.address_to_padic(custom).digits == (2,)


def test_cluster_label():
    x = pad(4, 0, 3)
    assert padic.cluster_label(x, 1, {0: "X", 1: "X", 2: "Y", 3: "Y"}) == "Y"
    assert padic.cluster_label(x, 0, lambda d: "even" if d % 2 == 0 else "odd") == "even"
    with pytest.raises(ValueError):
        padic.cluster_label(x, 2, lambda d: "")


def test_from_dict_depth_mismatch():
    with pytest.raises(ValueError):
        PadicInt.from_dict({"p": 3, "depth": 2, "digits": [1]})


def test_distance_matrix_csv():
    text = padic.distance_matrix_csv([pad(3, 0, 1), pad(3, 0, 2), pad(3, 1, 1)])
    lines = text.strip().split("\n")
    assert lines[0] == ",0.1,0.2,1.1"
    assert lines[1] == "0.1,0,1/3,1"
