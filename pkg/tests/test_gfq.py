import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patterncode.errors import DivisionByZero, FieldTooLarge, NotPrimePower
from patterncode.gfq import MODULI, Alphabet, field_new, is_prime_power, pp_ceil, rank, solve

PRIME_POWERS = [q for q in range(2, 65) if is_prime_power(q)]


def test_prime_power_detection():
    assert PRIME_POWERS[:10] == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]
    assert not is_prime_power(1) and not is_prime_power(6) and not is_prime_power(12)


@pytest.mark.parametrize("x,want", [(0, 2), (1, 2), (2, 2), (3, 3), (6, 7), (7, 7), (10, 11), (15, 16), (33, 37)])
def test_pp_ceil(x, want):
    assert pp_ceil(x) == want


def test_rejects():
    with pytest.raises(NotPrimePower):
        field_new(6)
    with pytest.raises(FieldTooLarge):
        field_new(128)
    with pytest.raises(DivisionByZero):
        field_new(5).inv(0)
    with pytest.raises(ValueError):
        Alphabet(1)


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_field_axioms(q):
    f = field_new(q)
    a = np.arange(q)
    assert (f.add_table == f.add_table.T).all() and (f.mul_table == f.mul_table.T).all()
    assert (f.add_table[0] == a).all() and (f.mul_table[1] == a).all()
    # addition rows and nonzero multiplication rows are permutations
    assert all(sorted(r) == list(range(q)) for r in f.add_table.tolist())
    for x in range(1, q):
        assert sorted(f.mul_table[x, 1:]) == list(range(1, q))
        assert f.mul(x, f.inv(x)) == 1
        assert f.add(x, f.neg(x)) == 0
    # multiplicative group is cyclic of order q - 1
    orders = []
    for g in range(1, q):
        o, y = 1, g
        while y != 1:
            y, o = f.mul(y, g), o + 1
        orders.append(o)
    assert max(orders) == q - 1


@pytest.mark.parametrize("q", sorted(MODULI))
def test_distributive_small(q):
    f = field_new(q)
    for a, b, c in itertools.product(range(q), repeat=3):
        if (a * 7 + b * 3 + c) % 5:  # sample a fifth of the cube
            continue
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)


def test_gf4_known_products():
    # GF(4) with x^2 = x + 1: x * x = x + 1, x * (x + 1) = 1
    f = field_new(4)
    assert f.mul(2, 2) == 3 and f.mul(2, 3) == 1 and f.add(2, 3) == 1


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PRIME_POWERS), st.integers(0, 63), st.integers(0, 63), st.integers(-5, 70))
def test_pow_and_div(q, a, b, e):
    f = field_new(q)
    a, b = a % q, b % q
    if a == 0 and e < 0:
        return
    want = 1
    base = a if e >= 0 else f.inv(a)
    for _ in range(abs(e)):
        want = f.mul(want, base)
    assert f.pow(a, e) == want
    if b:
        assert f.mul(f.div(a, b), b) == a
    assert f.arith("add", a, b) == f.add(a, b)


def test_rank_and_solve():
    f = field_new(3)
    assert rank(f, [[1, 0, 1], [0, 1, 1]]) == 2
    assert rank(f, [[1, 2], [2, 1]]) == 1  # second row = 2 * first over GF(3)
    x = solve(f, [[1, 0], [1, 2]], [1, 2])
    assert tuple(x) == (1, 2)
    with pytest.raises(DivisionByZero):
        solve(f, [[1, 2], [2, 1]], [0, 0])


def test_to_json():
    assert field_new(8).to_json() == {"q": 8, "p": 2, "m": 3, "modulus": [1, 1, 0, 1]}
    assert field_new(7).to_json()["modulus"] is None
