import random
from fractions import Fraction

import pytest

from kplab.errors import ConfigError, NotInvertibleError
from kplab.tpoly import TPoly, weight

K, D = 6, 6


def t(k, cap=D):
    return TPoly.var(K, cap, k)


def const(v, cap=D):
    return TPoly.const(K, cap, v)


def test_monomial_product():
    assert t(1) * t(1) == TPoly(K, D, {(2, 0, 0, 0, 0, 0): 1})


def test_difference_of_squares():
    one = const(1, 2)
    p = (one + t(1, 2)) * (one - t(1, 2))
    assert p == one - t(1, 2) * t(1, 2)


def test_truncation_kills_heavy_monomials():
    # t_2 * t_2 has weight 4, above a cap of 3
    p = TPoly.var(K, 3, 2) * TPoly.var(K, 3, 2)
    assert not p


def test_mismatched_caps_rejected():
    with pytest.raises(ConfigError):
        t(1, 2) * t(1, 3)


def test_inv_identity():
    assert const(1).inv() == const(1)


def test_inv_geometric_series_oracle():
    # (1 + t1)^-1 at cap 2 should match the frozen geometric series 1 - t1 + t1^2
    p = (const(1, 2) + t(1, 2)).inv()
    expected = const(1, 2) - t(1, 2) + t(1, 2) * t(1, 2)
    assert p == expected


def test_inv_constant():
    assert const(2, 1).inv() == const(Fraction(1, 2), 1)


def test_inv_requires_constant_term():
    with pytest.raises(NotInvertibleError):
        t(1).inv()


def test_diff_examples():
    p = t(1) * t(1) * Fraction(1, 2) + t(2)
    assert p.diff(1) == t(1)
    assert p.diff(2) == const(1)
    assert (t(1) * t(2)).diff(3) == TPoly.zero(K, D)


def test_euler_scales_by_weight():
    p = t(1) * t(2) + t(3)
    assert p.euler() == p * 3


def _random_poly(rng, cap=D):
    p = TPoly.zero(K, cap)
    for _ in range(rng.randint(1, 6)):
        key = [0] * K
        w = 0
        while w < cap and rng.random() < 0.7:
            k = rng.randint(1, K)
            if w + k > cap:
                break
            key[k - 1] += 1
            w += k
        p = p + TPoly(K, cap, {tuple(key): Fraction(rng.randint(-9, 9), rng.randint(1, 9))})
    return p


def test_ring_axioms_random():
    rng = random.Random(7)
    for cap in (2, 4, 6):
        for _ in range(30):
            a, b, c = (_random_poly(rng, cap) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a


def test_inv_is_two_sided_inverse_random():
    rng = random.Random(11)
    one = const(1)
    for _ in range(100):
        p = _random_poly(rng) + const(Fraction(rng.randint(1, 9)))
        if not p.constant_term():
            continue
        assert p * p.inv() == one
        assert p.inv() * p == one


def test_weight_function():
    assert weight((1, 2, 0, 0, 0, 0)) == 5
    assert weight((0,) * 6) == 0
