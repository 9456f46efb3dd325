import math
from fractions import Fraction

import pytest

from kplab.errors import ConfigError
from kplab.partitions import Partition, enumerate_partitions, hooks
from kplab.scalars import ParamEnv
from kplab.schur import (
    CVector,
    cvector,
    one_row_polys,
    schur_at,
    schur_poly,
    schur_special_closed,
)
from kplab.tpoly import TPoly, weight

K, D = 6, 6


def t(k):
    return TPoly.var(K, D, k)


def exp_series_one_rows(nmax):
    """Independent oracle: z-coefficients of exp(sum t_k z^k) by direct expansion."""
    # represent a z-series as list of TPolys indexed by z-power
    g = [TPoly.zero(K, D) for _ in range(nmax + 1)]
    for k in range(1, min(K, nmax) + 1):
        g[k] = t(k)
    acc = [TPoly.zero(K, D) for _ in range(nmax + 1)]
    acc[0] = TPoly.const(K, D, 1)
    term = list(acc)
    for j in range(1, nmax + 1):
        nxt = [TPoly.zero(K, D) for _ in range(nmax + 1)]
        for i in range(nmax + 1):
            if not term[i]:
                continue
            for k in range(1, nmax - i + 1):
                if g[k]:
                    nxt[i + k] = nxt[i + k] + term[i] * g[k]
        term = [p * Fraction(1, j) for p in nxt]
        for i in range(nmax + 1):
            acc[i] = acc[i] + term[i]
    return acc


def test_one_row_generators_match_exp_expansion():
    oracle = exp_series_one_rows(6)
    gens = one_row_polys(6, K, D)
    for n in range(7):
        assert gens[n] == oracle[n]


def test_schur_examples():
    assert schur_poly(Partition((1,)), K, D) == t(1)
    assert schur_poly(Partition((2,)), K, D) == t(1) * t(1) * Fraction(1, 2) + t(2)
    assert schur_poly(Partition((1, 1)), K, D) == t(1) * t(1) * Fraction(1, 2) - t(2)


def test_schur_homogeneous():
    for lam in enumerate_partitions(6):
        p = schur_poly(lam, K, D)
        assert all(weight(k) == lam.size for k in p.coeffs)


def test_conjugation_duality():
    for lam in enumerate_partitions(6):
        p = schur_poly(lam, K, D)
        flipped = {}
        for key, v in p.coeffs.items():
            odd = sum(e for i, e in enumerate(key) if (i + 1) % 2 == 0)
            flipped[key] = -v if odd % 2 else v
        assert TPoly(K, D, flipped) == schur_poly(lam.conjugate(), K, D)


def test_schur_at_empty_is_one():
    c = CVector([1, 2, 3])
    assert schur_at(Partition(), c) == 1


def test_schur_at_hook_formula_oracle():
    # S_lambda(t_inf) = #SYT / |lam|! = 1 / prod hooks
    c = CVector([1, 0, 0], "a")
    lam = Partition((2, 1))
    syt = math.factorial(lam.size)
    for h in hooks(lam).values():
        syt //= h
    assert schur_at(lam, c) == Fraction(syt, math.factorial(lam.size)) == Fraction(1, 3)


def test_schur_at_case_b_single_box():
    env = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2, a=2)
    c = cvector("b", env, 3)
    assert schur_at(Partition((1,)), c) == 2


def test_schur_at_matches_poly_substitution():
    c = CVector([Fraction(1, 2), Fraction(-2, 3), Fraction(3), Fraction(1, 5), 0, 1])
    for lam in enumerate_partitions(5):
        direct = schur_at(lam, c)
        via_poly = schur_poly(lam, K, D).subs_values(c.values)
        assert direct == via_poly


def test_schur_at_insufficient_modes():
    with pytest.raises(ConfigError):
        schur_at(Partition((3,)), CVector([1]))


def test_cvector_families():
    envc = ParamEnv.framed(sigma=Fraction(1, 2), f=1)
    assert cvector("a", envc, 3).values == (1, 0, 0)
    # (d) with a = 1 collapses to the harmonic vector t(1)
    envd = ParamEnv.framed(sigma=Fraction(1, 2), f=1, a=1)
    assert cvector("d", envd, 4).values == (1, Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))
    # (c) at q = 1/4: c_2 = 1/(2 (1 - 1/16)) = 8/15
    envq = ParamEnv.framed(sigma=Fraction(1, 2), f=0)
    assert cvector("c", envq, 2)[2] == Fraction(8, 15)


def test_closed_special_values():
    env = ParamEnv.framed(sigma=Fraction(1, 2), f=0)
    assert schur_special_closed(Partition(), "a", env) == 1
    assert schur_special_closed(Partition((2, 1)), "a", env) == Fraction(1, 3)
    # single box, case (c): 1/(1-q)
    q = env.q
    assert schur_special_closed(Partition((1,)), "c", env) == 1 / (1 - q)
    assert schur_special_closed(Partition((1,)), "c", env) == cvector("c", env, 1)[1]


def test_schur_cross_validation_case_a():
    c = cvector("a", ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2), 8)
    env = ParamEnv.framed(sigma=Fraction(1, 2), f=0)
    for lam in enumerate_partitions(8):
        assert schur_at(lam, c) == schur_special_closed(lam, "a", env)


@pytest.mark.parametrize("sigma", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 8)])
def test_schur_cross_validation_case_c(sigma):
    env = ParamEnv.framed(sigma=sigma, f=0)
    c = cvector("c", env, 6)
    for lam in enumerate_partitions(6):
        assert schur_at(lam, c) == schur_special_closed(lam, "c", env)
