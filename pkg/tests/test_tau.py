from fractions import Fraction

import pytest

from kplab.errors import LatticeError
from kplab.operators import c_is_zero
from kplab.partitions import Partition, enumerate_partitions, is_hook
from kplab.scalars import ParamEnv
from kplab.schur import CVector, cvector
from kplab.tau import (
    WaveData,
    contents_product,
    contents_product_literal,
    h_empty_closed,
    h_empty_product,
    h_entry,
    h_weight,
    h_weight_product,
    miwa_zseries,
    tau,
    tau_normalized,
)
from kplab.tpoly import TPoly

ENV = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2)
K = D = 6


def test_h_weight_empty_examples():
    assert h_weight(Partition(), 0, ENV) == 1
    # h_empty(2) = e^{5 beta/4} Q^2 = h_1 h_2
    expected = ENV.e_beta_pow(Fraction(5, 4)) * ENV.Q_pow(2)
    assert h_weight(Partition(), 2, ENV) == expected
    assert h_entry(1, ENV) * h_entry(2, ENV) == expected


def test_h_weight_single_box_at_zero():
    assert h_weight(Partition((1,)), 0, ENV) == ENV.Q_pow(1)


def test_h_weight_two_routes_agree():
    for jQ in (2, -4):
        for base in (Fraction(3, 2), Fraction(2, 5)):
            env = ParamEnv.generic(base=base, M=24, jQ=jQ)
            for lam in enumerate_partitions(6):
                for s in range(-3, 4):
                    assert h_weight(lam, s, env) == h_weight_product(lam, s, env)


def test_contents_product_routes_agree():
    for lam in enumerate_partitions(5):
        for s in (-2, 0, Fraction(1, 2), 3):
            assert contents_product(lam, s, ENV) == contents_product_literal(lam, s, ENV)


def test_h_weight_shift_covariance():
    # h(lam, s+1) / h(lam, s) is h_{s+1} times a pure contents ratio
    from kplab.tau import contents_ratio

    for lam in enumerate_partitions(4):
        for s in range(-2, 3):
            ratio = h_weight(lam, s + 1, ENV) / h_weight(lam, s, ENV)
            expected = h_entry(s + 1, ENV)
            for i, j in lam.boxes():
                expected *= contents_ratio(Fraction(j - i + s + 2), ENV) / contents_ratio(
                    Fraction(j - i + s + 1), ENV
                )
            assert ratio == expected


def test_independent_Q_without_sqrt_aborts_on_odd_s():
    env = ParamEnv.generic(base=Fraction(3, 2), M=24, Q=Fraction(1, 3))
    # Q^{s^2/2} at s = 1 needs sqrt(Q)
    with pytest.raises(LatticeError):
        h_weight(Partition(), 1, env)


def test_tau_t0_slice_is_h_empty():
    c = CVector([1, 0, 0, 0, 0, 0], "a")
    for s in (-1, 0, 2):
        t = tau(s, c, D, ENV, K)
        assert t.value.constant_term() == h_empty_closed(s, ENV)


def test_tau_degree_one_case_a():
    c = cvector("a", ENV, D)
    t = tau(0, c, 1, ENV, 1)
    # 1 + Q t_1
    assert t.value == TPoly(1, 1, {(0,): 1, (1,): ENV.Q_pow(1)})


def test_tau_degree_two_coefficient_brute_force():
    # coefficient of t_2 at s=0 in case (a): sum over |lam| = 2 of
    # h_lam(0) S_lam(c) [t_2] S_lam(t); S_(2) and S_(11) carry [t_2] = +-1
    c = cvector("a", ENV, D)
    t = tau(0, c, 2, ENV, 2)
    from kplab.schur import schur_at

    lam2, lam11 = Partition((2,)), Partition((1, 1))
    expected = h_weight(lam2, 0, ENV) * schur_at(lam2, c) - h_weight(lam11, 0, ENV) * schur_at(
        lam11, c
    )
    key = (0, 1)
    assert t.value.coeffs.get(key, Fraction(0)) == expected
    assert schur_at(lam2, c) == Fraction(1, 2)
    assert schur_at(lam11, c) == Fraction(1, 2)


def test_tau_grading_exactness():
    env = ENV
    c = cvector("b", ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2, a=Fraction(1, 2)), D + 2)
    lo = tau_normalized(1, c, 4, env, 4)
    hi = tau_normalized(1, c, 6, env, 4)
    assert hi.truncate(4) == lo


def test_miwa_t0_supported_on_hooks_only():
    # Miwa-evaluation oracle: sum S_n(-[z^{-1}]) z'^n = 1 - z'/z, so the
    # Jacobi-Trudi determinant at t = 0 survives exactly on the column hooks
    # (1^n) with value (-1)^n z^{-n}; every non-hook (and every other hook)
    # evaluates to zero
    for lam in enumerate_partitions(4):
        z = miwa_zseries(lam, K, D, -6)
        t0 = {zexp: poly.constant_term() for zexp, poly in z.items() if poly.constant_term()}
        flag, _arm, _leg = is_hook(lam)
        if not lam.parts:
            assert t0 == {0: 1}
        elif lam.parts == (1,) * len(lam):
            assert flag
            assert t0 == {-lam.size: Fraction((-1) ** lam.size)}
        else:
            assert t0 == {}
            if not flag:
                assert t0 == {}


def test_wave_trivial_weights():
    c = CVector([0] * D, "custom")
    wave = WaveData(c, ENV, -4, 4, 1, D, 6)
    for n in range(1, 7):
        assert not wave._point(0)[n]


def test_wave_w0_and_w1():
    c = cvector("a", ENV, D)
    wave = WaveData(c, ENV, -4, 4, 1, D, 6)
    pt = wave._point(2)
    assert pt[0] == TPoly.const(K, D, 1)
    # w_1(s, 0) = -c_1 Q e^{beta(s-1)}
    w1_t0 = pt[1].constant_term()
    assert w1_t0 == -ENV.Q_pow(1) * ENV.e_beta_pow(1)


def test_dressing_leading_symbol():
    c = cvector("a", ENV, D)
    wave = WaveData(c, ENV, -4, 4, 1, D, 6)
    w = wave.dressing()
    assert w.coeff(Fraction(0)) == Fraction(1)
    lam1 = w.coeff(Fraction(-1))
    # Lambda^{-1} coefficient at t=0 is -Q e^{beta(s-1)}
    assert lam1.sample(1).constant_term() == -ENV.Q_pow(1) * ENV.e_beta_pow(0)
    assert lam1.deg_valid == D - 1


def test_dressing_dds_matches_closed_form_at_t0():
    # d w_1 / d s at t = 0 must equal beta * 1 * w_1 (scaling identity):
    # stripped of beta, (E_t + 1) w_1 at t = 0 is just w_1(t=0)
    c = cvector("a", ENV, D)
    wave = WaveData(c, ENV, -4, 4, 1, D, 6)
    dw = wave.dressing_dds_over_beta()
    w1_t0 = wave._point(1)[1].constant_term()
    assert dw.coeff(Fraction(-1)).sample(1).constant_term() == w1_t0
