from fractions import Fraction

import pytest

from kplab.operators import DiffOp, ExpCoeff, c_is_zero, conjugate_shift, op_log1p, op_pow
from kplab.scalars import ParamEnv
from kplab.schur import CVector, cvector
from kplab.verify import (
    Assertions,
    CheckSpec,
    build_W0,
    check_case,
    check_factorization_initial,
    check_prop1,
    check_scaling_trend,
    closed_L0_alpha,
    closed_log_tail,
    exp_weight_term,
    framed_factor,
)

GEN_ENV = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2, a=Fraction(5, 2))


def spec(check_id="x", **kw):
    return CheckSpec(check_id=check_id, **kw)


def rand_c(seed=0):
    import random

    rng = random.Random(seed)
    return CVector([Fraction(rng.randint(-4, 4), rng.randint(1, 5)) for _ in range(8)])


def test_build_W0_trivial_and_k1():
    c = CVector([0] * 6)
    assert build_W0(c, GEN_ENV, 6).coeffs == {Fraction(0): Fraction(1)}
    c = cvector("a", GEN_ENV, 6)
    w0 = build_W0(c, GEN_ENV, 6)
    # Lambda^-1 coefficient: -Q e^{-beta} e^{beta s}
    assert w0.coeff(Fraction(-1)) == ExpCoeff.term(-1, c0=-1, p1=1, jq=1)


def test_build_W0_roundtrip():
    c = rand_c(3)
    w0 = build_W0(c, GEN_ENV, 6)
    arg = DiffOp.zero(floor=w0.floor)
    for k in range(1, 7):
        if c[k]:
            arg = arg + DiffOp({-k: exp_weight_term(-c[k], k, GEN_ENV)}, floor=w0.floor)
    diff = op_log1p(w0 - DiffOp.identity(w0.floor)) - arg
    for alpha, coeff in diff.coeffs.items():
        if alpha >= diff.assertable_from():
            assert c_is_zero(coeff)


def test_closed_L0_alpha_k1_coefficient():
    # k=1 term inside the exponential is c_1 Q (1 - e^{-beta}) e^{-beta} e^{beta s};
    # after normal-ordering past Lambda the L^0 coefficient picks up s -> s+1
    c = cvector("a", GEN_ENV, 6)
    l0 = closed_L0_alpha(c, GEN_ENV, 1, 6)
    got = l0.coeff(Fraction(0))
    inner = ExpCoeff.term(1, c0=-1, p1=1, jq=1) - ExpCoeff.term(1, c0=-2, p1=1, jq=1)
    assert got == inner.shift(1)


def test_closed_L0_alpha_degenerates():
    c = rand_c(1)
    # alpha = 0 gives the identity
    l0 = closed_L0_alpha(c, GEN_ENV, 0, 6)
    assert l0.coeffs == {Fraction(0): ExpCoeff.const(1)}
    # c = 0 gives the pure shift
    lam = closed_L0_alpha(CVector([0] * 6), GEN_ENV, 1, 6)
    assert lam.coeffs == {Fraction(1): ExpCoeff.const(1)}


def test_prop1_passes_generic():
    rep = check_prop1(spec("prop1"), GEN_ENV, rand_c(7))
    assert rep.verdict == "pass"
    assert rep.asserted_count > 50


def test_prop1_detects_wrong_closed_form():
    # a deliberately perturbed c-vector for the closed form must fail
    a = Assertions()
    c = rand_c(9)
    w0 = build_W0(c, GEN_ENV, 6)
    bad = list(c.values)
    bad[0] += 1
    a.equal_exp_ops(conjugate_shift(w0, 1), closed_L0_alpha(CVector(bad), GEN_ENV, 1, 6), "bad")
    assert a.residuals


def test_case_a_shape():
    env = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2)
    rep = check_case(spec("case-a"), env, "a")
    assert rep.verdict == "pass"


def test_case_b_shape():
    rep = check_case(spec("case-b"), GEN_ENV, "b")
    assert rep.verdict == "pass"


@pytest.mark.parametrize("f", [1, 2])
def test_case_c_shape(f):
    env = ParamEnv.framed(q=Fraction(1, 16), f=f)
    rep = check_case(spec("case-c"), env, "c")
    assert rep.verdict == "pass"


def test_case_c_two_term_explicitly():
    env = ParamEnv.framed(q=Fraction(1, 16), f=1)
    c = cvector("c", env, 6)
    got = conjugate_shift(build_W0(c, env, 6), Fraction(1, 2))
    nonzero = {a for a, v in got.coeffs.items() if not c_is_zero(v)}
    assert nonzero == {Fraction(1, 2), Fraction(-1, 2)}
    assert got.coeff(Fraction(-1, 2)) == -framed_factor(env)


def test_case_c_rational_tau_band():
    env = ParamEnv.framed(base=Fraction(1, 2), lattice_pow=6, f=Fraction(-1, 3))
    rep = check_case(spec("case-c-tau"), env, "c")
    assert rep.verdict == "pass"
    # and the band really is {3, 2, 1}
    c = cvector("c", env, 6)
    x = conjugate_shift(build_W0(c, env, 6), Fraction(3, 2))
    cube = op_pow(x, 2)
    nonzero = {a for a, v in cube.coeffs.items() if not c_is_zero(v) and a >= cube.assertable_from()}
    assert nonzero == {Fraction(3), Fraction(2), Fraction(1)}


@pytest.mark.parametrize("f", [0, 1])
def test_case_d_shape(f):
    env = ParamEnv.framed(q=Fraction(1, 16), f=f, a=2)
    rep = check_case(spec("case-d"), env, "d")
    assert rep.verdict == "pass"


def test_case_gbin_and_grr():
    env = ParamEnv.framed(q=Fraction(1, 16), f=1, b_exps=(0, 2), a_exps=(1, 3))
    assert check_case(spec("gbin"), env, "gbin").verdict == "pass"
    assert check_case(spec("grr"), env, "grr").verdict == "pass"
    envf = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2)
    envf = ParamEnv(base=envf.base, m_beta=envf.m_beta, Q_exp=envf.Q_exp,
                    b_exps=(Fraction(1), Fraction(0), Fraction(2)))
    assert check_case(spec("gbin-finite"), envf, "gbin_finite").verdict == "pass"


def test_factorization_case_a():
    env = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2)
    rep = check_factorization_initial(spec("init", probes=(-1, 0, 1)), env, "a")
    assert rep.verdict == "pass"


def test_factorization_case_d_framed():
    env = ParamEnv.framed(q=Fraction(1, 16), f=0, a=2)
    rep = check_factorization_initial(spec("init-d", probes=(0, 1)), env, "d")
    assert rep.verdict == "pass"


def test_scaling_trend():
    env = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2, kappa=1)
    rep = check_scaling_trend(spec("trend", trend=True), env)
    assert rep.verdict == "pass"
    env0 = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2, kappa=0)
    assert check_scaling_trend(spec("trend0", trend=True), env0).verdict == "pass"
