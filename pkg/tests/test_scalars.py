from fractions import Fraction

import pytest

from kplab.errors import ConfigError, LatticeError
from kplab.scalars import BetaScalar, ParamEnv, exact_root, exact_sqrt, parse_rat


def test_parse_rat():
    assert parse_rat("9/4") == Fraction(9, 4)
    assert parse_rat("-2") == Fraction(-2)
    with pytest.raises(ConfigError):
        parse_rat("0.5")
    with pytest.raises(ConfigError):
        parse_rat("1e3")
    with pytest.raises(ConfigError):
        parse_rat("x")


def test_exact_roots():
    assert exact_sqrt(Fraction(9, 64)) == Fraction(3, 8)
    assert exact_sqrt(Fraction(1, 3)) is None
    assert exact_root(Fraction(1, 64), 6) == Fraction(1, 2)
    assert exact_root(Fraction(1, 16), 4) == Fraction(1, 2)
    assert exact_root(Fraction(2), 2) is None


def test_beta_scalar_arithmetic():
    b = BetaScalar.beta()
    x = BetaScalar.from_rat(Fraction(3, 2))
    assert (b + b) == BetaScalar({1: 2})
    assert (b * x) == BetaScalar({1: Fraction(3, 2)})
    assert (x - Fraction(3, 2)) == BetaScalar()
    assert (b * 2).strip_beta() == 2
    with pytest.raises(Exception):
        (b * b * b)  # cap 2


def test_generic_env_powers():
    env = ParamEnv.generic(base=Fraction(3, 2), M=24, jQ=2)
    # e^{beta} = base^24
    assert env.e_beta == Fraction(3, 2) ** 24
    assert env.e_beta_pow(Fraction(1, 8)) == Fraction(3, 2) ** 3
    assert env.Q == Fraction(3, 2) ** 2
    assert env.Q_pow(Fraction(3, 2)) == Fraction(3, 2) ** 3
    with pytest.raises(LatticeError):
        env.e_beta_pow(Fraction(1, 48))


def test_independent_Q():
    env = ParamEnv.generic(base=Fraction(3, 2), M=24, Q=Fraction(9, 4))
    assert env.Q_pow(2) == Fraction(81, 16)
    assert env.Q_pow(Fraction(1, 2)) == Fraction(3, 2)
    env2 = ParamEnv.generic(base=Fraction(3, 2), M=24, Q=Fraction(1, 3))
    with pytest.raises(LatticeError):
        env2.Q_pow(Fraction(1, 2))


def test_framed_env():
    env = ParamEnv.framed(q=Fraction(1, 16), f=1)
    assert env.sigma == Fraction(1, 4)
    assert env.q == Fraction(1, 16)
    # e^beta = q^{f+1}
    assert env.e_beta == Fraction(1, 16) ** 2
    assert env.Q == Fraction(1, 4)
    assert env.e_beta_pow(Fraction(1, 4)) == Fraction(1, 4)
    env2 = ParamEnv.framed(sigma=Fraction(3, 8), f=0)
    assert env2.q == Fraction(9, 64)
    with pytest.raises(ConfigError):
        ParamEnv.framed(q=Fraction(1, 3), f=0)  # no rational sqrt
    with pytest.raises(ConfigError):
        ParamEnv.framed(q=Fraction(16), f=0)  # |q| < 1 required


def test_framed_env_rational_tau():
    env = ParamEnv.framed(base=Fraction(1, 2), lattice_pow=6, f=Fraction(-1, 3))
    assert env.q == Fraction(1, 64)
    assert env.m_beta == Fraction(4)
    assert env.alpha_frac == Fraction(3, 2)


def test_describe_is_stringly():
    env = ParamEnv.framed(q=Fraction(1, 16), f=1, a=2)
    d = env.describe()
    assert d["q"] == "1/16"
    assert d["f"] == "1"
    assert d["a"] == "2"
