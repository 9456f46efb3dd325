"""Exact scalar tower: rationals, formal beta, and the exponent lattice.

Every number in the laboratory is an exact ``fractions.Fraction``.  All
parameter exponentials (e^{beta r}, Q^r, q^r) are evaluated as integer powers
of a single configured rational base E; the runtime asserts that every
exponent lands on that lattice and aborts otherwise, so no rounding can ever
creep in.  The symbol beta itself (as opposed to e^beta) is kept formal via
:class:`BetaScalar`: e^beta and formal beta are treated as algebraically
independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ConfigError, LatticeError

#: formal beta degrees above this cap are rejected
DEFAULT_BETA_CAP = 2


def parse_rat(text: str) -> Fraction:
    """Parse an exact rational string like ``-3/4`` or ``2``.

    Decimal notation is rejected on purpose: no float may enter an
    exact-mode computation.
    """
    s = str(text).strip()
    if "." in s or "e" in s.lower():
        raise ConfigError(f"not an exact rational (decimals rejected): {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse rational {text!r}: {exc}") from exc


def exact_root(x: Fraction, n: int) -> Optional[Fraction]:
    """Exact rational n-th root of x, or None if it does not exist."""
    if n <= 0:
        raise ValueError("root order must be positive")
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    num, den = x.numerator, x.denominator
    rn = round(num ** (1.0 / n))
    rd = round(den ** (1.0 / n))
    for cand_n in (rn - 1, rn, rn + 1):
        if cand_n >= 0 and cand_n**n == num:
            for cand_d in (rd - 1, rd, rd + 1):
                if cand_d > 0 and cand_d**n == den:
                    return Fraction(cand_n, cand_d)
    # fall back to exact integer root search for large values
    def iroot(v: int) -> Optional[int]:
        if v < 2:
            return v
        lo, hi = 1, 1 << (v.bit_length() // n + 2)
        while lo <= hi:
            mid = (lo + hi) // 2
            p = mid**n
            if p == v:
                return mid
            if p < v:
                lo = mid + 1
            else:
                hi = mid - 1
        return None

    a, b = iroot(num), iroot(den)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def exact_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    a = math.isqrt(x.numerator)
    b = math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


class BetaScalar:
    """Polynomial in the formal symbol beta with rational coefficients.

    Stored as a map from beta-degree to Fraction; zero entries are dropped.
    The degree is bounded by a small cap (default 2), which is plenty for
    every identity checked here and catches runaway derivations early.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for d, v in coeffs.items():
                v = Fraction(v)
                if v:
                    if d > DEFAULT_BETA_CAP:
                        from .errors import BetaDegreeError

                        raise BetaDegreeError(f"beta degree {d} exceeds cap {DEFAULT_BETA_CAP}")
                    self.coeffs[d] = v

    @classmethod
    def from_rat(cls, v) -> "BetaScalar":
        return cls({0: Fraction(v)})

    @classmethod
    def beta(cls, v=1) -> "BetaScalar":
        return cls({1: Fraction(v)})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, BetaScalar):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == BetaScalar.from_rat(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BetaScalar.from_rat(other)
        if not isinstance(other, BetaScalar):
            return NotImplemented
        out = dict(self.coeffs)
        for d, v in other.coeffs.items():
            w = out.get(d, Fraction(0)) + v
            if w:
                out[d] = w
            else:
                out.pop(d, None)
        res = BetaScalar()
        res.coeffs = out
        return res

    __radd__ = __add__

    def __neg__(self):
        res = BetaScalar()
        res.coeffs = {d: -v for d, v in self.coeffs.items()}
        return res

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BetaScalar.from_rat(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            res = BetaScalar()
            if other:
                res.coeffs = {d: v * other for d, v in self.coeffs.items()}
            return res
        if not isinstance(other, BetaScalar):
            return NotImplemented
        out: dict = {}
        for d1, v1 in self.coeffs.items():
            for d2, v2 in other.coeffs.items():
                d = d1 + d2
                if d > DEFAULT_BETA_CAP:
                    from .errors import BetaDegreeError

                    raise BetaDegreeError(f"beta degree {d} exceeds cap {DEFAULT_BETA_CAP}")
                w = out.get(d, Fraction(0)) + v1 * v2
                if w:
                    out[d] = w
                else:
                    out.pop(d, None)
        res = BetaScalar()
        res.coeffs = out
        return res

    __rmul__ = __mul__

    def coeff(self, d: int) -> Fraction:
        return self.coeffs.get(d, Fraction(0))

    def strip_beta(self) -> Fraction:
        """For a pure beta^1 multiple, return the rational factor."""
        if not self.coeffs:
            return Fraction(0)
        if set(self.coeffs) != {1}:
            raise ValueError(f"not a pure beta multiple: {self}")
        return self.coeffs[1]

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(
            f"{v}" if d == 0 else (f"{v}*beta" if d == 1 else f"{v}*beta^{d}")
            for d, v in sorted(self.coeffs.items())
        )


@dataclass(frozen=True)
class ParamEnv:
    """Parameter point plus the exponent-lattice bookkeeping.

    All exponentials are integer powers of the single base ``E``:

    * ``e^{beta x}`` evaluates to ``E^(m_beta * x)``,
    * ``q^y`` (framed mode) evaluates to ``E^(q_exp * y)``,
    * ``Q^y`` evaluates to ``E^(Q_exp * y)`` when tied to the lattice, or to
      an exact power of an independent rational Q.

    Exponents that do not land on Z in E-units abort with a
    :class:`LatticeError` naming the offender; nothing is silently rounded.
    """

    base: Optional[Fraction] = None
    m_beta: Fraction = Fraction(24)
    q_exp: Optional[Fraction] = None
    Q_exp: Optional[Fraction] = None
    Q_value: Optional[Fraction] = None
    f: Fraction = Fraction(0)
    a: Optional[Fraction] = None
    kappa: Optional[Fraction] = None
    b_exps: tuple = ()
    a_exps: tuple = ()

    # -- constructors ------------------------------------------------------

    @classmethod
    def generic(cls, base, M=24, jQ=None, Q=None, a=None, kappa=None) -> "ParamEnv":
        """Generic mode: E = e^{beta/M}; Q pinned to E^jQ or independent."""
        base = Fraction(base)
        if base <= 0 or base == 1:
            raise ConfigError("lattice base must be a positive rational != 1")
        if jQ is not None and Q is not None:
            raise ConfigError("give either a Q lattice exponent or an independent Q, not both")
        if jQ is None and Q is None:
            raise ConfigError("Q is required (lattice exponent jQ or independent value)")
        return cls(
            base=base,
            m_beta=Fraction(M),
            Q_exp=Fraction(jQ) if jQ is not None else None,
            Q_value=Fraction(Q) if Q is not None else None,
            a=Fraction(a) if a is not None else None,
            kappa=Fraction(kappa) if kappa is not None else None,
        )

    @classmethod
    def framed(cls, q=None, sigma=None, base=None, lattice_pow=None, f=0,
               a=None, b_exps=(), a_exps=()) -> "ParamEnv":
        """Framed mode: e^beta = q^(f+1), Q = q^(1/2) = sigma.

        The lattice base is E = q^(1/P) with P = ``lattice_pow`` (default 2,
        i.e. E = sigma).  q may be given directly (must then be an exact P-th
        power), or via sigma, or via the base itself.
        """
        f = Fraction(f)
        if f + 1 <= 0:
            raise ConfigError("framing must satisfy f > -1 (tau > -1)")
        if base is not None:
            base = Fraction(base)
            P = Fraction(lattice_pow if lattice_pow is not None else 2)
        elif sigma is not None:
            if lattice_pow not in (None, 2):
                raise ConfigError("sigma fixes lattice_pow = 2; give base explicitly instead")
            base = Fraction(sigma)
            P = Fraction(2)
        elif q is not None:
            q = Fraction(q)
            P = Fraction(lattice_pow if lattice_pow is not None else 2)
            base = exact_root(q, int(P))
            if base is None:
                raise ConfigError(
                    f"q = {q} is not an exact rational {P}-th power; "
                    f"give sigma (sqrt q) or the lattice base directly"
                )
        else:
            raise ConfigError("framed mode needs one of q, sigma, or base")
        if base <= 0 or base == 1:
            raise ConfigError("lattice base must be a positive rational != 1")
        qval = base ** int(P) if P == int(P) else None
        if qval is None:
            raise ConfigError("lattice_pow must be a positive integer")
        if not (0 < qval < 1):
            raise ConfigError(f"|q| < 1 required; got q = {qval}")
        return cls(
            base=base,
            m_beta=P * (f + 1),
            q_exp=P,
            Q_exp=P / 2,
            f=f,
            a=Fraction(a) if a is not None else None,
            b_exps=tuple(Fraction(b) for b in b_exps),
            a_exps=tuple(Fraction(x) for x in a_exps),
        )

    # -- derived values ----------------------------------------------------

    @property
    def framed_mode(self) -> bool:
        return self.q_exp is not None

    @property
    def q(self) -> Fraction:
        if not self.framed_mode:
            raise ConfigError("q is only defined in framed mode")
        return self._E_pow(self.q_exp)

    @property
    def sigma(self) -> Fraction:
        if not self.framed_mode:
            raise ConfigError("sigma is only defined in framed mode")
        return self.q_pow(Fraction(1, 2))

    @property
    def Q(self) -> Fraction:
        if self.Q_value is not None:
            return self.Q_value
        if self.Q_exp is not None:
            return self._E_pow(self.Q_exp)
        raise ConfigError("Q is not configured")

    @property
    def e_beta(self) -> Fraction:
        return self._E_pow(self.m_beta)

    @property
    def alpha_frac(self) -> Fraction:
        """The fractional-shift order 1/(f+1)."""
        return 1 / (self.f + 1)

    # -- lattice-checked powers --------------------------------------------

    def _E_pow(self, exponent: Fraction) -> Fraction:
        if self.base is None:
            raise ConfigError("no exponential base configured in this parameter set")
        exponent = Fraction(exponent)
        if exponent.denominator != 1:
            raise LatticeError(
                f"exponent {exponent} (in lattice units of base {self.base}) is not an integer"
            )
        return self.base ** exponent.numerator

    def e_beta_pow(self, x) -> Fraction:
        """Evaluate e^{beta * x} exactly; x must land on the lattice."""
        x = Fraction(x)
        units = x * self.m_beta
        if units.denominator != 1:
            raise LatticeError(
                f"beta-exponent {x} needs lattice units {units}; "
                f"not an integer multiple of 1/{self.m_beta}"
            )
        return self._E_pow(units)

    def q_pow(self, y) -> Fraction:
        """Evaluate q^y exactly (framed mode)."""
        if not self.framed_mode:
            raise ConfigError("q powers are only defined in framed mode")
        y = Fraction(y)
        units = y * self.q_exp
        if units.denominator != 1:
            raise LatticeError(f"q-exponent {y} is off the lattice (units {units})")
        return self._E_pow(units)

    def Q_pow(self, y) -> Fraction:
        """Evaluate Q^y exactly."""
        y = Fraction(y)
        if self.Q_exp is not None:
            units = y * self.Q_exp
            if units.denominator != 1:
                raise LatticeError(f"Q-exponent {y} is off the lattice (units {units})")
            return self._E_pow(units)
        Q = self.Q_value
        if Q is None:
            raise ConfigError("Q is not configured")
        if y.denominator == 1:
            return Q**y.numerator
        if y.denominator == 2:
            r = exact_sqrt(Q)
            if r is None:
                raise LatticeError(
                    f"Q-exponent {y} needs a square root of Q = {Q}, which is not rational"
                )
            return r**y.numerator
        raise LatticeError(f"Q-exponent {y} unsupported for independent Q = {Q}")

    # -- float side (trend checks only) -------------------------------------

    def beta_float(self) -> float:
        if self.base is None:
            raise ConfigError("no exponential base configured")
        return float(self.m_beta) * math.log(float(self.base))

    def e_beta_pow_float(self, x: float) -> float:
        return math.exp(self.beta_float() * x)

    # -- reporting ----------------------------------------------------------

    def describe(self) -> dict:
        out = {}
        if self.base is not None:
            out["base"] = str(self.base)
        out["m_beta"] = str(self.m_beta)
        if self.framed_mode:
            out["q"] = str(self.q)
            out["f"] = str(self.f)
        if self.Q_value is not None:
            out["Q"] = str(self.Q_value)
        elif self.Q_exp is not None:
            out["Q_exp"] = str(self.Q_exp)
        if self.a is not None:
            out["a"] = str(self.a)
        if self.kappa is not None:
            out["kappa"] = str(self.kappa)
        if self.b_exps:
            out["b_exps"] = ",".join(str(b) for b in self.b_exps)
        if self.a_exps:
            out["a_exps"] = ",".join(str(x) for x in self.a_exps)
        return out
