"""Truncated polynomial ring in the time variables t_1..t_K.

Monomials are graded by weighted degree (t_k has weight k) and everything
above the cap D is cut.  Coefficients are exact rationals.  A series with
nonzero constant term is invertible in the truncated ring.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError, NotInvertibleError


def weight(key: tuple) -> int:
    return sum((i + 1) * e for i, e in enumerate(key))


class TPoly:
    """Truncated multivariate polynomial with Fraction coefficients."""

    __slots__ = ("nvars", "cap", "coeffs")

    def __init__(self, nvars: int, cap: int, coeffs=None):
        self.nvars = nvars
        self.cap = cap
        self.coeffs = {}
        if coeffs:
            for k, v in coeffs.items():
                v = Fraction(v)
                if v and weight(k) <= cap:
                    self.coeffs[k] = v

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars, cap):
        return cls(nvars, cap)

    @classmethod
    def const(cls, nvars, cap, value):
        value = Fraction(value)
        p = cls(nvars, cap)
        if value:
            p.coeffs[(0,) * nvars] = value
        return p

    @classmethod
    def var(cls, nvars, cap, k):
        """The variable t_k (1-indexed, weight k)."""
        if not 1 <= k <= nvars:
            raise ConfigError(f"t_{k} out of range for {nvars} variables")
        key = tuple(1 if i == k - 1 else 0 for i in range(nvars))
        return cls(nvars, cap, {key: Fraction(1)})

    # -- basics --------------------------------------------------------------

    def _check(self, other: "TPoly"):
        if self.nvars != other.nvars or self.cap != other.cap:
            raise ConfigError(
                f"mismatched ring caps: ({self.nvars},{self.cap}) vs ({other.nvars},{other.cap})"
            )

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TPoly.const(self.nvars, self.cap, other)
        if not isinstance(other, TPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.coeffs.items()))))

    def constant_term(self) -> Fraction:
        return self.coeffs.get((0,) * self.nvars, Fraction(0))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TPoly.const(self.nvars, self.cap, other)
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            w = out.get(k, Fraction(0)) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        res = TPoly(self.nvars, self.cap)
        res.coeffs = out
        return res

    __radd__ = __add__

    def __neg__(self):
        res = TPoly(self.nvars, self.cap)
        res.coeffs = {k: -v for k, v in self.coeffs.items()}
        return res

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TPoly.const(self.nvars, self.cap, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            res = TPoly(self.nvars, self.cap)
            if other:
                res.coeffs = {k: v * other for k, v in self.coeffs.items()}
            return res
        self._check(other)
        cap = self.cap
        out: dict = {}
        for k1, v1 in self.coeffs.items():
            w1 = weight(k1)
            for k2, v2 in other.coeffs.items():
                if w1 + weight(k2) > cap:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                w = out.get(k, Fraction(0)) + v1 * v2
                if w:
                    out[k] = w
                else:
                    out.pop(k, None)
        res = TPoly(self.nvars, self.cap)
        res.coeffs = out
        return res

    __rmul__ = __mul__

    # -- ring operations -----------------------------------------------------

    def inv(self) -> "TPoly":
        """Inverse in the truncated ring; needs a nonzero constant term."""
        c0 = self.constant_term()
        if not c0:
            raise NotInvertibleError("zero constant term is not invertible")
        # x = c0 (1 - r) with r of weight >= 1; x^-1 = (1/c0) sum r^j
        r = TPoly.const(self.nvars, self.cap, 1) - self * (1 / c0)
        acc = TPoly.const(self.nvars, self.cap, 1)
        term = TPoly.const(self.nvars, self.cap, 1)
        for _ in range(self.cap):
            term = term * r
            if not term:
                break
            acc = acc + term
        return acc * (1 / c0)

    def diff(self, k: int) -> "TPoly":
        """Formal partial derivative with respect to t_k (1-indexed)."""
        if not 1 <= k <= self.nvars:
            raise ConfigError(f"t_{k} out of range for {self.nvars} variables")
        i = k - 1
        out = {}
        for key, v in self.coeffs.items():
            e = key[i]
            if e:
                nk = key[:i] + (e - 1,) + key[i + 1 :]
                out[nk] = v * e
        return TPoly(self.nvars, self.cap, out)

    def euler(self) -> "TPoly":
        """Weighted Euler operator sum_k k t_k d/dt_k (scales monomials by weight)."""
        out = {}
        for key, v in self.coeffs.items():
            w = weight(key)
            if w:
                out[key] = v * w
        return TPoly(self.nvars, self.cap, out)

    def truncate(self, d: int) -> "TPoly":
        """Drop every monomial of weight > d."""
        out = {k: v for k, v in self.coeffs.items() if weight(k) <= d}
        res = TPoly(self.nvars, self.cap)
        res.coeffs = out
        return res

    def subs_values(self, values) -> Fraction:
        """Evaluate at t_k = values[k-1] (exact)."""
        if len(values) < self.nvars:
            raise ConfigError("not enough substitution values")
        total = Fraction(0)
        for key, v in self.coeffs.items():
            term = v
            for i, e in enumerate(key):
                if e:
                    term *= Fraction(values[i]) ** e
            total += term
        return total

    def max_weight(self) -> int:
        return max((weight(k) for k in self.coeffs), default=0)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for key in sorted(self.coeffs, key=lambda k: (weight(k), k)):
            v = self.coeffs[key]
            mono = "*".join(
                f"t{i+1}" if e == 1 else f"t{i+1}^{e}" for i, e in enumerate(key) if e
            )
            parts.append(f"{v}" if not mono else f"{v}*{mono}")
        return " + ".join(parts)
