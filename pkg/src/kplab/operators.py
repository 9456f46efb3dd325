"""Truncated difference-operator ring: Laurent series in the shift operator.

An operator is a finite map from shift exponents alpha (rationals on a 1/m
grid) to coefficient functions of the lattice variable s, normal-ordered with
the coefficient to the left of the shift power.  The multiplication law is

    a(s) L^alpha * b(s) L^gamma = a(s) b(s+alpha) L^{alpha+gamma}.

Coefficients come in two backends plus plain rationals:

* :class:`ExpCoeff` - exact symbolic functions, finite sums of
  coeff * beta^d * e^{beta (c0 + p1 s + p2 s^2)} * Q^jq.  In framed parameter
  sets (e^beta tied to q) constant exponential factors fold into the rational
  coefficient; otherwise everything stays symbolic, so identity checks are
  exact in e^beta and Q jointly.
* :class:`GridCoeff` - lazily evaluated, cached samples of truncated time
  series on a window of grid points; access outside the window raises, never
  returns a silent zero.

Truncation below the floor is recorded (``truncated`` flag plus a
``valid_from`` watermark), not ignored: comparisons assert only coefficients
whose exactness survives the consumed margin.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .errors import (
    BackendError,
    BetaDegreeError,
    ConfigError,
    LatticeError,
    NotInvertibleError,
    WindowError,
)
from .scalars import DEFAULT_BETA_CAP, BetaScalar, ParamEnv
from .tpoly import TPoly

# ---------------------------------------------------------------------------
# symbolic exponential coefficients
# ---------------------------------------------------------------------------


class ExpCoeff:
    """Finite sum of coeff * beta^d * e^{beta(c0 + p1 s + p2 s^2)} * Q^jq.

    Keys are (d, c0, p1, p2, jq); zero terms are dropped, so equal functions
    built through the same parameter set have identical term maps.
    """

    __slots__ = ("terms", "env")

    def __init__(self, terms=None, env: ParamEnv | None = None):
        self.env = env
        self.terms = {}
        if terms:
            for key, v in terms.items():
                v = Fraction(v)
                if not v:
                    continue
                key, v = self._fold(key, v)
                w = self.terms.get(key, Fraction(0)) + v
                if w:
                    self.terms[key] = w
                else:
                    self.terms.pop(key, None)

    def _fold(self, key, v):
        d, c0, p1, p2, jq = key
        if d > DEFAULT_BETA_CAP:
            raise BetaDegreeError(f"beta degree {d} exceeds cap {DEFAULT_BETA_CAP}")
        if self.env is not None and self.env.framed_mode:
            if c0:
                v *= self.env.e_beta_pow(c0)
                c0 = Fraction(0)
            if jq:
                v *= self.env.Q_pow(jq)
                jq = Fraction(0)
        return (d, Fraction(c0), Fraction(p1), Fraction(p2), Fraction(jq)), v

    # -- constructors --------------------------------------------------------

    @classmethod
    def const(cls, v, env=None):
        return cls({(0, Fraction(0), Fraction(0), Fraction(0), Fraction(0)): Fraction(v)}, env)

    @classmethod
    def term(cls, coeff, c0=0, p1=0, p2=0, jq=0, d=0, env=None):
        key = (d, Fraction(c0), Fraction(p1), Fraction(p2), Fraction(jq))
        return cls({key: Fraction(coeff)}, env)

    # -- ring structure -------------------------------------------------------

    def _compat(self, other: "ExpCoeff"):
        if self.env is not None and other.env is not None and self.env != other.env:
            raise ConfigError("cannot combine symbolic coefficients from different parameter sets")
        return self.env if self.env is not None else other.env

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExpCoeff.const(other, self.env)
        if not isinstance(other, ExpCoeff):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExpCoeff.const(other, self.env)
        env = self._compat(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            w = out.get(k, Fraction(0)) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        res = ExpCoeff(env=env)
        res.terms = out
        return res

    __radd__ = __add__

    def __neg__(self):
        res = ExpCoeff(env=self.env)
        res.terms = {k: -v for k, v in self.terms.items()}
        return res

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExpCoeff.const(other, self.env)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            res = ExpCoeff(env=self.env)
            if other:
                res.terms = {k: v * other for k, v in self.terms.items()}
            return res
        if not isinstance(other, ExpCoeff):
            return NotImplemented
        env = self._compat(other)
        res = ExpCoeff(env=env)
        for (d1, c1, a1, b1, j1), v1 in self.terms.items():
            for (d2, c2, a2, b2, j2), v2 in other.terms.items():
                key = (d1 + d2, c1 + c2, a1 + a2, b1 + b2, j1 + j2)
                key, v = res._fold(key, v1 * v2)
                w = res.terms.get(key, Fraction(0)) + v
                if w:
                    res.terms[key] = w
                else:
                    res.terms.pop(key, None)
        return res

    __rmul__ = __mul__

    # -- function structure ----------------------------------------------------

    def shift(self, alpha) -> "ExpCoeff":
        """Substitute s -> s + alpha."""
        alpha = Fraction(alpha)
        if not alpha:
            return self
        res = ExpCoeff(env=self.env)
        for (d, c0, p1, p2, jq), v in self.terms.items():
            key = (d, c0 + p1 * alpha + p2 * alpha * alpha, p1 + 2 * p2 * alpha, p2, jq)
            key, w = res._fold(key, v)
            acc = res.terms.get(key, Fraction(0)) + w
            if acc:
                res.terms[key] = acc
            else:
                res.terms.pop(key, None)
        return res

    def dds(self) -> "ExpCoeff":
        """d/ds; defined only when every exponent polynomial has degree <= 1.

        Each term gains one beta degree and a factor p1.
        """
        res = ExpCoeff(env=self.env)
        for (d, c0, p1, p2, jq), v in self.terms.items():
            if p2:
                raise BackendError("s-derivative undefined for degree-2 exponents")
            if not p1:
                continue
            key = (d + 1, c0, p1, p2, jq)
            key, w = res._fold(key, v * p1)
            acc = res.terms.get(key, Fraction(0)) + w
            if acc:
                res.terms[key] = acc
        return res

    def inv(self) -> "ExpCoeff":
        """Inverse of a single pure-exponential term (no formal beta)."""
        if len(self.terms) != 1:
            raise NotInvertibleError("only single-term exponential coefficients invert")
        ((d, c0, p1, p2, jq), v), = self.terms.items()
        if d:
            raise NotInvertibleError("formal beta factors are not invertible")
        return ExpCoeff({(0, -c0, -p1, -p2, -jq): 1 / v}, self.env)

    # -- evaluation --------------------------------------------------------------

    def eval(self, s, env: ParamEnv | None = None) -> BetaScalar:
        """Exact evaluation at grid point s (lattice-asserted)."""
        env = env or self.env
        if env is None:
            raise ConfigError("evaluation needs a parameter set")
        s = Fraction(s)
        out = BetaScalar()
        for (d, c0, p1, p2, jq), v in self.terms.items():
            val = v * env.e_beta_pow(c0 + p1 * s + p2 * s * s)
            if jq:
                val *= env.Q_pow(jq)
            out = out + BetaScalar({d: val})
        return out

    def eval_rat(self, s, env: ParamEnv | None = None) -> Fraction:
        b = self.eval(s, env)
        if set(b.coeffs) - {0}:
            raise BackendError("coefficient carries formal beta; no rational value")
        return b.coeff(0)

    def eval_float(self, s, env: ParamEnv | None = None) -> dict:
        """Float evaluation per beta degree (trend checks only)."""
        env = env or self.env
        if env is None:
            raise ConfigError("evaluation needs a parameter set")
        out: dict = {}
        for (d, c0, p1, p2, jq), v in self.terms.items():
            val = float(v) * env.e_beta_pow_float(float(c0 + p1 * s + p2 * s * s))
            if jq:
                val *= float(env.Q) ** float(jq)
            out[d] = out.get(d, 0.0) + val
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (d, c0, p1, p2, jq), v in sorted(self.terms.items()):
            s = f"{v}"
            if d:
                s += f"*beta^{d}" if d > 1 else "*beta"
            expo = []
            if c0:
                expo.append(f"{c0}")
            if p1:
                expo.append(f"{p1}*s")
            if p2:
                expo.append(f"{p2}*s^2")
            if expo:
                s += f"*E[{'+'.join(expo)}]"
            if jq:
                s += f"*Q^{jq}"
            bits.append(s)
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# grid-sampled coefficients
# ---------------------------------------------------------------------------


class GridCoeff:
    """Lazily sampled coefficient: grid point s -> truncated time series.

    Carries an explicit validity window [lo, hi] with step 1/m; any access
    outside the window raises :class:`WindowError`.  ``deg_valid`` is the
    weighted t-degree through which samples are exact (None = all degrees).
    """

    __slots__ = ("nvars", "cap", "lo", "hi", "step", "deg_valid", "_fn", "_cache")

    def __init__(self, nvars, cap, lo, hi, step, fn, deg_valid=None):
        self.nvars = nvars
        self.cap = cap
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        self.step = Fraction(step)
        if self.step <= 0:
            raise ConfigError("grid step must be positive")
        if self.lo > self.hi:
            raise WindowError(f"empty validity window [{lo}, {hi}]")
        self._fn = fn
        self._cache = {}
        self.deg_valid = deg_valid

    @classmethod
    def const(cls, nvars, cap, lo, hi, step, value):
        poly = value if isinstance(value, TPoly) else TPoly.const(nvars, cap, value)
        return cls(nvars, cap, lo, hi, step, lambda s: poly, deg_valid=None)

    def sample(self, s) -> TPoly:
        s = Fraction(s)
        if not (self.lo <= s <= self.hi):
            raise WindowError(f"grid access at s = {s} outside window [{self.lo}, {self.hi}]")
        if ((s - self.lo) / self.step).denominator != 1:
            raise WindowError(f"s = {s} is not on the 1/{self.step.denominator} grid")
        if s not in self._cache:
            self._cache[s] = self._fn(s)
        return self._cache[s]

    def _combine_meta(self, other: "GridCoeff"):
        if self.step != other.step:
            raise ConfigError(f"mixed grid steps {self.step} and {other.step} rejected")
        if (self.nvars, self.cap) != (other.nvars, other.cap):
            raise ConfigError("mismatched series caps on grid coefficients")
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise WindowError("empty window after combining grid coefficients")
        return lo, hi

    def add(self, other: "GridCoeff") -> "GridCoeff":
        lo, hi = self._combine_meta(other)
        return GridCoeff(
            self.nvars, self.cap, lo, hi, self.step,
            lambda s: self.sample(s) + other.sample(s),
            deg_valid=_min_deg(self.deg_valid, other.deg_valid),
        )

    def mul(self, other: "GridCoeff") -> "GridCoeff":
        lo, hi = self._combine_meta(other)
        return GridCoeff(
            self.nvars, self.cap, lo, hi, self.step,
            lambda s: self.sample(s) * other.sample(s),
            deg_valid=_min_deg(self.deg_valid, other.deg_valid),
        )

    def shift(self, alpha) -> "GridCoeff":
        alpha = Fraction(alpha)
        if not alpha:
            return self
        if (alpha / self.step).denominator != 1:
            raise ConfigError(
                f"shift by {alpha} is off the 1/{self.step.denominator} grid; mixed denominators rejected"
            )
        return GridCoeff(
            self.nvars, self.cap, self.lo - alpha, self.hi - alpha, self.step,
            lambda s: self.sample(s + alpha),
            deg_valid=self.deg_valid,
        )

    def scale(self, v) -> "GridCoeff":
        v = Fraction(v)
        return GridCoeff(
            self.nvars, self.cap, self.lo, self.hi, self.step,
            lambda s: self.sample(s) * v,
            deg_valid=self.deg_valid,
        )

    def diff_t(self, k: int) -> "GridCoeff":
        dv = None if self.deg_valid is None else self.deg_valid - k
        return GridCoeff(
            self.nvars, self.cap, self.lo, self.hi, self.step,
            lambda s: self.sample(s).diff(k),
            deg_valid=dv,
        )

    def euler_t(self) -> "GridCoeff":
        return GridCoeff(
            self.nvars, self.cap, self.lo, self.hi, self.step,
            lambda s: self.sample(s).euler(),
            deg_valid=self.deg_valid,
        )

    def inv(self) -> "GridCoeff":
        return GridCoeff(
            self.nvars, self.cap, self.lo, self.hi, self.step,
            lambda s: self.sample(s).inv(),
            deg_valid=self.deg_valid,
        )

    def __repr__(self):
        return f"GridCoeff([{self.lo},{self.hi}] step {self.step}, deg<= {self.deg_valid})"


def _min_deg(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ---------------------------------------------------------------------------
# coefficient dispatch (Fraction | ExpCoeff | GridCoeff)
# ---------------------------------------------------------------------------


def _promote_pair(a, b):
    """Bring two coefficients to a common backend."""
    if isinstance(a, GridCoeff) or isinstance(b, GridCoeff):
        if not isinstance(a, GridCoeff):
            a = _to_grid_like(a, b)
        if not isinstance(b, GridCoeff):
            b = _to_grid_like(b, a)
        return a, b
    if isinstance(a, ExpCoeff) or isinstance(b, ExpCoeff):
        if not isinstance(a, ExpCoeff):
            a = ExpCoeff.const(a, b.env if isinstance(b, ExpCoeff) else None)
        if not isinstance(b, ExpCoeff):
            b = ExpCoeff.const(b, a.env)
        return a, b
    return Fraction(a), Fraction(b)


def _to_grid_like(c, template: GridCoeff) -> GridCoeff:
    if isinstance(c, (int, Fraction)):
        return GridCoeff.const(
            template.nvars, template.cap, template.lo, template.hi, template.step, Fraction(c)
        )
    if isinstance(c, ExpCoeff):
        if c.env is None:
            raise BackendError("symbolic coefficient has no parameter set; cannot hit the grid")
        return GridCoeff(
            template.nvars, template.cap, template.lo, template.hi, template.step,
            lambda s, _c=c: TPoly.const(template.nvars, template.cap, _c.eval_rat(s)),
            deg_valid=None,
        )
    raise BackendError(f"cannot promote {type(c).__name__} to the grid backend")


def c_add(a, b):
    a, b = _promote_pair(a, b)
    if isinstance(a, GridCoeff):
        return a.add(b)
    return a + b


def c_mul(a, b):
    a, b = _promote_pair(a, b)
    if isinstance(a, GridCoeff):
        return a.mul(b)
    return a * b


def c_shift(c, alpha):
    if isinstance(c, (int, Fraction)):
        return c
    return c.shift(alpha)


def c_neg(c):
    if isinstance(c, GridCoeff):
        return c.scale(-1)
    return -c


def c_scale(c, v):
    if isinstance(c, GridCoeff):
        return c.scale(v)
    return c * Fraction(v)


def c_is_zero(c):
    """Exact zero test; grid coefficients are never assumed zero."""
    if isinstance(c, GridCoeff):
        return False
    return not c


def c_inv_unit(c):
    if isinstance(c, (int, Fraction)):
        v = Fraction(c)
        if not v:
            raise NotInvertibleError("zero leading coefficient")
        return 1 / v
    return c.inv()


# ---------------------------------------------------------------------------
# the operator ring
# ---------------------------------------------------------------------------


class DiffOp:
    """Truncated Laurent series in the shift operator with function coefficients.

    ``floor`` is the truncation threshold: products drop terms below it and
    record the loss.  ``valid_from`` is the exactness watermark: stored
    coefficients at shifts >= valid_from are exact; None means the operator is
    complete (nothing was ever dropped).
    """

    __slots__ = ("coeffs", "floor", "valid_from", "truncated")

    def __init__(self, coeffs=None, floor=Fraction(-6), valid_from=None, truncated=False):
        self.floor = Fraction(floor)
        self.valid_from = None if valid_from is None else Fraction(valid_from)
        self.truncated = truncated
        self.coeffs = {}
        if coeffs:
            for alpha, c in coeffs.items():
                alpha = Fraction(alpha)
                if alpha < self.floor:
                    self.truncated = True
                    self.valid_from = max_or(self.valid_from, self.floor)
                    continue
                if not c_is_zero(c):
                    self.coeffs[alpha] = c

    # -- constructors -----------------------------------------------------------

    @classmethod
    def identity(cls, floor=Fraction(-6)):
        return cls({Fraction(0): Fraction(1)}, floor=floor)

    @classmethod
    def lam_power(cls, alpha, floor=Fraction(-6)):
        return cls({Fraction(alpha): Fraction(1)}, floor=floor)

    @classmethod
    def zero(cls, floor=Fraction(-6)):
        return cls({}, floor=floor)

    # -- structure ----------------------------------------------------------------

    @property
    def top(self):
        return max(self.coeffs) if self.coeffs else None

    @property
    def bottom(self):
        return min(self.coeffs) if self.coeffs else None

    @property
    def shift_denominator(self) -> int:
        m = 1
        for alpha in self.coeffs:
            m = lcm(m, alpha.denominator)
        return m

    def coeff(self, alpha):
        return self.coeffs.get(Fraction(alpha), Fraction(0))

    def shifts(self):
        return sorted(self.coeffs, reverse=True)

    def assertable_from(self):
        """Smallest shift at which coefficients may be asserted exactly."""
        return self.floor if self.valid_from is None else self.valid_from

    def __repr__(self):
        body = ", ".join(f"L^{a}" for a in self.shifts())
        vf = "complete" if self.valid_from is None else f"valid>={self.valid_from}"
        return f"DiffOp({body or '0'}; floor {self.floor}, {vf})"

    def dump(self) -> str:
        """One line per shift exponent, canonical ordering, exact values."""
        lines = []
        for alpha in self.shifts():
            c = self.coeffs[alpha]
            body = str(c) if isinstance(c, Fraction) else repr(c)
            lines.append(f"L^{alpha}: {body}")
        return "\n".join(lines) if lines else "0"

    # -- linear operations -----------------------------------------------------------

    def _meta_binary(self, other: "DiffOp"):
        floor = min(self.floor, other.floor)
        valid = max_or(self.valid_from, other.valid_from)
        trunc = self.truncated or other.truncated
        return floor, valid, trunc

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        floor, valid, trunc = self._meta_binary(other)
        out = dict(self.coeffs)
        for alpha, c in other.coeffs.items():
            if alpha in out:
                acc = c_add(out[alpha], c)
                if c_is_zero(acc):
                    out.pop(alpha)
                else:
                    out[alpha] = acc
            else:
                out[alpha] = c
        res = DiffOp(floor=floor, valid_from=valid, truncated=trunc)
        res.coeffs = out
        return res

    def __neg__(self):
        res = DiffOp(floor=self.floor, valid_from=self.valid_from, truncated=self.truncated)
        res.coeffs = {a: c_neg(c) for a, c in self.coeffs.items()}
        return res

    def __sub__(self, other):
        return self + (-other)

    def scale(self, v):
        res = DiffOp(floor=self.floor, valid_from=self.valid_from, truncated=self.truncated)
        if Fraction(v):
            res.coeffs = {a: c_scale(c, v) for a, c in self.coeffs.items()}
        return res

    def scale_coeff(self, c):
        """Left-multiply by a coefficient function (no shift)."""
        return op_mul(DiffOp({Fraction(0): c}, floor=self.floor), self)

    def map_coeffs(self, fn) -> "DiffOp":
        res = DiffOp(floor=self.floor, valid_from=self.valid_from, truncated=self.truncated)
        for a, c in self.coeffs.items():
            nc = fn(c)
            if not c_is_zero(nc):
                res.coeffs[a] = nc
        return res

    def shift_coeffs(self, alpha) -> "DiffOp":
        """Substitute s -> s + alpha in every coefficient (shift powers untouched)."""
        return self.map_coeffs(lambda c: c_shift(c, alpha))


def max_or(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def op_mul(x: DiffOp, y: DiffOp) -> DiffOp:
    """Normal-ordered truncated product."""
    floor = min(x.floor, y.floor)
    out: dict = {}
    dropped = False
    for ax, cx in x.coeffs.items():
        for ay, cy in y.coeffs.items():
            sigma = ax + ay
            if sigma < floor:
                dropped = True
                continue
            term = c_mul(cx, c_shift(cy, ax))
            if sigma in out:
                acc = c_add(out[sigma], term)
                if c_is_zero(acc):
                    out.pop(sigma)
                else:
                    out[sigma] = acc
            else:
                if not c_is_zero(term):
                    out[sigma] = term
    valid = None
    if x.valid_from is not None and y.top is not None:
        valid = max_or(valid, x.valid_from + y.top)
    if y.valid_from is not None and x.top is not None:
        valid = max_or(valid, y.valid_from + x.top)
    if dropped:
        valid = max_or(valid, floor)
    res = DiffOp(floor=floor, valid_from=valid, truncated=x.truncated or y.truncated or dropped)
    res.coeffs = out
    return res


def op_pow(x: DiffOp, n: int) -> DiffOp:
    if n < 0:
        raise ConfigError("negative operator powers go through op_inv")
    acc = DiffOp.identity(floor=x.floor)
    for _ in range(n):
        acc = op_mul(acc, x)
    return acc


def lam_mul_right(x: DiffOp, alpha) -> DiffOp:
    """x * L^alpha: shift exponents move up, coefficients untouched."""
    alpha = Fraction(alpha)
    res = DiffOp(
        floor=x.floor + alpha,
        valid_from=None if x.valid_from is None else x.valid_from + alpha,
        truncated=x.truncated,
    )
    res.coeffs = {a + alpha: c for a, c in x.coeffs.items()}
    return res


def lam_mul_left(x: DiffOp, alpha) -> DiffOp:
    """L^alpha * x: coefficients pick up the shift, exponents move up."""
    alpha = Fraction(alpha)
    res = DiffOp(
        floor=x.floor + alpha,
        valid_from=None if x.valid_from is None else x.valid_from + alpha,
        truncated=x.truncated,
    )
    res.coeffs = {a + alpha: c_shift(c, alpha) for a, c in x.coeffs.items()}
    return res


def op_project(x: DiffOp, part: str) -> DiffOp:
    """Projection to shifts >= 0 ('+') or < 0 ('-'); the two parts sum to x."""
    if part not in ("+", "-"):
        raise ConfigError("part must be '+' (shifts >= 0) or '-' (shifts < 0)")
    keep = (lambda a: a >= 0) if part == "+" else (lambda a: a < 0)
    res = DiffOp(floor=x.floor, valid_from=x.valid_from, truncated=x.truncated)
    res.coeffs = {a: c for a, c in x.coeffs.items() if keep(a)}
    return res


def op_inv(x: DiffOp) -> DiffOp:
    """Inverse of u0 (1 + strictly-negative part), as a truncated Neumann series."""
    if x.top is None or x.top != 0:
        raise NotInvertibleError("invertible operators must have leading shift 0")
    u0 = x.coeffs[Fraction(0)]
    u0_inv = c_inv_unit(u0)
    inv0 = DiffOp({Fraction(0): u0_inv}, floor=x.floor)
    n = op_mul(inv0, x)
    n.coeffs.pop(Fraction(0), None)  # n = u0^-1 x - 1, strictly negative shifts
    acc = DiffOp.identity(floor=x.floor)
    acc.valid_from = n.valid_from
    term = DiffOp.identity(floor=x.floor)
    guard = 0
    while True:
        term = op_mul(term, n)
        term = term.scale(-1)
        if not term.coeffs:
            break
        acc = acc + term
        guard += 1
        if guard > 10000:
            raise ConfigError("runaway inverse series; check the floor")
    return op_mul(acc, inv0)


def op_exp(x: DiffOp) -> DiffOp:
    """exp by truncated power series; x must have strictly negative shifts."""
    if x.top is not None and x.top >= 0:
        raise ConfigError("op_exp needs strictly negative shifts")
    acc = DiffOp.identity(floor=x.floor)
    acc.valid_from = x.valid_from
    term = DiffOp.identity(floor=x.floor)
    j = 0
    while True:
        j += 1
        term = op_mul(term, x).scale(Fraction(1, j))
        if not term.coeffs:
            break
        acc = acc + term
    return acc


def op_log1p(x: DiffOp) -> DiffOp:
    """log(1 + x) by truncated power series; x strictly negative shifts."""
    if x.top is not None and x.top >= 0:
        raise ConfigError("op_log1p needs strictly negative shifts")
    acc = DiffOp.zero(floor=x.floor)
    acc.valid_from = x.valid_from
    power = DiffOp.identity(floor=x.floor)
    j = 0
    while True:
        j += 1
        power = op_mul(power, x)
        if not power.coeffs:
            break
        acc = acc + power.scale(Fraction((-1) ** (j + 1), j))
    return acc


def commutator(x: DiffOp, y: DiffOp) -> DiffOp:
    return op_mul(x, y) - op_mul(y, x)


def conjugate_shift(w: DiffOp, alpha) -> DiffOp:
    """W L^alpha W^{-1} = W * W(s+alpha)^{-1} * L^alpha for unit-leading W."""
    alpha = Fraction(alpha)
    if w.top != 0:
        raise ConfigError("conjugate_shift needs a unit-leading dressing operator")
    ws = w.shift_coeffs(alpha)
    prod = op_mul(w, op_inv(ws))
    return lam_mul_right(prod, alpha)


def op_dds(x: DiffOp) -> DiffOp:
    """Coefficient-wise d/ds (symbolic backend only; constants give zero)."""

    def der(c):
        if isinstance(c, (int, Fraction)):
            return Fraction(0)
        if isinstance(c, ExpCoeff):
            return c.dds()
        raise BackendError("grid backend has no s-derivative")

    return x.map_coeffs(der)


def op_log_dressed(w: DiffOp) -> DiffOp:
    """Tail of log(W Lambda W^{-1}): -(dW/ds) W^{-1}; the log Lambda summand is implicit."""
    if w.top != 0:
        raise ConfigError("op_log_dressed needs a unit-leading dressing operator")
    return op_mul(-op_dds(w), op_inv(w))


def band_profile(x: DiffOp):
    """(alpha_max, alpha_min_nonzero, sorted nonzero shifts), exact backends only."""
    nz = []
    for a in x.shifts():
        c = x.coeffs[a]
        if isinstance(c, GridCoeff):
            raise BackendError("band_profile on grid coefficients needs probe-based checks")
        if not c_is_zero(c):
            nz.append(a)
    if not nz:
        return None, None, []
    return max(nz), min(nz), sorted(nz)


def op_diff_t(x: DiffOp, k: int) -> DiffOp:
    """Coefficient-wise d/dt_k; symbolic and rational coefficients are t-independent."""

    def der(c):
        if isinstance(c, GridCoeff):
            return c.diff_t(k)
        return Fraction(0)

    return x.map_coeffs(der)


def op_eval_grid(x: DiffOp, s, env: ParamEnv | None = None) -> dict:
    """Evaluate every coefficient at grid point s; returns {shift: TPoly | BetaScalar}."""
    out = {}
    for a, c in x.coeffs.items():
        if isinstance(c, GridCoeff):
            out[a] = c.sample(s)
        elif isinstance(c, ExpCoeff):
            out[a] = c.eval(s, env)
        else:
            out[a] = BetaScalar.from_rat(c)
    return out
