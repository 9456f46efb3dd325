"""Hypergeometric tau functions, their weights, and tau-derived wave data.

The weights attached to a partition at lattice position s are built from the
diagonal entries h_n = e^{beta (n - 1/2)^2 / 2} Q^{n - 1/2}.  Two independent
routes are kept side by side:

* the closed exponent formula
  h_lambda(s) = e^{beta/2 (kappa + 2 s |lambda| + (4 s^3 - s)/12)} Q^{|lambda| + s^2/2},
* the finite product h_empty(s) * prod_{(i,j)} r_{j-i+s+1} with r_n = h_n / h_{n-1}.

Wave coefficients come from the Miwa-shifted tau ratio
tau(s-1, t - [z^{-1}]) / tau(s-1, t); the overall h_empty factor cancels in
the ratio, so only contents products (pure half-integer lattice exponents)
enter, and the whole computation stays exact on fractional grids as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import ConfigError
from .operators import DiffOp, GridCoeff
from .partitions import Partition, enumerate_partitions, kappa
from .scalars import ParamEnv
from .schur import CVector, schur_at, schur_poly
from .tpoly import TPoly

# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


def h_entry(n: int, env: ParamEnv) -> Fraction:
    """Diagonal entry h_n = e^{beta (n-1/2)^2/2} Q^{n-1/2}."""
    return env.e_beta_pow(Fraction((2 * n - 1) ** 2, 8)) * env.Q_pow(n - Fraction(1, 2))


def contents_ratio(x: Fraction, env: ParamEnv) -> Fraction:
    """r_x = h_x / h_{x-1} = Q e^{beta (x-1)} (valid at fractional x too)."""
    return env.Q_pow(1) * env.e_beta_pow(Fraction(x) - 1)


def h_empty_closed(s, env: ParamEnv) -> Fraction:
    """h_empty(s) = e^{beta (4 s^3 - s)/24} Q^{s^2/2}."""
    s = Fraction(s)
    return env.e_beta_pow((4 * s**3 - s) / 24) * env.Q_pow(s * s / 2)


def h_empty_product(s: int, env: ParamEnv) -> Fraction:
    """Finite product form of h_empty at integer s."""
    if Fraction(s).denominator != 1:
        raise ConfigError("the product form of h_empty is defined at integer s only")
    s = int(s)
    val = Fraction(1)
    if s > 0:
        for n in range(1, s + 1):
            val *= h_entry(n, env)
    elif s < 0:
        for n in range(s + 1, 1):
            val /= h_entry(n, env)
    return val


def contents_product(lam: Partition, s, env: ParamEnv) -> Fraction:
    """prod over boxes of r_{j-i+s+1} = Q^{|lam|} e^{beta (kappa/2 + s |lam|)}."""
    s = Fraction(s)
    return env.Q_pow(lam.size) * env.e_beta_pow(Fraction(kappa(lam), 2) + s * lam.size)


def contents_product_literal(lam: Partition, s, env: ParamEnv) -> Fraction:
    """Same product, box by box through the h-ratios (independent route)."""
    val = Fraction(1)
    for i, j in lam.boxes():
        val *= contents_ratio(Fraction(j - i) + Fraction(s) + 1, env)
    return val


def h_weight(lam: Partition, s, env: ParamEnv) -> Fraction:
    """Closed form e^{beta/2 (kappa + 2s|lam| + (4s^3-s)/12)} Q^{|lam| + s^2/2}."""
    s = Fraction(s)
    expo = Fraction(kappa(lam)) / 2 + s * lam.size + (4 * s**3 - s) / 24
    return env.e_beta_pow(expo) * env.Q_pow(lam.size + s * s / 2)


def h_weight_product(lam: Partition, s, env: ParamEnv) -> Fraction:
    """Product-form route: h_empty product times literal contents product."""
    return h_empty_product(s, env) * contents_product_literal(lam, s, env)


@dataclass(frozen=True)
class HWeight:
    lam: Partition
    s: Fraction
    value: Fraction


# ---------------------------------------------------------------------------
# tau series
# ---------------------------------------------------------------------------

_schur_cache: dict = {}


def _schur_poly_cached(lam: Partition, nvars: int, cap: int) -> TPoly:
    key = (lam.parts, nvars, cap)
    if key not in _schur_cache:
        _schur_cache[key] = schur_poly(lam, nvars, cap)
    return _schur_cache[key]


@dataclass(frozen=True)
class TauSeries:
    s: Fraction
    value: TPoly
    cap: int
    env: ParamEnv


def tau_normalized(s, c: CVector, cap: int, env: ParamEnv, nvars: int | None = None) -> TPoly:
    """tau(s, t) / h_empty(s) = sum_lam S_lam(t) (contents product) S_lam(c).

    Exact through weighted degree ``cap`` by homogeneity.
    """
    nvars = nvars if nvars is not None else cap
    if len(c) < cap:
        raise ConfigError(f"c-vector has {len(c)} modes; tau cap {cap} needs at least that")
    acc = TPoly.zero(nvars, cap)
    for lam in enumerate_partitions(cap):
        w = contents_product(lam, s, env) * schur_at(lam, c)
        if w:
            acc = acc + _schur_poly_cached(lam, nvars, cap) * w
    return acc


def tau(s, c: CVector, cap: int, env: ParamEnv, nvars: int | None = None) -> TauSeries:
    """The hypergeometric tau series at grid point s, exact through degree cap."""
    s = Fraction(s)
    value = tau_normalized(s, c, cap, env, nvars) * h_empty_closed(s, env)
    return TauSeries(s=s, value=value, cap=cap, env=env)


# ---------------------------------------------------------------------------
# Miwa shift
# ---------------------------------------------------------------------------

_miwa_cache: dict = {}


def miwa_zseries(lam: Partition, nvars: int, cap: int, zfloor: int) -> dict:
    """S_lam(t - [z^{-1}]) as {z-exponent: TPoly}, truncated below z^zfloor.

    [z] = (z^k / k), so the substitution is t_k -> t_k - z^{-k}/k.
    """
    key = (lam.parts, nvars, cap, zfloor)
    if key in _miwa_cache:
        return _miwa_cache[key]
    base = _schur_poly_cached(lam, nvars, cap)
    out: dict = {}
    for mono, coeff in base.coeffs.items():
        acc = {0: TPoly.const(nvars, cap, coeff)}
        for idx, e in enumerate(mono):
            if not e:
                continue
            k = idx + 1
            powers = [TPoly.const(nvars, cap, 1)]
            for _ in range(e):
                powers.append(powers[-1] * TPoly.var(nvars, cap, k))
            nxt: dict = {}
            for zexp, poly in acc.items():
                for j in range(e + 1):
                    nz = zexp - k * j
                    if nz < zfloor:
                        continue
                    fac = Fraction(comb(e, j)) * Fraction(-1, k) ** j
                    term = poly * powers[e - j] * fac
                    if not term:
                        continue
                    if nz in nxt:
                        nxt[nz] = nxt[nz] + term
                    else:
                        nxt[nz] = term
            acc = nxt
        for zexp, poly in acc.items():
            if not poly:
                continue
            if zexp in out:
                out[zexp] = out[zexp] + poly
            else:
                out[zexp] = poly
    out = {z: p for z, p in out.items() if p}
    _miwa_cache[key] = out
    return out


# ---------------------------------------------------------------------------
# wave data and the dressing operator
# ---------------------------------------------------------------------------


class WaveData:
    """Wave-function amplitudes w_n(s, t) on a grid window.

    w_n is the z^{-n} coefficient of tau(s-1, t - [z^{-1}]) / tau(s-1, t),
    computed in the truncated ring; entry n is exact through weighted degree
    cap - n.  Points are evaluated lazily and cached.
    """

    def __init__(self, c: CVector, env: ParamEnv, lo, hi, step, cap: int, n_cut: int,
                 nvars: int | None = None):
        self.c = c
        self.env = env
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        self.step = Fraction(step)
        self.cap = cap
        self.n_cut = n_cut
        self.nvars = nvars if nvars is not None else cap
        self._points: dict = {}
        self._lams = enumerate_partitions(cap)
        self._weights: dict = {}

    def _lam_weight(self, lam: Partition, s: Fraction) -> Fraction:
        key = (lam.parts, s)
        if key not in self._weights:
            self._weights[key] = contents_product(lam, s, self.env) * schur_at(lam, self.c)
        return self._weights[key]

    def _point(self, s) -> dict:
        """{n: TPoly} for w_0..w_n_cut at grid point s."""
        s = Fraction(s)
        if s in self._points:
            return self._points[s]
        nvars, cap = self.nvars, self.cap
        num: dict = {}
        for lam in self._lams:
            w = self._lam_weight(lam, s - 1)
            if not w:
                continue
            for zexp, poly in miwa_zseries(lam, nvars, cap, -self.n_cut).items():
                term = poly * w
                if zexp in num:
                    num[zexp] = num[zexp] + term
                else:
                    num[zexp] = term
        den_inv = num[0].inv()
        out = {0: TPoly.const(nvars, cap, 1)}
        for n in range(1, self.n_cut + 1):
            poly = num.get(-n)
            out[n] = poly * den_inv if poly is not None else TPoly.zero(nvars, cap)
        self._points[s] = out
        return out

    def coeff(self, n: int) -> GridCoeff:
        """w_n as a grid coefficient with degree validity cap - n."""
        if not 0 <= n <= self.n_cut:
            raise ConfigError(f"w_{n} outside the computed range 0..{self.n_cut}")
        return GridCoeff(
            self.nvars, self.cap, self.lo, self.hi, self.step,
            lambda s, n=n: self._point(s)[n],
            deg_valid=self.cap - n,
        )

    def dressing(self, floor=None) -> DiffOp:
        """W = 1 + sum w_n Lambda^{-n} with per-coefficient validity."""
        floor = Fraction(floor) if floor is not None else Fraction(-self.n_cut)
        coeffs = {Fraction(0): Fraction(1)}
        for n in range(1, self.n_cut + 1):
            coeffs[Fraction(-n)] = self.coeff(n)
        return DiffOp(coeffs, floor=floor, valid_from=floor)

    def dressing_dds_over_beta(self, floor=None) -> DiffOp:
        """(1/beta) dW/ds, via the exact scaling identity of this tau family.

        The weights depend on s only through e^{beta s |lambda|}, so
        d w_n / d s = beta (E_t + n) w_n with E_t the weighted Euler operator.
        """
        floor = Fraction(floor) if floor is not None else Fraction(-self.n_cut)
        coeffs = {}
        for n in range(1, self.n_cut + 1):
            coeffs[Fraction(-n)] = GridCoeff(
                self.nvars, self.cap, self.lo, self.hi, self.step,
                lambda s, n=n: self._point(s)[n].euler() + self._point(s)[n] * n,
                deg_valid=self.cap - n,
            )
        return DiffOp(coeffs, floor=floor, valid_from=floor)
