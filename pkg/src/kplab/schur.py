"""Schur polynomials, their special values, and the constant vectors c.

The one-row generators S_n(t) come from exp(sum_k t_k z^k); general S_lambda
is the Jacobi-Trudi determinant of one-row generators.  The same determinant
evaluated over plain rationals gives fast exact evaluation at a constant
vector c.  Closed-form special values (hook products and their q-deformation)
are kept as an independent route for cross-validation.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError, PoleError
from .partitions import Partition, hooks, kappa
from .scalars import ParamEnv
from .tpoly import TPoly

CVECTOR_FAMILIES = ("a", "b", "c", "d", "gbin_finite", "gbin", "grr", "custom")


class CVector:
    """Constant vector (c_1, ..., c_Kc) with a family provenance tag."""

    __slots__ = ("values", "family")

    def __init__(self, values, family="custom"):
        if family not in CVECTOR_FAMILIES:
            raise ConfigError(f"unknown c-vector family {family!r}")
        self.values = tuple(Fraction(v) for v in values)
        self.family = family

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        """c_k, 1-indexed."""
        if not 1 <= k <= len(self.values):
            raise ConfigError(f"c_{k} requested but only {len(self.values)} modes present")
        return self.values[k - 1]

    def __repr__(self):
        return f"CVector({self.family}: {', '.join(str(v) for v in self.values)})"


def one_row_polys(nmax: int, nvars: int, cap: int) -> list:
    """[S_0(t), ..., S_nmax(t)] from n S_n = sum_{k<=n} k t_k S_{n-k}."""
    out = [TPoly.const(nvars, cap, 1)]
    for n in range(1, nmax + 1):
        acc = TPoly.zero(nvars, cap)
        for k in range(1, min(n, nvars) + 1):
            acc = acc + TPoly.var(nvars, cap, k) * k * out[n - k]
        out.append(acc * Fraction(1, n))
    return out


def one_row_values(nmax: int, c: CVector) -> list:
    """[S_0(c), ..., S_nmax(c)] by the same recurrence over rationals."""
    if len(c) < nmax:
        raise ConfigError(f"c-vector has {len(c)} modes; need at least {nmax}")
    out = [Fraction(1)]
    for n in range(1, nmax + 1):
        acc = Fraction(0)
        for k in range(1, n + 1):
            acc += k * c[k] * out[n - k]
        out.append(acc / n)
    return out


def _jacobi_trudi(lam: Partition, gen) -> object:
    """det(gen[lam_i - i + j]) over rows i, cols j = 1..l(lam).

    ``gen`` maps integer indices to ring elements (negative index -> 0).
    Expansion by the first row with zero pruning; minors are memoized.
    """
    n = len(lam)
    if n == 0:
        return gen(0)
    rows = lam.parts

    memo = {}

    def minor(row_idx: int, cols: tuple):
        if not cols:
            return gen(0)  # multiplicative one
        key = (row_idx, cols)
        if key in memo:
            return memo[key]
        acc = None
        sign = 1
        for pos, j in enumerate(cols):
            idx = rows[row_idx] - (row_idx + 1) + j
            if idx >= 0:
                entry = gen(idx)
                if entry:
                    sub = minor(row_idx + 1, cols[:pos] + cols[pos + 1 :])
                    term = entry * sub
                    if sign < 0:
                        term = -term
                    acc = term if acc is None else acc + term
            sign = -sign
        if acc is None:
            acc = gen(0) * 0
        memo[key] = acc
        return acc

    return minor(0, tuple(range(1, n + 1)))


def schur_poly(lam: Partition, nvars: int, cap: int) -> TPoly:
    """S_lambda(t) as a weighted-homogeneous polynomial of degree |lambda|."""
    # for long, narrow shapes the conjugate determinant is much smaller;
    # the involution t_k -> (-1)^{k-1} t_k swaps lambda and lambda'
    if len(lam) > (lam.parts[0] if lam.parts else 0):
        conj = schur_poly(lam.conjugate(), nvars, cap)
        flipped = {}
        for key, v in conj.coeffs.items():
            odd = sum(e for i, e in enumerate(key) if (i + 1) % 2 == 0)
            flipped[key] = -v if odd % 2 else v
        return TPoly(nvars, cap, flipped)

    nmax = (lam.parts[0] + len(lam) - 1) if lam.parts else 0
    gens = one_row_polys(nmax, nvars, cap)

    def gen(idx: int):
        if idx < 0 or idx > nmax:
            return TPoly.zero(nvars, cap)
        return gens[idx]

    return _jacobi_trudi(lam, gen)


def schur_at(lam: Partition, c: CVector) -> Fraction:
    """Exact value S_lambda(c)."""
    nmax = (lam.parts[0] + len(lam) - 1) if lam.parts else 0
    if len(c) < lam.size:
        raise ConfigError(f"c-vector has {len(c)} modes; |lambda| = {lam.size} needs at least that")
    vals = one_row_values(max(nmax, lam.size), c)

    def gen(idx: int):
        if idx < 0 or idx >= len(vals):
            return Fraction(0)
        return vals[idx]

    v = _jacobi_trudi(lam, gen)
    return Fraction(v)


def cvector(family: str, env: ParamEnv, kc: int) -> CVector:
    """The constant vectors of the four base cases and their generalizations.

    (a) (1, 0, 0, ...); (b) a/k; (c) 1/(k(1-q^k)); (d) (1-q^{ak})/(k(1-q^k));
    gbin: sum_n q^{b_n k}/(k(1-q^k)); grr: (sum q^{b_n k} - sum q^{a_n k})/(k(1-q^k)).
    """
    if kc < 1:
        raise ConfigError("kc must be >= 1")
    if family == "a":
        return CVector([1] + [0] * (kc - 1), "a")
    if family == "b":
        if env.a is None:
            raise ConfigError("case (b) needs the deformation parameter a")
        return CVector([Fraction(env.a, k) for k in range(1, kc + 1)], "b")
    if family in ("c", "d", "gbin", "grr"):
        q = env.q
        if q == 1:
            raise PoleError("q = 1 is a pole of the c-vector")
        vals = []
        for k in range(1, kc + 1):
            qk = q**k
            if qk == 1:
                raise PoleError(f"q^{k} = 1 is a pole of the c-vector")
            den = k * (1 - qk)
            if family == "c":
                vals.append(Fraction(1) / den)
            elif family == "d":
                if env.a is None:
                    raise ConfigError("case (d) needs the deformation parameter a")
                vals.append((1 - env.q_pow(env.a * k)) / den)
            elif family == "gbin":
                if not env.b_exps:
                    raise ConfigError("gbin needs the exponent list b_n")
                vals.append(sum(env.q_pow(b * k) for b in env.b_exps) / den)
            else:
                if not env.b_exps or not env.a_exps:
                    raise ConfigError("grr needs both exponent lists b_n and a_n")
                num = sum(env.q_pow(b * k) for b in env.b_exps) - sum(
                    env.q_pow(x * k) for x in env.a_exps
                )
                vals.append(num / den)
        return CVector(vals, family)
    if family == "gbin_finite":
        if not env.b_exps:
            raise ConfigError("gbin_finite packs its leading values in b_exps")
        head = list(env.b_exps)[:kc]
        return CVector(head + [0] * (kc - len(head)), "gbin_finite")
    raise ConfigError(f"unknown c-vector family {family!r}")


def schur_special_closed(lam: Partition, family: str, env: ParamEnv) -> Fraction:
    """Closed-form special values: hook product for (a), q-hooks for (c)."""
    hk = hooks(lam)
    if family == "a":
        val = Fraction(1)
        for h in hk.values():
            val /= h
        return val
    if family == "c":
        # q^{-kappa/4 - |lam|/2} / prod (q^{-h/2} - q^{h/2});
        # kappa is even, so every exponent is a half-integer on the lattice
        val = env.q_pow(Fraction(-kappa(lam), 4) - Fraction(lam.size, 2))
        for h in hk.values():
            d = env.q_pow(Fraction(-h, 2)) - env.q_pow(Fraction(h, 2))
            if d == 0:
                raise PoleError(f"q-hook denominator vanishes for hook {h}")
            val /= d
        return val
    raise ConfigError(f"no closed special value for family {family!r}")
