"""Verification reports and the initial-value / case-shape checks.

Every exact check reports the number of coefficients actually asserted,
the worst residual (exact, stringified) when something fails, and the
window / caps / parameters used.  "inconclusive" is a first-class verdict:
it means truncation metadata left nothing assertable, which is reported,
never silently passed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import LabError
from .operators import (
    DiffOp,
    ExpCoeff,
    GridCoeff,
    c_is_zero,
    conjugate_shift,
    lam_mul_left,
    lam_mul_right,
    op_exp,
    op_inv,
    op_log1p,
    op_log_dressed,
    op_mul,
    op_pow,
)
from .scalars import BetaScalar, ParamEnv
from .schur import CVector, cvector
from .tau import WaveData
from .tpoly import TPoly

REPORT_SCHEMA = "kplab-report/1"

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class CheckSpec:
    """What to verify and at which caps; exact mode admits zero tolerance only."""

    check_id: str
    case: str | None = None
    cap: int = 6
    n_cut: int = 6
    nvars: int = 6
    k_range: tuple = (1, 2, 3)
    window: tuple = (-24, 8)
    probes: tuple = (-2, -1, 0, 1, 2)
    trend: bool = False
    points: int = 3
    seed: int = 1


@dataclass
class VerificationReport:
    check_id: str
    verdict: str
    asserted_count: int
    worst_residual: str | None
    params: dict
    caps: dict
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "id": self.check_id,
            "verdict": self.verdict,
            "asserted_count": self.asserted_count,
            "worst_residual": self.worst_residual,
            "params": self.params,
            "caps": self.caps,
            "details": self.details,
        }


def _magnitude(v) -> Fraction:
    if isinstance(v, Fraction):
        return abs(v)
    if isinstance(v, BetaScalar):
        return max((abs(x) for x in v.coeffs.values()), default=Fraction(0))
    if isinstance(v, ExpCoeff):
        return max((abs(x) for x in v.terms.values()), default=Fraction(0))
    if isinstance(v, TPoly):
        return max((abs(x) for x in v.coeffs.values()), default=Fraction(0))
    return Fraction(1)


class Assertions:
    """Collects exact assertions and turns them into a report."""

    def __init__(self):
        self.count = 0
        self.residuals = []
        self.notes = []

    def record(self, ok: bool, where: str, value=None):
        self.count += 1
        if not ok:
            self.residuals.append((where, value))

    def zero_coeff(self, value, where: str):
        self.record(c_is_zero(value) if not isinstance(value, (TPoly, BetaScalar)) else not value,
                    where, value)

    def zero_exp_op(self, x: DiffOp, label: str, shifts=None):
        """Assert every assertable coefficient of a symbolic operator is zero.

        ``shifts`` widens the audit to slots that cancelled exactly (and were
        therefore dropped from storage), so the asserted count is honest.
        """
        lo = x.assertable_from()
        audit = set(x.coeffs)
        if shifts:
            audit |= {Fraction(a) for a in shifts}
        seen = False
        for alpha in sorted(audit):
            if alpha < lo:
                continue
            seen = True
            c = x.coeffs.get(alpha, Fraction(0))
            self.record(c_is_zero(c), f"{label}: shift {alpha}", c)
        if not seen and not x.coeffs:
            # nothing stored at all: the operator is identically zero
            self.count += 1

    def equal_exp_ops(self, x: DiffOp, y: DiffOp, label: str):
        self.zero_exp_op(x - y, label, shifts=set(x.coeffs) | set(y.coeffs))

    def zero_grid_op(self, x: DiffOp, probes, label: str, deg_cap=None):
        """Assert grid coefficients vanish at the probe points through validity."""
        lo = x.assertable_from()
        for alpha, c in sorted(x.coeffs.items()):
            if alpha < lo:
                continue
            if isinstance(c, GridCoeff):
                limit = c.deg_valid if c.deg_valid is not None else c.cap
                if deg_cap is not None:
                    limit = min(limit, deg_cap)
                if limit < 0:
                    continue
                for s in probes:
                    val = c.sample(s).truncate(limit)
                    self.record(not val, f"{label}: shift {alpha} @ s={s} (deg<={limit})", val)
            else:
                self.record(c_is_zero(c), f"{label}: shift {alpha}", c)

    def note(self, text: str):
        self.notes.append(text)

    def report(self, spec: CheckSpec, params: dict, extra: dict | None = None) -> VerificationReport:
        if self.residuals:
            verdict = FAIL
            worst = max(self.residuals, key=lambda r: _magnitude(r[1]))
            worst_str = f"{worst[0]} -> {worst[1]!r}"
        elif self.count == 0:
            verdict = INCONCLUSIVE
            worst_str = None
        else:
            verdict = PASS
            worst_str = None
        details = {"notes": self.notes, "failed": [w for w, _ in self.residuals[:10]]}
        if extra:
            details.update(extra)
        return VerificationReport(
            check_id=spec.check_id,
            verdict=verdict,
            asserted_count=self.count,
            worst_residual=worst_str,
            params=params,
            caps={"cap": spec.cap, "n_cut": spec.n_cut, "nvars": spec.nvars,
                  "window": [str(spec.window[0]), str(spec.window[1])]},
            details=details,
        )


def report_from_error(spec: CheckSpec, params: dict, exc: LabError) -> VerificationReport:
    return VerificationReport(
        check_id=spec.check_id,
        verdict=FAIL,
        asserted_count=0,
        worst_residual=f"{type(exc).__name__}: {exc}",
        params=params,
        caps={"cap": spec.cap, "n_cut": spec.n_cut, "nvars": spec.nvars},
        details={"error": str(exc)},
    )


# ---------------------------------------------------------------------------
# closed-form builders
# ---------------------------------------------------------------------------


def exp_weight_term(coeff, k: int, env: ParamEnv, extra_beta_const=Fraction(0), d=0) -> ExpCoeff:
    """coeff * Q^k * e^{-beta k(k+1)/2} e^{beta k s} * e^{beta * extra} (one term)."""
    return ExpCoeff.term(
        coeff, c0=Fraction(-k * (k + 1), 2) + extra_beta_const, p1=k, jq=k, d=d, env=env
    )


def build_W0(c: CVector, env: ParamEnv, n_cut: int, floor=None) -> DiffOp:
    """Initial dressing operator: exp(- sum_k c_k Q^k e^{-beta k(k+1)/2} e^{beta k s} L^-k)."""
    floor = Fraction(floor) if floor is not None else Fraction(-n_cut)
    arg = DiffOp.zero(floor=floor)
    for k in range(1, n_cut + 1):
        ck = c[k]
        if ck:
            arg = arg + DiffOp({-k: exp_weight_term(-ck, k, env)}, floor=floor)
    return op_exp(arg)


def closed_L0_alpha(c: CVector, env: ParamEnv, alpha, n_cut: int, floor=None) -> DiffOp:
    """L^alpha exp(sum_k c_k Q^k (1 - e^{-alpha beta k}) e^{-beta k(k+1)/2} e^{beta k s} L^-k)."""
    alpha = Fraction(alpha)
    floor = Fraction(floor) if floor is not None else Fraction(-n_cut)
    arg = DiffOp.zero(floor=floor)
    for k in range(1, n_cut + 1):
        ck = c[k]
        if ck:
            term = exp_weight_term(ck, k, env) + exp_weight_term(-ck, k, env,
                                                                 extra_beta_const=-alpha * k)
            arg = arg + DiffOp({-k: term}, floor=floor)
    return lam_mul_left(op_exp(arg), alpha)


def closed_log_tail(c: CVector, env: ParamEnv, n_cut: int, floor=None) -> DiffOp:
    """beta sum_k k c_k Q^k e^{-beta k(k+1)/2} e^{beta k s} L^-k (tail of log L0)."""
    floor = Fraction(floor) if floor is not None else Fraction(-n_cut)
    out = DiffOp.zero(floor=floor)
    for k in range(1, n_cut + 1):
        ck = c[k]
        if ck:
            out = out + DiffOp({-k: exp_weight_term(k * ck, k, env, d=1)}, floor=floor)
    return out


def framed_factor(env: ParamEnv, offset=Fraction(0)) -> ExpCoeff:
    """q^{(f+1)(s-1) + offset + 1/2} as a symbolic coefficient (framed mode)."""
    fp1 = env.f + 1
    c0 = -1 + (Fraction(offset) + Fraction(1, 2)) / fp1
    return ExpCoeff.term(1, c0=c0, p1=1, env=env)


def banded_product(factors, obj_floor, trailing_alpha=None) -> DiffOp:
    """prod_n (1 - v_n L^-1), optionally times L^alpha."""
    acc = DiffOp.identity(floor=obj_floor)
    for v in factors:
        acc = op_mul(acc, DiffOp({0: Fraction(1), -1: -v}, floor=obj_floor))
    if trailing_alpha is not None:
        acc = lam_mul_right(acc, trailing_alpha)
    return acc


# ---------------------------------------------------------------------------
# checks: factorization, proposition on initial values, case shapes, trend
# ---------------------------------------------------------------------------


def check_factorization_initial(spec: CheckSpec, env: ParamEnv, case: str) -> VerificationReport:
    """Tau-derived dressing at t = 0 equals the factorization-problem solution."""
    a = Assertions()
    params = env.describe() | {"case": case}
    c = cvector(case, env, max(spec.cap, spec.n_cut))
    w0 = build_W0(c, env, spec.n_cut)
    wave = WaveData(c, env, spec.window[0], spec.window[1], 1, spec.cap, spec.n_cut, spec.nvars)
    for n in range(1, spec.n_cut + 1):
        closed = w0.coeff(Fraction(-n))
        for s in spec.probes:
            got = wave._point(Fraction(s))[n].constant_term()
            want = closed.eval_rat(s, env) if isinstance(closed, ExpCoeff) else Fraction(closed)
            a.record(got == want, f"w_{n} @ s={s}", got - want)
    return a.report(spec, params, {"probes": [str(p) for p in spec.probes]})


def check_prop1(spec: CheckSpec, env: ParamEnv, c: CVector, alphas=(Fraction(1, 2), Fraction(1, 3))) -> VerificationReport:
    """Initial Lax operator, its fractional powers and logarithm, in closed form."""
    a = Assertions()
    params = env.describe() | {"c": ",".join(str(v) for v in c.values[: spec.n_cut])}
    w0 = build_W0(c, env, spec.n_cut)

    # round trip: log1p recovers the exponent operator
    arg = DiffOp.zero(floor=w0.floor)
    for k in range(1, spec.n_cut + 1):
        if c[k]:
            arg = arg + DiffOp({-k: exp_weight_term(-c[k], k, env)}, floor=w0.floor)
    a.zero_exp_op(op_log1p(w0 - DiffOp.identity(w0.floor)) - arg, "W0 exp/log round trip")

    # route independence: conjugation formula vs raw product chain
    l0 = conjugate_shift(w0, 1)
    l0_chain = op_mul(op_mul(w0, DiffOp.lam_power(1, w0.floor)), op_inv(w0))
    a.equal_exp_ops(l0, l0_chain, "L0 route independence")

    # closed forms
    a.equal_exp_ops(l0, closed_L0_alpha(c, env, 1, spec.n_cut), "L0 closed form")
    for alpha in alphas:
        got = conjugate_shift(w0, alpha)
        a.equal_exp_ops(got, closed_L0_alpha(c, env, alpha, spec.n_cut), f"L0^{alpha} closed form")
    a.equal_exp_ops(op_log_dressed(w0), closed_log_tail(c, env, spec.n_cut), "log L0 tail")

    # conjugation rule e^{beta(s-1/2)^2/2} L^-k e^{-...} = e^{-beta k(k+1)/2} e^{beta k s} L^-k
    u = ExpCoeff.term(1, c0=Fraction(1, 8), p1=Fraction(-1, 2), p2=Fraction(1, 2), env=env)
    u_op = DiffOp({0: u}, floor=w0.floor)
    u_inv_op = DiffOp({0: u.inv()}, floor=w0.floor)
    for k in range(1, spec.n_cut + 1):
        lhs = op_mul(op_mul(u_op, DiffOp({-k: Fraction(1)}, floor=w0.floor)), u_inv_op)
        rhs = DiffOp({-k: ExpCoeff.term(1, c0=Fraction(-k * (k + 1), 2), p1=k, env=env)},
                     floor=w0.floor)
        a.equal_exp_ops(lhs, rhs, f"quadratic conjugation rule k={k}")

    # rewritten (conjugated) forms of the same closed expressions
    for alpha in alphas:
        inner = DiffOp.zero(floor=w0.floor)
        for k in range(1, spec.n_cut + 1):
            if c[k]:
                term = ExpCoeff.term(c[k], jq=k, env=env) + ExpCoeff.term(
                    -c[k], c0=-alpha * k, jq=k, env=env
                )
                inner = inner + DiffOp({-k: term}, floor=w0.floor)
        bis = lam_mul_left(op_mul(op_mul(u_op, op_exp(inner)), u_inv_op), alpha)
        a.equal_exp_ops(conjugate_shift(w0, alpha), bis, f"L0^{alpha} conjugated form")
    inner = DiffOp.zero(floor=w0.floor)
    for k in range(1, spec.n_cut + 1):
        if c[k]:
            inner = inner + DiffOp({-k: ExpCoeff.term(k * c[k], jq=k, d=1, env=env)},
                                   floor=w0.floor)
    bis_tail = op_mul(op_mul(u_op, inner), u_inv_op)
    a.equal_exp_ops(op_log_dressed(w0), bis_tail, "log L0 conjugated tail")

    return a.report(spec, params)


def _assert_band(a: Assertions, x: DiffOp, band, label: str):
    """Coefficients inside ``band`` must be nonzero, all others zero (within validity)."""
    lo = x.assertable_from()
    band = set(Fraction(b) for b in band)
    for alpha in band:
        a.record(not c_is_zero(x.coeff(alpha)), f"{label}: expected nonzero at shift {alpha}",
                 x.coeff(alpha))
    for alpha, c in sorted(x.coeffs.items()):
        if alpha < lo or alpha in band:
            continue
        a.record(c_is_zero(c), f"{label}: off-band shift {alpha}", c)


def check_case(spec: CheckSpec, env: ParamEnv, case: str) -> VerificationReport:
    """The closed operator shape of each specialization."""
    a = Assertions()
    params = env.describe() | {"case": case}
    floor = Fraction(-spec.n_cut)
    kc = max(spec.cap, spec.n_cut)

    if case == "a":
        c = cvector("a", env, kc)
        tail = op_log_dressed(build_W0(c, env, spec.n_cut))
        expected = DiffOp({-1: exp_weight_term(1, 1, env, d=1)}, floor=floor)
        a.equal_exp_ops(tail, expected, "single-term log tail")

    elif case == "b":
        c = cvector("b", env, kc)
        tail = op_log_dressed(build_W0(c, env, spec.n_cut))
        # beta a Q e^{beta(s-1)} L^-1 (1 - Q e^{beta(s-1)} L^-1)^{-1}, expanded
        v = ExpCoeff.term(1, c0=-1, p1=1, jq=1, env=env)
        head = DiffOp({-1: ExpCoeff.term(env.a, c0=-1, p1=1, jq=1, d=1, env=env)}, floor=floor)
        geom = op_inv(DiffOp({0: Fraction(1), -1: -v}, floor=floor))
        a.equal_exp_ops(tail, op_mul(head, geom), "rational log tail")

    elif case == "c":
        c = cvector("c", env, kc)
        w0 = build_W0(c, env, spec.n_cut)
        alpha = env.alpha_frac
        got = conjugate_shift(w0, alpha)
        rhs = banded_product([framed_factor(env)], floor, trailing_alpha=alpha)
        a.equal_exp_ops(got, rhs, "two-term fractional power")
        if alpha.denominator > 1 or alpha > 1:
            # rational framing: integer power collapses to a finite band
            N, M = alpha.numerator, alpha.denominator
            if N > M:
                ln = op_pow(got, M)
                _assert_band(a, ln, [Fraction(N - j) for j in range(M + 1)], f"L0^{N} band")

    elif case == "d":
        c = cvector("d", env, kc)
        w0 = build_W0(c, env, spec.n_cut)
        alpha = env.alpha_frac
        x = lam_mul_right(conjugate_shift(w0, alpha), -alpha)
        cop = DiffOp({0: Fraction(1), -1: -framed_factor(env, env.a)}, floor=floor)
        bop = DiffOp({0: Fraction(1), -1: -framed_factor(env)}, floor=floor)
        a.equal_exp_ops(op_mul(x, cop), bop, "factored form, multiplied out")

    elif case == "gbin":
        c = cvector("gbin", env, kc)
        w0 = build_W0(c, env, spec.n_cut)
        alpha = env.alpha_frac
        x = lam_mul_right(conjugate_shift(w0, alpha), -alpha)
        prod = banded_product([framed_factor(env, b) for b in env.b_exps], floor)
        a.equal_exp_ops(x, prod, "product form")

    elif case == "gbin_finite":
        c = cvector("gbin_finite", env, kc)
        n_band = max((k for k in range(1, len(c) + 1) if c[k]), default=0)
        tail = op_log_dressed(build_W0(c, env, spec.n_cut))
        a.record(not c_is_zero(tail.coeff(Fraction(-n_band))),
                 f"finite log tail: expected nonzero at shift {-n_band}",
                 tail.coeff(Fraction(-n_band)))
        lo = tail.assertable_from()
        for alpha, coeff in sorted(tail.coeffs.items()):
            if lo <= alpha < -n_band:
                a.record(c_is_zero(coeff), f"finite log tail: off-band shift {alpha}", coeff)

    elif case == "grr":
        c = cvector("grr", env, kc)
        w0 = build_W0(c, env, spec.n_cut)
        alpha = env.alpha_frac
        x = lam_mul_right(conjugate_shift(w0, alpha), -alpha)
        cop = banded_product([framed_factor(env, x_) for x_ in env.a_exps], floor)
        bop = banded_product([framed_factor(env, b) for b in env.b_exps], floor)
        a.equal_exp_ops(op_mul(x, cop), bop, "rational form, multiplied out")

    else:
        raise LabError(f"unknown case {case!r}")

    return a.report(spec, params)


def check_scaling_trend(spec: CheckSpec, env: ParamEnv, a_values=(100, 1000, 10000)) -> VerificationReport:
    """Case (b) log tail collapses to the case-(a) tail as a grows, Q = kappa/a.

    Float mode (the only non-exact check): the worst coefficient deviation
    must shrink by at least 5x per decade of a.
    """
    asr = Assertions()
    kap = env.kappa if env.kappa is not None else Fraction(1)
    params = env.describe() | {"a_values": ",".join(str(v) for v in a_values)}
    s_probe = 1.0
    beta = env.beta_float()
    if kap == 0:
        for a_val in a_values:
            asr.record(True, f"kappa=0 tail identically zero at a={a_val}")
        return asr.report(spec, params)

    def tail_b(a_val, k):
        # beta * a * Q^k * e^{-beta k(k+1)/2} e^{beta k s}, Q = kappa/a
        import math

        Q = float(kap) / a_val
        return beta * a_val * Q**k * math.exp(beta * (-k * (k + 1) / 2 + k * s_probe))

    def tail_a(k):
        import math

        if k != 1:
            return 0.0
        return beta * float(kap) * math.exp(beta * (s_probe - 1))

    deviations = []
    per_k = {}
    for a_val in a_values:
        devs = [abs(tail_b(a_val, k) - tail_a(k)) for k in range(1, spec.n_cut + 1)]
        per_k[a_val] = devs
        deviations.append(max(devs))
    for i in range(len(a_values) - 1):
        ratio = deviations[i] / deviations[i + 1] if deviations[i + 1] else float("inf")
        asr.record(ratio >= 5.0, f"decade {a_values[i]} -> {a_values[i+1]} shrink ratio {ratio:.2f}",
                   Fraction(1))
    asr.note(f"worst deviations per a: {[f'{d:.3e}' for d in deviations]}")
    asr.note("the L^-1 coefficients agree identically; the trend is carried by L^-2 ~ 1/a")
    return asr.report(spec, params, {"deviations": {str(k): f"{v:.6e}" for k, v in zip(a_values, deviations)}})
