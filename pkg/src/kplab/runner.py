"""Check registry and batch runner.

Exact-mode checks are replicated at several independent random parameter
points (Schwartz-Zippel style confidence); a pass requires success at every
point.  Reports are merged deterministically by check id, and identical
config plus seed yields byte-identical output.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .config import RunConfig, env_from_config
from .errors import ConfigError, LabError
from .flows import (
    check_lax_residual,
    check_prop2_PQR,
    check_prop3_BC_flow,
    check_prop4_CC_flow,
    check_reduction_persistence,
    check_wave_linear,
)
from .schur import CVector
from .verify import (
    CheckSpec,
    VerificationReport,
    check_case,
    check_factorization_initial,
    check_prop1,
    check_scaling_trend,
    report_from_error,
)

CASE_CHECKS = {
    "a": ("prop1", "init", "case", "lax", "wave"),
    "b": ("prop1", "init", "case", "ccflow", "trend"),
    "c": ("prop1", "init", "case", "lax", "persist"),
    "d": ("prop1", "init", "case", "bcflow"),
    "gbin": ("case",),
    "gbin_finite": ("case",),
    "grr": ("case",),
}

EXACT_CHECKS = ("init", "prop1", "case", "lax", "persist", "pqr", "bcflow", "ccflow", "wave")


def _spec(check_id: str, cfg: RunConfig, **kw) -> CheckSpec:
    base = dict(cap=cfg.cap, n_cut=cfg.n_cut, nvars=cfg.nvars, window=cfg.window,
                seed=cfg.seed, points=cfg.points)
    base.update(kw)
    return CheckSpec(check_id=check_id, **base)


def _rand_cvector(rng, kc: int) -> CVector:
    vals = [Fraction(rng.randint(-4, 4), rng.randint(1, 5)) for _ in range(kc)]
    if not any(vals):
        vals[0] = Fraction(1)
    return CVector(vals)


def _expand(check: str, case: str | None) -> list:
    if check != "all":
        return [(check, case)]
    if case is None:
        raise ConfigError("verify all needs a case")
    return [(c, case) for c in CASE_CHECKS[case]]


def plan_jobs(check: str, cfg: RunConfig) -> list:
    """[(job_id, callable)] for the requested check(s), replicated per point."""
    jobs = []
    for chk, case in _expand(check, cfg.case):
        n_points = cfg.points if chk in EXACT_CHECKS else 1
        if chk in ("bcflow",) and case is None:
            case = "d"
        if chk in ("ccflow", "trend") and case is None:
            case = "b"
        for pt in range(n_points):
            job_id = f"{chk}:{case or '-'}:pt{pt}"
            jobs.append((job_id, _make_job(chk, case, cfg, job_id, pt)))
    return jobs


def _make_job(chk: str, case: str | None, cfg: RunConfig, job_id: str, pt: int):
    def job() -> VerificationReport:
        rng = random.Random((cfg.seed, chk, case, pt).__repr__())
        spec = _spec(job_id, cfg)
        try:
            if chk == "prop1":
                env = env_from_config(cfg, "a", rng)
                c = _rand_cvector(rng, max(cfg.cap, cfg.n_cut))
                return check_prop1(spec, env, c)
            if chk == "case":
                env = env_from_config(cfg, case, rng)
                return check_case(spec, env, case)
            if chk == "init":
                env = env_from_config(cfg, case, rng)
                spec.probes = (-2, -1, 0, 1, 2)
                return check_factorization_initial(spec, env, case)
            if chk == "lax":
                env = env_from_config(cfg, case, rng)
                return check_lax_residual(spec, env, case, probes=(0, 1))
            if chk == "persist":
                env = env_from_config(cfg, "c", rng)
                fp1 = env.f + 1
                probes = (0, Fraction(1, int(fp1)) if fp1.denominator == 1 else Fraction(0), 1)
                return check_reduction_persistence(spec, env, deg_check=min(cfg.cap, 4),
                                                   probes=probes)
            if chk == "pqr":
                f = int(cfg.params.get("f", 1 + pt % 2))
                n_band = 1 + (pt + 1) % 2
                return check_prop2_PQR(spec, f=f, n_band=n_band, trials=7,
                                       seed=f"{cfg.seed}:{pt}")
            if chk == "bcflow":
                import dataclasses

                cfg_d = dataclasses.replace(cfg, params={**cfg.params, "f": Fraction(0)})
                env = env_from_config(cfg_d, "d", rng)
                spec.k_range = tuple(k for k in spec.k_range if k <= 2)
                return check_prop3_BC_flow(spec, env, probes=(0, 1))
            if chk == "ccflow":
                env = env_from_config(cfg, "b", rng)
                spec.k_range = tuple(k for k in spec.k_range if k <= 2)
                return check_prop4_CC_flow(spec, env, probes=(0, 1))
            if chk == "wave":
                env = env_from_config(cfg, case, rng)
                return check_wave_linear(spec, env, case, probes=(0, 1))
            if chk == "trend":
                env = env_from_config(cfg, "b", rng)
                spec.trend = True
                return check_scaling_trend(spec, env)
            raise ConfigError(f"unknown check {chk!r}")
        except LabError as exc:
            return report_from_error(spec, {"case": case or "-"}, exc)

    return job


def run_checks(check: str, cfg: RunConfig) -> list:
    """Run the requested checks; reports sorted by job id, deterministic."""
    jobs = plan_jobs(check, cfg)
    workers = int(os.environ.get("KPLAB_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda j: (j[0], j[1]()), jobs))
    else:
        results = [(job_id, job()) for job_id, job in jobs]
    results.sort(key=lambda r: r[0])
    return [rep for _, rep in results]


def summarize(reports: list) -> dict:
    by_verdict = {"pass": 0, "fail": 0, "inconclusive": 0}
    for rep in reports:
        v = rep["verdict"] if isinstance(rep, dict) else rep.verdict
        by_verdict[v] = by_verdict.get(v, 0) + 1
    return {
        "schema": "kplab-summary/1",
        "total": len(reports),
        "by_verdict": by_verdict,
        "all_pass": by_verdict["fail"] == 0 and by_verdict["inconclusive"] == 0,
        "any_fail": by_verdict["fail"] > 0,
        "any_inconclusive": by_verdict["inconclusive"] > 0,
    }
