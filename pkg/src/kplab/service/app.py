"""FastAPI service wrapping the laboratory.

The CLI talks to this app in-process by default; `kplab serve` exposes the
same endpoints over HTTP for long-running or multi-client use.
"""

from __future__ import annotations

import random

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import RunConfig, env_from_config
from ..errors import ConfigError, LabError
from ..runner import run_checks, summarize
from ..scalars import parse_rat
from ..tables import schur_table, tau_table
from .models import (
    MergeRequest,
    MergeResponse,
    ReportModel,
    SchurRequest,
    SchurResponse,
    TauRequest,
    TauResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(title="kplab", version=__version__,
              description="Exact-arithmetic verification laboratory for lattice KP tau functions")


@app.exception_handler(LabError)
async def lab_error_handler(request, exc: LabError):
    status = 422 if isinstance(exc, ConfigError) else 409
    return JSONResponse(status_code=status,
                        content={"error": str(exc), "kind": type(exc).__name__})


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/v1/schur", response_model=SchurResponse)
def schur(req: SchurRequest):
    cfg = RunConfig.from_params(req.params, case=None)
    env = None
    if req.family != "a" or any(k in cfg.params for k in ("g", "x", "q", "sigma", "base")):
        rng = random.Random(0)
        case_for_env = req.family if req.family in ("c", "d", "gbin", "grr") else "a"
        env = env_from_config(cfg, case_for_env, rng)
    rows = schur_table(req.family, req.max_size, env)
    return SchurResponse(family=req.family, rows=rows)


@app.post("/v1/tau", response_model=TauResponse)
def tau_endpoint(req: TauRequest):
    cfg = RunConfig.from_params(req.params, case=req.case,
                                cap=req.caps.cap, n_cut=req.caps.n_cut, nvars=req.caps.nvars,
                                seed=req.seed)
    rng = random.Random(req.seed)
    env = env_from_config(cfg, req.case, rng)
    s_values = [parse_rat(s) for s in req.s_values]
    tables = tau_table(req.case, s_values, cfg.cap, cfg.n_cut, env, cfg.nvars)
    return TauResponse(case=req.case, **tables)


@app.post("/v1/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    cfg = RunConfig.from_params(
        req.params, case=req.case,
        cap=req.caps.cap, n_cut=req.caps.n_cut, nvars=req.caps.nvars,
        window=(req.caps.window_lo, req.caps.window_hi),
        seed=req.seed, points=req.points,
    )
    reports = [rep.to_json() for rep in run_checks(req.check, cfg)]
    return VerifyResponse(reports=[ReportModel(**r) for r in reports],
                          summary=summarize(reports))


@app.post("/v1/report/merge", response_model=MergeResponse)
def merge(req: MergeRequest):
    reports = sorted(req.reports, key=lambda r: r.id)
    return MergeResponse(summary=summarize([r.model_dump(by_alias=True) for r in reports]),
                         reports=reports)
