"""Pydantic request/response models for the verification service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class CapsModel(BaseModel):
    cap: int = 6
    n_cut: int = 6
    nvars: int = 6
    window_lo: int = -40
    window_hi: int = 12


class SchurRequest(BaseModel):
    family: str = "a"
    max_size: int = Field(4, ge=0, le=10)
    params: dict[str, str] = Field(default_factory=dict)


class SchurRow(BaseModel):
    partition: list[int]
    value: str
    closed: Optional[str] = None


class SchurResponse(BaseModel):
    family: str
    rows: list[SchurRow]


class TauRequest(BaseModel):
    case: str = "a"
    s_values: list[str] = Field(default_factory=lambda: ["-1", "0", "1"])
    params: dict[str, str] = Field(default_factory=dict)
    caps: CapsModel = Field(default_factory=CapsModel)
    seed: int = 1


class TauRow(BaseModel):
    s: str
    monomial: str
    value: str


class WeightRow(BaseModel):
    s: str
    partition: list[int]
    h_weight: str


class WaveRow(BaseModel):
    s: str
    n: int
    monomial: str
    value: str


class TauResponse(BaseModel):
    case: str
    tau: list[TauRow]
    weights: list[WeightRow]
    wave: list[WaveRow]


class VerifyRequest(BaseModel):
    check: str = "all"
    case: Optional[str] = None
    params: dict[str, str] = Field(default_factory=dict)
    caps: CapsModel = Field(default_factory=CapsModel)
    seed: int = 1
    points: int = Field(3, ge=1, le=10)


class ReportModel(BaseModel):
    schema_version: str = Field("kplab-report/1", alias="schema")
    id: str
    verdict: str
    asserted_count: int
    worst_residual: Optional[str] = None
    params: dict
    caps: dict
    details: dict = Field(default_factory=dict)

    model_config = {"populate_by_name": True}


class VerifyResponse(BaseModel):
    reports: list[ReportModel]
    summary: dict


class MergeRequest(BaseModel):
    reports: list[ReportModel]


class MergeResponse(BaseModel):
    summary: dict
    reports: list[ReportModel]


class ErrorResponse(BaseModel):
    error: str
    kind: str
