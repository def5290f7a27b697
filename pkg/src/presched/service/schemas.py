"""Request and response models for the HTTP service.

Domain payloads (instances, schedules, maps) travel as plain JSON objects
in the shapes defined by presched.serialize; models here pin the envelope
and leave deep validation to the parsers, which raise coded errors.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class GenRequest(BaseModel):
    family: str
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = 0


class RunRequest(BaseModel):
    instance: dict[str, Any]
    scheduler: str = "onl"


class RunResponse(BaseModel):
    scheduler: str
    makespan: int
    schedule: dict[str, Any]
    trace: Optional[dict[str, Any]] = None


class VerifyRequest(BaseModel):
    instance: dict[str, Any]
    schedule: dict[str, Any]


class VerifyResponse(BaseModel):
    feasible: bool
    violations: list[dict[str, Any]]


class OracleRsRequest(BaseModel):
    instance: dict[str, Any]
    limit: int = 9


class OracleRsResponse(BaseModel):
    makespan: int
    schedule: dict[str, Any]


class OracleScsRequest(BaseModel):
    scs: dict[str, Any]
    limit: int = 25


class OracleScsResponse(BaseModel):
    length: int
    supersequence: list[int]


class OracleLtsRequest(BaseModel):
    lts: dict[str, Any]
    limit: int = 15


class OracleLtsResponse(BaseModel):
    cost: int
    solution: dict[str, Any]


class ScsToRsRequest(BaseModel):
    scs: dict[str, Any]


class LtsRequest(BaseModel):
    lts: dict[str, Any]


class ReduceResponse(BaseModel):
    instance: dict[str, Any]
    map: dict[str, Any]


class LtsPrepResponse(BaseModel):
    instance: dict[str, Any]
    dropped: list[int]
    iterations: int


class LiftRequest(BaseModel):
    map: dict[str, Any]
    schedule: dict[str, Any]


class LiftSupersequenceResponse(BaseModel):
    supersequence: list[int]


class LiftLtsResponse(BaseModel):
    solution: dict[str, Any]
    cost: int


class ExperimentRequest(BaseModel):
    family: str
    grid: list[dict[str, Any]]
    schedulers: list[str] = Field(default_factory=lambda: ["onl"])
    trials: int = 10
    seed_base: int = 0


class ExperimentResponse(BaseModel):
    report: dict[str, Any]
    csv: str


class GanttRequest(BaseModel):
    instance: dict[str, Any]
    schedule: dict[str, Any]
    width: int = 64


class GanttResponse(BaseModel):
    text: str
