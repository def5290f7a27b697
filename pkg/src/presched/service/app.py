"""HTTP facade over the scheduling core.

Every endpoint is a thin adapter: parse JSON payloads with the serialize
module, call the library, serialize the result back.  Coded errors map to
HTTP 400 with {"code", "message"} bodies so clients can branch cleanly.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import serialize
from ..baselines import (
    brute_force_optimal,
    lts_brute_force,
    lts_cost,
    run_greedy,
    scs_brute_force,
)
from ..core import check_feasible
from ..errors import SchedError
from ..experiments import (
    build_family_instance,
    experiment_competitive,
    gantt_text,
    to_csv,
)
from ..generators import OnlineInstance, as_online
from ..onl import run_onl
from ..reductions import (
    lts_instance_of_map,
    lts_prep,
    lts_to_rs,
    schedule_to_lts_solution,
    schedule_to_supersequence,
    scs_to_rs,
)
from . import schemas


def _as_online(data: dict) -> OnlineInstance:
    inst, meta = serialize.instance_from_json(data)
    if meta and "family" in meta:
        return OnlineInstance(inst, meta)
    return as_online(inst)


def create_app() -> FastAPI:
    app = FastAPI(title="presched", version="0.1.0")

    @app.exception_handler(SchedError)
    async def _sched_error(_: Request, err: SchedError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"code": err.code, "message": err.detail}
        )

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"ok": True}

    @app.post("/gen")
    async def gen(req: schemas.GenRequest) -> dict:
        online = build_family_instance(req.family, req.params, req.seed)
        return serialize.online_to_json(online)

    @app.post("/run", response_model=schemas.RunResponse)
    async def run(req: schemas.RunRequest) -> schemas.RunResponse:
        online = _as_online(req.instance)
        if req.scheduler == "onl":
            sched, trace = run_onl(online)
            return schemas.RunResponse(
                scheduler="onl",
                makespan=trace.makespan,
                schedule=serialize.schedule_to_json(sched),
                trace=serialize.trace_to_json(trace),
            )
        if req.scheduler == "greedy":
            sched, log = run_greedy(online)
            return schemas.RunResponse(
                scheduler="greedy",
                makespan=log.makespan,
                schedule=serialize.schedule_to_json(sched),
            )
        raise SchedError("BAD_PARAMS", f"unknown scheduler {req.scheduler!r}")

    @app.post("/verify", response_model=schemas.VerifyResponse)
    async def verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
        inst, _ = serialize.instance_from_json(req.instance)
        sched = serialize.schedule_from_json(req.schedule)
        report = check_feasible(inst, sched)
        body = serialize.feasibility_to_json(report)
        return schemas.VerifyResponse(**body)

    @app.post("/oracle/rs", response_model=schemas.OracleRsResponse)
    async def oracle_rs(req: schemas.OracleRsRequest) -> schemas.OracleRsResponse:
        inst, _ = serialize.instance_from_json(req.instance)
        value, sched = brute_force_optimal(inst, limit=req.limit)
        return schemas.OracleRsResponse(
            makespan=value, schedule=serialize.schedule_to_json(sched)
        )

    @app.post("/oracle/scs", response_model=schemas.OracleScsResponse)
    async def oracle_scs(req: schemas.OracleScsRequest) -> schemas.OracleScsResponse:
        scs = serialize.scs_from_json(req.scs)
        length, z = scs_brute_force(scs, limit=req.limit)
        return schemas.OracleScsResponse(length=length, supersequence=list(z))

    @app.post("/oracle/lts", response_model=schemas.OracleLtsResponse)
    async def oracle_lts(req: schemas.OracleLtsRequest) -> schemas.OracleLtsResponse:
        lts = serialize.lts_from_json(req.lts)
        cost, solution = lts_brute_force(lts, limit=req.limit)
        return schemas.OracleLtsResponse(
            cost=cost, solution=serialize.lts_solution_to_json(solution)
        )

    @app.post("/reduce/scs-to-rs", response_model=schemas.ReduceResponse)
    async def reduce_scs(req: schemas.ScsToRsRequest) -> schemas.ReduceResponse:
        scs = serialize.scs_from_json(req.scs)
        inst, rmap = scs_to_rs(scs)
        return schemas.ReduceResponse(
            instance=serialize.instance_to_json(inst),
            map=serialize.reduction_map_to_json(rmap),
        )

    @app.post("/reduce/lts-prep", response_model=schemas.LtsPrepResponse)
    async def reduce_lts_prep(req: schemas.LtsRequest) -> schemas.LtsPrepResponse:
        lts = serialize.lts_from_json(req.lts)
        prep = lts_prep(lts)
        body = serialize.lts_prep_to_json(prep)
        return schemas.LtsPrepResponse(**body)

    @app.post("/reduce/lts-to-rs", response_model=schemas.ReduceResponse)
    async def reduce_lts(req: schemas.LtsRequest) -> schemas.ReduceResponse:
        lts = serialize.lts_from_json(req.lts)
        inst, rmap = lts_to_rs(lts)
        return schemas.ReduceResponse(
            instance=serialize.instance_to_json(inst),
            map=serialize.reduction_map_to_json(rmap),
        )

    @app.post("/lift/supersequence", response_model=schemas.LiftSupersequenceResponse)
    async def lift_supersequence(
        req: schemas.LiftRequest,
    ) -> schemas.LiftSupersequenceResponse:
        rmap = serialize.reduction_map_from_json(req.map)
        sched = serialize.schedule_from_json(req.schedule)
        z = schedule_to_supersequence(rmap, sched)
        return schemas.LiftSupersequenceResponse(supersequence=list(z))

    @app.post("/lift/lts", response_model=schemas.LiftLtsResponse)
    async def lift_lts(req: schemas.LiftRequest) -> schemas.LiftLtsResponse:
        rmap = serialize.reduction_map_from_json(req.map)
        sched = serialize.schedule_from_json(req.schedule)
        solution = schedule_to_lts_solution(rmap, sched)
        lts = lts_instance_of_map(rmap)
        return schemas.LiftLtsResponse(
            solution=serialize.lts_solution_to_json(solution),
            cost=lts_cost(lts, solution),
        )

    @app.post("/experiment", response_model=schemas.ExperimentResponse)
    async def experiment(req: schemas.ExperimentRequest) -> schemas.ExperimentResponse:
        report = experiment_competitive(
            family=req.family,
            grid=req.grid,
            schedulers=req.schedulers,
            trials=req.trials,
            seed_base=req.seed_base,
        )
        return schemas.ExperimentResponse(
            report=serialize.report_to_json(report), csv=to_csv(report)
        )

    @app.post("/gantt", response_model=schemas.GanttResponse)
    async def gantt(req: schemas.GanttRequest) -> schemas.GanttResponse:
        inst, _ = serialize.instance_from_json(req.instance)
        sched = serialize.schedule_from_json(req.schedule)
        return schemas.GanttResponse(text=gantt_text(inst, sched, width=req.width))

    return app


app = create_app()

__all__ = ["app", "create_app"]
