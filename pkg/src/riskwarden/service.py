"""HTTP facade over the registry and assessment modules.

Every endpoint delegates 1:1 to a library operation. Mutations funnel
through a single lock (single-writer contract); assessments run on the
in-memory snapshot. Library errors map to stable machine-readable codes.
"""

from __future__ import annotations

import os
import threading
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import assessment, dynamics as dyn, registry
from .assessment import CycleConfig, Intervention, WhatIfScenario
from .core import Dynamics, Observation, ObservationKind, Origin, Presence
from .errors import (
    DuplicateId,
    MalformedTable,
    ParseError,
    RiskwardenError,
    UnknownRisk,
)
from .reporting import cycle_to_dict, format_sig12, report_to_dict

_STATUS_BY_ERROR = {
    UnknownRisk: 404,
    DuplicateId: 409,
    ParseError: 422,
    MalformedTable: 422,
}


def _status_for(exc: RiskwardenError) -> int:
    for klass, status in _STATUS_BY_ERROR.items():
        if isinstance(exc, klass):
            return status
    return 400


def _risk_payload(risk) -> dict:
    payload = registry._risk_to_dict(risk)
    payload["score_str"] = format_sig12(risk.score)
    return payload


def _event_payload(event: dyn.TransitionEvent) -> dict:
    return {
        "risk_id": event.risk_id,
        "t": event.t,
        "kind": event.kind.value,
        "before": registry._snapshot_dict(event.before),
        "after": registry._snapshot_dict(event.after),
    }


def create_app(register_path: str, cors_origin: Optional[str] = None) -> FastAPI:
    register = registry.load_register(register_path)
    write_lock = threading.Lock()
    app = FastAPI(title="riskwarden")

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RiskwardenError)
    async def _handle_engine_error(_request: Request, exc: RiskwardenError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"code": exc.code, "message": exc.message},
        )

    @app.exception_handler(404)
    async def _handle_404(_request: Request, exc):
        return JSONResponse(status_code=404,
                            content={"code": "not_found", "message": "not found"})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "risks": len(register.risks)}

    @app.get("/risks")
    def get_risks(active_only: bool = False, offset: int = 0,
                  limit: Optional[int] = None):
        risks = registry.list_risks(register, active_only=active_only)
        if offset or limit is not None:
            risks = risks[offset:offset + limit if limit is not None else None]
        return {"risks": [_risk_payload(r) for r in risks]}

    @app.get("/risks/{risk_id}")
    def get_risk(risk_id: str):
        return _risk_payload(registry.get_risk(register, risk_id))

    @app.post("/risks", status_code=201)
    async def post_risk(request: Request):
        body = await request.json()
        driver = body.get("driver")
        if isinstance(driver, dict):
            driver_value = float(driver["value"])
        else:
            driver_value = float(driver)
        risk = dyn.build_risk(
            risk_id=body["id"],
            name=body["name"],
            sphere=body.get("sphere", ""),
            origin=Origin(body["origin"]),
            presence=Presence(body["presence"]),
            driver_value=driver_value,
            dynamics=Dynamics(body.get("dynamics", "growing")),
            dependencies=tuple(body.get("dependencies", ())),
        )
        with write_lock:
            registry.add_risk(register, risk)
        return _risk_payload(risk)

    @app.patch("/risks/{risk_id}")
    async def patch_risk(risk_id: str, request: Request):
        body = await request.json()
        with write_lock:
            updated = registry.update_risk_metadata(
                register, risk_id,
                name=body.get("name"),
                sphere=body.get("sphere"),
                dependencies=body.get("dependencies"),
            )
        return _risk_payload(updated)

    @app.post("/risks/{risk_id}/retire")
    def retire(risk_id: str):
        with write_lock:
            updated = registry.retire_risk(register, risk_id)
        return _risk_payload(updated)

    @app.post("/risks/{risk_id}/observations")
    async def post_observation(risk_id: str, request: Request):
        body = await request.json()
        obs = Observation(
            t=float(body["t"]),
            kind=ObservationKind(body["kind"]),
            value=float(body["value"]),
            note=body.get("note"),
        )
        with write_lock:
            events = registry.record_observation(
                register, risk_id, obs,
                materialized=bool(body.get("materialized", False)),
                declare_catastrophic=bool(body.get("declare_catastrophic", False)),
            )
        return {"events": [_event_payload(e) for e in events],
                "risk": _risk_payload(register.risks[risk_id])}

    @app.post("/observations/import")
    async def import_csv(request: Request):
        table = (await request.body()).decode("utf-8")
        with write_lock:
            accepted, rejects = registry.import_observations(register, table)
        return {
            "accepted": accepted,
            "rejected": [{"row": r.row, "reason": r.reason} for r in rejects],
        }

    @app.get("/assessment")
    def get_assessment():
        report = assessment.assess(register.risks.values(),
                                   horizon_periods=register.horizon.periods)
        return report_to_dict(report)

    @app.post("/whatif")
    async def post_whatif(request: Request):
        body = await request.json()
        interventions = tuple(
            Intervention(
                risk_id=step["risk_id"],
                new_driver=step.get("new_driver"),
                remove=bool(step.get("remove", False)),
            )
            for step in body.get("interventions", ())
        )
        scenario = WhatIfScenario(interventions=interventions,
                                  label=body.get("label", ""))
        report = assessment.what_if(register.risks.values(), scenario,
                                    horizon_periods=register.horizon.periods)
        return report_to_dict(report)

    @app.post("/cycle")
    async def post_cycle(request: Request):
        body = await request.json() if await request.body() else {}
        config = CycleConfig(
            stage_label=body.get("stage", register.horizon.stage),
            periods=float(body.get("periods", register.horizon.periods)),
            taxonomy=tuple(body.get("taxonomy", register.taxonomy)),
        )
        report = assessment.run_cycle(register.risks.values(), config)
        return cycle_to_dict(report)

    @app.get("/events")
    def get_events(since: Optional[float] = None):
        return {"events": registry.read_events(register, since)}

    return app


def serve(register_path: str, addr: str = "127.0.0.1:8550",
          cors_origin: Optional[str] = None) -> None:
    """Run the service until interrupted. Raises at startup on a bad
    register file or an unusable bind address."""
    import uvicorn

    host, _, port = addr.rpartition(":")
    app = create_app(register_path, cors_origin=cors_origin)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


def main() -> None:
    serve(
        os.environ["RISKWARDEN_REGISTER"],
        addr=os.environ.get("RISKWARDEN_ADDR", "127.0.0.1:8550"),
        cors_origin=os.environ.get("RISKWARDEN_CORS_ORIGIN"),
    )
