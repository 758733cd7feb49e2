"""Stateless HTTP facade over the same payload builders the CLI uses.

Every endpoint is a pure function of its request body (and the embedded
seed), so repeated requests return identical bodies and responses match
the CLI's json artifacts number for number.  Errors carry {code, message,
field_path?}: 400 for schema violations, 422 for domain errors, 504 when
a simulation exhausts the server's wall-clock budget.
"""

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .artifacts import (
    deaths_payload,
    guideline_payload,
    oc_payload,
    simulate_payload,
)
from .document import DocumentError, resolve_document
from .trial import SimulationBudgetError, UnreachableTargetError

# synchronous simulation keeps the service stateless; these bounds keep
# one request from monopolizing it
SIM_REPS_CAP = 200_000
SIM_TIME_BUDGET_S = 60.0

app = FastAPI(title="osmon", version=__version__)


def _error(status: int, code: str, message: str, field_path: str = "") -> JSONResponse:
    body = {"code": code, "message": message}
    if field_path:
        body["field_path"] = field_path
    return JSONResponse(body, status_code=status)


def _resolve_body(body: bytes):
    try:
        raw = json.loads(body)
    except json.JSONDecodeError as exc:
        raise DocumentError("invalid_json", f"body is not valid json: {exc}")
    return resolve_document(raw)


def _respond(body: bytes, build) -> JSONResponse:
    try:
        payload = build(_resolve_body(body))
    except DocumentError as exc:
        return _error(400, exc.code, exc.message, exc.field_path)
    except UnreachableTargetError as exc:
        return _error(422, "unreachable_target", str(exc))
    except SimulationBudgetError as exc:
        return _error(504, "time_budget_exceeded", str(exc))
    except ValueError as exc:
        return _error(422, "domain_error", str(exc))
    return JSONResponse(payload)


@app.post("/api/v1/guideline")
async def handle_guideline(request: Request) -> JSONResponse:
    return _respond(await request.body(), guideline_payload)


@app.post("/api/v1/oc")
async def handle_oc(request: Request) -> JSONResponse:
    return _respond(await request.body(), oc_payload)


@app.post("/api/v1/deaths")
async def handle_deaths(
    request: Request, horizon_months: float = 120.0, step_months: float = 6.0
) -> JSONResponse:
    def build(resolved):
        payload = deaths_payload(resolved, horizon_months, step_months)
        unreachable = [m for m in payload["milestones"] if not m["reachable"]]
        if unreachable:
            raise UnreachableTargetError(
                "milestones cannot be reached: "
                + ", ".join(f"{m['label']} ({m['deaths']} deaths)" for m in unreachable)
            )
        return payload

    return _respond(await request.body(), build)


@app.post("/api/v1/simulate")
async def handle_simulate(request: Request) -> JSONResponse:
    def build(resolved):
        if resolved.sim is not None and resolved.sim.reps > SIM_REPS_CAP:
            raise ValueError(
                f"reps must not exceed the server cap of {SIM_REPS_CAP}, "
                f"got {resolved.sim.reps}"
            )
        return simulate_payload(resolved, time_budget_s=SIM_TIME_BUDGET_S)

    return _respond(await request.body(), build)


@app.get("/api/v1/health")
async def health() -> JSONResponse:
    return JSONResponse({"status": "ok", "version": __version__})
