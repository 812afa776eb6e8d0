"""HTTP review API.

Read endpoints list stored runs and page through their events; the
single write endpoint appends review verdicts. Every error body has the
same shape: ``{"code": ..., "message": ..., "entity": ...}``.

When a built review UI directory is supplied it is mounted at the root,
after the API routes, so the JSON endpoints keep precedence.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from hazident.events import Event, hazard_triangle
from hazident.report import card_rows, render_card
from hazident.store import (
    AssessmentStatus,
    OpenRun,
    RunCorruptError,
    RunNotFoundError,
    RunStore,
    event_to_record,
)

MAX_LIMIT = 500
DEFAULT_LIMIT = 100

STATUS_PENDING = "pending"


class ApiError(Exception):
    def __init__(self, status_code: int, code: str, message: str, entity: str = ""):
        super().__init__(message)
        self.status_code = status_code
        self.body = {"code": code, "message": message, "entity": entity}


class AssessmentIn(BaseModel):
    status: str
    rationale: str = ""
    assessor: str = ""


def _event_summary(event: Event, status: str) -> dict[str, Any]:
    m = event.malfunction
    return {
        "id": event.id,
        "mode": event.mode,
        "skill": m.skill if m else None,
        "skill_name": m.skill_name if m else None,
        "malfunction_id": m.id if m else None,
        "malfunction": m.description if m else None,
        "scene_id": event.scene.id,
        "failure_count": event.failure_count,
        "relevant": event.relevant,
        "drop_reasons": list(event.drop_reasons),
        "status": status,
    }


def create_app(store_root: Path | str, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="hazident review API", docs_url="/docs")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = RunStore(store_root)
    run_cache: dict[str, OpenRun] = {}

    def open_run(run_id: str) -> OpenRun:
        # Run content is addressed by the config hash, so a cached run
        # never goes stale; assessments are re-read from disk per request.
        if run_id not in run_cache:
            try:
                run_cache[run_id] = store.open_run(run_id)
            except RunNotFoundError as exc:
                raise ApiError(404, "run-not-found", str(exc), run_id) from None
            except RunCorruptError as exc:
                raise ApiError(500, "run-corrupt", str(exc), run_id) from None
        return run_cache[run_id]

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(exc.body, status_code=exc.status_code)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            {"code": "invalid-parameter", "message": str(exc.errors()), "entity": ""},
            status_code=422,
        )

    @app.get("/runs")
    def list_runs() -> dict[str, Any]:
        return {"runs": [asdict(summary) for summary in store.list_runs()]}

    @app.get("/runs/{run_id}/events")
    def list_events(
        run_id: str,
        mode: str | None = None,
        status: str | None = None,
        relevant: bool = True,
        offset: int = 0,
        limit: int = DEFAULT_LIMIT,
    ) -> dict[str, Any]:
        run = open_run(run_id)
        if offset < 0:
            raise ApiError(422, "invalid-parameter", "offset must be non-negative", "offset")
        if not 1 <= limit <= MAX_LIMIT:
            raise ApiError(
                422, "invalid-parameter", f"limit must be between 1 and {MAX_LIMIT}", "limit"
            )
        if mode is not None and all(m.id != mode for m in run.config.modes):
            raise ApiError(422, "invalid-parameter", f"unknown mode {mode!r}", "mode")
        allowed_status = {STATUS_PENDING, *(s.value for s in AssessmentStatus)}
        if status is not None and status not in allowed_status:
            raise ApiError(
                422,
                "invalid-parameter",
                f"unknown status {status!r} (allowed: {', '.join(sorted(allowed_status))})",
                "status",
            )
        latest = run.latest_assessments()

        def status_of(event: Event) -> str:
            assessment = latest.get(event.id)
            return assessment.status.value if assessment else STATUS_PENDING

        selected = [
            event
            for event in run.events
            if event.relevant == relevant
            and (mode is None or event.mode == mode)
            and (status is None or status_of(event) == status)
        ]
        page = selected[offset : offset + limit]
        return {
            "total": len(selected),
            "offset": offset,
            "limit": limit,
            "events": [_event_summary(event, status_of(event)) for event in page],
        }

    @app.get("/runs/{run_id}/events/{event_id}")
    def event_detail(run_id: str, event_id: str) -> dict[str, Any]:
        run = open_run(run_id)
        if not run.has_event(event_id):
            raise ApiError(404, "event-not-found", f"no event {event_id!r} in run", event_id)
        event = run.event(event_id)
        assessment = run.latest_assessments().get(event_id)
        triangle = hazard_triangle(run.config, event)
        return {
            "event": event_to_record(event),
            "mode_name": run.config.mode(event.mode).name,
            "card": [list(row) for row in card_rows(run.config, event)],
            "card_text": render_card(run.config, event),
            "triangle": asdict(triangle),
            "assessment": (
                {
                    "seq": assessment.seq,
                    "event_id": assessment.event_id,
                    "status": assessment.status.value,
                    "rationale": assessment.rationale,
                    "assessor": assessment.assessor,
                }
                if assessment
                else None
            ),
        }

    @app.put("/runs/{run_id}/events/{event_id}/assessment")
    def put_assessment(run_id: str, event_id: str, payload: AssessmentIn) -> dict[str, Any]:
        run = open_run(run_id)
        if not run.has_event(event_id):
            raise ApiError(404, "event-not-found", f"no event {event_id!r} in run", event_id)
        try:
            status = AssessmentStatus(payload.status)
        except ValueError:
            raise ApiError(
                422,
                "invalid-status",
                f"unknown status {payload.status!r} "
                f"(allowed: {', '.join(s.value for s in AssessmentStatus)})",
                event_id,
            ) from None
        event = run.event(event_id)
        if not event.relevant:
            raise ApiError(
                422,
                "event-not-relevant",
                f"event {event_id!r} was dropped ({', '.join(event.drop_reasons)}); "
                "only relevant events are reviewed",
                event_id,
            )
        if status is AssessmentStatus.HAZARDOUS and not payload.rationale.strip():
            raise ApiError(422, "rationale-required", "a hazardous verdict requires a rationale", event_id)
        assessment = run.append_assessment(
            event_id, status, rationale=payload.rationale, assessor=payload.assessor
        )
        return {
            "assessment": {
                "seq": assessment.seq,
                "event_id": assessment.event_id,
                "status": assessment.status.value,
                "rationale": assessment.rationale,
                "assessor": assessment.assessor,
            }
        }

    @app.get("/runs/{run_id}/progress")
    def get_progress(run_id: str) -> dict[str, Any]:
        return open_run(run_id).progress()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/")
        def service_root() -> dict[str, Any]:
            return {
                "service": "hazident review API",
                "endpoints": [
                    "GET /runs",
                    "GET /runs/{run_id}/events",
                    "GET /runs/{run_id}/events/{event_id}",
                    "PUT /runs/{run_id}/events/{event_id}/assessment",
                    "GET /runs/{run_id}/progress",
                ],
            }

    return app
