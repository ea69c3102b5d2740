"""HTTP and WebSocket front door for live guidance sessions.

Two transports share one session store. A WebSocket client sends
{"type": "start", "scenario": ..., "strategy": ...} and then place/remove
events, and receives instruction, feedback, and world messages as they are
produced. A polling client creates a session with POST /api/sessions, sends
events to POST /api/sessions/{id}/events, and drains the ordered message
stream from GET /api/sessions/{id}/messages?after=N using the returned
cursor. Messages are identical across transports; transport-level problems
(unknown session, malformed event) surface as HTTP errors or as
{"type": "error"} envelopes on the socket, never as session feedback.

Every session appends its event log to {log_dir}/{session id}.jsonl as the
events happen, one JSON object per line.
"""

from __future__ import annotations

import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .instructions import build_instruction_problem
from .search import SearchConfig, plan as compute_plan
from .session import (
    Session,
    SessionTerminated,
    event_log_lines,
    handle_event,
    metrics,
    start_session,
)
from .strategies import STRATEGY_NAMES, UnknownStrategy, default_strategy
from .world import BUILTIN_SCENARIOS, Scenario, builtin_scenario, scenario_from_json

__all__ = ["create_app", "DEFAULT_SESSION_TIMEOUT"]

DEFAULT_SESSION_TIMEOUT = 600.0


class StartRequest(BaseModel):
    scenario: str | dict
    strategy: str


class EventRequest(BaseModel):
    type: str
    x: int
    y: int
    z: int


class _LiveSession:
    def __init__(self, session: Session, log_path: Path | None) -> None:
        self.session = session
        self.lock = threading.Lock()
        self.log_path = log_path
        self._logged = 0
        self.flush_log()

    def flush_log(self) -> None:
        if self.log_path is None:
            return
        events = self.session.events
        if self._logged >= len(events):
            return
        with self.log_path.open("a", encoding="utf-8") as handle:
            for line in event_log_lines(events[self._logged :]):
                handle.write(line + "\n")
        self._logged = len(events)


def _resolve_scenario(spec: str | dict) -> Scenario:
    if isinstance(spec, str):
        try:
            return builtin_scenario(spec)
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"unknown scenario: {exc}") from exc
    try:
        return scenario_from_json(spec)
    except (TypeError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"bad scenario: {exc}") from exc


def create_app(
    *,
    log_dir: str | Path | None = None,
    frontend_dir: str | Path | None = None,
    session_timeout: float | None = DEFAULT_SESSION_TIMEOUT,
    clock=None,
) -> FastAPI:
    """Assemble the API; sessions, plan cache, and logs live on the app."""
    app = FastAPI(title="foreman", docs_url=None, redoc_url=None)
    sessions: dict[str, _LiveSession] = {}
    plan_cache: dict = {}
    cache_lock = threading.Lock()
    log_root = Path(log_dir) if log_dir is not None else None
    if log_root is not None:
        log_root.mkdir(parents=True, exist_ok=True)
    wall_clock = clock if clock is not None else time.monotonic

    def solved(scenario: Scenario, strategy_name: str):
        try:
            strategy = default_strategy(strategy_name)
        except UnknownStrategy as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        key = (scenario, strategy_name)
        with cache_lock:
            if key not in plan_cache:
                problem = build_instruction_problem(scenario, strategy)
                plan_cache[key] = compute_plan(problem, SearchConfig())
            return strategy, plan_cache[key]

    def open_session(spec: str | dict, strategy_name: str) -> tuple[str, _LiveSession]:
        scenario = _resolve_scenario(spec)
        strategy, solution = solved(scenario, strategy_name)
        session = start_session(
            scenario,
            strategy,
            solution,
            clock=wall_clock if session_timeout is not None else None,
            max_seconds=session_timeout,
            validate=False,
        )
        session_id = uuid.uuid4().hex[:12]
        log_path = log_root / f"{session_id}.jsonl" if log_root is not None else None
        live = _LiveSession(session, log_path)
        sessions[session_id] = live
        return session_id, live

    def live_session(session_id: str) -> _LiveSession:
        live = sessions.get(session_id)
        if live is None:
            raise HTTPException(status_code=404, detail="no such session")
        return live

    @app.get("/api/scenarios")
    def list_scenarios() -> dict:
        return {"scenarios": sorted(BUILTIN_SCENARIOS), "strategies": list(STRATEGY_NAMES)}

    @app.post("/api/sessions")
    def create_session(request: StartRequest) -> dict:
        session_id, live = open_session(request.scenario, request.strategy)
        with live.lock:
            return {"sessionId": session_id, "next": len(live.session.outbox)}

    @app.post("/api/sessions/{session_id}/events")
    def post_event(session_id: str, request: EventRequest) -> dict:
        live = live_session(session_id)
        with live.lock:
            try:
                handle_event(live.session, request.model_dump())
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            except SessionTerminated as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            finally:
                live.flush_log()
            return {"accepted": True, "next": len(live.session.outbox)}

    @app.get("/api/sessions/{session_id}/messages")
    def poll_messages(session_id: str, after: int = 0) -> dict:
        live = live_session(session_id)
        with live.lock:
            outbox = live.session.outbox
            if not 0 <= after <= len(outbox):
                raise HTTPException(status_code=400, detail="cursor out of range")
            return {"messages": outbox[after:], "next": len(outbox)}

    @app.get("/api/sessions/{session_id}")
    def session_status(session_id: str) -> dict:
        live = live_session(session_id)
        with live.lock:
            session = live.session
            report = metrics(session)
            return {
                "terminated": session.terminated,
                "succeeded": session.succeeded,
                "metrics": {
                    "successful": report.successful,
                    "durationSteps": report.duration_steps,
                    "mistakes": report.mistakes,
                    "perObjectSteps": report.per_object_steps,
                    "placements": report.placements,
                },
            }

    @app.websocket("/ws")
    async def websocket_session(socket: WebSocket) -> None:
        await socket.accept()
        live: _LiveSession | None = None
        sent = 0
        try:
            while True:
                incoming = await socket.receive_json()
                kind = incoming.get("type")
                if live is None:
                    if kind != "start":
                        await socket.send_json(
                            {"type": "error", "text": "first message must be start"}
                        )
                        continue
                    try:
                        _, live = open_session(
                            incoming.get("scenario", ""), incoming.get("strategy", "")
                        )
                    except HTTPException as exc:
                        await socket.send_json({"type": "error", "text": exc.detail})
                        continue
                elif kind in ("place", "remove"):
                    with live.lock:
                        try:
                            handle_event(live.session, incoming)
                        except ValueError as exc:
                            await socket.send_json({"type": "error", "text": str(exc)})
                        except SessionTerminated as exc:
                            await socket.send_json({"type": "error", "text": str(exc)})
                        finally:
                            live.flush_log()
                else:
                    await socket.send_json({"type": "error", "text": f"unknown type {kind!r}"})
                if live is not None:
                    with live.lock:
                        fresh = live.session.outbox[sent:]
                        sent = len(live.session.outbox)
                    for message in fresh:
                        await socket.send_json(message)
        except WebSocketDisconnect:
            pass

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="frontend")

    return app
