"""HTTP/JSON surface for live decision sessions.

Thin, versioned wrapper over SessionStore: requests are validated with
explicit field paths, state reads are served as canonical JSON (sorted
keys, compact separators) so a replayed session is byte-for-byte
identical to the live one, and an optional static bearer token guards
every session route.  Retried outcome posts carry an Idempotency-Key
header and are recorded at most once.
"""

from __future__ import annotations

import json
from typing import Any, Literal

from fastapi import Depends, FastAPI, Request, Response
from fastapi.exceptions import HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict

from .adaptive import spread_scores
from .errors import ConflictError, DomainError, NotFoundError
from .sessions import SessionState, SessionStore, state_json

__all__ = ["create_app"]


class Elicitation(BaseModel):
    model_config = ConfigDict(extra="forbid")

    h_min: float
    h_max: float
    ranks: list[float]


class CreateSessionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    protocol: Literal["P1", "P2", "P3", "P4"]
    probs: list[float] | None = None
    h: list[float] | None = None
    elicitation: Elicitation | None = None
    alpha: float | None = None
    max_initial_failures: int | None = None
    bounds: list[float] | None = None
    rates: list[float] | None = None
    prior_mean_health: float | None = None


class OutcomeBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    outcome: Literal["+", "-"]
    time: float | None = None
    h_observed: float | None = None


_FIELDS_BY_PROTOCOL = {
    "P1": ("probs",),
    "P2": ("h", "elicitation", "max_initial_failures"),
    "P3": ("h", "elicitation", "alpha", "max_initial_failures"),
    "P4": ("bounds", "rates", "prior_mean_health"),
}


def _resolve_config(body: CreateSessionBody) -> dict[str, Any]:
    allowed = _FIELDS_BY_PROTOCOL[body.protocol]
    for name in ("probs", "h", "elicitation", "alpha", "max_initial_failures",
                 "bounds", "rates", "prior_mean_health"):
        if getattr(body, name) is not None and name not in allowed:
            raise DomainError(f"{name} does not apply to {body.protocol}")
    if body.protocol == "P1":
        if body.probs is None:
            raise DomainError("P1 requires probs")
        return {"probs": body.probs}
    if body.protocol in ("P2", "P3"):
        if (body.h is None) == (body.elicitation is None):
            raise DomainError("provide exactly one of h or elicitation")
        if body.h is not None:
            h = list(body.h)
        else:
            e = body.elicitation
            h = list(spread_scores(e.h_min, e.h_max, e.ranks).h)
        config: dict[str, Any] = {
            "h": h,
            "alpha": body.alpha if body.alpha is not None else 0.0,
            "max_initial_failures": body.max_initial_failures,
        }
        return config
    if body.bounds is None or body.rates is None:
        raise DomainError("P4 requires bounds and rates")
    return {
        "bounds": body.bounds,
        "rates": body.rates,
        "prior_mean_health": (
            body.prior_mean_health if body.prior_mean_health is not None else 0.5
        ),
    }


def _canonical(payload: Any, status_code: int = 200) -> Response:
    return Response(
        content=json.dumps(payload, sort_keys=True, separators=(",", ":")),
        status_code=status_code,
        media_type="application/json",
    )


def _summary(state: SessionState) -> dict[str, Any]:
    return {
        "id": state.id,
        "protocol": state.protocol,
        "status": state.status,
        "k": state.k,
        "S": state.S,
    }


def create_app(data_dir: str, token: str | None = None) -> FastAPI:
    store = SessionStore(data_dir)
    app = FastAPI(title="last-success decision sessions", version="1")
    app.state.store = store
    # the browser companion is served from its own origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["authorization", "content-type", "idempotency-key"],
    )

    def _auth(request: Request) -> None:
        if token is None:
            return
        if request.headers.get("authorization") != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid token")

    guarded = [Depends(_auth)]

    @app.exception_handler(DomainError)
    async def _domain_error(request: Request, exc: DomainError) -> Response:
        return _canonical({"detail": str(exc)}, status_code=422)

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError) -> Response:
        return _canonical({"detail": "session not found"}, status_code=404)

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError) -> Response:
        return _canonical({"detail": str(exc)}, status_code=409)

    @app.get("/v1/healthz")
    def healthz() -> Response:
        return _canonical({"status": "ok"})

    @app.post("/v1/sessions", dependencies=guarded)
    def create_session(body: CreateSessionBody) -> Response:
        state = store.create(body.protocol, _resolve_config(body))
        return _canonical(state_json(state), status_code=201)

    @app.get("/v1/sessions", dependencies=guarded)
    def list_sessions() -> Response:
        return _canonical({"sessions": [_summary(s) for s in store.list_states()]})

    @app.get("/v1/sessions/{sid}", dependencies=guarded)
    def get_session(sid: str) -> Response:
        return _canonical(state_json(store.get(sid)))

    @app.post("/v1/sessions/{sid}/outcomes", dependencies=guarded)
    def record_outcome(sid: str, body: OutcomeBody, request: Request) -> Response:
        state = store.record(
            sid,
            body.outcome,
            arrival_time=body.time,
            h_observed=body.h_observed,
            idempotency_key=request.headers.get("idempotency-key"),
        )
        return _canonical(state_json(state), status_code=201)

    @app.post("/v1/sessions/{sid}/consent", dependencies=guarded)
    def give_consent(sid: str) -> Response:
        return _canonical(state_json(store.consent(sid)))

    return app
