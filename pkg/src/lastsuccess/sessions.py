"""Event-sourced decision sessions.

A session is an append-only log of JSON events (one line per event:
{seq, ts, kind, payload}) and nothing else; the live state is a pure fold
over that log, so replaying a stored log reproduces the state exactly,
byte for byte in the JSON projection.  Timestamps are recorded for the
audit trail but the rules depend only on event order (P1-P3) or on the
client-supplied arrival times (P4).

Protocols map onto the engine modules as follows.  P1 precomputes a stop
plan from known probabilities and arms at index s.  P2 runs the estimated
odds rule; while no success has been observed the statistical rule is
vacuous, so each further treatment needs an explicit consent event unless
the policy pre-consents the first `max_initial_failures` of them.  P3 adds
the lower-threshold rule on the estimated probability of a further
success.  P4 tracks arrivals against a Poisson intensity and refuses new
requests once the remaining success mass drops to 1 or below.

Stop verdicts are advisory labels for the clinician: the session records
which rule fired (its source) and freezes further input, mirroring the
step-by-step instructions the protocols prescribe.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any

from . import adaptive as adp
from . import horizon as hz
from . import odds
from .errors import ConflictError, DomainError, NotFoundError
from .recommend import Action, Recommendation, Source

__all__ = ["SessionState", "SessionStore", "replay", "recommend", "state_json"]

PROTOCOLS = ("P1", "P2", "P3", "P4")


@dataclass
class SessionState:
    """Fold accumulator over one session's event log."""

    id: str
    protocol: str
    config: dict[str, Any]
    events: list[dict[str, Any]] = field(default_factory=list)
    k: int = 0
    S: int = 0
    stopped: bool = False
    stop_source: Source | None = None
    consent_pending: bool = False
    idem_keys: set[str] = field(default_factory=set)
    # P1
    profile: odds.OddsProfile | None = None
    plan: odds.StopPlan | None = None
    curve: odds.ValueCurve | None = None
    # P2 / P3
    scores: adp.HealthScores | None = None
    policy: adp.SequencePolicy | None = None
    adaptive: adp.AdaptiveState | None = None
    # P4
    model: hz.ArrivalModel | None = None

    @property
    def n(self) -> int | None:
        """Scheduled sequence length; open-ended for P4."""
        if self.profile is not None:
            return self.profile.n
        if self.scores is not None:
            return self.scores.n
        return None

    @property
    def status(self) -> str:
        if self.stopped:
            return "Stopped"
        if self.consent_pending:
            return "ConsentRequired"
        if (
            self.protocol == "P1"
            and self.plan is not None
            and self.k >= max(1, self.plan.s - 1)
        ):
            return "Armed"
        return "Active"


def _init_state(sid: str, payload: dict[str, Any]) -> SessionState:
    protocol = payload.get("protocol")
    if protocol not in PROTOCOLS:
        raise DomainError(f"protocol {protocol!r} not one of {PROTOCOLS}")
    config = payload.get("config")
    if not isinstance(config, dict):
        raise DomainError("config must be an object")
    state = SessionState(id=sid, protocol=protocol, config=config)
    if protocol == "P1":
        state.profile = odds.odds_of(config.get("probs", ()))
        state.plan = odds.stop_index(state.profile)
        state.curve = odds.value_curve(state.profile)
    elif protocol in ("P2", "P3"):
        state.scores = adp.health_scores(config.get("h", ()))
        alpha = float(config.get("alpha", 0.0))
        if protocol == "P2" and alpha != 0.0:
            raise DomainError("P2 carries no lower threshold; use P3 for alpha > 0")
        if protocol == "P3" and not alpha > 0.0:
            raise DomainError("P3 requires alpha in (0, 1)")
        limit = config.get("max_initial_failures")
        state.policy = adp.SequencePolicy(
            alpha=alpha,
            max_initial_failures=None if limit is None else int(limit),
        )
        state.adaptive = adp.start(state.scores)
    else:
        intensity = hz.Intensity(
            bounds=tuple(float(b) for b in config.get("bounds", ())),
            rates=tuple(float(r) for r in config.get("rates", ())),
        )
        state.model = hz.ArrivalModel(
            intensity=intensity,
            prior_mean_health=float(config.get("prior_mean_health", 0.5)),
        )
    return state


def _apply_outcome(state: SessionState, payload: dict[str, Any]) -> None:
    outcome = payload.get("outcome")
    if outcome not in ("+", "-"):
        raise DomainError(f"outcome {outcome!r} must be '+' or '-'")
    success = outcome == "+"
    if state.protocol == "P4":
        if "time" not in payload or "h_observed" not in payload:
            raise DomainError("P4 outcomes require time and h_observed")
        state.model = hz.update_on_arrival(
            state.model, float(payload["time"]), float(payload["h_observed"]), success
        )
    else:
        if "time" in payload or "h_observed" in payload:
            raise DomainError("time and h_observed are recorded only for P4 sessions")
    state.k += 1
    state.S += int(success)
    state.consent_pending = False
    key = payload.get("idempotency_key")
    if key is not None:
        state.idem_keys.add(str(key))

    if state.protocol == "P1":
        if (success and state.k >= state.plan.s) or state.k == state.profile.n:
            state.stopped = True
            state.stop_source = Source.ODDS_RULE
        return

    if state.protocol in ("P2", "P3"):
        state.adaptive = adp.record(state.adaptive, success)
        verdict = adp.should_stop(state.adaptive)
        if verdict.action is Action.STOP:
            state.stopped = True
            state.stop_source = Source.ESTIMATED_ODDS_RULE
            return
        if state.protocol == "P3" and state.S >= 1:
            if adp.threshold_stop(verdict.figures, state.policy):
                state.stopped = True
                state.stop_source = Source.THRESHOLD
                return
        if verdict.action is Action.CONSENT_REQUIRED:
            limit = state.policy.max_initial_failures
            if limit is not None and state.k >= limit:
                state.stopped = True
                state.stop_source = Source.CONSENT_POLICY
            elif state.k == state.scores.n:
                # nothing left to consent to: the sequence is exhausted
                state.stopped = True
                state.stop_source = Source.CONSENT_POLICY
            elif limit is None:
                state.consent_pending = True
        return

    # P4: evaluate the refusal rule at the arrival just recorded
    if state.S >= 1:
        at = state.model.times[-1]
        if hz.refusal_integral(state.model, at).refuse_from_now:
            state.stopped = True
            state.stop_source = Source.ESTIMATED_ODDS_RULE
    else:
        state.consent_pending = True


def _apply_event(state: SessionState, event: dict[str, Any]) -> SessionState:
    kind = event.get("kind")
    if kind == "outcome":
        if state.stopped:
            raise ConflictError(f"session {state.id} is stopped")
        if state.consent_pending:
            raise ConflictError(f"session {state.id} requires consent first")
        _apply_outcome(state, event.get("payload", {}))
    elif kind == "consent":
        if state.stopped:
            raise ConflictError(f"session {state.id} is stopped")
        if not state.consent_pending:
            raise ConflictError(f"session {state.id} has no pending consent")
        state.consent_pending = False
    else:
        raise DomainError(f"unknown event kind {kind!r}")
    state.events.append(event)
    return state


def replay(sid: str, events: list[dict[str, Any]]) -> SessionState:
    """Fold a full event log (created first) into the session state."""
    if not events or events[0].get("kind") != "created":
        raise DomainError("event log must start with a created event")
    state = _init_state(sid, events[0].get("payload", {}))
    state.events.append(events[0])
    for event in events[1:]:
        _apply_event(state, event)
    return state


def recommend(state: SessionState) -> Recommendation:
    """Current verdict for the next step, derived from the fold alone."""
    figures = _figures(state)
    if state.stopped:
        return Recommendation(
            action=Action.STOP, source=state.stop_source, figures=figures
        )
    if state.consent_pending:
        return Recommendation(
            action=Action.CONSENT_REQUIRED, source=Source.CONSENT_POLICY, figures=figures
        )
    if state.protocol == "P1":
        armed = state.k >= state.plan.s - 1
        return Recommendation(
            action=Action.ARMED if armed else Action.CONTINUE,
            source=Source.ODDS_RULE,
            figures=figures,
        )
    if state.protocol in ("P2", "P3"):
        if state.k == 0:
            return Recommendation(action=Action.CONTINUE, source=None, figures=None)
        verdict = adp.should_stop(state.adaptive)
        if verdict.action is Action.CONSENT_REQUIRED and not state.consent_pending:
            # failures so far fall within the pre-consented allowance
            return Recommendation(
                action=Action.CONTINUE,
                source=Source.CONSENT_POLICY,
                figures=verdict.figures,
            )
        return verdict
    if state.k == 0:
        return Recommendation(action=Action.CONTINUE, source=None, figures=figures)
    return Recommendation(
        action=Action.CONTINUE, source=Source.ESTIMATED_ODDS_RULE, figures=figures
    )


def _figures(state: SessionState) -> Any:
    if state.protocol == "P1":
        return state.plan
    if state.protocol in ("P2", "P3"):
        return adp.inference_report(state.adaptive) if state.k >= 1 else None
    at = state.model.times[-1] if state.model.times else 0.0
    return hz.refusal_integral(state.model, at)


def _figures_json(state: SessionState) -> dict[str, Any] | None:
    fig = _figures(state)
    if fig is None:
        return None
    if isinstance(fig, odds.StopPlan):
        return {
            "kind": "plan",
            "s": fig.s,
            "R": fig.R,
            "Q": fig.Q,
            "V": fig.V,
            "curve": list(state.curve.values),
        }
    if isinstance(fig, adp.InferenceReport):
        finite = fig.future_odds_sum != float("inf")
        return {
            "kind": "inference",
            "k": fig.k,
            "S": fig.S,
            "p_hat": fig.p_hat,
            "future_odds_sum": fig.future_odds_sum if finite else None,
            "future_odds_finite": finite,
            "expected_further": fig.expected_further,
            "prob_no_further": fig.prob_no_further,
            "p_future_clamped": fig.p_future_clamped,
        }
    return {
        "kind": "refusal",
        "at_time": fig.at_time,
        "integral_value": fig.integral_value,
        "refuse_from_now": fig.refuse_from_now,
        "predictor": fig.predictor,
        "mean_health": fig.mean_health,
        "prior_based": fig.prior_based,
    }


def state_json(state: SessionState) -> dict[str, Any]:
    """The canonical JSON projection served over HTTP and by replays."""
    rec = recommend(state)
    return {
        "id": state.id,
        "protocol": state.protocol,
        "status": state.status,
        "k": state.k,
        "S": state.S,
        "n": state.n,
        "config": state.config,
        "events": state.events,
        "recommendation": {
            "action": rec.action.value,
            "source": rec.source.value if rec.source is not None else None,
            "figures": _figures_json(state),
        },
    }


def _now() -> float:
    return round(time.time(), 6)


class SessionStore:
    """Durable session registry over a directory of JSON-lines event logs.

    One file per session; every mutation validates against a fold of the
    candidate log before the event line is appended and fsynced, so a crash
    leaves either the old or the new state, never a torn one.  Writers are
    serialized per session; reads hand out the cached fold.
    """

    def __init__(self, data_dir: str):
        self._dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._states: dict[str, SessionState] = {}
        for name in sorted(os.listdir(data_dir)):
            if not name.endswith(".jsonl"):
                continue
            sid = name[: -len(".jsonl")]
            events = self._read_log(sid)
            self._states[sid] = replay(sid, events)
            self._locks[sid] = threading.Lock()

    def _path(self, sid: str) -> str:
        return os.path.join(self._dir, f"{sid}.jsonl")

    def _read_log(self, sid: str) -> list[dict[str, Any]]:
        with open(self._path(sid)) as fh:
            return [json.loads(line) for line in fh if line.strip()]

    def _append(self, sid: str, event: dict[str, Any]) -> None:
        with open(self._path(sid), "a") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _lock_for(self, sid: str) -> threading.Lock:
        with self._registry_lock:
            if sid not in self._states:
                raise NotFoundError(sid)
            return self._locks[sid]

    def create(self, protocol: str, config: dict[str, Any]) -> SessionState:
        payload = {"protocol": protocol, "config": config}
        with self._registry_lock:
            sid = uuid.uuid4().hex[:12]
            while sid in self._states:
                sid = uuid.uuid4().hex[:12]
            event = {"seq": 1, "ts": _now(), "kind": "created", "payload": payload}
            state = replay(sid, [event])  # validates config before persisting
            self._append(sid, event)
            self._states[sid] = state
            self._locks[sid] = threading.Lock()
            return state

    def get(self, sid: str) -> SessionState:
        with self._registry_lock:
            if sid not in self._states:
                raise NotFoundError(sid)
            return self._states[sid]

    def list_states(self) -> list[SessionState]:
        with self._registry_lock:
            return [self._states[sid] for sid in sorted(self._states)]

    def _commit(self, sid: str, kind: str, payload: dict[str, Any]) -> SessionState:
        state = self.get(sid)
        event = {
            "seq": len(state.events) + 1,
            "ts": _now(),
            "kind": kind,
            "payload": payload,
        }
        new_state = replay(sid, state.events + [event])
        self._append(sid, event)
        with self._registry_lock:
            self._states[sid] = new_state
        return new_state

    def record(
        self,
        sid: str,
        outcome: str,
        *,
        arrival_time: float | None = None,
        h_observed: float | None = None,
        idempotency_key: str | None = None,
    ) -> SessionState:
        with self._lock_for(sid):
            state = self.get(sid)
            if idempotency_key is not None and idempotency_key in state.idem_keys:
                return state
            payload: dict[str, Any] = {"outcome": outcome}
            if arrival_time is not None:
                payload["time"] = float(arrival_time)
            if h_observed is not None:
                payload["h_observed"] = float(h_observed)
            if idempotency_key is not None:
                payload["idempotency_key"] = str(idempotency_key)
            return self._commit(sid, "outcome", payload)

    def consent(self, sid: str) -> SessionState:
        with self._lock_for(sid):
            return self._commit(sid, "consent", {})
