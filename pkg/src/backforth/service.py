"""HTTP session service for playing relation games against the engine.

Sessions wrap one relation query: a left structure, a right structure, and
a starting clock.  Each round, a Spoiler challenge lands in the current
right structure, a Duplicator reply lands in the current left structure,
then the structures swap roles and the clock drops by one.  When the clock
reaches zero the session resolves: Duplicator survived exactly when the two
pinned tuples realize the same atoms.

The human takes one side (``mode``), the engine plays the other and never
resigns: as Duplicator it answers every answerable challenge with a
verified reply even in lost positions, so a human Spoiler wins only by
playing a genuine refutation line; as Spoiler on a holding position, or as
Duplicator facing an unanswerable challenge, it plays the lexicographically
least legal move and labels it "non-winning".

Batch endpoints expose the solver and the classifier without session
state.  Errors are always JSON objects with ``code`` and ``message``.
Configuration comes from flags or the ``BACKFORTH_PORT``,
``BACKFORTH_CLOCK_CAP``, ``BACKFORTH_SIZE_CAP``, ``BACKFORTH_SESSION_LOG``
environment variables; an optional newline-delimited JSON log records
session events for post-mortems.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Literal

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .bfgame import (
    FormulaBudgetError,
    NodeBudgetError,
    Position,
    Verdict,
    best_reply,
    bf_equiv,
    bf_geq,
    bf_leq,
    distinguishing_formula,
    spoiler_witness,
)
from .formulas import FormulaParseError, classify, parse_formula, serialize_formula
from .structures import structure_from_json, structure_to_json

DEFAULT_PORT = 8080
DEFAULT_CLOCK_CAP = 4
DEFAULT_SIZE_CAP = 12
ENGINE_NODE_BUDGET = 5_000_000


@dataclass(frozen=True)
class ServiceConfig:
    port: int = DEFAULT_PORT
    clock_cap: int = DEFAULT_CLOCK_CAP
    size_cap: int = DEFAULT_SIZE_CAP
    session_log: str | None = None

    @staticmethod
    def from_env() -> "ServiceConfig":
        env = os.environ
        return ServiceConfig(
            port=int(env.get("BACKFORTH_PORT", DEFAULT_PORT)),
            clock_cap=int(env.get("BACKFORTH_CLOCK_CAP", DEFAULT_CLOCK_CAP)),
            size_cap=int(env.get("BACKFORTH_SIZE_CAP", DEFAULT_SIZE_CAP)),
            session_log=env.get("BACKFORTH_SESSION_LOG"),
        )


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class _Session:
    id: str
    mode: str
    initial_clock: int
    initial_verdict: Verdict
    position: Position
    flipped: bool = False
    status: str = "in-progress"
    awaiting: str | None = None
    pending_challenge: tuple[int, ...] | None = None
    history: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class CreateSessionRequest(BaseModel):
    left: dict
    right: dict
    clock: int
    mode: Literal["human-spoiler", "human-duplicator"]


class MoveRequest(BaseModel):
    tuple: list[int] = Field(default_factory=list)


class ComputeBfRequest(BaseModel):
    left: dict
    right: dict
    n: int
    direction: Literal["leq", "geq", "equiv"] = "leq"
    left_tuple: list[int] = Field(default_factory=list)
    right_tuple: list[int] = Field(default_factory=list)


class ComputeClassifyRequest(BaseModel):
    formula: str


def _session_json(s: _Session) -> dict:
    pos = s.position
    verdict_witness = (
        list(s.initial_verdict.witness) if s.initial_verdict.witness is not None else None
    )
    return {
        "id": s.id,
        "mode": s.mode,
        "status": s.status,
        "clock": pos.clock,
        "initial_clock": s.initial_clock,
        "awaiting": s.awaiting,
        "verdict": {"holds": s.initial_verdict.holds, "witness": verdict_witness},
        "position": {
            "left": structure_to_json(pos.left),
            "right": structure_to_json(pos.right),
            "left_tuple": list(pos.left_tuple),
            "right_tuple": list(pos.right_tuple),
            "orientation": "swapped" if s.flipped else "original",
        },
        "pending_challenge": (
            list(s.pending_challenge) if s.pending_challenge is not None else None
        ),
        "history": list(s.history),
    }


def _spoiler_target(s: _Session) -> str:
    # History labels name the structures by their orientation at creation.
    return "left" if s.flipped else "right"


def _duplicator_target(s: _Session) -> str:
    return "right" if s.flipped else "left"


def _record_spoiler(s: _Session, challenge: tuple[int, ...], by: str, label: str | None) -> None:
    s.history.append(
        {
            "side": "spoiler",
            "by": by,
            "into": _spoiler_target(s),
            "tuple": list(challenge),
            "label": label,
        }
    )
    s.pending_challenge = challenge
    s.awaiting = "duplicator"


def _complete_round(s: _Session, reply: tuple[int, ...], by: str, label: str | None) -> None:
    pos = s.position
    challenge = s.pending_challenge
    assert challenge is not None
    s.history.append(
        {
            "side": "duplicator",
            "by": by,
            "into": _duplicator_target(s),
            "tuple": list(reply),
            "label": label,
        }
    )
    s.position = Position(
        pos.right,
        pos.right_tuple + challenge,
        pos.left,
        pos.left_tuple + reply,
        pos.clock - 1,
    )
    s.flipped = not s.flipped
    s.pending_challenge = None
    if s.position.clock == 0:
        s.awaiting = None
        s.status = (
            "duplicator-survived" if bf_leq(s.position).holds else "spoiler-won"
        )
    else:
        s.awaiting = "spoiler"


def _engine_duplicator_move(
    pos: Position, challenge: tuple[int, ...]
) -> tuple[tuple[int, ...], str]:
    """Winning reply whenever the challenge is answerable, zeros otherwise."""
    reply = best_reply(pos, challenge, node_budget=ENGINE_NODE_BUDGET)
    if reply is None:
        return (0,) * len(challenge), "non-winning"
    return reply, "winning"


def _engine_spoiler_move(pos: Position) -> tuple[tuple[int, ...], str]:
    """Minimal refuting challenge when one exists, the empty move otherwise."""
    verdict = bf_leq(pos, node_budget=ENGINE_NODE_BUDGET)
    if verdict.holds:
        return (), "non-winning"
    try:
        return spoiler_witness(pos, node_budget=ENGINE_NODE_BUDGET), "winning"
    except NodeBudgetError:
        # The full enumeration of the right structure refutes whenever
        # anything does, so it is a sound stand-in for the minimal witness.
        assert verdict.witness is not None
        return verdict.witness, "winning"


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    cfg = config or ServiceConfig.from_env()
    app = FastAPI(title="backforth service", docs_url=None, redoc_url=None)
    sessions: dict[str, _Session] = {}
    store_lock = threading.Lock()
    log_lock = threading.Lock()

    def log_event(event: str, **payload: object) -> None:
        if cfg.session_log is None:
            return
        line = json.dumps({"ts": time.time(), "event": event, **payload})
        with log_lock:
            with open(cfg.session_log, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def parse_payload_structure(payload: dict, label: str):
        try:
            structure = structure_from_json(payload)
        except (ValueError, KeyError, TypeError) as exc:
            raise ServiceError(400, "invalid", f"{label} structure: {exc}")
        if structure.size > cfg.size_cap:
            raise ServiceError(
                400,
                "cap_exceeded",
                f"{label} structure has {structure.size} elements, cap is {cfg.size_cap}",
            )
        return structure

    def get_session(sid: str) -> _Session:
        session = sessions.get(sid)
        if session is None:
            raise ServiceError(404, "not_found", f"no session {sid}")
        return session

    def run_engine(thunk):
        try:
            return thunk()
        except NodeBudgetError:
            raise ServiceError(
                400, "budget_exhausted", "position too hard within the node budget"
            )

    @app.exception_handler(ServiceError)
    async def service_error_handler(_, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_, exc: RequestValidationError):
        parts = [
            f"{'.'.join(str(p) for p in err.get('loc', ()))}: {err.get('msg', 'invalid')}"
            for err in exc.errors()
        ]
        return JSONResponse(
            status_code=400,
            content={"code": "invalid", "message": "; ".join(parts)[:400]},
        )

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest) -> dict:
        if req.clock < 0 or req.clock > cfg.clock_cap:
            raise ServiceError(
                400, "cap_exceeded", f"clock must be between 0 and {cfg.clock_cap}"
            )
        left = parse_payload_structure(req.left, "left")
        right = parse_payload_structure(req.right, "right")
        if left.size == 0 or right.size == 0:
            raise ServiceError(
                400, "invalid", "interactive sessions need non-empty structures"
            )
        try:
            position = Position(left, (), right, (), req.clock)
        except ValueError as exc:
            raise ServiceError(400, "invalid", str(exc))
        verdict = run_engine(
            lambda: bf_leq(position, node_budget=ENGINE_NODE_BUDGET)
        )
        session = _Session(
            id=secrets.token_hex(8),
            mode=req.mode,
            initial_clock=req.clock,
            initial_verdict=verdict,
            position=position,
        )
        if req.clock == 0:
            session.status = (
                "duplicator-survived" if verdict.holds else "spoiler-won"
            )
            session.awaiting = None
        else:
            session.awaiting = "spoiler"
            if req.mode == "human-duplicator":
                challenge, label = run_engine(lambda: _engine_spoiler_move(position))
                _record_spoiler(session, challenge, "engine", label)
        with store_lock:
            sessions[session.id] = session
        log_event("create", session_id=session.id, mode=session.mode, clock=req.clock)
        return _session_json(session)

    @app.get("/sessions/{sid}")
    def fetch_session(sid: str) -> dict:
        return _session_json(get_session(sid))

    @app.post("/sessions/{sid}/moves")
    def submit_move(sid: str, req: MoveRequest) -> dict:
        session = get_session(sid)
        with session.lock:
            if session.status != "in-progress":
                raise ServiceError(400, "finished", "session is already resolved")
            move = tuple(req.tuple)
            if session.mode == "human-spoiler":
                if session.awaiting != "spoiler":
                    raise ServiceError(400, "not_your_turn", "waiting on the engine")
                pos = session.position
                if len(move) > cfg.size_cap:
                    raise ServiceError(
                        400, "cap_exceeded", f"challenges are capped at {cfg.size_cap}"
                    )
                if any(not (0 <= v < pos.right.size) for v in move):
                    raise ServiceError(400, "bad_move", "challenge element out of range")
                reply, label = run_engine(lambda: _engine_duplicator_move(pos, move))
                _record_spoiler(session, move, "human", None)
                _complete_round(session, reply, "engine", label)
            else:
                if session.awaiting != "duplicator":
                    raise ServiceError(400, "not_your_turn", "waiting on the engine")
                pos = session.position
                challenge = session.pending_challenge
                assert challenge is not None
                if len(move) != len(challenge):
                    raise ServiceError(
                        400,
                        "bad_move",
                        f"reply must have {len(challenge)} elements to match the challenge",
                    )
                if any(not (0 <= v < pos.left.size) for v in move):
                    raise ServiceError(400, "bad_move", "reply element out of range")
                next_position = Position(
                    pos.right,
                    pos.right_tuple + challenge,
                    pos.left,
                    pos.left_tuple + move,
                    pos.clock - 1,
                )
                engine_challenge = None
                if next_position.clock >= 1:
                    engine_challenge = run_engine(
                        lambda: _engine_spoiler_move(next_position)
                    )
                _complete_round(session, move, "human", None)
                if session.status == "in-progress" and engine_challenge is not None:
                    _record_spoiler(session, engine_challenge[0], "engine", engine_challenge[1])
            log_event(
                "move",
                session_id=session.id,
                status=session.status,
                clock=session.position.clock,
            )
            return _session_json(session)

    @app.get("/sessions/{sid}/hint")
    def hint(sid: str) -> dict:
        session = get_session(sid)
        with session.lock:
            if session.status != "in-progress":
                raise ServiceError(400, "finished", "session is already resolved")
            pos = session.position
            if session.awaiting == "spoiler":
                challenge, label = run_engine(lambda: _engine_spoiler_move(pos))
                out = {
                    "side": "spoiler",
                    "move": list(challenge),
                    "label": label,
                    "explanation": (
                        "this challenge admits no reply within the clock"
                        if label == "winning"
                        else "the relation holds here; no challenge can win"
                    ),
                }
                if label == "winning":
                    try:
                        formula = distinguishing_formula(
                            pos, node_budget=ENGINE_NODE_BUDGET
                        )
                        out["formula"] = serialize_formula(formula)
                    except (NodeBudgetError, FormulaBudgetError):
                        out["formula"] = None
                        out["explanation"] += " (formula omitted: budget exhausted)"
            else:
                challenge = session.pending_challenge
                assert challenge is not None
                reply = run_engine(
                    lambda: best_reply(pos, challenge, node_budget=ENGINE_NODE_BUDGET)
                )
                if reply is None:
                    out = {
                        "side": "duplicator",
                        "move": [0] * len(challenge),
                        "label": "non-winning",
                        "explanation": "no winning reply exists to this challenge",
                    }
                else:
                    out = {
                        "side": "duplicator",
                        "move": list(reply),
                        "label": "winning",
                        "explanation": "verified: this reply keeps the relation alive",
                    }
            log_event("hint", session_id=session.id, side=out["side"])
            return out

    @app.delete("/sessions/{sid}")
    def delete_session(sid: str) -> dict:
        with store_lock:
            session = sessions.pop(sid, None)
        if session is None:
            raise ServiceError(404, "not_found", f"no session {sid}")
        log_event("delete", session_id=sid)
        return {"id": sid, "deleted": True}

    @app.post("/compute/bf")
    def compute_bf(req: ComputeBfRequest) -> dict:
        if req.n < 0 or req.n > cfg.clock_cap:
            raise ServiceError(
                400, "cap_exceeded", f"clock must be between 0 and {cfg.clock_cap}"
            )
        left = parse_payload_structure(req.left, "left")
        right = parse_payload_structure(req.right, "right")
        try:
            position = Position(
                left, tuple(req.left_tuple), right, tuple(req.right_tuple), req.n
            )
        except ValueError as exc:
            raise ServiceError(400, "invalid", str(exc))
        query = {"leq": bf_leq, "geq": bf_geq, "equiv": bf_equiv}[req.direction]
        verdict = run_engine(
            lambda: query(position, node_budget=ENGINE_NODE_BUDGET)
        )
        return {
            "direction": req.direction,
            "n": req.n,
            "holds": verdict.holds,
            "witness": list(verdict.witness) if verdict.witness is not None else None,
        }

    @app.post("/compute/classify")
    def compute_classify(req: ComputeClassifyRequest) -> dict:
        try:
            formula = parse_formula(req.formula)
        except FormulaParseError as exc:
            raise ServiceError(400, "invalid", f"formula: {exc}")
        report = classify(formula)
        return {"ranks": report.as_dict(), "normalized": serialize_formula(formula)}

    app.state.config = cfg
    app.state.sessions = sessions
    return app


def main() -> None:
    """Entry point used by the command line's serve subcommand."""
    import uvicorn

    cfg = ServiceConfig.from_env()
    uvicorn.run(create_app(cfg), host="0.0.0.0", port=cfg.port)
