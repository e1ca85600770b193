"""Chat service: sessions and turns over HTTP and WebSocket.

Sessions are held in memory behind per-session locks, mirrored to
append-only JSONL logs, and lazily evicted after an idle TTL. Because the
engine is deterministic under a fixed seed, an evicted session is rebuilt
from its log on the next access.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from pathlib import Path
from random import Random
from typing import Dict, List, Mapping, Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .dialog import DialogEngine, DialogState, TerminalStateError
from .graph import DocumentGraph

DEFAULT_TTL_SECONDS = 30 * 60


class MessageIn(BaseModel):
    text: str


class SessionIn(BaseModel):
    seed: Optional[int] = None


class Session:
    def __init__(self, session_id: str, article_id: str, seed: int,
                 state: DialogState, rng: Random):
        self.session_id = session_id
        self.article_id = article_id
        self.seed = seed
        self.state = state
        self.rng = rng
        self.lock = threading.Lock()
        self.last_access = time.monotonic()
        self.created_at = time.time()


class SessionStore:
    """Thread-safe session table with idle eviction and log recovery."""

    def __init__(
        self,
        engines: Mapping[str, DialogEngine],
        log_dir: Optional[Path] = None,
        ttl_seconds: float = DEFAULT_TTL_SECONDS,
    ):
        self.engines = dict(engines)
        self.log_dir = Path(log_dir) if log_dir else None
        if self.log_dir:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.ttl_seconds = ttl_seconds
        self._sessions: Dict[str, Session] = {}
        self._table_lock = threading.Lock()

    # -- session lifecycle ------------------------------------------------

    def create(self, article_id: str, seed: Optional[int] = None) -> tuple:
        engine = self.engines.get(article_id)
        if engine is None:
            raise KeyError(article_id)
        if seed is None:
            seed = uuid.uuid4().int % (2 ** 31)
        session_id = uuid.uuid4().hex[:16]
        state = engine.new_state(session_id)
        rng = Random(seed)
        session = Session(session_id, article_id, seed, state, rng)
        text, plan = engine.respond(state, "", rng)
        self._log(session, "", text, plan.strategy, plan.informed_nodes,
                  opening=True)
        with self._table_lock:
            self._evict_stale()
            self._sessions[session_id] = session
        return session, text, plan

    def message(self, session_id: str, text: str) -> tuple:
        session = self._get(session_id)
        engine = self.engines[session.article_id]
        with session.lock:
            if session.state.phase == "Ended":
                raise TerminalStateError(session_id)
            reply, plan = engine.respond(session.state, text, session.rng)
            self._log(session, text, reply, plan.strategy,
                      plan.informed_nodes)
            session.last_access = time.monotonic()
        return session, reply, plan

    def debug(self, session_id: str) -> dict:
        session = self._get(session_id)
        with session.lock:
            session.last_access = time.monotonic()
            snapshot = session.state.to_dict()
            snapshot["seed"] = session.seed
            graph = self.engines[session.article_id].graph
            snapshot["chain"] = list(graph.chain)
            snapshot["sentences"] = [
                {"position": s.position, "text": s.text,
                 "eligible": s.eligible}
                for s in graph.sentences
            ]
        return snapshot

    def _get(self, session_id: str) -> Session:
        with self._table_lock:
            self._evict_stale()
            session = self._sessions.get(session_id)
            if session is None:
                session = self._recover(session_id)
                if session is not None:
                    self._sessions[session_id] = session
            if session is None:
                raise KeyError(session_id)
            return session

    def _evict_stale(self) -> None:
        if self.ttl_seconds <= 0:
            return
        now = time.monotonic()
        stale = [
            sid for sid, s in self._sessions.items()
            if now - s.last_access > self.ttl_seconds
        ]
        for sid in stale:
            del self._sessions[sid]

    # -- durable log --------------------------------------------------------

    def _log_path(self, session_id: str) -> Optional[Path]:
        if self.log_dir is None:
            return None
        return self.log_dir / f"{session_id}.jsonl"

    def _log(self, session: Session, user: str, bot: str, strategy: str,
             node_ids: List[str], opening: bool = False) -> None:
        path = self._log_path(session.session_id)
        if path is None:
            return
        record = {
            "turn": session.state.turn_index - 1,
            "user": user,
            "bot": bot,
            "strategy": strategy,
            "node_ids": list(node_ids),
            "ts": time.time(),
        }
        if opening:
            record["seed"] = session.seed
            record["article_id"] = session.article_id
        with path.open("a") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()

    def _recover(self, session_id: str) -> Optional[Session]:
        path = self._log_path(session_id)
        if path is None or not path.exists():
            return None
        try:
            session = replay_session(self.engines, path, session_id)
        except (ValueError, KeyError):
            return None
        return session


def replay_session(
    engines: Mapping[str, DialogEngine], log_path: Path, session_id: str
) -> Session:
    """Rebuild a session by re-running its logged user turns.

    The engine is deterministic under the logged seed, so the replayed
    state, including the random generator position, matches the original.
    """
    records = [
        json.loads(line)
        for line in Path(log_path).read_text().splitlines()
        if line.strip()
    ]
    if not records or "seed" not in records[0]:
        raise ValueError(f"log {log_path} has no opening record")
    seed = records[0]["seed"]
    article_id = records[0]["article_id"]
    engine = engines[article_id]
    state = engine.new_state(session_id)
    rng = Random(seed)
    for record in records:
        engine.respond(state, record["user"], rng)
    return Session(session_id, article_id, seed, state, rng)


def create_app(
    graphs: Mapping[str, DocumentGraph],
    log_dir: Optional[Path] = None,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
    templates: Optional[dict] = None,
    confidence_threshold: Optional[float] = None,
) -> FastAPI:
    """Build the FastAPI app over prebuilt document graphs."""
    engine_kwargs = {}
    if templates is not None:
        engine_kwargs["templates"] = templates
    if confidence_threshold is not None:
        engine_kwargs["confidence_threshold"] = confidence_threshold
    engines = {
        article_id: DialogEngine(graph, **engine_kwargs)
        for article_id, graph in graphs.items()
    }
    store = SessionStore(engines, log_dir=log_dir, ttl_seconds=ttl_seconds)
    app = FastAPI(title="newsgraph chat service")
    app.state.store = store

    def reply_payload(session: Session, text: str, plan) -> dict:
        return {
            "session_id": session.session_id,
            "text": text,
            "strategy": plan.strategy,
            "node_ids": list(plan.informed_nodes),
            "phase": session.state.phase,
            "turn": session.state.turn_index - 1,
        }

    @app.get("/articles")
    def list_articles() -> List[dict]:
        return [
            {"article_id": aid, "title": engine.graph.title.text}
            for aid, engine in sorted(store.engines.items())
        ]

    @app.post("/articles/{article_id}/sessions")
    def create_session(article_id: str, body: Optional[SessionIn] = None):
        seed = body.seed if body else None
        try:
            session, text, plan = store.create(article_id, seed=seed)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown article {article_id!r}")
        payload = reply_payload(session, text, plan)
        payload["opening"] = text
        payload["article_id"] = article_id
        return payload

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageIn):
        try:
            session, text, plan = store.message(session_id, body.text)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown session {session_id!r}")
        except TerminalStateError:
            raise HTTPException(status_code=409,
                                detail="session has already ended")
        return reply_payload(session, text, plan)

    @app.get("/sessions/{session_id}/debug")
    def session_debug(session_id: str):
        try:
            return store.debug(session_id)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown session {session_id!r}")

    @app.websocket("/sessions/{session_id}/stream")
    async def session_stream(websocket: WebSocket, session_id: str):
        await websocket.accept()
        try:
            while True:
                data = await websocket.receive_json()
                text = str(data.get("text", ""))
                try:
                    session, reply, plan = store.message(session_id, text)
                except KeyError:
                    await websocket.send_json(
                        {"error": "unknown_session", "code": 404})
                    continue
                except TerminalStateError:
                    await websocket.send_json(
                        {"error": "session_ended", "code": 409})
                    continue
                await websocket.send_json(reply_payload(session, reply, plan))
        except WebSocketDisconnect:
            return

    return app
