"""HTTP/JSON API over plan spaces and navigation sessions.

Compilation happens once per (task digest, length) and the resulting space is
shared across sessions; sessions only accumulate assumption literals, so
commits are cheap.  Session ids are random 128-bit tokens.  All counts travel
as decimal strings, and snapshot payloads are serialized with the same stable
encoder the CLI uses, so equal states are byte-identical on the wire.
"""

from __future__ import annotations

import os
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import ddnnf as dnnf
from .encoding import encode
from .errors import (
    BudgetExceededError,
    CommitmentError,
    LengthBoundError,
    PlanspaceError,
    QueryError,
    TaskFormatError,
    UnsatisfiableSpaceError,
)
from .query import parse_query
from .reasoning import NavSession, PlanSpace, Snapshot
from .task import PlanningTask, check_bound
from .wire import (
    commitment_from_dict,
    commitment_to_dict,
    dumps_stable,
    plan_names,
    probability_to_dict,
    snapshot_to_dict,
    task_from_payload,
)

DEFAULT_SNAPSHOT_SAMPLES = 3
CORS_ORIGIN_ENV = "PLANSPACE_CORS_ORIGIN"


@dataclass
class _SessionEntry:
    session: NavSession
    task: PlanningTask
    lock: threading.Lock = field(default_factory=threading.Lock)
    created: float = field(default_factory=time.monotonic)
    last_access: float = field(default_factory=time.monotonic)


class NotFound(PlanspaceError):
    pass


class SessionStore:
    """In-memory registry of tasks, compiled plan spaces, and sessions.

    Spaces are immutable and shared by many readers; per-session mutations
    serialize on the session lock; concurrent compilations of distinct spaces
    are throttled by a global gate.
    """

    def __init__(
        self,
        node_budget: int = dnnf.DEFAULT_NODE_BUDGET,
        time_budget: float | None = dnnf.DEFAULT_TIME_BUDGET,
        nnf_dir: str | None = None,
        snapshot_samples: int = DEFAULT_SNAPSHOT_SAMPLES,
        sample_seed: int = 0,
        compile_jobs: int = 2,
    ):
        self.node_budget = node_budget
        self.time_budget = time_budget
        self.nnf_dir = nnf_dir
        self.snapshot_samples = snapshot_samples
        self.sample_seed = sample_seed
        self._lock = threading.RLock()
        self._tasks: dict[str, PlanningTask] = {}
        self._spaces: dict[str, PlanSpace] = {}
        self._build_locks: dict[str, threading.Lock] = {}
        self._sessions: dict[str, _SessionEntry] = {}
        self._compile_gate = threading.BoundedSemaphore(compile_jobs)

    # ── tasks ─────────────────────────────────────────────────────────────

    def add_task(self, payload) -> str:
        task = task_from_payload(payload)
        task_id = task.digest()[:32]
        with self._lock:
            self._tasks[task_id] = task
        return task_id

    def get_task(self, task_id: str) -> PlanningTask:
        with self._lock:
            task = self._tasks.get(task_id)
        if task is None:
            raise NotFound(f"unknown task {task_id!r}")
        return task

    # ── spaces ────────────────────────────────────────────────────────────

    def _space_key(self, task: PlanningTask, bound: int) -> str:
        return f"{task.digest()[:16]}-{bound}"

    def _nnf_path(self, task: PlanningTask, bound: int) -> str | None:
        if not self.nnf_dir:
            return None
        return os.path.join(self.nnf_dir, f"{task.digest()}-{bound}.nnf")

    def _build(self, task: PlanningTask, bound: int) -> PlanSpace:
        enc = encode(task, bound, with_indicators=True)
        dag = None
        path = self._nnf_path(task, bound)
        if path and os.path.exists(path):
            with open(path, "r", encoding="utf-8") as handle:
                candidate = dnnf.read_nnf(handle.read())
            if candidate.num_vars == enc.cnf.num_vars:
                dag = candidate
        if dag is None:
            dag = dnnf.compile_cnf(
                enc.cnf, node_budget=self.node_budget, time_budget=self.time_budget
            )
            if path:
                os.makedirs(self.nnf_dir, exist_ok=True)
                with open(path, "w", encoding="utf-8") as handle:
                    handle.write(dnnf.write_nnf(dag))
        return PlanSpace(
            task, bound, enc, dag,
            node_budget=self.node_budget, time_budget=self.time_budget,
        )

    def build_space(self, task_id: str, bound: int) -> tuple[str, PlanSpace]:
        task = self.get_task(task_id)
        check_bound(task, bound)
        key = self._space_key(task, bound)
        with self._lock:
            space = self._spaces.get(key)
            if space is not None:
                return key, space
            gate = self._build_locks.setdefault(key, threading.Lock())
        with gate:
            with self._lock:
                space = self._spaces.get(key)
                if space is not None:
                    return key, space
            with self._compile_gate:
                space = self._build(task, bound)
            with self._lock:
                self._spaces[key] = space
        return key, space

    def get_space(self, space_id: str) -> PlanSpace:
        with self._lock:
            space = self._spaces.get(space_id)
        if space is None:
            raise NotFound(f"unknown space {space_id!r}")
        return space

    # ── sessions ──────────────────────────────────────────────────────────

    def open_session(self, space_id: str) -> tuple[str, _SessionEntry]:
        space = self.get_space(space_id)
        session = NavSession(
            space, sample_count=self.snapshot_samples, sample_seed=self.sample_seed
        )
        session_id = secrets.token_hex(16)
        entry = _SessionEntry(session=session, task=space.task)
        with self._lock:
            self._sessions[session_id] = entry
        return session_id, entry

    def get_session(self, session_id: str) -> _SessionEntry:
        with self._lock:
            entry = self._sessions.get(session_id)
            if entry is not None:
                entry.last_access = time.monotonic()
        if entry is None:
            raise NotFound(f"unknown session {session_id!r}")
        return entry

    def prune_idle_sessions(self, max_idle_seconds: float) -> int:
        """Drop sessions idle for longer than the given horizon."""
        horizon = time.monotonic() - max_idle_seconds
        with self._lock:
            stale = [sid for sid, e in self._sessions.items() if e.last_access < horizon]
            for sid in stale:
                del self._sessions[sid]
        return len(stale)


class SpaceRequest(BaseModel):
    length: int


class ProbRequest(BaseModel):
    query: str


class SampleRequest(BaseModel):
    n: int
    seed: int = 0


class CommitRequest(BaseModel):
    commitment: dict


def _snapshot_response(task: PlanningTask, snapshot: Snapshot) -> Response:
    return Response(
        content=dumps_stable(snapshot_to_dict(task, snapshot)),
        media_type="application/json",
    )


def create_app(store: SessionStore | None = None) -> FastAPI:
    store = store if store is not None else SessionStore()
    app = FastAPI(title="planspace", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[os.environ.get(CORS_ORIGIN_ENV, "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(PlanspaceError)
    def planspace_error(request, exc: PlanspaceError):
        if isinstance(exc, NotFound):
            return JSONResponse(status_code=404, content={"detail": str(exc)})
        if isinstance(exc, CommitmentError):
            return JSONResponse(status_code=409, content={"detail": str(exc)})
        if isinstance(exc, UnsatisfiableSpaceError):
            return JSONResponse(status_code=409, content={"detail": str(exc)})
        if isinstance(exc, BudgetExceededError):
            return JSONResponse(status_code=503, content={"detail": str(exc)})
        if isinstance(exc, (TaskFormatError, QueryError, LengthBoundError)):
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.post("/tasks")
    def add_task(payload: dict = Body(...)):
        return {"task_id": store.add_task(payload)}

    @app.post("/tasks/{task_id}/spaces")
    def build_space(task_id: str, request: SpaceRequest):
        space_id, space = store.build_space(task_id, request.length)
        return {"space_id": space_id, "count": str(space.count())}

    @app.get("/spaces/{space_id}")
    def describe_space(space_id: str):
        space = store.get_space(space_id)
        task = space.task
        return {
            "count": str(space.count()),
            "length": space.bound,
            "has_plans": not space.is_empty,
            "brave": sorted(task.operators[o].name for o in space.brave_operators()),
            "cautious": sorted(task.operators[o].name for o in space.cautious_operators()),
            "facets": [
                {
                    "operator": task.operators[f.operator].name,
                    "sign": "include" if f.inclusive else "exclude",
                }
                for f in space.facets()
            ],
        }

    @app.post("/spaces/{space_id}/prob")
    def space_probability(space_id: str, request: ProbRequest):
        space = store.get_space(space_id)
        query = parse_query(request.query, space.task, space.bound)
        return probability_to_dict(space.probability(query))

    @app.post("/spaces/{space_id}/sample")
    def space_sample(space_id: str, request: SampleRequest):
        space = store.get_space(space_id)
        plans = space.sample_plans(request.n, request.seed)
        return {"plans": [plan_names(space.task, p) for p in plans]}

    @app.post("/spaces/{space_id}/sessions")
    def open_session(space_id: str):
        session_id, entry = store.open_session(space_id)
        body = {
            "session_id": session_id,
            "snapshot": snapshot_to_dict(entry.task, entry.session.snapshot()),
        }
        return Response(content=dumps_stable(body), media_type="application/json")

    @app.post("/sessions/{session_id}/commit")
    def commit(session_id: str, request: CommitRequest):
        entry = store.get_session(session_id)
        commitment = commitment_from_dict(entry.task, request.commitment)
        try:
            with entry.lock:
                snapshot = entry.session.commit(commitment)
        except CommitmentError as exc:
            return JSONResponse(
                status_code=409,
                content={
                    "detail": str(exc),
                    "commitment": commitment_to_dict(entry.task, commitment),
                },
            )
        return _snapshot_response(entry.task, snapshot)

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        entry = store.get_session(session_id)
        with entry.lock:
            snapshot = entry.session.undo()
        return _snapshot_response(entry.task, snapshot)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        entry = store.get_session(session_id)
        with entry.lock:
            snapshot = entry.session.snapshot()
        return _snapshot_response(entry.task, snapshot)

    return app


def serve(
    host: str = "127.0.0.1",
    port: int = 8000,
    nnf_dir: str | None = None,
    node_budget: int = dnnf.DEFAULT_NODE_BUDGET,
    time_budget: float | None = dnnf.DEFAULT_TIME_BUDGET,
) -> None:
    import uvicorn

    store = SessionStore(node_budget=node_budget, time_budget=time_budget, nnf_dir=nnf_dir)
    uvicorn.run(create_app(store), host=host, port=port)
