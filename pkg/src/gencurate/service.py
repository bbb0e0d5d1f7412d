"""HTTP/JSON session service for interactive curation.

A session wraps one benchmark problem: candidate batches come from
diversified iterative search on the posterior-adjusted quantitative
score (Y + current posterior mean of U), and pairwise preferences update
the posterior.  Sessions live in memory; every mutation snapshots the
session (creation request + ordered event log + posterior summary) to a
JSON file when a session directory is configured, and any transcript
replays to a bit-identical posterior because generation seeds derive
from (session seed, batch index) and posterior updates are
deterministic.
"""

import json
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import bench, dis_gc, kernels, objective, preference

DEFAULT_DIS_N = 20
DEFAULT_DIS_T = 80
DEFAULT_SIGMA2_DIS = 2e-2


class ServiceError(Exception):
    def __init__(self, status, code, message):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class CreateSessionRequest(BaseModel):
    problem: str
    sigma: Optional[float] = None
    m: int = 5
    seed: int = 0
    kernel: Optional[dict] = None
    dis_n: int = DEFAULT_DIS_N
    dis_t: int = DEFAULT_DIS_T
    sigma2_dis: float = DEFAULT_SIGMA2_DIS


class PreferenceRequest(BaseModel):
    winner: int
    loser: int


@dataclass
class Session:
    id: str
    request: dict
    problem: object
    kernel: object
    sigma: float
    m: int
    seed: int
    dis_n: int
    dis_t: int
    sigma2_dis: float
    posterior: object
    candidates: list = field(default_factory=list)
    batches: list = field(default_factory=list)
    events: list = field(default_factory=list)
    status: str = "active"
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def preference_count(self):
        return len(self.posterior.history)


def _session_from_request(req: CreateSessionRequest):
    try:
        problem = bench.make_problem(req.problem)
    except ValueError as exc:
        raise ServiceError(400, "unknown_problem", str(exc))
    if req.sigma is not None and req.sigma < 0:
        raise ServiceError(400, "validation_error", "sigma must be non-negative")
    if req.m < 1:
        raise ServiceError(400, "validation_error", "m must be >= 1")
    sigma = problem.sigma if req.sigma is None else float(req.sigma)
    if req.kernel is not None:
        try:
            kernel = kernels.Kernel.from_json(req.kernel)
        except (KeyError, ValueError) as exc:
            raise ServiceError(400, "validation_error", f"bad kernel: {exc}")
    else:
        kernel = problem.kernel
    dis_n = max(req.dis_n, req.m)
    dis_t = max(req.dis_t, dis_n)
    posterior = preference.make_prior(
        kernel.with_amplitude(sigma**2), problem.space.points
    )
    return Session(
        id=secrets.token_hex(16),
        request=req.model_dump(),
        problem=problem,
        kernel=kernel,
        sigma=sigma,
        m=req.m,
        seed=req.seed,
        dis_n=dis_n,
        dis_t=dis_t,
        sigma2_dis=req.sigma2_dis,
        posterior=posterior,
    )


def _generate_batch(session):
    """Run DIS-GC on Y + posterior mean; append candidates; return batch index."""
    batch_index = len(session.batches)
    adjusted = _adjusted_problem(session)
    params = objective.CurationObjectiveParams(
        sigma=session.sigma, m=session.m, kernel=session.kernel
    )
    actions, _ = dis_gc.run(
        adjusted,
        session.kernel,
        params,
        n=session.dis_n,
        T=session.dis_t,
        sigma2_dis=session.sigma2_dis,
        seed=bench.subseed(session.seed, batch_index),
    )
    indices = []
    for action in actions:
        indices.append(len(session.candidates))
        session.candidates.append(np.asarray(action, dtype=np.float64))
    session.batches.append(indices)
    return batch_index


def _adjusted_problem(session):
    """The session problem with Y replaced by Y + posterior mean."""
    return bench.Problem(
        name=session.problem.name,
        space=session.problem.space,
        y_grid=np.asarray(session.problem.y_grid) + session.posterior.mean,
        kernel=session.problem.kernel,
        sigma=session.sigma,
        metric=session.problem.metric,
        extras=session.problem.extras,
    )


def _candidate_doc(session, index):
    action = session.candidates[index]
    grid_idx = session.problem.space.index_of(action)
    mean, var = preference.predict(session.posterior, action)
    return {
        "index": index,
        "action": [float(x) for x in action],
        "y": float(session.problem.y_grid[grid_idx]),
        "posterior_mean": mean,
        "posterior_var": var,
    }


def _apply_preference(session, winner, loser):
    n_candidates = len(session.candidates)
    for idx in (winner, loser):
        if not 0 <= idx < n_candidates:
            raise ServiceError(
                400, "invalid_candidate", f"candidate index {idx} was never served"
            )
    if winner == loser:
        raise ServiceError(400, "invalid_candidate", "winner and loser are the same")
    obs_winner = session.candidates[winner]
    obs_loser = session.candidates[loser]
    try:
        obs = preference.PreferenceObservation(winner=obs_winner, loser=obs_loser)
        session.posterior = preference.update(session.posterior, obs)
    except (preference.DegenerateComparisonError, ValueError) as exc:
        raise ServiceError(409, "degenerate_comparison", str(exc))
    session.events.append({"type": "preference", "winner": winner, "loser": loser})


def _next_batch(session):
    if session.status != "active":
        raise ServiceError(409, "session_closed", "session is closed")
    session.events.append({"type": "next_batch"})
    return _generate_batch(session)


def replay_transcript(request_dict, events):
    """Rebuild a session from its creation request plus ordered events."""
    session = _session_from_request(CreateSessionRequest(**request_dict))
    _generate_batch(session)
    for event in events:
        if event["type"] == "preference":
            _apply_preference(session, event["winner"], event["loser"])
        elif event["type"] == "next_batch":
            _generate_batch(session)
        else:
            raise ValueError(f"unknown event type {event['type']!r}")
    return session


class SessionStore:
    """In-memory sessions with optional JSON snapshots per mutation."""

    def __init__(self, session_dir=None):
        self._sessions = {}
        self._lock = threading.Lock()
        self.session_dir = Path(session_dir) if session_dir else None
        if self.session_dir:
            self.session_dir.mkdir(parents=True, exist_ok=True)

    def add(self, session):
        with self._lock:
            self._sessions[session.id] = session

    def get(self, session_id):
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "unknown_session", f"no session {session_id}")
        return session

    def snapshot(self, session):
        if not self.session_dir:
            return
        doc = {
            "id": session.id,
            "request": session.request,
            "events": session.events,
            "status": session.status,
            "batches": session.batches,
            "candidates": [c.tolist() for c in session.candidates],
            "posterior": {
                "mean": session.posterior.mean.tolist(),
                "cov_diag": np.diag(session.posterior.cov).tolist(),
            },
        }
        path = self.session_dir / f"{session.id}.json"
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True)


def create_app(session_dir=None, frontend_dir=None):
    app = FastAPI(title="gencurate session service")
    store = SessionStore(session_dir)
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def _service_error(_request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "validation_error", "message": str(exc.errors())},
        )

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        session = _session_from_request(req)
        _generate_batch(session)
        store.add(session)
        store.snapshot(session)
        return {
            "session_id": session.id,
            "problem": session.problem.name,
            "sigma": session.sigma,
            "m": session.m,
            "seed": session.seed,
            "batch_index": 0,
            "candidates": [_candidate_doc(session, i) for i in session.batches[0]],
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return {
                "session_id": session.id,
                "problem": session.problem.name,
                "sigma": session.sigma,
                "m": session.m,
                "seed": session.seed,
                "status": session.status,
                "batch_count": len(session.batches),
                "preference_count": session.preference_count,
                "candidate_count": len(session.candidates),
            }

    @app.get("/sessions/{session_id}/candidates")
    def get_candidates(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return {
                "candidates": [
                    _candidate_doc(session, i) for i in range(len(session.candidates))
                ]
            }

    @app.post("/sessions/{session_id}/preferences")
    def submit_preference(session_id: str, req: PreferenceRequest):
        session = store.get(session_id)
        with session.lock:
            _apply_preference(session, req.winner, req.loser)
            store.snapshot(session)
            return {
                "preference_count": session.preference_count,
                "summary": [
                    _candidate_doc(session, i) for i in range(len(session.candidates))
                ],
            }

    @app.post("/sessions/{session_id}/next-batch")
    def next_batch(session_id: str):
        session = store.get(session_id)
        with session.lock:
            batch_index = _next_batch(session)
            store.snapshot(session)
            return {
                "batch_index": batch_index,
                "candidates": [
                    _candidate_doc(session, i) for i in session.batches[batch_index]
                ],
            }

    @app.get("/sessions/{session_id}/posterior")
    def get_posterior(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return {
                "grid": session.posterior.grid.tolist(),
                "mean": session.posterior.mean.tolist(),
                "var": np.diag(session.posterior.cov).tolist(),
                "history": [obs.to_json() for obs in session.posterior.history],
            }

    if frontend_dir:
        dist = Path(frontend_dir)
        if dist.is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/ui", StaticFiles(directory=dist, html=True), name="ui")

    return app
