"""HTTP facade: bibliography upload, title search, recommendation queries,
and relevance-feedback sessions over one immutable in-memory graph.

Paper ids on the wire are the graph's external key strings. Sessions live
in a TTL-bound in-process store; each session serializes its own mutations
behind a lock, so concurrent requests to different sessions never
interleave state.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .errors import DomainError, FeedbackOverlapError, ParseError, TimeBudgetExceeded
from .graph import CitationGraph
from .ingest import TitleIndex, parse_bibliography, search_titles
from .rankers import ALGORITHMS, RankerParams
from .recommend import (
    FeedbackSession,
    Query,
    apply_feedback,
    author_totals,
    base_mask,
    next_page,
    query_scores,
    venue_totals,
)

DEFAULT_TTL_SECONDS = 3600.0
DEFAULT_TIME_BUDGET = 30.0


@dataclass
class StoredSession:
    session: FeedbackSession
    lock: threading.Lock
    last_access: float


class SessionStore:
    """Thread-safe session map with idle expiry and unguessable ids."""

    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._sessions: dict[str, StoredSession] = {}

    def create(self, make_session) -> FeedbackSession:
        sid = secrets.token_hex(16)
        session = make_session(sid)
        with self._lock:
            self._sessions[sid] = StoredSession(session, threading.Lock(), time.monotonic())
        return session

    def get(self, sid: str) -> StoredSession:
        now = time.monotonic()
        with self._lock:
            stored = self._sessions.get(sid)
            if stored is None or now - stored.last_access > self.ttl:
                self._sessions.pop(sid, None)
                raise KeyError(sid)
            stored.last_access = now
            return stored

    def sweep(self) -> None:
        now = time.monotonic()
        with self._lock:
            dead = [k for k, v in self._sessions.items() if now - v.last_access > self.ttl]
            for k in dead:
                del self._sessions[k]

    def __len__(self) -> int:
        return len(self._sessions)


class RecommendBody(BaseModel):
    session_id: str
    algorithm: Optional[str] = None
    k: Optional[int] = None
    lam: Optional[float] = Field(default=None, alias="lambda")
    d: Optional[float] = None
    target: str = "papers"

    model_config = {"populate_by_name": True}


class FeedbackBody(BaseModel):
    session_id: str
    relevant: list[str] = []
    irrelevant: list[str] = []


def create_app(
    g: CitationGraph,
    *,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
    time_budget: float = DEFAULT_TIME_BUDGET,
    cors_origins: tuple[str, ...] = ("*",),
    default_params: Optional[RankerParams] = None,
    page_size: int = 10,
) -> FastAPI:
    app = FastAPI(title="citerank", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(ttl_seconds)
    index = TitleIndex.from_graph(g)
    params0 = default_params or RankerParams()
    app.state.store = store
    app.state.graph = g

    def paper_item(pid: int, score: Optional[float] = None) -> dict:
        meta = g.meta(pid)
        venue = g.venue_names[meta.venue_id] if meta.venue_id is not None else None
        item = {"id": meta.external_key, "title": meta.title,
                "year": meta.year or None, "venue": venue}
        if score is not None:
            item["score"] = score
        return item

    def to_ids(keys: list[str]) -> set[int]:
        out = set()
        for key in keys:
            if not g.has_key(key):
                raise HTTPException(400, f"unknown paper id {key!r}")
            out.add(g.id_of(key))
        return out

    def get_session(sid: str) -> StoredSession:
        try:
            return store.get(sid)
        except KeyError:
            raise HTTPException(404, "unknown or expired session") from None

    def deadline() -> Optional[float]:
        return time.monotonic() + time_budget if time_budget > 0 else time.monotonic()

    @app.get("/api/health")
    def health():
        return {
            "papers": g.n,
            "edges": g.n_edges,
            "venues": len(g.venue_names),
            "authors": len(g.author_names),
        }

    @app.post("/api/bibliography")
    async def bibliography(request: Request):
        raw = await request.body()
        text = raw.decode("utf-8", errors="replace")
        ctype = request.headers.get("content-type", "")
        if "json" in ctype:
            try:
                payload = json.loads(text)
            except json.JSONDecodeError:
                raise HTTPException(400, "invalid JSON body") from None
            if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
                raise HTTPException(400, 'JSON body must carry a "text" field')
            text = payload["text"]
        if not text.strip():
            raise HTTPException(400, "empty bibliography")
        try:
            seeds, unmatched = parse_bibliography(text, g, index)
        except ParseError as exc:
            raise HTTPException(400, str(exc)) from None
        if not seeds:
            raise HTTPException(422, detail={"message": "no entry resolved", "unmatched": unmatched})
        session = store.create(lambda sid: FeedbackSession(
            sid,
            Query(seeds=frozenset(seeds), k=page_size, algorithm="darwr", params=params0),
            page_size=page_size,
        ))
        return {
            "session_id": session.session_id,
            "seeds": [paper_item(pid) for pid in sorted(seeds)],
            "unmatched": unmatched,
        }

    @app.get("/api/search")
    def search(q: str = ""):
        if not q.strip():
            raise HTTPException(400, "empty query")
        hits = search_titles(index, q, limit=20)
        return {"results": [paper_item(pid) for pid in hits]}

    @app.post("/api/recommend")
    def recommend(body: RecommendBody):
        if body.target not in ("papers", "venues", "experts"):
            raise HTTPException(400, f"unknown target {body.target!r}")
        stored = get_session(body.session_id)
        with stored.lock:
            session = stored.session
            q = session.base
            if body.algorithm is not None:
                if body.algorithm not in ALGORITHMS:
                    raise HTTPException(400, f"unknown algorithm {body.algorithm!r}")
                q.algorithm = body.algorithm
            try:
                if body.lam is not None or body.d is not None:
                    p = q.params
                    q.params = RankerParams(
                        d=body.d if body.d is not None else p.d,
                        lam=body.lam if body.lam is not None else p.lam,
                        beta=p.beta, L=p.L, epsilon=p.epsilon, max_iters=p.max_iters,
                    )
            except DomainError as exc:
                raise HTTPException(400, str(exc)) from None
            if body.k is not None:
                if body.k < 1:
                    raise HTTPException(400, "k must be >= 1")
                session.page_size = body.k
                q.k = body.k
            try:
                if body.target == "papers":
                    page = next_page(g, session, deadline=deadline())
                    items = [paper_item(pid, score) for pid, score in page]
                    payload = {"items": items, "page": session.pages_served}
                else:
                    seeds = session.seeds()
                    mask = base_mask(g, q).without(session.irrelevant)
                    probe = Query(seeds=frozenset(seeds), k=q.k, algorithm=q.algorithm,
                                  params=q.params, year_cutoff=q.year_cutoff, banned=q.banned)
                    sv = query_scores(g, probe, mask, deadline=deadline())
                    if body.target == "venues":
                        totals = venue_totals(g, mask, sv.scores)
                        names = g.venue_names
                    else:
                        totals = author_totals(g, mask, sv.scores)
                        names = g.author_names
                    order = np.lexsort((np.arange(totals.size), -totals))[:q.k]
                    payload = {"items": [
                        {"name": names[int(i)], "score": float(totals[int(i)])}
                        for i in order
                    ]}
            except TimeBudgetExceeded:
                raise HTTPException(
                    503, "ranking exceeded the time budget; retry with a smaller k "
                         "or a cheaper algorithm",
                    headers={"Retry-After": "2"}) from None
            except DomainError as exc:
                raise HTTPException(400, str(exc)) from None
            payload["params"] = {
                "algorithm": q.algorithm, "k": session.page_size,
                "lambda": q.params.lam, "d": q.params.d, "target": body.target,
            }
            return payload

    @app.post("/api/feedback")
    def feedback(body: FeedbackBody):
        if not body.relevant and not body.irrelevant:
            raise HTTPException(400, "feedback body names no papers")
        stored = get_session(body.session_id)
        with stored.lock:
            session = stored.session
            try:
                apply_feedback(session, to_ids(body.relevant), to_ids(body.irrelevant))
            except FeedbackOverlapError as exc:
                raise HTTPException(409, str(exc)) from None
            except DomainError as exc:
                raise HTTPException(400, str(exc)) from None
            try:
                page = next_page(g, session, deadline=deadline())
            except TimeBudgetExceeded:
                raise HTTPException(503, "ranking exceeded the time budget",
                                    headers={"Retry-After": "2"}) from None
            return {
                "ok": True,
                "page": [paper_item(pid, score) for pid, score in page],
                "relevant_count": len(session.relevant),
                "irrelevant_count": len(session.irrelevant),
            }

    @app.get("/api/session/{sid}")
    def session_state(sid: str):
        stored = get_session(sid)
        with stored.lock:
            s = stored.session
            return {
                "session_id": s.session_id,
                "seeds": [paper_item(pid) for pid in sorted(s.seeds())],
                "relevant_count": len(s.relevant),
                "irrelevant_count": len(s.irrelevant),
                "shown_count": len(s.shown),
                "pages_served": s.pages_served,
                "params": {
                    "algorithm": s.base.algorithm,
                    "lambda": s.base.params.lam,
                    "d": s.base.params.d,
                    "k": s.page_size,
                },
            }

    return app
