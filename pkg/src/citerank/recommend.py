"""Recommendation queries and relevance-feedback sessions.

A Query fixes the seed set, algorithm, parameters, and an optional year
cutoff. Venue and expert recommendations sum paper scores per venue or
author (a coauthored paper contributes its full score to every author).
Feedback sessions accumulate relevant papers into the seed set, mask
irrelevant ones out of the graph, and never redisplay shown papers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import DomainError, FeedbackOverlapError
from .graph import CitationGraph, GraphMask, prune_after_year
from .rankers import ALGORITHMS, RankerParams, ScoreVector, run_ranker, top_k

TARGETS = ("papers", "venues", "experts")


@dataclass
class Query:
    seeds: frozenset[int]
    k: int = 10
    algorithm: str = "darwr"
    params: RankerParams = field(default_factory=RankerParams)
    year_cutoff: Optional[int] = None
    banned: frozenset[int] = frozenset()

    def __post_init__(self):
        self.seeds = frozenset(int(s) for s in self.seeds)
        self.banned = frozenset(int(b) for b in self.banned)
        if not self.seeds:
            raise DomainError("query needs at least one seed paper")
        if self.k < 1:
            raise DomainError(f"k={self.k} must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise DomainError(f"unknown algorithm {self.algorithm!r}")


def base_mask(g: CitationGraph, q: Query) -> GraphMask:
    if q.year_cutoff is not None:
        return prune_after_year(g, q.year_cutoff, exclude=q.banned)
    mask = g.full_mask()
    return mask.without(q.banned) if q.banned else mask


def query_scores(g: CitationGraph, q: Query, mask: Optional[GraphMask] = None, *, deadline=None) -> ScoreVector:
    mask = base_mask(g, q) if mask is None else mask
    return run_ranker(q.algorithm, g, mask, q.seeds, q.params, deadline=deadline)


def recommend_papers(g: CitationGraph, q: Query, *, mask: Optional[GraphMask] = None, deadline=None) -> list[tuple[int, float]]:
    """Top-k non-seed papers for the query."""
    mask = base_mask(g, q) if mask is None else mask
    scores = query_scores(g, q, mask, deadline=deadline)
    return top_k(g, mask, scores, q.seeds, q.k)


def venue_totals(g: CitationGraph, mask: GraphMask, scores: np.ndarray) -> np.ndarray:
    """Per-venue sum of paper scores over active papers (seeds included)."""
    vids = g.venue_ids
    act = mask.active & (vids >= 0)
    return np.bincount(vids[act], weights=scores[act], minlength=len(g.venue_names))


def author_totals(g: CitationGraph, mask: GraphMask, scores: np.ndarray) -> np.ndarray:
    """Per-author sum of paper scores; coauthors each receive the full score."""
    paper_of, author_of = g.author_slots()
    keep = mask.active[paper_of]
    return np.bincount(author_of[keep], weights=scores[paper_of[keep]], minlength=len(g.author_names))


def _ranked_totals(totals: np.ndarray, k: int) -> list[tuple[int, float]]:
    if totals.size == 0:
        return []
    order = np.lexsort((np.arange(totals.size), -totals))
    return [(int(i), float(totals[i])) for i in order[:k]]


def recommend_venues(g: CitationGraph, q: Query, *, mask: Optional[GraphMask] = None, deadline=None) -> list[tuple[int, float]]:
    mask = base_mask(g, q) if mask is None else mask
    scores = query_scores(g, q, mask, deadline=deadline)
    return _ranked_totals(venue_totals(g, mask, scores.scores), q.k)


def recommend_experts(g: CitationGraph, q: Query, *, mask: Optional[GraphMask] = None, deadline=None) -> list[tuple[int, float]]:
    mask = base_mask(g, q) if mask is None else mask
    scores = query_scores(g, q, mask, deadline=deadline)
    return _ranked_totals(author_totals(g, mask, scores.scores), q.k)


@dataclass
class FeedbackSession:
    """Evolving state of one interactive search."""

    session_id: str
    base: Query
    page_size: int = 10
    relevant: set[int] = field(default_factory=set)
    irrelevant: set[int] = field(default_factory=set)
    shown: list[int] = field(default_factory=list)
    pages_served: int = 0

    def seeds(self) -> set[int]:
        return set(self.base.seeds) | self.relevant


def session_mask(g: CitationGraph, session: FeedbackSession) -> GraphMask:
    mask = base_mask(g, session.base)
    return mask.without(session.irrelevant) if session.irrelevant else mask


def next_page(g: CitationGraph, session: FeedbackSession, *, deadline=None) -> list[tuple[int, float]]:
    """Re-rank with the current seeds and exclusions, return the next
    page_size unseen papers, and record them as shown."""
    seeds = session.seeds()
    mask = session_mask(g, session)
    scores = run_ranker(session.base.algorithm, g, mask, seeds, session.base.params, deadline=deadline)
    exclude = seeds | set(session.shown) | session.irrelevant
    page = top_k(g, mask, scores, exclude, session.page_size)
    session.shown.extend(pid for pid, _ in page)
    session.pages_served += 1
    return page


def apply_feedback(session: FeedbackSession, positive: Iterable[int], negative: Iterable[int]) -> FeedbackSession:
    """Record feedback on previously shown papers. Positive papers join the
    seed set; negative papers are masked out of the graph for every later
    ranking in this session."""
    pos = {int(p) for p in positive}
    neg = {int(p) for p in negative}
    if pos & neg:
        raise FeedbackOverlapError(f"papers marked both relevant and irrelevant: {sorted(pos & neg)}")
    if (pos & session.irrelevant) or (neg & session.relevant):
        raise FeedbackOverlapError("feedback contradicts earlier feedback in this session")
    shown = set(session.shown)
    unshown = (pos | neg) - shown
    if unshown:
        raise DomainError(f"feedback on papers never shown: {sorted(unshown)}")
    session.relevant |= pos
    session.irrelevant |= neg
    return session
