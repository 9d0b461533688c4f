"""Relevance scoring over a masked citation graph.

Random-walk rankers run the expanded-graph power iteration: an explicit
source node holds the restart mass, feeds it equally to the seed papers,
and collects the non-damped share from every paper each round. Katz-family
rankers propagate walk counts for L rounds and weight them by decaying
powers of beta. Local rankers score by shared citer/reference sets.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import DomainError, TimeBudgetExceeded
from .graph import CitationGraph, GraphMask

ALGORITHMS = (
    "paperrank",
    "darwr",
    "katz",
    "dakatz",
    "cocitation",
    "cocoupling",
    "ccidf",
)


@dataclass
class RankerParams:
    """Tuning knobs shared by the ranking algorithms.

    d: damping (probability a walk continues instead of restarting).
    lam: direction awareness; 1 pushes flow toward citing (newer) papers,
         0 toward referenced (older) papers.
    beta: Katz walk-length decay. L: Katz path-length cap.
    epsilon: L2 convergence threshold on the per-paper score delta.
    """

    d: float = 0.75
    lam: float = 0.5
    beta: float = 0.0005
    L: int = 10
    epsilon: float = 1e-8
    max_iters: int = 200

    def __post_init__(self):
        if not 0.0 < self.d <= 1.0:
            raise DomainError(f"damping d={self.d} outside (0, 1]")
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"lambda={self.lam} outside [0, 1]")
        if self.beta <= 0.0:
            raise DomainError(f"beta={self.beta} must be positive")
        if self.L < 1:
            raise DomainError(f"path cap L={self.L} must be >= 1")
        if self.epsilon <= 0.0:
            raise DomainError(f"epsilon={self.epsilon} must be positive")
        if self.max_iters < 1:
            raise DomainError(f"max_iters={self.max_iters} must be >= 1")


@dataclass
class ScoreVector:
    """Per-paper relevance scores plus the source node's residual mass.

    For the random-walk rankers, scores.sum() + source_score == 1 within
    1e-9 after every iteration; totals carries the per-iteration sums when
    tracking was requested. Katz-family and local rankers leave
    source_score at 0 and do not normalize.
    """

    scores: np.ndarray
    source_score: float
    iterations_run: int
    converged: bool
    totals: Optional[np.ndarray] = None


def _seed_indices(g: CitationGraph, mask: GraphMask, seeds: Iterable[int]) -> np.ndarray:
    idx = np.unique(np.fromiter((int(s) for s in seeds), dtype=np.int64))
    if idx.size == 0:
        raise DomainError("seed set is empty")
    if idx.min() < 0 or idx.max() >= g.n:
        raise DomainError("seed index out of range")
    inactive = idx[~mask.active[idx]]
    if inactive.size:
        names = ", ".join(g.key_of(int(v)) for v in inactive[:10])
        raise DomainError(f"seeds not active under mask: {names}")
    return idx


def _check_deadline(deadline: Optional[float]) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise TimeBudgetExceeded("ranking ran past its time budget")


def _restart_walk(
    g: CitationGraph,
    mask: GraphMask,
    seed_idx: np.ndarray,
    d: float,
    epsilon: float,
    max_iters: int,
    *,
    w_cit: np.ndarray,
    w_ref: np.ndarray,
    to_source: np.ndarray,
    combined: bool,
    deadline: Optional[float],
    track_totals: bool,
) -> ScoreVector:
    """Shared power iteration. w_cit weights flow delivered to citers via A,
    w_ref flow delivered to references via At; to_source marks papers whose
    whole damped share returns to the source."""
    view = mask.view()
    n = g.n
    r = np.zeros(n)
    r_s = 1.0
    bonus = 1.0 / len(seed_idx)
    totals = [] if track_totals else None
    und = view.und() if combined else None

    iterations = 0
    converged = False
    while iterations < max_iters:
        _check_deadline(deadline)
        if combined:
            nxt = und @ (r * w_cit)
        else:
            nxt = view.A @ (r * w_cit) + view.At @ (r * w_ref)
        nxt_s = (1.0 - d) * r.sum() + d * float(r @ to_source)
        nxt[seed_idx] += r_s * bonus
        iterations += 1
        delta = float(np.linalg.norm(nxt - r))
        r, r_s = nxt, nxt_s
        if totals is not None:
            totals.append(r.sum() + r_s)
        if delta < epsilon:
            converged = True
            break

    return ScoreVector(
        scores=r,
        source_score=r_s,
        iterations_run=iterations,
        converged=converged,
        totals=None if totals is None else np.asarray(totals),
    )


def paperrank(
    g: CitationGraph,
    mask: GraphMask,
    seeds: Iterable[int],
    params: RankerParams,
    *,
    deadline: Optional[float] = None,
    track_totals: bool = False,
) -> ScoreVector:
    """Random walk with restart, splitting each paper's damped mass equally
    over its references and citations. Isolated papers hand the damped
    share back to the source so no probability leaks."""
    seed_idx = _seed_indices(g, mask, seeds)
    view = mask.view()
    cd = view.out_deg + view.in_deg
    w = np.zeros(g.n)
    nz = cd > 0
    w[nz] = params.d / cd[nz]
    to_source = (mask.active & ~nz).astype(np.float64)
    return _restart_walk(
        g, mask, seed_idx, params.d, params.epsilon, params.max_iters,
        w_cit=w, w_ref=w, to_source=to_source, combined=True,
        deadline=deadline, track_totals=track_totals,
    )


def darwr(
    g: CitationGraph,
    mask: GraphMask,
    seeds: Iterable[int],
    params: RankerParams,
    *,
    deadline: Optional[float] = None,
    track_totals: bool = False,
) -> ScoreVector:
    """Direction-aware random walk with restart: lam of the damped mass
    flows to citing papers, 1-lam to referenced papers. A paper with
    neighbors on only one side sends its whole damped share there; a paper
    with none sends it to the source."""
    seed_idx = _seed_indices(g, mask, seeds)
    view = mask.view()
    od, idg = view.out_deg, view.in_deg
    d, lam = params.d, params.lam

    has_ref = od > 0
    has_cit = idg > 0
    w_cit = np.zeros(g.n)
    w_ref = np.zeros(g.n)
    both = has_ref & has_cit
    w_cit[both] = d * lam / idg[both]
    w_ref[both] = d * (1.0 - lam) / od[both]
    only_cit = has_cit & ~has_ref
    w_cit[only_cit] = d / idg[only_cit]
    only_ref = has_ref & ~has_cit
    w_ref[only_ref] = d / od[only_ref]
    to_source = (mask.active & ~has_ref & ~has_cit).astype(np.float64)

    return _restart_walk(
        g, mask, seed_idx, d, params.epsilon, params.max_iters,
        w_cit=w_cit, w_ref=w_ref, to_source=to_source, combined=False,
        deadline=deadline, track_totals=track_totals,
    )


def pagerank(
    g: CitationGraph,
    mask: GraphMask,
    d: float = 0.75,
    *,
    epsilon: float = 1e-8,
    max_iters: int = 200,
    deadline: Optional[float] = None,
) -> ScoreVector:
    """Global importance: the restart walk with every active paper a seed."""
    seeds = np.flatnonzero(mask.active)
    if seeds.size == 0:
        raise DomainError("mask has no active papers")
    params = RankerParams(d=d, epsilon=epsilon, max_iters=max_iters)
    return paperrank(g, mask, seeds, params, deadline=deadline)


def katz(
    g: CitationGraph,
    mask: GraphMask,
    seeds: Iterable[int],
    beta: float,
    L: int,
    *,
    deadline: Optional[float] = None,
) -> ScoreVector:
    """Decayed count of bidirectional walks of length <= L from the seeds.

    Walks may revisit vertices. Counts are propagated as exact integers
    (float64) and weighted by beta^i per round."""
    if L < 1:
        raise DomainError(f"path cap L={L} must be >= 1")
    if beta <= 0.0:
        raise DomainError(f"beta={beta} must be positive")
    seed_idx = _seed_indices(g, mask, seeds)
    und = mask.view().und()
    x = np.zeros(g.n)
    x[seed_idx] = 1.0
    score = np.zeros(g.n)
    f = 1.0
    for _ in range(L):
        _check_deadline(deadline)
        x = und @ x
        f *= beta
        score += f * x
    return ScoreVector(scores=score, source_score=0.0, iterations_run=L, converged=True)


def dakatz(
    g: CitationGraph,
    mask: GraphMask,
    seeds: Iterable[int],
    beta: float,
    L: int,
    lam: float,
    *,
    deadline: Optional[float] = None,
) -> ScoreVector:
    """Katz with the final step split by direction: walks arriving along a
    citation edge (into the citing, newer paper) weigh lam, walks arriving
    along a reference edge weigh 1-lam. At lam=0.5 scores are exactly half
    the plain Katz scores."""
    if L < 1:
        raise DomainError(f"path cap L={L} must be >= 1")
    if beta <= 0.0:
        raise DomainError(f"beta={beta} must be positive")
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda={lam} outside [0, 1]")
    seed_idx = _seed_indices(g, mask, seeds)
    view = mask.view()
    x = np.zeros(g.n)
    x[seed_idx] = 1.0
    score = np.zeros(g.n)
    f = 1.0
    for _ in range(L):
        _check_deadline(deadline)
        arrived_cit = view.A @ x
        arrived_ref = view.At @ x
        x = arrived_cit + arrived_ref
        f *= beta
        score += f * (lam * arrived_cit + (1.0 - lam) * arrived_ref)
    return ScoreVector(scores=score, source_score=0.0, iterations_run=L, converged=True)


def cocitation(g: CitationGraph, mask: GraphMask, seeds: Iterable[int]) -> ScoreVector:
    """score(v) = number of (seed, citer) pairs where the citer also cites v."""
    seed_idx = _seed_indices(g, mask, seeds)
    view = mask.view()
    m = np.zeros(g.n)
    m[seed_idx] = 1.0
    score = view.At @ (view.A @ m)
    return ScoreVector(scores=score, source_score=0.0, iterations_run=1, converged=True)


def cocoupling(g: CitationGraph, mask: GraphMask, seeds: Iterable[int]) -> ScoreVector:
    """score(v) = number of references v shares with the seeds (bibliographic
    coupling), summed over seeds."""
    seed_idx = _seed_indices(g, mask, seeds)
    view = mask.view()
    m = np.zeros(g.n)
    m[seed_idx] = 1.0
    score = view.A @ (view.At @ m)
    return ScoreVector(scores=score, source_score=0.0, iterations_run=1, converged=True)


def ccidf(g: CitationGraph, mask: GraphMask, seeds: Iterable[int]) -> ScoreVector:
    """Shared references weighted by inverse citation frequency: each common
    reference w contributes 1/citations(w)."""
    seed_idx = _seed_indices(g, mask, seeds)
    view = mask.view()
    m = np.zeros(g.n)
    m[seed_idx] = 1.0
    shared = view.At @ m
    inv = np.zeros(g.n)
    cited = view.in_deg > 0
    inv[cited] = 1.0 / view.in_deg[cited]
    score = view.A @ (shared * inv)
    return ScoreVector(scores=score, source_score=0.0, iterations_run=1, converged=True)


def top_k(
    g: CitationGraph,
    mask: GraphMask,
    scores,
    exclude: Iterable[int],
    k: int,
) -> list[tuple[int, float]]:
    """k best active papers outside the excluded set, ordered by score
    descending with ties broken by older year then smaller index."""
    if k < 1:
        raise DomainError(f"k={k} must be >= 1")
    s = scores.scores if isinstance(scores, ScoreVector) else np.asarray(scores, dtype=np.float64)
    banned = np.zeros(g.n, dtype=bool)
    idx = np.fromiter((int(p) for p in exclude), dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= g.n:
            raise DomainError("excluded paper index out of range")
        banned[idx] = True
    cand = np.flatnonzero(mask.active & ~banned)
    if cand.size == 0:
        return []
    order = np.lexsort((cand, g.years[cand], -s[cand]))
    top = cand[order[:k]]
    return [(int(v), float(s[v])) for v in top]


def run_ranker(
    name: str,
    g: CitationGraph,
    mask: GraphMask,
    seeds: Iterable[int],
    params: RankerParams,
    *,
    deadline: Optional[float] = None,
) -> ScoreVector:
    """Dispatch by algorithm name (see ALGORITHMS)."""
    if name == "paperrank":
        return paperrank(g, mask, seeds, params, deadline=deadline)
    if name == "darwr":
        return darwr(g, mask, seeds, params, deadline=deadline)
    if name == "katz":
        return katz(g, mask, seeds, params.beta, params.L, deadline=deadline)
    if name == "dakatz":
        return dakatz(g, mask, seeds, params.beta, params.L, params.lam, deadline=deadline)
    if name == "cocitation":
        return cocitation(g, mask, seeds)
    if name == "cocoupling":
        return cocoupling(g, mask, seeds)
    if name == "ccidf":
        return ccidf(g, mask, seeds)
    raise DomainError(f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}")
