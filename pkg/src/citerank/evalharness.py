"""Desk-scale evaluation protocols: reference-hiding scenarios, future
co-citation prediction, parameter sweeps, citation-pattern CDFs, feedback
simulation, and venue/reviewer experiments with occurrence baselines.

All runs are deterministic for a fixed rng seed: the trial plan (sources
and hidden sets) is drawn up front and can be shared across algorithms so
intersection matrices compare like with like.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DomainError
from .graph import (
    CitationGraph,
    clustering_coefficient,
    distances_from,
    prune_after_year,
)
from .rankers import RankerParams, pagerank, run_ranker, top_k
from .recommend import FeedbackSession, Query, apply_feedback, author_totals, next_page, venue_totals

SCENARIO_KINDS = ("hide_random", "hide_recent", "hide_earlier", "future_prediction")
FEEDBACK_MODES = ("none", "positive", "negative", "both")


@dataclass
class ScenarioSpec:
    kind: str
    trials: int = 500
    min_refs: int = 20
    year_window: tuple[int, int] = (2005, 2010)
    hide_fraction: float = 0.10
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise DomainError(f"unknown scenario kind {self.kind!r}")
        if not 0.0 < self.hide_fraction < 1.0:
            raise DomainError(f"hide_fraction={self.hide_fraction} outside (0, 1)")
        if self.min_refs < 1 or self.trials < 1:
            raise DomainError("min_refs and trials must be >= 1")


@dataclass
class TrialPlan:
    source: int
    seeds: tuple[int, ...]
    hidden: tuple[int, ...]  # empty in future_prediction plans


@dataclass
class TrialRecord:
    source: int
    relevant: tuple[int, ...]  # hidden set, or later co-cited set
    denom: int
    top: tuple[int, ...]
    hits: int
    accuracy: float


@dataclass
class ScenarioResult:
    kind: str
    algorithm: str
    records: list[TrialRecord]
    skipped: int = 0

    @property
    def mean_accuracy(self) -> float:
        if not self.records:
            return 0.0
        return float(np.mean([r.accuracy for r in self.records]))

    def rows(self, g: CitationGraph) -> list[tuple]:
        """CSV rows: trial, source, hidden, hits, accuracy."""
        return [
            (i, g.key_of(r.source), r.denom, r.hits, r.accuracy)
            for i, r in enumerate(self.records)
        ]


def eligible_sources(g: CitationGraph, spec: ScenarioSpec) -> np.ndarray:
    lo, hi = spec.year_window
    deg = g.out_degrees()
    ok = (g.years >= lo) & (g.years <= hi) & (deg >= spec.min_refs)
    return np.flatnonzero(ok)


def _active_refs(g: CitationGraph, s: int) -> np.ndarray:
    """References of s that survive pruning at year(s)."""
    refs = g.out_neighbors(s)
    ys = int(g.years[s])
    keep = (g.years[refs] > 0) & (g.years[refs] <= ys)
    return refs[keep]


def plan_trials(g: CitationGraph, spec: ScenarioSpec) -> tuple[list[TrialPlan], int]:
    """Draw sources (without replacement) and their hidden sets. Returns the
    runnable plans plus the count of trials skipped as ineligible."""
    rng = np.random.default_rng(spec.seed)
    elig = eligible_sources(g, spec)
    if len(elig) < spec.trials:
        raise DomainError(
            f"only {len(elig)} eligible sources for {spec.trials} trials")
    chosen = rng.choice(elig, size=spec.trials, replace=False)
    plans: list[TrialPlan] = []
    skipped = 0
    for s in chosen:
        s = int(s)
        refs = _active_refs(g, s)
        if spec.kind == "future_prediction":
            if refs.size == 0:
                skipped += 1
                continue
            plans.append(TrialPlan(s, tuple(int(v) for v in refs), ()))
            continue
        if refs.size == 0:
            skipped += 1
            continue
        h = max(1, int(math.floor(spec.hide_fraction * refs.size + 0.5)))
        if refs.size - h < 1:
            skipped += 1
            continue
        if spec.kind == "hide_random":
            hidden = rng.choice(refs, size=h, replace=False)
        elif spec.kind == "hide_recent":
            order = np.lexsort((refs, -g.years[refs]))
            hidden = refs[order[:h]]
        else:  # hide_earlier
            order = np.lexsort((refs, g.years[refs]))
            hidden = refs[order[:h]]
        hidden_set = set(int(v) for v in hidden)
        seeds = tuple(int(v) for v in refs if int(v) not in hidden_set)
        plans.append(TrialPlan(s, seeds, tuple(sorted(hidden_set))))
    return plans, skipped


def run_hide_scenario(
    g: CitationGraph,
    spec: ScenarioSpec,
    algorithm: str,
    params: RankerParams,
    plan: Optional[tuple[list[TrialPlan], int]] = None,
) -> ScenarioResult:
    """Hide a slice of each source's references, rank from the rest, and
    measure how many hidden references surface in the top-deg list."""
    if spec.kind == "future_prediction":
        raise DomainError("use run_future_prediction for the future_prediction kind")
    plans, skipped = plan if plan is not None else plan_trials(g, spec)
    records = []
    for p in plans:
        mask = prune_after_year(g, int(g.years[p.source]), exclude=(p.source,))
        sv = run_ranker(algorithm, g, mask, p.seeds, params)
        k = len(p.seeds) + len(p.hidden)
        top = tuple(pid for pid, _ in top_k(g, mask, sv, set(p.seeds), k))
        hits = len(set(top) & set(p.hidden))
        records.append(TrialRecord(
            source=p.source, relevant=p.hidden, denom=len(p.hidden),
            top=top, hits=hits, accuracy=hits / len(p.hidden)))
    return ScenarioResult(spec.kind, algorithm, records, skipped)


def run_future_prediction(
    g: CitationGraph,
    spec: ScenarioSpec,
    algorithm: str,
    params: RankerParams,
    plan: Optional[tuple[list[TrialPlan], int]] = None,
    top_n: int = 10,
) -> ScenarioResult:
    """Seed with all of a source's references on the graph as of its year
    (source kept); a recommendation is a hit when some strictly later paper
    cites both it and the source."""
    if spec.kind != "future_prediction":
        raise DomainError(f"spec kind is {spec.kind!r}, not future_prediction")
    plans, skipped = plan if plan is not None else plan_trials(g, spec)
    records = []
    for p in plans:
        s = p.source
        ys = int(g.years[s])
        mask = prune_after_year(g, ys)
        sv = run_ranker(algorithm, g, mask, p.seeds, params)
        exclude = set(p.seeds) | {s}
        top = tuple(pid for pid, _ in top_k(g, mask, sv, exclude, top_n))
        citers = g.in_neighbors(s)
        later = citers[g.years[citers] > ys]
        cocited: set[int] = set()
        for c in later:
            cocited.update(int(w) for w in g.out_neighbors(int(c)))
        cocited.discard(s)
        hits = len(set(top) & cocited)
        records.append(TrialRecord(
            source=s, relevant=tuple(sorted(cocited)), denom=top_n,
            top=top, hits=hits, accuracy=hits / top_n))
    return ScenarioResult(spec.kind, algorithm, records, skipped)


def run_scenario(
    g: CitationGraph,
    spec: ScenarioSpec,
    algorithm: str,
    params: RankerParams,
    plan: Optional[tuple[list[TrialPlan], int]] = None,
) -> ScenarioResult:
    if spec.kind == "future_prediction":
        return run_future_prediction(g, spec, algorithm, params, plan)
    return run_hide_scenario(g, spec, algorithm, params, plan)


def intersection_matrix(
    results: Mapping[str, ScenarioResult],
) -> tuple[list[str], np.ndarray]:
    """Pairwise overlap of relevant recommendations: cell (a, b) averages
    |top_a ∩ top_b ∩ relevant| / denom per trial. The diagonal reproduces
    each method's accuracy."""
    names = list(results)
    if not names:
        raise DomainError("no results to intersect")
    base = results[names[0]]
    for name in names[1:]:
        other = results[name]
        if len(other.records) != len(base.records) or any(
            a.source != b.source or a.relevant != b.relevant
            for a, b in zip(base.records, other.records)
        ):
            raise DomainError("results cover different trial sets")
    if not base.records:
        raise DomainError("empty trial set")
    m = len(names)
    matrix = np.zeros((m, m))
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            if j < i:
                continue
            vals = []
            for ra, rb in zip(results[a].records, results[b].records):
                both = set(ra.top) & set(rb.top) & set(ra.relevant)
                vals.append(len(both) / ra.denom)
            matrix[i, j] = matrix[j, i] = float(np.mean(vals))
    return names, matrix


def matrix_rows(names: Sequence[str], matrix: np.ndarray) -> list[tuple]:
    """CSV rows: method_a, method_b, value."""
    return [
        (a, b, float(matrix[i, j]))
        for i, a in enumerate(names)
        for j, b in enumerate(names)
    ]


# -- parameter sweeps -----------------------------------------------------------


@dataclass
class SweepRow:
    d: float
    lam: float
    metric: str
    value: float
    trials: int


def parameter_sweep(
    g: CitationGraph,
    d_values: Sequence[float],
    lam_values: Sequence[float],
    metric: str,
    *,
    trials: int = 500,
    min_refs: int = 20,
    year_window: tuple[int, int] = (2005, 2010),
    seed: int = 0,
    params: Optional[RankerParams] = None,
    top_n: int = 10,
) -> list[SweepRow]:
    """Mean top-10 seed distance or publication year of the direction-aware
    walker over a (d, lambda) grid, averaged over random sources whose
    references serve as seeds. CSV rows: d, lambda, metric, value, trials."""
    if metric not in ("mean_distance", "mean_year"):
        raise DomainError(f"unknown sweep metric {metric!r}")
    if not len(d_values) or not len(lam_values):
        raise DomainError("empty parameter grid")
    base = params or RankerParams()
    spec = ScenarioSpec("hide_random", trials=trials, min_refs=min_refs,
                        year_window=year_window, seed=seed)
    rng = np.random.default_rng(seed)
    elig = eligible_sources(g, spec)
    if len(elig) < trials:
        raise DomainError(f"only {len(elig)} eligible sources for {trials} trials")
    sources = [int(s) for s in rng.choice(elig, size=trials, replace=False)]
    mask = g.full_mask()

    seed_sets = {s: tuple(int(v) for v in g.out_neighbors(s)) for s in sources}
    dists: dict[int, np.ndarray] = {}
    if metric == "mean_distance":
        for s in sources:
            dists[s] = distances_from(g, mask, seed_sets[s])

    rows = []
    for d in d_values:
        for lam in lam_values:
            p = replace(base, d=float(d), lam=float(lam))
            vals = []
            for s in sources:
                seeds = seed_sets[s]
                sv = run_ranker("darwr", g, mask, seeds, p)
                top = [pid for pid, _ in top_k(g, mask, sv, set(seeds), top_n)]
                if metric == "mean_year":
                    ys = [int(g.years[v]) for v in top if g.years[v] > 0]
                    if ys:
                        vals.append(float(np.mean(ys)))
                else:
                    dv = dists[s][top]
                    dv = dv[np.isfinite(dv)]
                    if dv.size:
                        vals.append(float(dv.mean()))
            rows.append(SweepRow(float(d), float(lam), metric,
                                 float(np.mean(vals)), len(vals)))
    return rows


# -- citation-pattern CDFs ---------------------------------------------------------


@dataclass
class CdfRow:
    name: str
    metric: str
    value: float
    cdf: float


def citation_pattern_cdf(
    g: CitationGraph,
    lists: Mapping[str, Sequence[int]],
    *,
    d: float = 0.75,
    mask=None,
    pagerank_scores: Optional[np.ndarray] = None,
) -> list[CdfRow]:
    """Empirical CDFs of clustering coefficient and global PageRank over each
    named collection of papers (with multiplicity).
    CSV rows: list, metric, value, cdf."""
    mask = mask if mask is not None else g.full_mask()
    if pagerank_scores is None:
        pagerank_scores = pagerank(g, mask, d).scores
    rows: list[CdfRow] = []
    cc_cache: dict[int, float] = {}
    for name, papers in lists.items():
        papers = [int(p) for p in papers]
        if not papers:
            continue
        for v in set(papers):
            if v not in cc_cache:
                cc_cache[v] = clustering_coefficient(g, mask, v)
        for metric, values in (
            ("clustering", sorted(cc_cache[v] for v in papers)),
            ("pagerank", sorted(float(pagerank_scores[v]) for v in papers)),
        ):
            n = len(values)
            rows.extend(
                CdfRow(name, metric, float(val), (i + 1) / n)
                for i, val in enumerate(values)
            )
    return rows


# -- feedback simulation --------------------------------------------------------------


@dataclass
class FeedbackSimSpec:
    trials: int = 100
    min_refs: int = 20
    year_window: tuple[int, int] = (2005, 2010)
    target_distance: int = 5
    relevant_distance: int = 2
    page_size: int = 10
    seed: int = 0
    params: RankerParams = field(default_factory=RankerParams)


@dataclass
class FeedbackTrial:
    source: int
    target: int
    pages: dict[str, int]


@dataclass
class FeedbackSimResult:
    trials: list[FeedbackTrial]
    skipped: int

    def mean_pages(self, mode: str) -> float:
        return float(np.mean([t.pages[mode] for t in self.trials]))

    def reduction_pct(self, mode: str) -> float:
        none = self.mean_pages("none")
        return 100.0 * (1.0 - self.mean_pages(mode) / none) if none else 0.0

    def rows(self) -> list[tuple]:
        """CSV rows: mode, trials, mean_pages, reduction_pct."""
        return [
            (mode, len(self.trials), self.mean_pages(mode), self.reduction_pct(mode))
            for mode in FEEDBACK_MODES
        ]


def _pages_until_found(g, query, target, dist_to_target, mode, spec) -> int:
    session = FeedbackSession("sim", query, page_size=spec.page_size)
    max_pages = math.ceil(g.n / spec.page_size) + 2
    for page_no in range(1, max_pages + 1):
        page = [pid for pid, _ in next_page(g, session)]
        if target in page:
            return page_no
        if not page:
            raise DomainError("target never surfaced; graph exhausted")
        if mode == "none":
            continue
        near = {p for p in page if dist_to_target[p] <= spec.relevant_distance}
        far = set(page) - near
        positive = near if mode in ("positive", "both") else set()
        negative = far if mode in ("negative", "both") else set()
        apply_feedback(session, positive, negative)
    raise DomainError("page cap exceeded")


def feedback_simulation(g: CitationGraph, spec: FeedbackSimSpec) -> FeedbackSimResult:
    """Idealized user study: how many 10-result pages until a known target
    paper surfaces, under no/positive/negative/both feedback. The simulated
    user calls a shown paper relevant when its undirected distance to the
    target is at most relevant_distance."""
    scenario = ScenarioSpec("hide_random", trials=spec.trials, min_refs=spec.min_refs,
                            year_window=spec.year_window, seed=spec.seed)
    rng = np.random.default_rng(spec.seed)
    elig = eligible_sources(g, scenario)
    if len(elig) < spec.trials:
        raise DomainError(f"only {len(elig)} eligible sources for {spec.trials} trials")
    sources = [int(s) for s in rng.choice(elig, size=spec.trials, replace=False)]

    trials: list[FeedbackTrial] = []
    skipped = 0
    for s in sources:
        ys = int(g.years[s])
        mask = prune_after_year(g, ys, exclude=(s,))
        seeds = tuple(int(v) for v in _active_refs(g, s))
        if not seeds:
            skipped += 1
            continue
        dist_seed = distances_from(g, mask, seeds)
        candidates = np.flatnonzero(dist_seed == spec.target_distance)
        if candidates.size == 0:
            skipped += 1
            continue
        sv = run_ranker("darwr", g, mask, seeds, spec.params)
        order = np.lexsort((candidates, g.years[candidates], -sv.scores[candidates]))
        target = int(candidates[order[0]])
        dist_to_target = distances_from(g, mask, (target,))
        query = Query(seeds=frozenset(seeds), k=spec.page_size, algorithm="darwr",
                      params=spec.params, year_cutoff=ys, banned=frozenset({s}))
        pages = {
            mode: _pages_until_found(g, query, target, dist_to_target, mode, spec)
            for mode in FEEDBACK_MODES
        }
        trials.append(FeedbackTrial(s, target, pages))
    if not trials:
        raise DomainError("no trial produced a target at the requested distance")
    return FeedbackSimResult(trials, skipped)


# -- venue / reviewer experiments --------------------------------------------------------


@dataclass
class ExperimentResult:
    kind: str  # "venue" or "reviewer"
    values: dict[str, dict[str, float]]  # method -> metric -> value
    trials_run: int
    skipped: int

    def rows(self) -> list[tuple]:
        """CSV rows: method, metric, value."""
        return [
            (method, metric, value)
            for method, metrics in self.values.items()
            for metric, value in sorted(metrics.items())
        ]


def _occurrence_top(values: np.ndarray, minlength: int, k: int) -> list[int]:
    counts = np.bincount(values, minlength=minlength)
    order = np.lexsort((np.arange(counts.size), -counts))
    return [int(i) for i in order[:k]]


def _distance2_papers(g: CitationGraph, mask, seeds: Sequence[int]) -> np.ndarray:
    """Seeds plus their active references and citers, deduplicated."""
    active = mask.active
    out = set(int(s) for s in seeds)
    for s in seeds:
        out.update(int(v) for v in g.out_neighbors(s) if active[v])
        out.update(int(v) for v in g.in_neighbors(s) if active[v])
    return np.fromiter(out, dtype=np.int64)


def _experiment(
    g: CitationGraph,
    kind: str,
    trials: int,
    algorithms: Sequence[str],
    params: RankerParams,
    seed: int,
    k: int,
    min_refs: int,
) -> ExperimentResult:
    rng = np.random.default_rng(seed)
    deg = g.out_degrees()
    ok = (g.years > 0) & (deg >= min_refs)
    if kind == "venue":
        ok &= g.venue_ids >= 0
    else:
        ok &= g.author_counts() > 0
    elig = np.flatnonzero(ok)
    if len(elig) < trials:
        raise DomainError(f"only {len(elig)} eligible sources for {trials} trials")
    sources = [int(s) for s in rng.choice(elig, size=trials, replace=False)]

    methods = list(algorithms) + ["baseline1", "baseline2"]
    hits_any = {m: 0 for m in methods}
    hits_all = {m: 0 for m in methods}
    run = 0
    skipped = 0
    for s in sources:
        ys = int(g.years[s])
        mask = prune_after_year(g, ys, exclude=(s,))
        seeds = tuple(int(v) for v in _active_refs(g, s))
        if not seeds:
            skipped += 1
            continue
        run += 1
        if kind == "venue":
            want_any = {int(g.venue_ids[s])}
            want_all = want_any
        else:
            want_all = set(g.meta(s).author_ids)
            want_any = want_all

        for algo in algorithms:
            sv = run_ranker(algo, g, mask, seeds, params)
            if kind == "venue":
                totals = venue_totals(g, mask, sv.scores)
            else:
                totals = author_totals(g, mask, sv.scores)
            order = np.lexsort((np.arange(totals.size), -totals))
            top = set(int(i) for i in order[:k])
            hits_any[algo] += int(bool(want_any & top))
            hits_all[algo] += int(want_all <= top)

        seed_arr = np.asarray(seeds, dtype=np.int64)
        d2_arr = _distance2_papers(g, mask, seeds)
        for method, pool in (("baseline1", seed_arr), ("baseline2", d2_arr)):
            if kind == "venue":
                vals = g.venue_ids[pool]
                vals = vals[vals >= 0]
                top = set(_occurrence_top(vals, len(g.venue_names), k))
            else:
                paper_of, author_of = g.author_slots()
                keep = np.isin(paper_of, pool)
                top = set(_occurrence_top(author_of[keep], len(g.author_names), k))
            hits_any[method] += int(bool(want_any & top))
            hits_all[method] += int(want_all <= top)

    if run == 0:
        raise DomainError("no runnable trials")
    values: dict[str, dict[str, float]] = {}
    for m in methods:
        if kind == "venue":
            values[m] = {f"accuracy@{k}": hits_any[m] / run}
        else:
            values[m] = {f"any@{k}": hits_any[m] / run, f"all@{k}": hits_all[m] / run}
    return ExperimentResult(kind, values, run, skipped)


def venue_experiment(
    g: CitationGraph,
    trials: int,
    *,
    algorithms: Sequence[str] = ("darwr", "paperrank", "dakatz"),
    params: Optional[RankerParams] = None,
    seed: int = 0,
    k: int = 10,
    min_refs: int = 1,
) -> ExperimentResult:
    """Can the source paper's venue be recovered from its references?
    Baseline 1 counts venue occurrences over the seeds; Baseline 2 over the
    seeds plus their references and citers."""
    return _experiment(g, "venue", trials, algorithms, params or RankerParams(),
                       seed, k, min_refs)


def reviewer_experiment(
    g: CitationGraph,
    trials: int,
    *,
    algorithms: Sequence[str] = ("darwr", "paperrank", "dakatz"),
    params: Optional[RankerParams] = None,
    seed: int = 0,
    k: int = 25,
    min_refs: int = 1,
) -> ExperimentResult:
    """Treat the source's authors as ideal reviewers and check whether the
    expert ranking recovers any (any@k) or all (all@k) of them."""
    return _experiment(g, "reviewer", trials, algorithms, params or RankerParams(),
                       seed, k, min_refs)
