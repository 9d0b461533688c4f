"""Corpus construction: metadata/reference merging via title matching,
edge-list persistence, bibliography parsing, and synthetic corpora.

Reference records (title-only citation data) are joined to metadata
records through an inverted index on normalized title words plus an edit
distance gate, with a publication-year sanity check. The thresholds are
explicit keyword arguments so runs are reproducible.
"""

from __future__ import annotations

import json
import math
import re
import unicodedata
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from .errors import DomainError, IntegrityError, ParseError
from .graph import CitationGraph

_NON_ALNUM_RE = re.compile(r"[^a-z0-9]+")


def normalize_title(raw: str) -> str:
    """Lowercase, fold diacritics, strip punctuation, collapse whitespace."""
    folded = unicodedata.normalize("NFKD", raw)
    folded = "".join(c for c in folded if not unicodedata.combining(c))
    return _NON_ALNUM_RE.sub(" ", folded.lower()).strip()


def levenshtein(a: str, b: str, bound: Optional[int] = None) -> int:
    """Edit distance; may return any value > bound once the true distance
    provably exceeds it."""
    if a == b:
        return 0
    if bound is not None and abs(len(a) - len(b)) > bound:
        return bound + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if bound is not None and min(cur) > bound:
            return bound + 1
        prev = cur
    return prev[-1]


@dataclass
class MetaRecord:
    external_key: str
    title: str
    year: int = 0
    venue_name: str = ""
    author_names: tuple[str, ...] = ()


@dataclass
class RefRecord:
    source_title: str
    source_year: int = 0
    referenced_titles: tuple[tuple[str, int], ...] = ()


class TitleIndex:
    """Inverted index over normalized title words, with per-record years."""

    def __init__(self, titles: Sequence[str], years: Optional[Sequence[int]] = None):
        self.normalized = [normalize_title(t) for t in titles]
        self.years = list(years) if years is not None else [0] * len(self.normalized)
        self.postings: dict[str, list[int]] = {}
        for rid, norm in enumerate(self.normalized):
            for word in set(norm.split()):
                self.postings.setdefault(word, []).append(rid)

    @classmethod
    def from_graph(cls, g: CitationGraph) -> "TitleIndex":
        return cls(g.titles(), g.years)

    def overlap_counts(self, title: str) -> Counter:
        """Candidate record ids -> number of query words they share."""
        counts: Counter = Counter()
        for word in set(normalize_title(title).split()):
            for rid in self.postings.get(word, ()):
                counts[rid] += 1
        return counts


def match_record(
    idx: TitleIndex,
    title: str,
    year: int = 0,
    *,
    min_word_overlap: float = 0.5,
    distance_floor: int = 2,
    distance_fraction: float = 0.10,
    year_slack: int = 1,
) -> Optional[int]:
    """Resolve a title to at most one indexed record.

    Candidates must share at least min_word_overlap of the query's title
    words; the winner is the candidate with the smallest edit distance
    between normalized titles, accepted only when that distance is at most
    max(distance_floor, ceil(distance_fraction * len(query))) and the years
    differ by at most year_slack when both are known. Ties go to the
    smaller record id.
    """
    norm = normalize_title(title)
    words = norm.split()
    if not words:
        return None
    threshold = max(distance_floor, math.ceil(distance_fraction * len(norm)))
    best: Optional[tuple[int, int]] = None
    for rid, shared in sorted(idx.overlap_counts(title).items()):
        if shared < min_word_overlap * len(set(words)):
            continue
        cand_year = idx.years[rid]
        if year and cand_year and abs(year - cand_year) > year_slack:
            continue
        dist = levenshtein(norm, idx.normalized[rid], bound=threshold)
        if dist > threshold:
            continue
        if best is None or dist < best[0]:
            best = (dist, rid)
    return None if best is None else best[1]


def search_titles(idx: TitleIndex, query: str, limit: int = 20) -> list[int]:
    """Ranked fragment search: word overlap first, then edit distance, then id.
    Unlike match_record there is no distance cutoff."""
    norm = normalize_title(query)
    if not norm:
        return []
    words = set(norm.split())
    scored = []
    for rid, shared in idx.overlap_counts(query).items():
        if 2 * shared < len(words):
            continue
        scored.append((-shared, levenshtein(norm, idx.normalized[rid]), rid))
    scored.sort()
    return [rid for _, _, rid in scored[:limit]]


# -- graph building ---------------------------------------------------------


@dataclass
class BuildReport:
    documents: int
    matched_documents: int
    authors: int
    edges: int
    unmatched_sources: int = 0
    dropped_references: int = 0

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True)


class _Interner:
    def __init__(self):
        self.index: dict[str, int] = {}
        self.names: list[str] = []

    def get(self, name: str) -> int:
        i = self.index.get(name)
        if i is None:
            i = len(self.names)
            self.index[name] = i
            self.names.append(name)
        return i


def _graph_from_meta(meta: Sequence[MetaRecord], edges: Iterable[tuple[int, int]]) -> CitationGraph:
    venues = _Interner()
    authors = _Interner()
    venue_ids = []
    author_lists = []
    for rec in meta:
        venue_ids.append(venues.get(rec.venue_name) if rec.venue_name else -1)
        seen = []
        for a in rec.author_names:
            aid = authors.get(a)
            if aid not in seen:
                seen.append(aid)
        author_lists.append(seen)
    edge_arr = np.array(sorted(set(edges)), dtype=np.int64).reshape(-1, 2)
    return CitationGraph(
        keys=[m.external_key for m in meta],
        titles=[m.title for m in meta],
        years=[m.year for m in meta],
        venue_ids=venue_ids,
        author_lists=author_lists,
        edges=edge_arr,
        venue_names=venues.names,
        author_names=authors.names,
    )


def build_graph(
    meta: Sequence[MetaRecord],
    refs: Sequence[RefRecord],
    **match_kwargs,
) -> tuple[CitationGraph, BuildReport]:
    """Join reference records onto metadata records by title matching.

    Reference lists of records mapping to the same document are unioned;
    references that resolve to no document are dropped and counted.
    """
    for rec in meta:
        if not rec.title.strip():
            raise DomainError(f"metadata record {rec.external_key!r} has an empty title")
    idx = TitleIndex([m.title for m in meta], [m.year for m in meta])
    edges: set[tuple[int, int]] = set()
    matched_sources: set[int] = set()
    unmatched_sources = 0
    dropped = 0
    for ref in refs:
        src = match_record(idx, ref.source_title, ref.source_year, **match_kwargs)
        if src is None:
            unmatched_sources += 1
            continue
        matched_sources.add(src)
        for title, year in ref.referenced_titles:
            dst = match_record(idx, title, year, **match_kwargs)
            if dst is None or dst == src:
                dropped += 1
                continue
            edges.add((src, dst))
    g = _graph_from_meta(meta, edges)
    report = BuildReport(
        documents=len(meta),
        matched_documents=len(matched_sources),
        authors=len(g.author_names),
        edges=g.n_edges,
        unmatched_sources=unmatched_sources,
        dropped_references=dropped,
    )
    return g, report


# -- TSV edge-list persistence ----------------------------------------------


def parse_meta_tsv(path: Union[str, Path]) -> list[MetaRecord]:
    """`key \\t title \\t year \\t venue \\t author1|author2|...` per line."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise ParseError(f"expected 5 tab-separated fields, got {len(fields)}", line=lineno)
            key, title, year_s, venue, authors_s = fields
            if not key:
                raise ParseError("empty external key", line=lineno)
            if not title.strip():
                raise ParseError(f"empty title for {key!r}", line=lineno)
            try:
                year = int(year_s) if year_s else 0
            except ValueError:
                raise ParseError(f"bad year {year_s!r}", line=lineno) from None
            authors = tuple(a for a in authors_s.split("|") if a)
            records.append(MetaRecord(key, title, year, venue, authors))
    return records


def load_edgelist(meta_path: Union[str, Path], edges_path: Union[str, Path]) -> CitationGraph:
    """Build a graph from the TSV metadata and edge files. Duplicate edges
    collapse to one; unknown endpoints and self-loops are integrity errors."""
    meta = parse_meta_tsv(meta_path)
    ids: dict[str, int] = {}
    for rec in meta:
        if rec.external_key in ids:
            raise IntegrityError(f"duplicate external key {rec.external_key!r}")
        ids[rec.external_key] = len(ids)
    edges: set[tuple[int, int]] = set()
    with open(edges_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ParseError(f"expected 2 tab-separated fields, got {len(fields)}", line=lineno)
            citer, cited = fields
            for key in (citer, cited):
                if key not in ids:
                    raise IntegrityError(f"edge endpoint {key!r} missing from metadata (line {lineno})")
            if citer == cited:
                raise IntegrityError(f"self-loop on {citer!r} (line {lineno})")
            edges.add((ids[citer], ids[cited]))
    return _graph_from_meta(meta, edges)


def save_edgelist(g: CitationGraph, meta_path: Union[str, Path], edges_path: Union[str, Path]) -> None:
    """Inverse of load_edgelist; round-trips the graph exactly."""
    with open(meta_path, "w", encoding="utf-8") as fh:
        for v in range(g.n):
            m = g.meta(v)
            venue = g.venue_names[m.venue_id] if m.venue_id is not None else ""
            authors = "|".join(g.author_names[a] for a in m.author_ids)
            row = [m.external_key, m.title, str(m.year) if m.year else "", venue, authors]
            for cell in row:
                if "\t" in cell or "\n" in cell:
                    raise DomainError(f"field of paper {m.external_key!r} contains a tab or newline")
            fh.write("\t".join(row) + "\n")
    with open(edges_path, "w", encoding="utf-8") as fh:
        for u in range(g.n):
            for v in g.out_neighbors(u):
                fh.write(f"{g.key_of(u)}\t{g.key_of(int(v))}\n")


# -- external formats ---------------------------------------------------------


def parse_dblp_xml(source: Union[str, Path, TextIO]) -> list[MetaRecord]:
    """Pull article/inproceedings records out of a dblp.xml element stream."""
    records = []
    try:
        for _, elem in ET.iterparse(source, events=("end",)):
            if elem.tag not in ("article", "inproceedings"):
                continue
            title_el = elem.find("title")
            title = "".join(title_el.itertext()) if title_el is not None else ""
            key = elem.get("key", "")
            year_text = elem.findtext("year") or ""
            venue = elem.findtext("journal") or elem.findtext("booktitle") or ""
            authors = tuple(a.text for a in elem.findall("author") if a.text)
            if key and title.strip():
                try:
                    year = int(year_text) if year_text.strip() else 0
                except ValueError:
                    year = 0
                records.append(MetaRecord(key, title.strip(), year, venue, authors))
            elem.clear()
    except ET.ParseError as exc:
        raise ParseError(f"bad XML: {exc}") from exc
    return records


def parse_citeseer_jsonl(source: Union[str, Path, TextIO]) -> list[RefRecord]:
    """One JSON object per line: {"title", "year", "references": [{...}]}."""
    close = False
    if isinstance(source, (str, Path)):
        fh = open(source, encoding="utf-8")
        close = True
    else:
        fh = source
    records = []
    try:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc}", line=lineno) from exc
            title = obj.get("title") or ""
            if not title.strip():
                raise ParseError("record without a title", line=lineno)
            refs = tuple(
                (r.get("title") or "", int(r.get("year") or 0))
                for r in obj.get("references", ())
                if (r.get("title") or "").strip()
            )
            records.append(RefRecord(title, int(obj.get("year") or 0), refs))
    finally:
        if close:
            fh.close()
    return records


# -- bibliography --------------------------------------------------------------


_FIELD_RE = re.compile(r"(title|year)\s*=\s*", re.IGNORECASE)


def _read_value(body: str, start: int) -> str:
    if start >= len(body):
        return ""
    c = body[start]
    if c == "{":
        depth = 0
        for k in range(start, len(body)):
            if body[k] == "{":
                depth += 1
            elif body[k] == "}":
                depth -= 1
                if depth == 0:
                    return body[start + 1:k]
        raise ParseError("unbalanced braces in field value")
    if c == '"':
        end = body.find('"', start + 1)
        if end == -1:
            raise ParseError("unterminated quoted field value")
        return body[start + 1:end]
    end = start
    while end < len(body) and body[end] not in ",\n}":
        end += 1
    return body[start:end]


def _entry_bodies(text: str):
    i = text.find("@")
    while i != -1:
        j = text.find("{", i)
        if j == -1:
            raise ParseError("bibliography entry without an opening brace")
        depth = 0
        k = j
        while k < len(text):
            if text[k] == "{":
                depth += 1
            elif text[k] == "}":
                depth -= 1
                if depth == 0:
                    break
            k += 1
        if depth != 0:
            raise ParseError("unbalanced braces in bibliography")
        yield text[j + 1:k]
        i = text.find("@", k)


def parse_bibliography(
    text: str,
    g: CitationGraph,
    index: Optional[TitleIndex] = None,
    **match_kwargs,
) -> tuple[set[int], list[str]]:
    """Resolve BibTeX-like entries (title/year fields only) against the
    graph's titles. Returns (seed paper ids, unmatched titles verbatim)."""
    idx = index if index is not None else TitleIndex.from_graph(g)
    seeds: set[int] = set()
    unmatched: list[str] = []
    for body in _entry_bodies(text):
        fields: dict[str, str] = {}
        for m in _FIELD_RE.finditer(body):
            name = m.group(1).lower()
            if name not in fields:
                fields[name] = _read_value(body, m.end()).strip()
        title = fields.get("title", "")
        if not title:
            key = body.split(",", 1)[0].strip() or "<untitled entry>"
            unmatched.append(key)
            continue
        try:
            year = int(re.sub(r"[^0-9]", "", fields.get("year", "")) or 0)
        except ValueError:
            year = 0
        rid = match_record(idx, title, year, **match_kwargs)
        if rid is None:
            unmatched.append(title)
        else:
            seeds.add(rid)
    return seeds, unmatched


# -- synthetic corpora ----------------------------------------------------------


def _unique_in_draw_order(values: np.ndarray) -> np.ndarray:
    _, first = np.unique(values, return_index=True)
    return values[np.sort(first)]


_TITLE_NOUNS = (
    "ranking", "retrieval", "clustering", "indexing", "sampling", "caching",
    "routing", "parsing", "matching", "scheduling", "encoding", "filtering",
    "alignment", "compression", "segmentation", "verification", "annotation",
)
_TITLE_ADJS = (
    "adaptive", "incremental", "distributed", "probabilistic", "sparse",
    "hierarchical", "robust", "scalable", "online", "approximate", "hybrid",
    "latent", "dynamic",
)
_TITLE_DOMAINS = (
    "networks", "databases", "corpora", "streams", "archives", "graphs",
    "collections", "repositories", "simulations", "pipelines", "benchmarks",
)


def _synth_title(i: int, venue: int) -> str:
    # distinct wording per index so fuzzy title matching cannot confuse
    # neighboring papers; the bare index keeps every title unique
    adj = _TITLE_ADJS[i % len(_TITLE_ADJS)]
    noun = _TITLE_NOUNS[(i // len(_TITLE_ADJS)) % len(_TITLE_NOUNS)]
    dom = _TITLE_DOMAINS[(i // 7) % len(_TITLE_DOMAINS)]
    topic = f" for community {venue:02d}" if venue >= 0 else ""
    return f"{adj} {noun} in {dom} {i}{topic}"


def synth_corpus(
    n: int,
    *,
    years: tuple[int, int] = (1970, 2010),
    mean_refs: float = 20.0,
    pa_exponent: float = 1.0,
    seed: int = 0,
    venues: int = 0,
    community_bias: float = 0.0,
    authors_per_venue: int = 25,
    max_authors: int = 3,
    recency_window: int = 0,
) -> CitationGraph:
    """Time-layered citation corpus: paper i may cite only papers with a
    smaller index, picked by preferential attachment on in-degree. With
    venues > 0 every paper gets a venue and community_bias of its references
    stay inside the venue's community; authors are drawn from per-venue
    pools so authorship correlates with communities. recency_window > 0
    limits citations to the last that-many papers, stretching graph
    distances (pure preferential attachment is small-world). Deterministic
    per seed.
    """
    if n < 10:
        raise DomainError(f"corpus size {n} too small (need >= 10)")
    lo, hi = years
    if hi < lo:
        raise DomainError(f"year span {years} is reversed")
    rng = np.random.default_rng(seed)
    span = hi - lo + 1
    year_arr = lo + (np.arange(n, dtype=np.int64) * span) // n

    venue_ids = rng.integers(0, venues, size=n) if venues > 0 else np.full(n, -1)
    fast = (pa_exponent == 1.0 and recency_window == 0
            and (venues == 0 or community_bias == 0.0))
    edges: list[tuple[int, int]] = []

    if fast:
        cap = int(n * mean_refs * 1.6) + 64
        endpoints = np.empty(cap, dtype=np.int64)
        n_ep = 0
        for i in range(1, n):
            want = int(min(i, rng.poisson(mean_refs)))
            if want == 0:
                continue
            picked: list[int] = []
            seen: set[int] = set()
            for _ in range(6):
                need = want - len(picked)
                if need <= 0:
                    break
                batch = need + 4
                coins = rng.random(batch)
                uni = rng.integers(0, i, size=batch)
                if n_ep:
                    pa = endpoints[rng.integers(0, n_ep, size=batch)]
                    cand = np.where(coins < n_ep / (n_ep + i), pa, uni)
                else:
                    cand = uni
                for t in _unique_in_draw_order(cand):
                    t = int(t)
                    if t not in seen:
                        seen.add(t)
                        picked.append(t)
                        if len(picked) == want:
                            break
            if n_ep + len(picked) > cap:
                cap *= 2
                grown = np.empty(cap, dtype=np.int64)
                grown[:n_ep] = endpoints[:n_ep]
                endpoints = grown
            for t in picked:
                edges.append((i, t))
                endpoints[n_ep] = t
                n_ep += 1
    else:
        indeg = np.zeros(n, dtype=np.float64)
        pools: list[list[int]] = [[] for _ in range(max(venues, 1))]
        for i in range(1, n):
            lo_i = max(0, i - recency_window) if recency_window > 0 else 0
            want = int(min(i - lo_i, rng.poisson(mean_refs)))
            if want > 0:
                w = (indeg[lo_i:i] + 1.0) ** pa_exponent
                cumw = np.cumsum(w)
                pool = pools[venue_ids[i]] if venues > 0 else []
                pool_arr = np.asarray([p for p in pool if p >= lo_i], dtype=np.int64)
                cum_local = np.cumsum((indeg[pool_arr] + 1.0) ** pa_exponent) if pool_arr.size else None
                seen: set[int] = set()
                tries = 0
                while len(seen) < want and tries < 8 * want + 24:
                    tries += 1
                    if cum_local is not None and rng.random() < community_bias:
                        t = int(pool_arr[np.searchsorted(cum_local, rng.random() * cum_local[-1])])
                    else:
                        t = lo_i + int(np.searchsorted(cumw, rng.random() * cumw[-1]))
                    if t not in seen:
                        seen.add(t)
                        edges.append((i, t))
                        indeg[t] += 1.0
            if venues > 0:
                pools[venue_ids[i]].append(i)

    digits = max(5, len(str(n - 1)))
    keys = [f"p{i:0{digits}d}" for i in range(n)]
    titles = [_synth_title(i, int(venue_ids[i])) for i in range(n)]

    author_lists: list[list[int]] = []
    author_names: list[str] = []
    if venues > 0:
        author_names = [f"author {v:02d} {j:02d}" for v in range(venues) for j in range(authors_per_venue)]
        for i in range(n):
            cnt = int(rng.integers(1, max_authors + 1))
            picks = rng.choice(authors_per_venue, size=min(cnt, authors_per_venue), replace=False)
            base = int(venue_ids[i]) * authors_per_venue
            author_lists.append([base + int(p) for p in picks])
        venue_names = [f"venue {v:02d}" for v in range(venues)]
    else:
        author_lists = [[] for _ in range(n)]
        venue_names = []

    edge_arr = np.array(sorted(set(edges)), dtype=np.int64).reshape(-1, 2)
    return CitationGraph(
        keys=keys,
        titles=titles,
        years=year_arr.tolist(),
        venue_ids=venue_ids.tolist(),
        author_lists=author_lists,
        edges=edge_arr,
        venue_names=venue_names,
        author_names=author_names,
    )
