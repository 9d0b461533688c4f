"""Citation graph data model: immutable sparse digraph plus per-query masks.

Edge convention: an edge (u, v) means paper u cites paper v, so the
out-adjacency of u holds its references and the in-adjacency holds the
papers citing u. The reversed adjacency is stored as a second CSR view of
the same edge set, never as an independent edge list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .errors import DomainError, IntegrityError

YEAR_MIN = 1900
YEAR_MAX = 2100


@dataclass(frozen=True)
class PaperMeta:
    """Per-paper metadata. year == 0 means unknown."""

    external_key: str
    title: str
    year: int
    venue_id: Optional[int]
    author_ids: tuple[int, ...]


def _csr_from_edges(n: int, edges: np.ndarray) -> sp.csr_matrix:
    data = np.ones(len(edges), dtype=np.float64)
    mat = sp.csr_matrix((data, (edges[:, 0], edges[:, 1])), shape=(n, n))
    mat.sort_indices()
    return mat


class CitationGraph:
    """Immutable directed citation graph with dual adjacency and metadata.

    Construction validates structural invariants (no self-loops, no
    duplicate edges, year ranges, unique author lists). After that the
    object is safe to share across threads.
    """

    def __init__(
        self,
        keys: Sequence[str],
        titles: Sequence[str],
        years: Sequence[int],
        venue_ids: Sequence[int],
        author_lists: Sequence[Sequence[int]],
        edges: np.ndarray,
        venue_names: Sequence[str] = (),
        author_names: Sequence[str] = (),
    ):
        n = len(keys)
        if not (len(titles) == len(years) == len(venue_ids) == len(author_lists) == n):
            raise IntegrityError("metadata columns have mismatched lengths")

        self._keys = list(keys)
        self._titles = list(titles)
        self._years = np.asarray(years, dtype=np.int32)
        self._venue_ids = np.asarray(venue_ids, dtype=np.int32)
        self.venue_names = tuple(venue_names)
        self.author_names = tuple(author_names)

        bad_years = (self._years != 0) & ((self._years < YEAR_MIN) | (self._years > YEAR_MAX))
        if bad_years.any():
            v = int(np.flatnonzero(bad_years)[0])
            raise IntegrityError(f"paper {self._keys[v]!r} has year {int(self._years[v])} outside [{YEAR_MIN}, {YEAR_MAX}]")
        if len(self.venue_names) and self._venue_ids.size:
            if self._venue_ids.max(initial=-1) >= len(self.venue_names):
                raise IntegrityError("venue id out of range of venue_names")

        counts = np.array([len(a) for a in author_lists], dtype=np.int64)
        self._author_indptr = np.concatenate([[0], np.cumsum(counts)])
        flat = [a for lst in author_lists for a in lst]
        self._author_ids = np.asarray(flat, dtype=np.int32)
        for v, lst in enumerate(author_lists):
            if len(set(lst)) != len(lst):
                raise IntegrityError(f"paper {self._keys[v]!r} lists a duplicate author")
        if self._author_ids.size and len(self.author_names):
            if self._author_ids.max() >= len(self.author_names):
                raise IntegrityError("author id out of range of author_names")
        # paper index of each (paper, author) slot, for expert score sums
        self._author_paper = np.repeat(np.arange(n, dtype=np.int32), counts)

        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise IntegrityError("edge endpoint out of range")
            loops = edges[:, 0] == edges[:, 1]
            if loops.any():
                v = int(edges[loops][0, 0])
                raise IntegrityError(f"self-loop on paper {self._keys[v]!r}")
            uniq = np.unique(edges, axis=0)
            if len(uniq) != len(edges):
                raise IntegrityError("duplicate edges in input")
        self._A = _csr_from_edges(n, edges)
        self._At = self._A.transpose().tocsr()
        self._At.sort_indices()

        self._id_of = {k: i for i, k in enumerate(self._keys)}
        if len(self._id_of) != n:
            raise IntegrityError("duplicate external keys")

    # -- basic queries ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._keys)

    @property
    def n_edges(self) -> int:
        return int(self._A.nnz)

    @property
    def years(self) -> np.ndarray:
        return self._years

    @property
    def venue_ids(self) -> np.ndarray:
        return self._venue_ids

    def out_neighbors(self, v: int) -> np.ndarray:
        """Papers referenced by v (sorted)."""
        return self._A.indices[self._A.indptr[v]:self._A.indptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        """Papers citing v (sorted)."""
        return self._At.indices[self._At.indptr[v]:self._At.indptr[v + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self._A.indptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self._At.indptr)

    def meta(self, v: int) -> PaperMeta:
        self._check_vertex(v)
        vid = int(self._venue_ids[v])
        lo, hi = self._author_indptr[v], self._author_indptr[v + 1]
        return PaperMeta(
            external_key=self._keys[v],
            title=self._titles[v],
            year=int(self._years[v]),
            venue_id=None if vid < 0 else vid,
            author_ids=tuple(int(a) for a in self._author_ids[lo:hi]),
        )

    def title(self, v: int) -> str:
        return self._titles[v]

    def titles(self) -> list[str]:
        return list(self._titles)

    def key_of(self, v: int) -> str:
        self._check_vertex(v)
        return self._keys[v]

    def id_of(self, key: str) -> int:
        try:
            return self._id_of[key]
        except KeyError:
            raise DomainError(f"unknown paper key {key!r}") from None

    def has_key(self, key: str) -> bool:
        return key in self._id_of

    def author_slots(self) -> tuple[np.ndarray, np.ndarray]:
        """(paper index, author index) per authorship slot."""
        return self._author_paper, self._author_ids

    def author_counts(self) -> np.ndarray:
        """Number of authors per paper."""
        return np.diff(self._author_indptr)

    def full_mask(self) -> "GraphMask":
        return GraphMask(self, np.ones(self.n, dtype=bool))

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise DomainError(f"paper index {v} out of range [0, {self.n})")

    # -- invariants --------------------------------------------------------

    def check_consistency(self) -> None:
        """Edge-by-edge dual-adjacency check; raises IntegrityError on failure."""
        A, At = self._A, self._At
        if A.nnz != At.nnz:
            raise IntegrityError("reference and citation views disagree on edge count")
        for u in range(self.n):
            for v in self.out_neighbors(u):
                row = self.in_neighbors(int(v))
                pos = np.searchsorted(row, u)
                if pos >= len(row) or row[pos] != u:
                    raise IntegrityError(f"edge ({u}, {int(v)}) missing from citation view")
        if int(self.out_degrees().sum()) != int(self.in_degrees().sum()):
            raise IntegrityError("degree sums disagree")


class MaskedView:
    """CSR adjacency restricted to a mask's active papers, with degree arrays.

    A is the masked reference adjacency (rows = citers), At its transpose.
    out_deg/in_deg count only active endpoints. und() lazily builds the
    combined bidirectional matrix used by undirected traversals (entries of
    2 mark mutually citing pairs).
    """

    __slots__ = ("A", "At", "active", "out_deg", "in_deg", "_und")

    def __init__(self, A: sp.csr_matrix, At: sp.csr_matrix, active: np.ndarray):
        self.A = A
        self.At = At
        self.active = active
        self.out_deg = np.diff(A.indptr).astype(np.float64)
        self.in_deg = np.diff(At.indptr).astype(np.float64)
        self._und = None

    def und(self) -> sp.csr_matrix:
        if self._und is None:
            self._und = (self.A + self.At).tocsr()
        return self._und


def _restrict_csr(A: sp.csr_matrix, active: np.ndarray) -> sp.csr_matrix:
    keep = np.repeat(active, np.diff(A.indptr)) & active[A.indices]
    csum = np.concatenate([[0], np.cumsum(keep)])
    indptr = csum[A.indptr]
    indices = A.indices[keep]
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=A.shape)


class GraphMask:
    """Bitset of active papers over a graph, with a lazily built masked view.

    Masks are cheap to create and meant to be per-query; building the view
    (first adjacency use) costs one pass over the edges.
    """

    __slots__ = ("graph", "active", "_view")

    def __init__(self, graph: CitationGraph, active: np.ndarray):
        active = np.asarray(active, dtype=bool)
        if active.shape != (graph.n,):
            raise DomainError(f"mask length {active.shape} does not match graph size {graph.n}")
        self.graph = graph
        self.active = active
        self._view: Optional[MaskedView] = None

    def count(self) -> int:
        return int(self.active.sum())

    def is_active(self, v: int) -> bool:
        self.graph._check_vertex(v)
        return bool(self.active[v])

    def without(self, papers: Iterable[int]) -> "GraphMask":
        active = self.active.copy()
        idx = np.fromiter((int(p) for p in papers), dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= self.graph.n:
                raise DomainError("paper index out of range in mask exclusion")
            active[idx] = False
        return GraphMask(self.graph, active)

    def view(self) -> MaskedView:
        if self._view is None:
            g = self.graph
            if self.active.all():
                self._view = MaskedView(g._A, g._At, self.active)
            else:
                Am = _restrict_csr(g._A, self.active)
                Atm = Am.transpose().tocsr()
                Atm.sort_indices()
                self._view = MaskedView(Am, Atm, self.active)
        return self._view


# -- operations ------------------------------------------------------------


def degrees(g: CitationGraph, mask: GraphMask, v: int) -> tuple[int, int]:
    """(reference count, citation count) of v under the mask."""
    g._check_vertex(v)
    if not mask.active[v]:
        raise DomainError(f"paper {g.key_of(v)!r} is not active under the mask")
    view = mask.view()
    return int(view.out_deg[v]), int(view.in_deg[v])


def prune_after_year(g: CitationGraph, year: int, exclude: Iterable[int] = ()) -> GraphMask:
    """Mask keeping papers with known year <= year, minus the excluded set."""
    active = (g.years > 0) & (g.years <= year)
    mask = GraphMask(g, active)
    exclude = list(exclude)
    return mask.without(exclude) if exclude else mask


def distances_from(g: CitationGraph, mask: GraphMask, sources: Iterable[int]) -> np.ndarray:
    """Minimum hop count from any source to every paper, ignoring edge
    direction. Inactive or unreachable papers get inf."""
    src = np.unique(np.fromiter((int(s) for s in sources), dtype=np.int64))
    if src.size == 0:
        raise DomainError("empty source set")
    src = src[mask.active[src]]
    dist = np.full(g.n, np.inf)
    if src.size == 0:
        return dist
    und = mask.view().und()
    dist = dijkstra(und, directed=True, indices=src, unweighted=True, min_only=True)
    dist[~mask.active] = np.inf
    return dist


def shortest_distance(g: CitationGraph, mask: GraphMask, sources: Iterable[int], to: int):
    """Hop count from the source set to one target; math.inf if unreachable."""
    g._check_vertex(to)
    d = distances_from(g, mask, sources)[to]
    return math.inf if not np.isfinite(d) else int(d)


def clustering_coefficient(g: CitationGraph, mask: GraphMask, v: int) -> float:
    """Density of citation edges among v and its active neighborhood.

    Counts every directed edge inside N_v ∪ {v} (including those touching v)
    against |N_v| * (|N_v| + 1); this never exceeds the count of ordered
    vertex pairs, so the value stays in [0, 1].
    """
    g._check_vertex(v)
    if not mask.active[v]:
        raise DomainError(f"paper {g.key_of(v)!r} is not active under the mask")
    view = mask.view()
    und = view.und()
    nbrs = und.indices[und.indptr[v]:und.indptr[v + 1]]
    if nbrs.size == 0:
        return 0.0
    sub = np.sort(np.append(nbrs, v))
    A = view.A
    inside = 0
    for i in sub:
        row = A.indices[A.indptr[i]:A.indptr[i + 1]]
        if row.size:
            inside += int(np.isin(row, sub, assume_unique=True).sum())
    return inside / (nbrs.size * (nbrs.size + 1.0))
