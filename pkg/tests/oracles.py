"""Independent reference implementations used to verify the rankers.

Everything here is deliberately naive: dense linear algebra, explicit walk
enumeration, pure-python set arithmetic. None of it shares code paths with
the sparse implementations under test.
"""

from collections import defaultdict, deque

import numpy as np

from citerank.graph import CitationGraph

SOURCE = "source"


def active_out(g: CitationGraph, active, v):
    return [int(u) for u in g.out_neighbors(v) if active[u]]


def active_in(g: CitationGraph, active, v):
    return [int(u) for u in g.in_neighbors(v) if active[u]]


# -- dense steady-state solves ------------------------------------------------


def transition_paperrank(g: CitationGraph, active, seeds, d):
    """Column-stochastic matrix of the expanded chain; source is index n."""
    n = g.n
    s = n
    P = np.zeros((n + 1, n + 1))
    for v in range(n):
        if not active[v]:
            continue
        nbrs = active_out(g, active, v) + active_in(g, active, v)
        P[s, v] += 1.0 - d
        if nbrs:
            for u in nbrs:
                P[u, v] += d / len(nbrs)
        else:
            P[s, v] += d
    seeds = sorted(set(int(m) for m in seeds))
    for m in seeds:
        P[m, s] = 1.0 / len(seeds)
    return P


def transition_darwr(g: CitationGraph, active, seeds, d, lam):
    n = g.n
    s = n
    P = np.zeros((n + 1, n + 1))
    for v in range(n):
        if not active[v]:
            continue
        cits = active_in(g, active, v)
        refs = active_out(g, active, v)
        P[s, v] += 1.0 - d
        if cits and refs:
            for u in cits:
                P[u, v] += d * lam / len(cits)
            for u in refs:
                P[u, v] += d * (1.0 - lam) / len(refs)
        elif cits:
            for u in cits:
                P[u, v] += d / len(cits)
        elif refs:
            for u in refs:
                P[u, v] += d / len(refs)
        else:
            P[s, v] += d
    seeds = sorted(set(int(m) for m in seeds))
    for m in seeds:
        P[m, s] = 1.0 / len(seeds)
    return P


def stationary_from_source(P):
    """Unique stationary distribution restricted to states reachable from
    the source, found by a dense linear solve. Returns (paper scores, source)."""
    m = P.shape[0]
    s = m - 1
    reach = {s}
    frontier = [s]
    while frontier:
        v = frontier.pop()
        for u in np.flatnonzero(P[:, v] > 0):
            u = int(u)
            if u not in reach:
                reach.add(u)
                frontier.append(u)
    states = sorted(reach)
    A = P[np.ix_(states, states)] - np.eye(len(states))
    A[-1, :] = 1.0
    b = np.zeros(len(states))
    b[-1] = 1.0
    x = np.linalg.solve(A, b)
    full = np.zeros(m)
    full[states] = x
    return full[:s], float(full[s])


# -- walk enumeration -----------------------------------------------------------


def enumerate_walks(g: CitationGraph, active, seeds, L):
    """Brute-force every walk of length <= L from the seed set over the
    bidirectional graph. Returns (cit, ref): lists indexed by length of
    {vertex: walk count}, split by the type of the final step (cit = the
    step entered a citing paper, ref = it entered a referenced paper)."""
    arcs = {}
    for x in range(g.n):
        if not active[x]:
            continue
        out = [(t, "ref") for t in active_out(g, active, x)]
        inn = [(t, "cit") for t in active_in(g, active, x)]
        arcs[x] = out + inn
    cit = [defaultdict(int) for _ in range(L + 1)]
    ref = [defaultdict(int) for _ in range(L + 1)]

    def go(x, depth):
        if depth == L:
            return
        for t, kind in arcs.get(x, ()):
            (cit if kind == "cit" else ref)[depth + 1][t] += 1
            go(t, depth + 1)

    for m in set(int(m) for m in seeds):
        if active[m]:
            go(m, 0)
    return cit, ref


def katz_scores_from_walks(n, cit, ref, beta, L):
    """Same decay arithmetic as the implementation, applied to enumerated
    counts: cumulative beta powers, ascending lengths."""
    score = np.zeros(n)
    f = 1.0
    for i in range(1, L + 1):
        f *= beta
        for v in range(n):
            total = cit[i][v] + ref[i][v]
            if total:
                score[v] += f * float(total)
    return score


def dakatz_scores_from_walks(n, cit, ref, beta, L, lam):
    score = np.zeros(n)
    f = 1.0
    for i in range(1, L + 1):
        f *= beta
        for v in range(n):
            c = float(cit[i][v])
            r = float(ref[i][v])
            if c or r:
                score[v] += f * (lam * c + (1.0 - lam) * r)
    return score


# -- local measures ---------------------------------------------------------------


def cocitation_scores(g: CitationGraph, active, seeds):
    out = np.zeros(g.n)
    for v in range(g.n):
        if not active[v]:
            continue
        cv = set(active_in(g, active, v))
        out[v] = sum(len(cv & set(active_in(g, active, u))) for u in seeds)
    return out


def cocoupling_scores(g: CitationGraph, active, seeds):
    out = np.zeros(g.n)
    for v in range(g.n):
        if not active[v]:
            continue
        rv = set(active_out(g, active, v))
        out[v] = sum(len(rv & set(active_out(g, active, u))) for u in seeds)
    return out


def ccidf_scores(g: CitationGraph, active, seeds):
    out = np.zeros(g.n)
    for v in range(g.n):
        if not active[v]:
            continue
        rv = set(active_out(g, active, v))
        total = 0.0
        for u in seeds:
            for w in rv & set(active_out(g, active, u)):
                total += 1.0 / len(active_in(g, active, w))
        out[v] = total
    return out


# -- misc ----------------------------------------------------------------------


def bfs_distance(g: CitationGraph, active, sources, target):
    """Undirected hop count by plain queue BFS; None when unreachable."""
    sources = [int(s) for s in sources if active[s]]
    dist = {s: 0 for s in sources}
    q = deque(sources)
    while q:
        x = q.popleft()
        if x == target:
            return dist[x]
        for t in active_out(g, active, x) + active_in(g, active, x):
            if t not in dist:
                dist[t] = dist[x] + 1
                q.append(t)
    return dist.get(int(target))


def clustering_value(g: CitationGraph, active, v):
    """Direct pair-by-pair recount of the neighborhood edge density."""
    nbrs = set(active_out(g, active, v)) | set(active_in(g, active, v))
    if not nbrs:
        return 0.0
    sub = nbrs | {v}
    edges = 0
    for i in sub:
        outs = set(active_out(g, active, i))
        edges += len(outs & sub)
    return edges / (len(nbrs) * (len(nbrs) + 1.0))
