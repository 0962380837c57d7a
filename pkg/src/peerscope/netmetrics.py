"""Graph metrics: degree, betweenness, closeness, PageRank, k-shell, density,
degree assortativity and reciprocity.

Per-source work (betweenness, closeness) is split into fixed-size chunks of
sources. Chunks may run in worker processes; partial sums are always merged in
chunk order, so results do not depend on the worker count.
"""
from __future__ import annotations

import csv
import math
import random
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .categorizer import CATEGORIES, Category
from .netbuild import AuthorGraph

KINDS = ("degree", "betweenness", "closeness", "pagerank")
CHUNK = 64


class UndefinedMetricError(ValueError):
    """The metric has no defined value on this input."""


class ConvergenceError(RuntimeError):
    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"PageRank did not converge in {iterations} iterations (residual {residual:.3e})")


@dataclass(frozen=True)
class CentralityScores:
    kind: str
    scores: Mapping[str, float]
    normalization: str
    exact: bool = True

    def __getitem__(self, node: str) -> float:
        return self.scores[node]

    def mean(self, nodes: Iterable[str] | None = None) -> float:
        vals = [self.scores[n] for n in (self.scores if nodes is None else nodes)]
        return math.fsum(vals) / len(vals) if vals else 0.0


@dataclass(frozen=True)
class ShellDecomposition:
    core: Mapping[str, int]
    max_k: int


# -- degree ----------------------------------------------------------------

def degree_centrality(g: AuthorGraph) -> CentralityScores:
    """deg(v) / (n - 1); total (in + out) degree on directed graphs."""
    n = len(g)
    if n < 2:
        raise ValueError("degree centrality needs at least 2 nodes")
    s = 1.0 / (n - 1)
    scores = {v: (len(g.out_adj[i]) + (len(g.in_adj[i]) if g.directed else 0)) * s
              for v, i in g.index.items()}
    return CentralityScores("degree", scores, "deg/(n-1)")


# -- betweenness -------------------------------------------------------------

def _brandes_chunk(adj: list[list[int]], sources: list[int]) -> list[float]:
    n = len(adj)
    total = [0.0] * n
    for s in sources:
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                total[w] += delta[w]
    return total


def _closeness_chunk(adj: list[list[int]], sources: list[int]) -> list[tuple[int, int]]:
    """(reachable count excluding source, distance sum) per source."""
    n = len(adj)
    out = []
    for s in sources:
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        reach = tot = 0
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    reach += 1
                    tot += dist[w]
                    queue.append(w)
        out.append((reach, tot))
    return out


def _run_chunks(func, adj, sources: list[int], workers: int) -> list:
    chunks = [sources[i:i + CHUNK] for i in range(0, len(sources), CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, [adj] * len(chunks), chunks))
    return [func(adj, c) for c in chunks]


def betweenness_centrality(g: AuthorGraph, *, normalized: bool = True, workers: int = 1,
                           sample: int | None = None, seed: int = 0) -> CentralityScores:
    """Shortest-path betweenness by Brandes' dependency accumulation.

    Normalised by the number of ordered pairs not involving the node,
    (n-1)(n-2); on undirected graphs this equals counting each unordered
    pair once. ``sample=k`` estimates from k random sources (not exact).
    """
    n = len(g)
    adj = g.out_adj
    sources = list(range(n))
    exact = True
    if sample is not None and sample < n:
        sources = sorted(random.Random(seed).sample(sources, sample))
        exact = False
    totals = np.zeros(n)
    for part in _run_chunks(_brandes_chunk, adj, sources, workers):
        totals += np.asarray(part)
    if not exact:
        totals *= n / len(sources)
    if normalized:
        scale = 1.0 / ((n - 1) * (n - 2)) if n > 2 else 0.0
        norm = "pairs (n-1)(n-2)"
    else:
        scale = 1.0 if g.directed else 0.5
        norm = "raw"
    totals *= scale
    scores = {v: float(totals[i]) for v, i in g.index.items()}
    return CentralityScores("betweenness", scores, norm, exact=exact)


# -- closeness ---------------------------------------------------------------

def closeness_centrality(g: AuthorGraph, *, workers: int = 1) -> CentralityScores:
    """Wasserman-Faust closeness: (r/(n-1)) * (r / sum of distances), r = reachable nodes.

    Distances are measured outward from the node on directed graphs.
    """
    n = len(g)
    results = [x for part in _run_chunks(_closeness_chunk, g.out_adj, list(range(n)), workers) for x in part]
    scores = {}
    for v, i in g.index.items():
        reach, tot = results[i]
        scores[v] = (reach / (n - 1)) * (reach / tot) if tot > 0 and n > 1 else 0.0
    return CentralityScores("closeness", scores, "wasserman-faust")


# -- pagerank ------------------------------------------------------------------

def pagerank(g: AuthorGraph, damping: float = 0.85, tol: float = 1e-9, max_iter: int = 200) -> CentralityScores:
    """Power iteration until the L1 change drops below ``tol``.

    Dangling nodes spread their mass uniformly; undirected edges count in
    both directions.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    n = len(g)
    if n == 0:
        return CentralityScores("pagerank", {}, "sum=1")
    src = np.fromiter((u for u, nbrs in enumerate(g.out_adj) for _ in nbrs), dtype=np.int64)
    dst = np.fromiter((v for nbrs in g.out_adj for v in nbrs), dtype=np.int64)
    outdeg = np.array([len(a) for a in g.out_adj], dtype=float)
    dangling = outdeg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, outdeg))
    x = np.full(n, 1.0 / n)
    residual = math.inf
    for it in range(1, max_iter + 1):
        flow = np.bincount(dst, weights=(x * inv)[src], minlength=n)
        new = damping * (flow + x[dangling].sum() / n) + (1.0 - damping) / n
        new /= new.sum()
        residual = float(np.abs(new - x).sum())
        x = new
        if residual < tol:
            break
    else:
        raise ConvergenceError(residual, max_iter)
    return CentralityScores("pagerank", {v: float(x[i]) for v, i in g.index.items()}, "sum=1")


def pagerank_residual(g: AuthorGraph, scores: CentralityScores, damping: float = 0.85) -> float:
    """L1 distance between ``scores`` and one more PageRank update of them."""
    n = len(g)
    x = np.array([scores.scores[v] for v in g.nodes])
    new = np.full(n, (1.0 - damping) / n)
    dangling = 0.0
    for u, nbrs in enumerate(g.out_adj):
        if nbrs:
            share = damping * x[u] / len(nbrs)
            for v in nbrs:
                new[v] += share
        else:
            dangling += x[u]
    new += damping * dangling / n
    return float(np.abs(new - x).sum())


def centrality(g: AuthorGraph, kind: str, **options) -> CentralityScores:
    funcs = {"degree": degree_centrality, "betweenness": betweenness_centrality,
             "closeness": closeness_centrality, "pagerank": pagerank}
    try:
        func = funcs[kind]
    except KeyError:
        raise ValueError(f"unknown centrality {kind!r}; expected one of {KINDS}") from None
    return func(g, **options)


# -- k-shell --------------------------------------------------------------------

def kshell(g: AuthorGraph) -> ShellDecomposition:
    """Core numbers by bucket-ordered minimum-degree peeling (Batagelj-Zaversnik)."""
    if g.directed:
        raise ValueError("kshell needs an undirected graph; call to_undirected() first")
    adj = g.out_adj
    n = len(adj)
    deg = [len(a) for a in adj]
    maxd = max(deg, default=0)
    bins = [0] * (maxd + 1)
    for d in deg:
        bins[d] += 1
    start = 0
    for d in range(maxd + 1):
        bins[d], start = start, start + bins[d]
    pos = [0] * n
    order = [0] * n
    for v in range(n):
        pos[v] = bins[deg[v]]
        order[pos[v]] = v
        bins[deg[v]] += 1
    for d in range(maxd, 0, -1):
        bins[d] = bins[d - 1]
    bins[0] = 0
    for i in range(n):
        v = order[i]
        for u in adj[v]:
            if deg[u] > deg[v]:
                du, pu = deg[u], pos[u]
                pw = bins[du]
                w = order[pw]
                if u != w:
                    pos[u], pos[w] = pw, pu
                    order[pu], order[pw] = w, u
                bins[du] += 1
                deg[u] -= 1
    core = {v: deg[i] for v, i in g.index.items()}
    return ShellDecomposition(core, max(core.values(), default=0))


# -- whole-graph measures ----------------------------------------------------------

def density(g: AuthorGraph) -> float:
    n = len(g)
    if n < 2:
        raise ValueError("density needs at least 2 nodes")
    m = g.n_edges
    return m / (n * (n - 1)) if g.directed else 2 * m / (n * (n - 1))


def assortativity(g: AuthorGraph) -> float:
    """Pearson correlation of endpoint degrees over edges.

    Undirected edges contribute both orientations. Directed edges use the
    total degrees of (source, target).
    """
    if g.n_edges == 0:
        raise UndefinedMetricError("assortativity needs at least one edge")
    deg = {v: g.degree(v) for v in g.nodes}
    xs, ys = [], []
    for u, v in g.edges:
        xs.append(deg[u])
        ys.append(deg[v])
        if not g.directed:
            xs.append(deg[v])
            ys.append(deg[u])
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedMetricError("endpoint degrees have zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def reciprocity(g: AuthorGraph, node_set_a: Iterable[str] | None = None,
                node_set_b: Iterable[str] | None = None) -> float:
    """Fraction of directed edges in scope whose reverse edge also exists.

    No sets: all edges. One set (or two identical sets): edges inside it.
    Two disjoint sets: edges with one endpoint in each.
    """
    if not g.directed:
        raise ValueError("reciprocity needs a directed graph")
    a = set(node_set_a) if node_set_a is not None else None
    b = set(node_set_b) if node_set_b is not None else None
    if a is not None and b is not None and a != b and a & b:
        raise ValueError("node sets must be disjoint or identical")
    if a is None:
        a, b = b, None
    if a is not None and (b is None or b == a):
        scope = [(u, v) for u, v in g.edges if u in a and v in a]
    elif a is not None:
        scope = [(u, v) for u, v in g.edges if (u in a and v in b) or (u in b and v in a)]
    else:
        scope = list(g.edges)
    if not scope:
        raise UndefinedMetricError("no edges in scope")
    mutual = sum(1 for u, v in scope if (v, u) in g.weights)
    return mutual / len(scope)


def node_reciprocity(g: AuthorGraph) -> dict[str, float]:
    """Per node: fraction of its out-edges that are reciprocated (0 with none)."""
    out = {}
    for v, i in g.index.items():
        succ = g.out_adj[i]
        if not succ:
            out[v] = 0.0
            continue
        pred = set(g.in_adj[i])
        out[v] = sum(1 for w in succ if w in pred) / len(succ)
    return out


# -- reports ----------------------------------------------------------------------

def select_report_shells(core: Mapping[str, int]) -> list[tuple[str, int]]:
    """Innermost shell, two interior quantile shells and the outermost k=1 shell."""
    realized = sorted({k for k in core.values() if k >= 1})
    if not realized:
        return []
    picks = [("innermost", realized[-1])]
    for name, q in (("inner-mid", 2 / 3), ("outer-mid", 1 / 3)):
        k = realized[int(round(q * (len(realized) - 1)))]
        if k not in {p[1] for p in picks} and k != realized[0]:
            picks.append((name, k))
    if realized[0] not in {p[1] for p in picks}:
        picks.append(("outermost", realized[0]))
    return picks


def shell_occupancy(shells: ShellDecomposition, labels: Mapping[str, Category]) -> list[dict]:
    """Author count and category percentages for the report shells."""
    rows = []
    for name, k in select_report_shells(shells.core):
        members = [v for v, c in shells.core.items() if c == k]
        row = {"shell": name, "k": k, "authors": len(members)}
        for cat in CATEGORIES:
            row[f"pct_{cat.value.lower()}"] = 100.0 * sum(labels.get(v) == cat for v in members) / len(members)
        rows.append(row)
    return rows


def category_means(scores: CentralityScores, labels: Mapping[str, Category]) -> dict[Category, float]:
    out = {}
    for cat in CATEGORIES:
        members = [v for v in scores.scores if labels.get(v) == cat]
        out[cat] = scores.mean(members) if members else float("nan")
    return out


def write_metrics_csv(rows: Iterable[CentralityScores], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "kind", "score"])
        for cs in rows:
            for v, s in cs.scores.items():
                w.writerow([v, cs.kind, f"{s:.10g}"])
    return path


def write_kshell_csv(shells: ShellDecomposition, path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "core"])
        for v, k in shells.core.items():
            w.writerow([v, k])
    return path
