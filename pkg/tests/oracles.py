"""Brute-force reference implementations for small graphs (n <= 8 or so)."""
import itertools
import math
import random
import statistics
from fractions import Fraction

import numpy as np

from peerscope.netbuild import AuthorGraph


def random_graph(rng: random.Random, max_nodes: int = 8, directed: bool | None = None) -> AuthorGraph:
    n = rng.randint(1, max_nodes)
    directed = rng.random() < 0.5 if directed is None else directed
    nodes = [f"v{i}" for i in range(n)]
    p = rng.random()
    pairs = itertools.permutations(nodes, 2) if directed else itertools.combinations(nodes, 2)
    w = {e: 1 for e in pairs if rng.random() < p}
    return AuthorGraph({v: None for v in nodes}, w, directed=directed)


def _succ(g):
    out = {v: set() for v in g.nodes}
    for u, v in g.edges:
        out[u].add(v)
        if not g.directed:
            out[v].add(u)
    return out


def _adjacency(g):
    idx = {v: i for i, v in enumerate(g.nodes)}
    A = np.zeros((len(g), len(g)), dtype=object)
    for u, v in g.edges:
        A[idx[u], idx[v]] = 1
        if not g.directed:
            A[idx[v], idx[u]] = 1
    return idx, A


def path_counts(g):
    """sigma[s, t]: number of shortest s-t paths, read off integer matrix powers.

    A walk of length d(s, t) from s to t is necessarily a shortest path.
    """
    idx, A = _adjacency(g)
    n = len(g)
    d = distances(g)
    powers = [np.identity(n, dtype=object)]
    for _ in range(n):
        powers.append(powers[-1].dot(A))
    sigma = {}
    for s in g.nodes:
        for t in g.nodes:
            k = d[(s, t)]
            sigma[(s, t)] = 0 if k == math.inf else int(powers[k][idx[s], idx[t]])
    return sigma, d


def betweenness(g, normalized=True):
    """Sum over ordered pairs (s, t) of the share of shortest paths through v."""
    n = len(g)
    sigma, d = path_counts(g)
    score = {v: Fraction(0) for v in g.nodes}
    for s, t in itertools.permutations(g.nodes, 2):
        if sigma[(s, t)] == 0:
            continue
        for v in g.nodes:
            if v not in (s, t) and d[(s, v)] + d[(v, t)] == d[(s, t)]:
                score[v] += Fraction(sigma[(s, v)] * sigma[(v, t)], sigma[(s, t)])
    if normalized:
        return {v: (float(x / ((n - 1) * (n - 2))) if n > 2 else 0.0) for v, x in score.items()}
    return {v: float(x if g.directed else x / 2) for v, x in score.items()}


def distances(g):
    nodes = g.nodes
    d = {(u, v): (0 if u == v else math.inf) for u in nodes for v in nodes}
    for u, v in g.edges:
        d[(u, v)] = 1
        if not g.directed:
            d[(v, u)] = 1
    for k in nodes:
        for i in nodes:
            for j in nodes:
                if d[(i, k)] + d[(k, j)] < d[(i, j)]:
                    d[(i, j)] = d[(i, k)] + d[(k, j)]
    return d


def closeness(g):
    n = len(g)
    d = distances(g)
    out = {}
    for v in g.nodes:
        reach = [d[(v, u)] for u in g.nodes if u != v and d[(v, u)] < math.inf]
        r, tot = len(reach), sum(reach)
        out[v] = (r / (n - 1)) * (r / tot) if tot > 0 else 0.0
    return out


def degree(g):
    n = len(g)
    succ = _succ(g)
    pred = {v: set() for v in g.nodes}
    for u, v in g.edges:
        pred[v].add(u)
    return {v: (len(succ[v]) + (len(pred[v]) if g.directed else 0)) / (n - 1) for v in g.nodes}


def kshell(g):
    """Core number = largest k such that v survives repeated removal of degree < k nodes."""
    succ = _succ(g)
    core = {v: 0 for v in g.nodes}
    for k in range(1, len(g)):
        alive = set(g.nodes)
        changed = True
        while changed:
            changed = False
            for v in list(alive):
                if len(succ[v] & alive) < k:
                    alive.discard(v)
                    changed = True
        for v in alive:
            core[v] = k
    return core


def pagerank(g, damping=0.85):
    """Exact stationary vector from the dense Google matrix."""
    n = len(g)
    idx = {v: i for i, v in enumerate(g.nodes)}
    succ = _succ(g)
    G = np.zeros((n, n))
    for v in g.nodes:
        if succ[v]:
            for w in succ[v]:
                G[idx[w], idx[v]] = 1 / len(succ[v])
        else:
            G[:, idx[v]] = 1 / n
    A = np.eye(n) - damping * G
    x = np.linalg.solve(A, np.full(n, (1 - damping) / n))
    x /= x.sum()
    return {v: float(x[idx[v]]) for v in g.nodes}


def entropy(ids):
    n = len(ids)
    return -math.fsum((ids.count(x) / n) * math.log(ids.count(x) / n) for x in set(ids))


def jaccard(a, b):
    return len(a & b) / len(a | b) if a | b else 0.0


def density(g):
    n = len(g)
    pairs = n * (n - 1) if g.directed else n * (n - 1) // 2
    return len(g.edges) / pairs


def assortativity(g):
    """Pearson r of (total) endpoint degrees; both orientations when undirected."""
    deg = {v: 0 for v in g.nodes}
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
    xs, ys = [], []
    for u, v in g.edges:
        xs.append(deg[u])
        ys.append(deg[v])
        if not g.directed:
            xs.append(deg[v])
            ys.append(deg[u])
    return statistics.correlation(xs, ys)


def reciprocity(g):
    edges = set(g.edges)
    return sum((v, u) in edges for u, v in edges) / len(edges)
