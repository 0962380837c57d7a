"""Author networks: co-reviewer (CRN), collaboration (CON), co-citation (CCN),
category-induced subgraphs, and reviewer/editor -> author assignment graphs."""
from __future__ import annotations

import csv
import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

from .categorizer import Category
from .corpus import Corpus

NETWORKS = ("crn", "con", "ccn")


class AuthorGraph:
    """Simple labelled graph over author ids.

    Edge multiplicities (incidence counts) are kept in :attr:`weights`; the
    metric suite only looks at the unweighted structure. Undirected edges are
    stored once as ``(min(u, v), max(u, v))``.
    """

    def __init__(self, labels: Mapping[str, Category | None], weights: Mapping[tuple[str, str], int],
                 directed: bool, name: str = ""):
        self.directed = directed
        self.name = name
        self.labels = {n: labels[n] for n in sorted(labels)}
        canon: dict[tuple[str, str], int] = {}
        for (u, v), w in weights.items():
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u not in self.labels or v not in self.labels:
                raise ValueError(f"edge ({u!r}, {v!r}) references an unknown node")
            key = (u, v) if directed or u < v else (v, u)
            canon[key] = canon.get(key, 0) + int(w)
        self.weights = dict(sorted(canon.items()))

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(self.labels)

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(self.weights)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.weights)

    def has_edge(self, u: str, v: str) -> bool:
        if self.directed:
            return (u, v) in self.weights
        return ((u, v) if u < v else (v, u)) in self.weights

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.labels)}

    @cached_property
    def out_adj(self) -> list[list[int]]:
        """Successor lists by node index (neighbours when undirected), sorted."""
        idx = self.index
        adj: list[list[int]] = [[] for _ in self.labels]
        for u, v in self.weights:
            adj[idx[u]].append(idx[v])
            if not self.directed:
                adj[idx[v]].append(idx[u])
        return [sorted(a) for a in adj]

    @cached_property
    def in_adj(self) -> list[list[int]]:
        if not self.directed:
            return self.out_adj
        idx = self.index
        adj: list[list[int]] = [[] for _ in self.labels]
        for u, v in self.weights:
            adj[idx[v]].append(idx[u])
        return [sorted(a) for a in adj]

    def degree(self, node: str) -> int:
        i = self.index[node]
        if self.directed:
            return len(self.out_adj[i]) + len(self.in_adj[i])
        return len(self.out_adj[i])

    def to_undirected(self) -> "AuthorGraph":
        if not self.directed:
            return self
        w: Counter = Counter()
        for (u, v), c in self.weights.items():
            w[(u, v) if u < v else (v, u)] += c
        return AuthorGraph(self.labels, w, directed=False, name=self.name)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"AuthorGraph({self.name or '?'}, {kind}, {len(self)} nodes, {self.n_edges} edges)"


def _node_labels(corpus: Corpus, labels: Mapping[str, Category] | None) -> dict[str, Category | None]:
    labels = labels or {}
    return {a: labels.get(a) for a in corpus.authors}


def build_crn(corpus: Corpus, labels: Mapping[str, Category] | None = None, *, strict: bool = False) -> AuthorGraph:
    """Co-reviewer network: authors linked when one reviewer handled papers of both.

    With ``strict=True`` the shared reviewer must have reviewed two distinct
    papers, so co-authors are not linked through their joint paper alone.
    Reviewer ids are collected over all rounds and both decisions. The weight of
    an edge is the number of distinct shared reviewers.
    """
    reviewed: dict[str, list] = defaultdict(list)
    for p in corpus:
        for r in dict.fromkeys(p.reviewer_ids()):
            reviewed[r].append(p)
    weights: Counter = Counter()
    for r in sorted(reviewed):
        papers = reviewed[r]
        pairs: set[tuple[str, str]] = set()
        if strict:
            for p, q in itertools.combinations(papers, 2):
                for a in p.author_ids:
                    for b in q.author_ids:
                        if a != b:
                            pairs.add((a, b) if a < b else (b, a))
        else:
            authors = sorted({a for p in papers for a in p.author_ids})
            pairs.update(itertools.combinations(authors, 2))
        weights.update(pairs)
    return AuthorGraph(_node_labels(corpus, labels), weights, directed=False, name="crn")


def build_con(corpus: Corpus, labels: Mapping[str, Category] | None = None) -> AuthorGraph:
    """Collaboration network: union of per-paper author cliques, weight = joint papers."""
    weights: Counter = Counter()
    for p in corpus:
        weights.update(itertools.combinations(sorted(p.author_ids), 2))
    return AuthorGraph(_node_labels(corpus, labels), weights, directed=False, name="con")


def build_ccn(corpus: Corpus, labels: Mapping[str, Category] | None = None) -> AuthorGraph:
    """Co-citation network: a -> b when a paper by a cites a paper by b.

    Author-level self-citations are dropped. Weight = number of
    (citing paper, cited paper) pairs realising the edge.
    """
    weights: Counter = Counter()
    for p in corpus:
        for q_id in sorted(p.cited_paper_ids):
            if q_id not in corpus:
                continue
            q = corpus.paper(q_id)
            for a in p.author_ids:
                for b in q.author_ids:
                    if a != b:
                        weights[(a, b)] += 1
    return AuthorGraph(_node_labels(corpus, labels), weights, directed=True, name="ccn")


def build_network(kind: str, corpus: Corpus, labels: Mapping[str, Category] | None = None) -> AuthorGraph:
    builders = {"crn": build_crn, "con": build_con, "ccn": build_ccn}
    try:
        return builders[kind](corpus, labels)
    except KeyError:
        raise ValueError(f"unknown network {kind!r}; expected one of {NETWORKS}") from None


def induced_subgraph(g: AuthorGraph, cat: Category) -> AuthorGraph:
    keep = {n: c for n, c in g.labels.items() if c == cat}
    w = {(u, v): c for (u, v), c in g.weights.items() if u in keep and v in keep}
    return AuthorGraph(keep, w, directed=g.directed, name=f"{g.name}[{cat}]")


@dataclass(frozen=True)
class BipartiteAssignmentGraph:
    role: str
    left: tuple[str, ...]
    right: Mapping[str, Category | None]
    edges: tuple[tuple[str, str], ...]


def build_assignment_graph(corpus: Corpus, labels: Mapping[str, Category] | None, role: str,
                           author_filter: int | None = None) -> BipartiteAssignmentGraph:
    """Directed reviewer->author (or editor->author) graph.

    ``author_filter=k`` keeps the k authors with the largest citation totals
    (ties broken by id); k larger than the author count keeps everyone.
    Authors without any handled paper are left out.
    """
    if role not in ("reviewer", "editor"):
        raise ValueError(f"role must be 'reviewer' or 'editor', got {role!r}")
    labels = labels or {}
    authors = list(corpus.authors)
    if author_filter is not None:
        if author_filter < 0:
            raise ValueError("author_filter must be non-negative")
        totals = {a: sum(p.citation_count for p in corpus.papers_by_author(a)) for a in authors}
        authors = sorted(authors, key=lambda a: (-totals[a], a))[:author_filter]
    edges: set[tuple[str, str]] = set()
    for a in authors:
        for p in corpus.papers_by_author(a):
            ids = p.reviewer_ids() if role == "reviewer" else p.editor_ids()
            edges.update((r, a) for r in ids)
    edges_sorted = tuple(sorted(edges))
    right = {a: labels.get(a) for a in sorted({a for _, a in edges_sorted})}
    left = tuple(sorted({r for r, _ in edges_sorted}))
    return BipartiteAssignmentGraph(role, left, right, edges_sorted)


# -- export ----------------------------------------------------------------

def _cat(c) -> str:
    return c.value if isinstance(c, Category) else ("" if c is None else str(c))


def write_graph_csv(g: AuthorGraph | BipartiteAssignmentGraph, directory: str | Path,
                    prefix: str = "") -> tuple[Path, Path]:
    """Write ``<prefix>nodes.csv`` (id,category) and ``<prefix>edges.csv``
    (src,dst,weight,directed)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    npath, epath = directory / f"{prefix}nodes.csv", directory / f"{prefix}edges.csv"
    if isinstance(g, BipartiteAssignmentGraph):
        nodes = [(r, g.role) for r in g.left] + [(a, _cat(c)) for a, c in g.right.items()]
        edges = [(u, v, 1, "true") for u, v in g.edges]
    else:
        nodes = [(n, _cat(c)) for n, c in g.labels.items()]
        flag = "true" if g.directed else "false"
        edges = [(u, v, w, flag) for (u, v), w in g.weights.items()]
    with open(npath, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "category"])
        w.writerows(nodes)
    with open(epath, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "weight", "directed"])
        w.writerows(edges)
    return npath, epath


def read_graph_csv(directory: str | Path, name: str = "", prefix: str = "",
                   directed: bool | None = None) -> AuthorGraph:
    """Load an :class:`AuthorGraph` written by :func:`write_graph_csv`.

    Direction comes from the ``directed`` column unless given; an edgeless
    file reads as undirected.
    """
    directory = Path(directory)
    npath, epath = directory / f"{prefix}nodes.csv", directory / f"{prefix}edges.csv"
    labels: dict[str, Category | None] = {}
    values = {c.value: c for c in Category}
    with open(npath, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            labels[row["id"]] = values.get(row["category"])
    weights: dict[tuple[str, str], int] = {}
    flag = False
    with open(epath, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            weights[(row["src"], row["dst"])] = int(row["weight"])
            flag = row["directed"] == "true"
    return AuthorGraph(labels, weights, directed=flag if directed is None else directed, name=name)


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: AuthorGraph | BipartiteAssignmentGraph, name: str | None = None) -> str:
    """Graphviz DOT text; node ``category`` attributes carry the labels."""
    if isinstance(g, BipartiteAssignmentGraph):
        directed, gname = True, name or f"{g.role}_assignment"
        nodes: Iterable = [(r, g.role) for r in g.left] + [(a, _cat(c)) for a, c in g.right.items()]
        edges: Iterable = [(u, v, 1) for u, v in g.edges]
    else:
        directed, gname = g.directed, name or g.name or "authors"
        nodes = [(n, _cat(c)) for n, c in g.labels.items()]
        edges = [(u, v, w) for (u, v), w in g.weights.items()]
    arrow = "->" if directed else "--"
    lines = [f"{'digraph' if directed else 'graph'} {_q(gname)} {{"]
    lines += [f"  {_q(n)} [category={_q(c)}];" for n, c in nodes]
    lines += [f"  {_q(u)} {arrow} {_q(v)} [weight={w}];" for u, v, w in edges]
    lines.append("}")
    return "\n".join(lines) + "\n"
