"""Relevance of documents to queries through constraints between
situation types.

A document is a situation of some type supporting a set of infons. It is
fully relevant to a query whose infons it supports; otherwise its
relevance is the strongest constraint leading from its type to a type
holding some document that does support the query. Only single-hop
constraints are scored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .core import Infon
from .errors import InvalidInput


@dataclass(frozen=True)
class Edge:
    strength: float = 1.0  # 1 for an unconditional constraint
    condition: Optional[str] = None  # opaque label of a conditional constraint

    def __post_init__(self):
        a = float(self.strength)
        object.__setattr__(self, "strength", a)
        if self.condition is None:
            if a != 1.0:
                raise InvalidInput("an unconditional constraint has strength 1")
        elif not 0.0 < a < 1.0:
            raise InvalidInput(f"a conditional constraint needs strength strictly between 0 and 1, got {a!r}")

    @property
    def conditional(self) -> bool:
        return self.condition is not None


@dataclass(frozen=True)
class ConstraintGraph:
    types: frozenset
    edges: Mapping  # (D, D') -> Edge

    def __post_init__(self):
        object.__setattr__(self, "types", frozenset(self.types))
        edges = {}
        for (d, d2), e in dict(self.edges).items():
            if d not in self.types or d2 not in self.types:
                raise InvalidInput(f"edge ({d!r}, {d2!r}) uses an undeclared situation type")
            edges[(d, d2)] = e if isinstance(e, Edge) else Edge(*e)
        object.__setattr__(self, "edges", edges)

    def __hash__(self):
        return hash((self.types, tuple(sorted(self.edges, key=str))))

    def successors(self, d) -> list:
        return [d2 for (a, d2) in self.edges if a == d]


def _infons(items: Iterable) -> frozenset:
    return frozenset(i if isinstance(i, Infon) else Infon.parse(i) for i in items)


@dataclass(frozen=True)
class Corpus:
    documents: Mapping  # id -> (situation type, infons)
    queries: Mapping  # id -> infons

    def __post_init__(self):
        docs = {}
        for d, (t, infons) in dict(self.documents).items():
            docs[d] = (t, _infons(infons))
        object.__setattr__(self, "documents", docs)
        object.__setattr__(self, "queries", {q: _infons(i) for q, i in dict(self.queries).items()})

    def __hash__(self):
        return hash((tuple(sorted(self.documents, key=str)), tuple(sorted(self.queries, key=str))))

    def check(self, g: ConstraintGraph) -> None:
        for d, (t, _) in self.documents.items():
            if t not in g.types:
                raise InvalidInput(f"document {d!r} has undeclared type {t!r}")


def delta(g: ConstraintGraph, d, d2) -> float:
    for t in (d, d2):
        if t not in g.types:
            raise InvalidInput(f"undeclared situation type {t!r}")
    e = g.edges.get((d, d2))
    return 0.0 if e is None else e.strength


def supports_query(corpus: Corpus, doc, query) -> bool:
    return corpus.queries[query] <= corpus.documents[doc][1]


def relevance(g: ConstraintGraph, corpus: Corpus, doc, query) -> float:
    if doc not in corpus.documents:
        raise InvalidInput(f"unknown document {doc!r}")
    if query not in corpus.queries:
        raise InvalidInput(f"unknown query {query!r}")
    corpus.check(g)
    if supports_query(corpus, doc, query):
        return 1.0
    home = corpus.documents[doc][0]
    holding = {t for d2, (t, _) in corpus.documents.items() if supports_query(corpus, d2, query)}
    return max((delta(g, home, t) for t in g.successors(home) if t in holding), default=0.0)


def rank(g: ConstraintGraph, corpus: Corpus, query) -> list:
    """Documents by descending relevance, ties broken by id."""
    scores = [(d, relevance(g, corpus, d, query)) for d in corpus.documents]
    return sorted(scores, key=lambda x: (-x[1], str(x[0])))
