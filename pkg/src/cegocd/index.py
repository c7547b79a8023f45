"""TF-IDF inverted index over entity surface text.

Scoring is cosine over tf*idf vectors with idf = ln(1 + N/df). Documents
are the concatenation of entity name, aliases, and description. The
tokenizer is deliberately dumb and deterministic: lowercase, split on
non-alphanumeric runs, drop tokens shorter than 2 characters.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

from .kg import Entity, KnowledgeGraph

_TOKEN_RE = re.compile(r"[0-9a-z]+")

DEFAULT_TOP_K = 10


def tokenize(text: str) -> list[str]:
    return [tok for tok in _TOKEN_RE.findall(text.lower()) if len(tok) >= 2]


@dataclass(frozen=True)
class ScoredEntity:
    entity: Entity
    score: float


class EntityIndex:
    """Immutable inverted index; build once, query from any thread."""

    def __init__(self, graph: KnowledgeGraph):
        self._graph = graph
        self.postings: dict[str, list[tuple[str, int]]] = {}
        tf_by_doc: dict[str, dict[str, int]] = {}
        for eid in sorted(graph.entities):
            counts: dict[str, int] = {}
            for tok in tokenize(graph.entities[eid].text()):
                counts[tok] = counts.get(tok, 0) + 1
            tf_by_doc[eid] = counts
            for term, tf in counts.items():
                self.postings.setdefault(term, []).append((eid, tf))
        self.corpus_size = len(graph.entities)
        self.vocabulary: dict[str, int] = {
            term: len(plist) for term, plist in self.postings.items()
        }
        self.doc_norms: dict[str, float] = {}
        for eid, counts in tf_by_doc.items():
            sq = sum((tf * self._idf(term)) ** 2 for term, tf in counts.items())
            self.doc_norms[eid] = math.sqrt(sq)

    def _idf(self, term: str) -> float:
        df = self.vocabulary.get(term, 0)
        if df == 0:
            return 0.0
        return math.log(1.0 + self.corpus_size / df)

    def top_k(self, keyword: str, k: int = DEFAULT_TOP_K) -> list[ScoredEntity]:
        """Top-k entities by cosine score against the keyword's token vector.

        Zero-score entities are excluded; ties break by ascending entity id.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        q_counts: dict[str, int] = {}
        for tok in tokenize(keyword):
            q_counts[tok] = q_counts.get(tok, 0) + 1
        q_weights = {t: tf * self._idf(t) for t, tf in q_counts.items()}
        q_norm = math.sqrt(sum(w * w for w in q_weights.values()))
        if q_norm == 0:
            return []
        dots: dict[str, float] = {}
        for term, q_w in q_weights.items():
            if q_w == 0:
                continue
            idf = self._idf(term)
            for eid, tf in self.postings.get(term, ()):
                dots[eid] = dots.get(eid, 0.0) + q_w * tf * idf
        scored = [
            (dots[eid] / (q_norm * self.doc_norms[eid]), eid)
            for eid in dots if dots[eid] > 0
        ]
        scored.sort(key=lambda pair: (-pair[0], pair[1]))
        return [
            ScoredEntity(self._graph.entities[eid], score)
            for score, eid in scored[:k]
        ]


def build_index(graph: KnowledgeGraph) -> EntityIndex:
    return EntityIndex(graph)
