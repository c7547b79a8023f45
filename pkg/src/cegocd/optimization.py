"""Subgraph refinement: edge weighting + pruning, then relation completion.

Edge weight = (semantic similarity of the verbalized triplet to the
keyword set) x (relation-type weight). Pruning drops edges below a
size-adaptive quantile threshold, then isolated nodes. Completion
projects same-type entity embeddings onto their first principal
component, picks near pairs via an IQR gap threshold, and asks the
language model whether each pair hides a real relation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import EmptySubgraphError, ProviderError
from .kg import COMPLETED, KnowledgeGraph, Relation
from .providers import (EmbeddingProvider, EmbeddingVector, LLMProvider,
                        QueryContext, TypeWeightTable)
from .retrieval import Subgraph

logger = logging.getLogger(__name__)

# quantile ramp for the self-adaptive pruning threshold
PRUNE_Q_MIN = 0.25
PRUNE_Q_MAX = 0.75
PRUNE_RAMP_EDGES = 400

POWER_ITERATION_TOL = 1e-8
POWER_ITERATION_MAX_STEPS = 10_000


@dataclass(frozen=True)
class WeightedEdge:
    relation: Relation
    weight: float
    semantic: float  # similarity factor, kept for stage metrics
    type_weight: float
    description: str = ""  # free text for completed edges

    def key(self) -> tuple[str, str, str]:
        return self.relation.key()


@dataclass
class WeightedSubgraph:
    nodes: set[str]
    edges: list[WeightedEdge]
    prune_threshold_used: Optional[float] = None

    def incident(self, node_id: str) -> list[WeightedEdge]:
        return [e for e in self.edges
                if node_id in (e.relation.source, e.relation.target)]

    def adjacent_pairs(self) -> set[tuple[str, str]]:
        out = set()
        for e in self.edges:
            a, b = e.relation.source, e.relation.target
            out.add((min(a, b), max(a, b)))
        return out

    def original_edges(self) -> list[WeightedEdge]:
        return [e for e in self.edges if e.relation.provenance != COMPLETED]

    def completed_edges(self) -> list[WeightedEdge]:
        return [e for e in self.edges if e.relation.provenance == COMPLETED]

    def mean_semantic(self) -> float:
        if not self.edges:
            return 0.0
        return float(np.mean([e.semantic for e in self.edges]))


@dataclass
class ProjectionResult:
    entity_ids: list[str]  # same order as coordinates
    coordinates: list[float]
    gaps: list[float]  # consecutive diffs of ascending-sorted coordinates
    threshold: Optional[float]


def verbalize_triplet(name_a: str, relation_type: str, name_b: str) -> str:
    return f"{name_a} {relation_type.replace('_', ' ')} {name_b}"


def _cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    va = np.asarray(a.values)
    vb = np.asarray(b.values)
    denom = np.linalg.norm(va) * np.linalg.norm(vb)
    if denom == 0:
        return 0.0
    return float(np.dot(va, vb) / denom)


def semantic_similarity(triplet: tuple[str, str, str], keywords: Sequence[str],
                        embedder: EmbeddingProvider) -> float:
    """Max over keywords of the [0,1]-mapped cosine between the verbalized
    triplet and the keyword. ``triplet`` is (name_a, relation_type, name_b)."""
    if not keywords:
        raise ValueError("keyword set is empty")
    name_a, rel_type, name_b = triplet
    text = verbalize_triplet(name_a, rel_type, name_b)
    vectors = embedder.embed([text, *keywords])
    triplet_vec = vectors[0]
    best = max(_cosine(triplet_vec, kv) for kv in vectors[1:])
    return (best + 1.0) / 2.0


def weight_edges(sub: Subgraph, graph: KnowledgeGraph, keywords: Sequence[str],
                 weights: TypeWeightTable,
                 embedder: EmbeddingProvider) -> WeightedSubgraph:
    """Attach the similarity-times-type-weight product to every edge."""
    edges = []
    for rel in sorted(sub.edges, key=Relation.key):
        semantic = semantic_similarity(
            (graph.entity(rel.source).name, rel.relation_type,
             graph.entity(rel.target).name),
            keywords, embedder)
        type_w = weights.lookup(rel.relation_type)
        edges.append(WeightedEdge(relation=rel, weight=semantic * type_w,
                                  semantic=semantic, type_weight=type_w))
    return WeightedSubgraph(nodes=set(sub.nodes), edges=edges)


def _quantile(values: Sequence[float], q: float) -> float:
    # linear interpolation between order statistics, h = (n-1)q
    return float(np.quantile(np.asarray(values, dtype=float), q, method="linear"))


def adaptive_prune_threshold(edge_weights: Sequence[float],
                             q_min: float = PRUNE_Q_MIN,
                             q_max: float = PRUNE_Q_MAX,
                             ramp_edges: int = PRUNE_RAMP_EDGES) -> float:
    """Quantile threshold that stiffens with subgraph size.

    q ramps linearly from q_min to q_max as the edge count approaches
    ramp_edges, so small subgraphs are pruned gently and large ones
    aggressively.
    """
    if not edge_weights:
        raise ValueError("empty weight multiset")
    q = min(q_max, max(q_min, len(edge_weights) / ramp_edges))
    return _quantile(edge_weights, q)


def prune(wsub: WeightedSubgraph, threshold: float) -> WeightedSubgraph:
    """Drop edges below the threshold, then nodes left without any edge."""
    kept = [e for e in wsub.edges if e.weight >= threshold]
    if not kept:
        raise EmptySubgraphError(
            f"threshold {threshold} removed all {len(wsub.edges)} edges")
    covered: set[str] = set()
    for e in kept:
        covered.add(e.relation.source)
        covered.add(e.relation.target)
    return WeightedSubgraph(nodes=covered, edges=kept,
                            prune_threshold_used=threshold)


def project_1d(vectors: Sequence[EmbeddingVector]) -> list[float]:
    """Coordinates along the first principal component of the vectors.

    Power iteration on the sample covariance to relative tolerance 1e-8;
    the component's sign is fixed so its first nonzero loading is
    positive. Identical inputs degenerate to all-zero coordinates.
    """
    if len(vectors) < 2:
        raise ValueError("need at least 2 vectors")
    matrix = np.array([v.values for v in vectors], dtype=float)
    centered = matrix - matrix.mean(axis=0)
    if not np.any(centered):
        return [0.0] * len(vectors)
    cov = centered.T @ centered / (len(vectors) - 1)

    v = np.ones(cov.shape[0]) / np.sqrt(cov.shape[0])
    for _ in range(POWER_ITERATION_MAX_STEPS):
        w = cov @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            # start vector fell in the nullspace; perturb deterministically
            v = np.zeros_like(v)
            v[0] = 1.0
            continue
        w /= norm
        # direction change up to sign, relative to the unit iterate
        delta = min(np.linalg.norm(w - v), np.linalg.norm(w + v))
        v = w
        if delta <= POWER_ITERATION_TOL:
            break
    nonzero = np.nonzero(np.abs(v) > 1e-12)[0]
    if nonzero.size and v[nonzero[0]] < 0:
        v = -v
    return [float(z) for z in centered @ v]


def completion_threshold(z: Sequence[float]) -> float:
    """Gap threshold Q0.75 + 1.0*IQR over consecutive gaps of sorted z."""
    if len(z) < 3:
        raise ValueError("need at least 3 coordinates")
    ordered = sorted(z)
    gaps = [ordered[i + 1] - ordered[i] for i in range(len(ordered) - 1)]
    q25 = _quantile(gaps, 0.25)
    q75 = _quantile(gaps, 0.75)
    return q75 + (q75 - q25)


def candidate_pairs(entity_ids: Sequence[str], z: Sequence[float],
                    threshold: float) -> list[tuple[str, str]]:
    """Unordered id pairs whose 1-D coordinates lie within the threshold."""
    if len(entity_ids) != len(z):
        raise ValueError("entities and coordinates differ in length")
    pairs = set()
    for i in range(len(entity_ids)):
        for j in range(i + 1, len(entity_ids)):
            if entity_ids[i] == entity_ids[j]:
                continue
            if abs(z[i] - z[j]) <= threshold:
                a, b = entity_ids[i], entity_ids[j]
                pairs.add((min(a, b), max(a, b)))
    return sorted(pairs)


@dataclass
class CompletionRecord:
    pair: tuple[str, str]
    relation_type: str
    description: str
    weight: float

    def to_dict(self) -> dict:
        return {"pair": list(self.pair), "relation_type": self.relation_type,
                "description": self.description, "weight": self.weight}


def complete(wsub: WeightedSubgraph, graph: KnowledgeGraph,
             target_types: Sequence[str], llm: LLMProvider,
             embedder: EmbeddingProvider, ctx: QueryContext,
             weights: TypeWeightTable) -> tuple[WeightedSubgraph, list[CompletionRecord]]:
    """Add LLM-confirmed implicit relations between near same-type entities.

    Only adds edges; never removes. Types with fewer than 3 entities in
    the subgraph are skipped (the gap statistics need >= 2 gaps).
    """
    adjacent = wsub.adjacent_pairs()
    new_edges: list[WeightedEdge] = []
    records: list[CompletionRecord] = []
    for entity_type in sorted(set(target_types)):
        members = sorted(
            eid for eid in wsub.nodes
            if graph.entity(eid).entity_type == entity_type)
        if len(members) < 3:
            continue
        names = [graph.entity(eid).name for eid in members]
        z = project_1d(embedder.embed(names))
        threshold = completion_threshold(z)
        for a, b in candidate_pairs(members, z, threshold):
            if (a, b) in adjacent:
                continue
            ent_a, ent_b = graph.entity(a), graph.entity(b)
            try:
                proposal = llm.judge_hidden_relation((ent_a, ent_b), ctx)
            except ProviderError as exc:
                logger.warning("judging pair (%s, %s) failed: %s", a, b, exc)
                continue
            if proposal is None:
                continue
            rel_type, description = proposal
            semantic = semantic_similarity((ent_a.name, rel_type, ent_b.name),
                                           ctx.keywords, embedder)
            type_w = weights.lookup(rel_type)
            rel = Relation(source=a, target=b, relation_type=rel_type,
                           provenance=COMPLETED)
            new_edges.append(WeightedEdge(relation=rel, weight=semantic * type_w,
                                          semantic=semantic, type_weight=type_w,
                                          description=description))
            records.append(CompletionRecord(pair=(a, b), relation_type=rel_type,
                                            description=description,
                                            weight=semantic * type_w))
            adjacent.add((a, b))
    new_edges.sort(key=lambda e: e.key())
    merged = WeightedSubgraph(
        nodes=set(wsub.nodes), edges=list(wsub.edges) + new_edges,
        prune_threshold_used=wsub.prune_threshold_used)
    return merged, records
