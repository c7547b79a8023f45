"""End-to-end query orchestration and the structured run report."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

from . import community as community_mod
from . import optimization, retrieval
from .config import PipelineConfig
from .errors import EmptySubgraphError, ProviderError
from .index import build_index
from .kg import KnowledgeGraph
from .providers import (CallLedger, EmbeddingProvider, LLMProvider,
                        NO_EVIDENCE_ANSWER, QueryContext)

REPORT_SCHEMA = "cegocd-report/1"


@dataclass
class RunReport:
    query: str
    keywords: list[str]
    target_types: list[str]
    dropped_target_types: list[str]
    retrieval: dict
    prune_threshold: Optional[float]
    triple_metrics: dict
    completions: list[dict]
    partition: dict
    community_answers: list[dict]
    final_answer: str
    empty_after_prune: bool
    no_evidence: bool
    provider_calls: list[dict]
    total_seconds: float
    schema: str = REPORT_SCHEMA

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "query": self.query,
            "keywords": self.keywords,
            "target_types": self.target_types,
            "dropped_target_types": self.dropped_target_types,
            "retrieval": self.retrieval,
            "prune_threshold": self.prune_threshold,
            "triple_metrics": self.triple_metrics,
            "completions": self.completions,
            "partition": self.partition,
            "community_answers": self.community_answers,
            "final_answer": self.final_answer,
            "empty_after_prune": self.empty_after_prune,
            "no_evidence": self.no_evidence,
            "provider_calls": self.provider_calls,
            "total_seconds": self.total_seconds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True,
                          ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        if data.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        fields = {k: v for k, v in data.items() if k != "schema"}
        return cls(schema=data["schema"], **fields)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def _partition_summary(partition, wsub, graph) -> dict:
    communities = []
    for comm in partition.communities:
        communities.append({
            "id": comm.id,
            "members": sorted(comm.members),
            "central_title": comm.central_title,
            "theme": comm.theme,
        })
    return {"modularity": partition.modularity,
            "theta_max": partition.theta_max,
            "communities": communities}


def _stage_metrics(wsub: Optional[optimization.WeightedSubgraph]) -> tuple[int, float]:
    if wsub is None:
        return 0, 0.0
    return len(wsub.edges), wsub.mean_semantic()


def answer(query: str, graph: KnowledgeGraph, llm: LLMProvider,
           embedder: EmbeddingProvider,
           config: Optional[PipelineConfig] = None,
           ledger: Optional[CallLedger] = None,
           emit_subgraph: Optional[dict] = None) -> RunReport:
    """Run the full retrieve/optimize/cluster/answer flow for one query.

    ``emit_subgraph``, when given a dict, receives the refined weighted
    subgraph in serialized form (used by the CLI's --emit-subgraph).
    """
    config = config or PipelineConfig()
    ledger = ledger or llm.ledger
    start = time.perf_counter()

    ctx = llm.extract_context(query)
    valid_types = [t for t in ctx.target_types if t in graph.type_index]
    dropped_types = [t for t in ctx.target_types if t not in graph.type_index]
    ctx = QueryContext(query=ctx.query, keywords=ctx.keywords,
                       target_types=tuple(valid_types))

    index = build_index(graph)
    candidates = {kw: index.top_k(kw, config.top_k) for kw in ctx.keywords}
    filtered = llm.filter_entities(ctx, candidates)
    relevant_ids = sorted({s.entity.id for group in filtered.values() for s in group})

    candidate_rel_types = set()
    for eid in relevant_ids:
        for rel in graph.adjacency[eid]:
            candidate_rel_types.add(rel.relation_type)
    allowed = llm.filter_relations(ctx, candidate_rel_types)

    pairs = retrieval.pair_entities(filtered)
    paths = []
    for pair in pairs:
        paths.extend(retrieval.find_paths(graph, pair, allowed,
                                          config.max_hops, config.max_paths))
    neighborhoods = retrieval.title_neighbor_subgraph(
        graph, relevant_ids, ctx.target_types)
    sub = retrieval.assemble_subgraph(paths, neighborhoods)

    retrieval_stats = {
        "candidates_per_keyword": {kw: len(candidates[kw]) for kw in candidates},
        "filtered_per_keyword": {kw: len(filtered[kw]) for kw in filtered},
        "pair_count": len(pairs),
        "path_count": len(paths),
        "allowed_relation_types": sorted(allowed),
        "subgraph_nodes": len(sub.nodes),
        "subgraph_edges": len(sub.edges),
    }

    def finish(*, prune_threshold=None, before=None, pruned=None, completed=None,
               completions=(), partition_summary=None, community_answers=(),
               final_answer=NO_EVIDENCE_ANSWER, empty_after_prune=False,
               no_evidence=False) -> RunReport:
        n_before, s_before = _stage_metrics(before)
        n_pruned, s_pruned = _stage_metrics(pruned)
        n_completed, s_completed = _stage_metrics(completed)
        elapsed = 0.0 if config.deterministic_report else time.perf_counter() - start
        return RunReport(
            query=query,
            keywords=list(ctx.keywords),
            target_types=list(ctx.target_types),
            dropped_target_types=dropped_types,
            retrieval=retrieval_stats,
            prune_threshold=prune_threshold,
            triple_metrics={
                "edges_before_prune": n_before,
                "edges_after_prune": n_pruned,
                "edges_after_complete": n_completed,
                "mean_semantic_before_prune": s_before,
                "mean_semantic_after_prune": s_pruned,
                "mean_semantic_after_complete": s_completed,
            },
            completions=[c.to_dict() for c in completions],
            partition=partition_summary or {"modularity": 0.0,
                                            "theta_max": config.theta_max,
                                            "communities": []},
            community_answers=list(community_answers),
            final_answer=final_answer,
            empty_after_prune=empty_after_prune,
            no_evidence=no_evidence,
            provider_calls=[c.to_dict() for c in ledger.calls],
            total_seconds=elapsed,
        )

    if not sub.edges:
        return finish(no_evidence=True)

    table = llm.assign_type_weights({r.relation_type for r in sub.edges})
    wsub = optimization.weight_edges(sub, graph, ctx.keywords, table, embedder)
    threshold = optimization.adaptive_prune_threshold(
        [e.weight for e in wsub.edges], config.prune_q_min,
        config.prune_q_max, config.prune_ramp_edges)

    empty_after_prune = False
    completions = []
    try:
        pruned = optimization.prune(wsub, threshold)
        refined, completions = optimization.complete(
            pruned, graph, ctx.target_types, llm, embedder, ctx, table)
    except EmptySubgraphError:
        # fall back to the unpruned neighbor subgraph; completion skipped
        empty_after_prune = True
        pruned = None
        if not neighborhoods.edges:
            return finish(prune_threshold=threshold, before=wsub,
                          empty_after_prune=True, no_evidence=True)
        refined = optimization.weight_edges(
            neighborhoods, graph, ctx.keywords, table, embedder)

    if emit_subgraph is not None:
        emit_subgraph.update(_serialize_wsub(refined))

    partition = community_mod.louvain(refined, config.theta_max)
    partition = community_mod.merge_to_max(partition, refined, config.theta_max)

    answers = []
    for comm in partition.communities:
        comm.central_title = community_mod.central_title(refined, graph, comm)
        text = community_mod.verbalize(refined, graph, comm, comm.central_title)
        try:
            theme, comm_answer = llm.summarize_community(text, ctx)
        except ProviderError:
            answers.append({"community": comm.id, "theme": None,
                            "answer": None, "answered": False})
            continue
        comm.theme = theme
        answers.append({"community": comm.id, "theme": theme,
                        "answer": comm_answer, "answered": True})

    answered = [(a["theme"], a["answer"]) for a in answers if a["answered"]]
    final = llm.synthesize_final(answered, ctx)

    return finish(
        prune_threshold=threshold, before=wsub, pruned=pruned, completed=refined,
        completions=completions,
        partition_summary=_partition_summary(partition, refined, graph),
        community_answers=answers, final_answer=final,
        empty_after_prune=empty_after_prune)


def _serialize_wsub(wsub: optimization.WeightedSubgraph) -> dict:
    return {
        "nodes": sorted(wsub.nodes),
        "prune_threshold": wsub.prune_threshold_used,
        "edges": [
            {"source": e.relation.source, "target": e.relation.target,
             "type": e.relation.relation_type, "provenance": e.relation.provenance,
             "weight": e.weight, "semantic": e.semantic,
             "type_weight": e.type_weight, "description": e.description}
            for e in sorted(wsub.edges, key=lambda e: e.key())
        ],
    }
