"""Relevance-subgraph construction.

Filtered entities from different keywords are paired; bounded simple
paths (at most 5 hops by default) connect each pair through the allowed
relation types; title-anchored neighborhoods attach every relevant
entity's paper context. The final subgraph is the set union of both.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import UnknownEntityError
from .kg import KnowledgeGraph, Relation

DEFAULT_MAX_HOPS = 5
DEFAULT_MAX_PATHS = 10

FROM_PATH = "from_path"
FROM_TITLE_NEIGHBORHOOD = "from_title_neighborhood"
BOTH = "both"


@dataclass(frozen=True)
class Path:
    nodes: tuple[str, ...]
    edges: tuple[Relation, ...]

    @property
    def hops(self) -> int:
        return len(self.edges)

    def validate(self, graph: KnowledgeGraph, max_hops: int = DEFAULT_MAX_HOPS) -> None:
        assert self.hops <= max_hops
        assert len(self.nodes) == self.hops + 1
        assert len(set(self.nodes)) == len(self.nodes), "path revisits a node"
        for (a, b), rel in zip(zip(self.nodes, self.nodes[1:]), self.edges):
            assert {rel.source, rel.target} == {a, b}
            assert rel in graph.adjacency[a]


@dataclass
class Subgraph:
    """Node/edge subset of a parent graph with origin tags per element."""

    nodes: set[str] = field(default_factory=set)
    edges: set[Relation] = field(default_factory=set)
    node_origin: dict[str, str] = field(default_factory=dict)
    edge_origin: dict[tuple[str, str, str], str] = field(default_factory=dict)

    def _tag(self, origins: dict, key, origin: str) -> None:
        prev = origins.get(key)
        if prev is None:
            origins[key] = origin
        elif prev != origin:
            origins[key] = BOTH

    def add_node(self, node_id: str, origin: str) -> None:
        self.nodes.add(node_id)
        self._tag(self.node_origin, node_id, origin)

    def add_edge(self, rel: Relation, origin: str) -> None:
        self.edges.add(rel)
        self._tag(self.edge_origin, rel.key(), origin)
        self.add_node(rel.source, origin)
        self.add_node(rel.target, origin)


def pair_entities(filtered: dict[str, list]) -> list[tuple[str, str]]:
    """All unordered id pairs drawn from different keyword groups.

    Accepts the per-keyword ScoredEntity lists from the filter stage.
    Self-pairs are excluded, duplicates collapsed, order lexicographic.
    """
    groups = [
        [s.entity.id for s in filtered[kw]]
        for kw in filtered if filtered[kw]
    ]
    pairs: set[tuple[str, str]] = set()
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            for a in groups[i]:
                for b in groups[j]:
                    if a != b:
                        pairs.add((min(a, b), max(a, b)))
    return sorted(pairs)


def find_paths(graph: KnowledgeGraph, pair: tuple[str, str], allowed: set[str],
               max_hops: int = DEFAULT_MAX_HOPS,
               max_paths: int = DEFAULT_MAX_PATHS) -> list[Path]:
    """Simple paths between the pair using only ``allowed`` relation types.

    Breadth-first layered enumeration: all 1-hop paths, then 2-hop, and
    so on, so results come back shortest-first; within a layer paths are
    ordered lexicographically by their node-id sequence. Stops at
    ``max_paths`` results or ``max_hops`` hops.
    """
    start, goal = pair
    if start not in graph:
        raise UnknownEntityError(start)
    if goal not in graph:
        raise UnknownEntityError(goal)
    if not allowed or start == goal:
        return []

    results: list[Path] = []
    # frontier holds partial simple paths that have not reached the goal
    frontier: list[tuple[tuple[str, ...], tuple[Relation, ...]]] = [((start,), ())]
    for _depth in range(max_hops):
        next_frontier: list[tuple[tuple[str, ...], tuple[Relation, ...]]] = []
        completed: list[Path] = []
        for nodes, edges in frontier:
            tip = nodes[-1]
            for rel, neighbor in graph.neighbors(tip, relation_filter=allowed):
                if neighbor.id in nodes:
                    continue
                extended = (nodes + (neighbor.id,), edges + (rel,))
                if neighbor.id == goal:
                    completed.append(Path(*extended))
                else:
                    next_frontier.append(extended)
        completed.sort(key=lambda p: p.nodes)
        for path in completed:
            if len(results) >= max_paths:
                return results
            results.append(path)
        if len(results) >= max_paths:
            break
        next_frontier.sort(key=lambda pe: pe[0])
        frontier = next_frontier
    return results


def title_neighbor_subgraph(graph: KnowledgeGraph, relevant: Iterable[str],
                            target_types: Sequence[str]) -> Subgraph:
    """Title-anchored neighborhoods of the relevant entities.

    Each relevant entity pulls in its adjacent title node(s) with the
    connecting edge; a relevant title node anchors itself. Every anchor
    title then contributes its direct edges to entities whose type is in
    ``target_types``.
    """
    sub = Subgraph()
    target = set(target_types)
    anchors: set[str] = set()
    for eid in sorted(set(relevant)):
        if eid not in graph:
            raise UnknownEntityError(eid)
        if graph.is_title(eid):
            anchors.add(eid)
            sub.add_node(eid, FROM_TITLE_NEIGHBORHOOD)
        for rel, neighbor in graph.neighbors(eid):
            if neighbor.entity_type == graph.title_type:
                anchors.add(neighbor.id)
                sub.add_edge(rel, FROM_TITLE_NEIGHBORHOOD)
    for title_id in sorted(anchors):
        for rel, neighbor in graph.neighbors(title_id):
            if neighbor.entity_type in target:
                sub.add_edge(rel, FROM_TITLE_NEIGHBORHOOD)
    return sub


def assemble_subgraph(paths: Sequence[Path], neighborhoods: Subgraph) -> Subgraph:
    """Union of path elements and the neighborhood subgraph (set semantics)."""
    sub = Subgraph()
    for path in paths:
        for node_id in path.nodes:
            sub.add_node(node_id, FROM_PATH)
        for rel in path.edges:
            sub.add_edge(rel, FROM_PATH)
    for node_id in sorted(neighborhoods.nodes):
        sub.add_node(node_id, FROM_TITLE_NEIGHBORHOOD)
    for rel in sorted(neighborhoods.edges, key=Relation.key):
        sub.add_edge(rel, FROM_TITLE_NEIGHBORHOOD)
    return sub
