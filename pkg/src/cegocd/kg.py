"""Knowledge graph storage: JSONL loading, validation, and typed lookups.

The graph is immutable after load. Edges are stored with their authored
direction but every traversal downstream treats them as undirected.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import (
    DanglingEdgeError,
    DuplicateEntityError,
    GraphFormatError,
    UnknownEntityError,
)

logger = logging.getLogger(__name__)

ORIGINAL = "original"
COMPLETED = "completed"

#: entity_type used to recognize paper title (central) nodes; overridable per load
DEFAULT_TITLE_TYPE = "Title"


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    entity_type: str
    description: str = ""
    aliases: tuple[str, ...] = ()

    def text(self) -> str:
        """Surface text used for TF-IDF indexing: name + aliases + description."""
        parts = [self.name, *self.aliases]
        if self.description:
            parts.append(self.description)
        return " ".join(parts)


@dataclass(frozen=True)
class Relation:
    source: str
    target: str
    relation_type: str
    provenance: str = ORIGINAL

    def key(self) -> tuple[str, str, str]:
        return (self.source, self.target, self.relation_type)

    def other(self, entity_id: str) -> str:
        """Opposite endpoint, treating the edge as undirected."""
        if entity_id == self.source:
            return self.target
        if entity_id == self.target:
            return self.source
        raise ValueError(f"{entity_id} is not an endpoint of {self.key()}")


class KnowledgeGraph:
    """Validated, indexed, read-only knowledge graph."""

    def __init__(self, entities: dict[str, Entity], relations: list[Relation],
                 title_type: str = DEFAULT_TITLE_TYPE):
        self.entities = dict(entities)
        self.relations = list(relations)
        self.title_type = title_type
        self.adjacency: dict[str, list[Relation]] = {eid: [] for eid in self.entities}
        self.type_index: dict[str, list[str]] = {}
        self.relation_type_vocabulary: set[str] = set()
        for rel in self.relations:
            self.adjacency[rel.source].append(rel)
            self.adjacency[rel.target].append(rel)
            self.relation_type_vocabulary.add(rel.relation_type)
        for eid in sorted(self.entities):
            self.type_index.setdefault(self.entities[eid].entity_type, []).append(eid)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.entities

    @property
    def num_entities(self) -> int:
        return len(self.entities)

    @property
    def num_relations(self) -> int:
        return len(self.relations)

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnknownEntityError(entity_id) from None

    def neighbors(self, entity_id: str,
                  relation_filter: Optional[set[str]] = None) -> list[tuple[Relation, Entity]]:
        """All incident edges (either direction) with the opposite endpoint.

        Sorted by neighbor id then relation_type so iteration order is stable.
        """
        if entity_id not in self.entities:
            raise UnknownEntityError(entity_id)
        out = []
        for rel in self.adjacency[entity_id]:
            if relation_filter is not None and rel.relation_type not in relation_filter:
                continue
            out.append((rel, self.entities[rel.other(entity_id)]))
        out.sort(key=lambda pair: (pair[1].id, pair[0].relation_type))
        return out

    def entities_of_type(self, entity_type: str) -> list[Entity]:
        return [self.entities[eid] for eid in self.type_index.get(entity_type, [])]

    def title_nodes(self) -> list[Entity]:
        return self.entities_of_type(self.title_type)

    def is_title(self, entity_id: str) -> bool:
        return self.entity(entity_id).entity_type == self.title_type


def _parse_entity(obj: dict, line_no: int) -> Entity:
    try:
        eid = obj["id"]
        name = obj["name"]
        etype = obj["type"]
    except KeyError as exc:
        raise GraphFormatError(f"entity missing field {exc}", line_no) from None
    if not eid:
        raise GraphFormatError("entity id is empty", line_no)
    return Entity(
        id=str(eid),
        name=str(name),
        entity_type=str(etype),
        description=str(obj.get("description") or ""),
        aliases=tuple(str(a) for a in obj.get("aliases") or ()),
    )


def _parse_relation(obj: dict, line_no: int) -> Relation:
    try:
        return Relation(source=str(obj["source"]), target=str(obj["target"]),
                        relation_type=str(obj["type"]))
    except KeyError as exc:
        raise GraphFormatError(f"relation missing field {exc}", line_no) from None


def load_graph(path: str | Path, title_type: str = DEFAULT_TITLE_TYPE) -> KnowledgeGraph:
    """Two-pass load of the JSONL graph format.

    Duplicate (source, target, type) edges collapse to one; self-loops are
    dropped with a warning count. Dangling endpoints and duplicate entity
    ids are hard errors.
    """
    entities: dict[str, Entity] = {}
    raw_relations: list[tuple[Relation, int]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise GraphFormatError(f"invalid JSON ({exc.msg})", line_no) from None
            kind = obj.get("kind")
            if kind == "entity":
                ent = _parse_entity(obj, line_no)
                if ent.id in entities:
                    raise DuplicateEntityError(ent.id)
                entities[ent.id] = ent
            elif kind == "relation":
                raw_relations.append((_parse_relation(obj, line_no), line_no))
            else:
                raise GraphFormatError(f"unknown kind {kind!r}", line_no)

    seen: set[tuple[str, str, str]] = set()
    relations: list[Relation] = []
    self_loops = 0
    for rel, line_no in raw_relations:
        if rel.source not in entities:
            raise DanglingEdgeError(f"edge {rel.key()} references missing source {rel.source!r}")
        if rel.target not in entities:
            raise DanglingEdgeError(f"edge {rel.key()} references missing target {rel.target!r}")
        if rel.source == rel.target:
            self_loops += 1
            continue
        if rel.key() in seen:
            continue
        seen.add(rel.key())
        relations.append(rel)
    if self_loops:
        logger.warning("dropped %d self-loop edge(s) while loading %s", self_loops, path)
    return KnowledgeGraph(entities, relations, title_type=title_type)


def save_graph(graph: KnowledgeGraph, path: str | Path) -> None:
    """Write the graph back out in the JSONL load format (round-trip safe)."""
    with open(path, "w", encoding="utf-8") as fh:
        for eid in sorted(graph.entities):
            ent = graph.entities[eid]
            fh.write(json.dumps({
                "kind": "entity", "id": ent.id, "name": ent.name,
                "type": ent.entity_type, "description": ent.description,
                "aliases": list(ent.aliases),
            }, ensure_ascii=False) + "\n")
        for rel in sorted(graph.relations, key=Relation.key):
            fh.write(json.dumps({
                "kind": "relation", "source": rel.source,
                "target": rel.target, "type": rel.relation_type,
            }, ensure_ascii=False) + "\n")
