"""Regenerates manifest.json from the oracle scripts.

Every manifest entry records the oracle that produced it; CI reruns
this module and fails on any diff against the committed manifest.
"""
from __future__ import annotations

import json
from pathlib import Path

from . import oracles

FIXTURE_DIR = Path(__file__).parent
MANIFEST_PATH = FIXTURE_DIR / "manifest.json"

#: the scripted fixture query used for the golden end-to-end run
SCRIPTED_QUERY = "graph attention models for node classification datasets"
SCRIPTED_KEYWORDS = ["graph", "attention", "models", "node",
                     "classification", "datasets"]

ALL_RELATION_TYPES = ["addresses_task", "cites", "compares_with",
                      "evaluates_on", "proposes_model", "uses_model"]

PATH_PAIRS = [("M01", "D05"), ("M04", "D01"), ("M01", "T01"), ("P09", "T03")]

PROJECTION_TEXTS = ["Graph Attention Network", "Graph Convolutional Network",
                    "Transformer", "Long Short Term Memory"]

# nine fixture nodes for the brute-force partition check (unit weights)
LOUVAIN_NODES = ["P01", "M01", "M02", "D01", "T01",
                 "P08", "M05", "D07", "T05"]

# synthetic four-triangle chain for the merge-to-cap trace
MERGE_NODES = ["a1", "a2", "a3", "b1", "b2", "b3",
               "c1", "c2", "c3", "d1", "d2", "d3"]
MERGE_EDGES = [
    ("a1", "a2", 1.0), ("a1", "a3", 1.0), ("a2", "a3", 1.0),
    ("b1", "b2", 1.0), ("b1", "b3", 1.0), ("b2", "b3", 1.0),
    ("c1", "c2", 1.0), ("c1", "c3", 1.0), ("c2", "c3", 1.0),
    ("d1", "d2", 1.0), ("d1", "d3", 1.0), ("d2", "d3", 1.0),
    ("a1", "b1", 0.9), ("b2", "c1", 0.5), ("c2", "d1", 0.8),
]

VERBALIZE_EDGES = [
    ("P01", "M01", "proposes_model", 0.81, "original"),
    ("P01", "D01", "evaluates_on", 0.64, "original"),
    ("P01", "T01", "addresses_task", 0.9, "original"),
    ("M01", "M02", "similar_to", 0.45, "completed"),
]
VERBALIZE_DESCRIPTIONS = {
    ("M01", "M02", "similar_to"): "Graph Attention Network and Graph "
                                  "Convolutional Network share the terms graph, network",
}


def _entry(value, oracle_name):
    return {"value": value, "oracle": oracle_name}


def build_manifest() -> dict:
    entities, edges = oracles.read_fixture()

    incident: dict[str, list] = {}
    for src, dst, rel in edges:
        incident.setdefault(src, []).append((src, dst, rel))
        incident.setdefault(dst, []).append((src, dst, rel))
    neighbors_p01 = sorted(
        [dst if src == "P01" else src, rel]
        for src, dst, rel in incident.get("P01", []))

    manifest = {
        "scripted_query": _entry(SCRIPTED_QUERY, "fixed input"),
        "scripted_keywords": _entry(SCRIPTED_KEYWORDS, "mock keyword rule"),
        "graph_counts": _entry(
            {"entities": len(entities), "edges": len(edges),
             "titles": sum(1 for e in entities.values() if e["type"] == "Title")},
            "read_fixture line scan"),
        "titles": _entry(
            sorted(e["id"] for e in entities.values() if e["type"] == "Title"),
            "read_fixture line scan"),
        "neighbors_P01": _entry(neighbors_p01, "incident-edge scan"),
        "vocabulary_size": _entry(
            oracles.oracle_vocabulary_size(entities), "oracle_vocabulary_size"),
        "topk_attention": _entry(
            oracles.oracle_tfidf_topk(entities, "attention", 10),
            "oracle_tfidf_topk"),
        "paths": _entry(
            {f"{a}->{b}": oracles.oracle_paths(edges, a, b,
                                               set(ALL_RELATION_TYPES))
             for a, b in PATH_PAIRS},
            "oracle_paths exhaustive DFS"),
        "title_neighborhood_M01_dataset": _entry(
            oracles.oracle_title_neighborhood(entities, edges, ["M01"], ["Dataset"]),
            "oracle_title_neighborhood"),
        "semantic_similarity_example": _entry(
            {"triplet": ["Graph Attention Network", "evaluates_on",
                         "Cora Citation Network"],
             "keywords": SCRIPTED_KEYWORDS,
             "value": oracles.oracle_semantic_similarity(
                 "Graph Attention Network", "evaluates_on",
                 "Cora Citation Network", SCRIPTED_KEYWORDS)},
            "oracle_semantic_similarity"),
        "weight_examples": _entry(
            [
                [src, dst, rel,
                 oracles.oracle_semantic_similarity(
                     entities[src]["name"], rel, entities[dst]["name"],
                     SCRIPTED_KEYWORDS) * 1.0]
                for src, dst, rel in sorted(
                    e for e in edges if e[0] == "P01")
            ],
            "oracle_semantic_similarity x unit type weight"),
        "projection": _entry(
            {"texts": PROJECTION_TEXTS,
             "z": oracles.oracle_project_1d(PROJECTION_TEXTS)},
            "oracle_project_1d full eigendecomposition"),
        "louvain_small": _entry(
            _louvain_small_entry(edges), "oracle_best_partition brute force"),
        "merge_case": _entry(
            {"nodes": MERGE_NODES,
             "edges": [list(e) for e in MERGE_EDGES],
             "initial_blocks": [["a1", "a2", "a3"], ["b1", "b2", "b3"],
                                ["c1", "c2", "c3"], ["d1", "d2", "d3"]],
             "merged_blocks": oracles.oracle_merge_to_max(
                 [["a1", "a2", "a3"], ["b1", "b2", "b3"],
                  ["c1", "c2", "c3"], ["d1", "d2", "d3"]],
                 MERGE_EDGES, 3)},
            "oracle_merge_to_max"),
        "verbalize_example": _entry(
            {"central": "P01",
             "edges": [list(e) for e in VERBALIZE_EDGES],
             "text": oracles.oracle_verbalize(
                 entities["P01"]["name"], VERBALIZE_EDGES,
                 {eid: obj["name"] for eid, obj in entities.items()},
                 VERBALIZE_DESCRIPTIONS)},
            "oracle_verbalize"),
    }
    return manifest


def _louvain_small_entry(edges):
    node_set = set(LOUVAIN_NODES)
    induced = [(src, dst, 1.0) for src, dst, rel in edges
               if src in node_set and dst in node_set]
    best_q, blocks = oracles.oracle_best_partition(LOUVAIN_NODES, induced)
    return {"nodes": LOUVAIN_NODES,
            "edges": [list(e) for e in induced],
            "best_modularity": best_q,
            "best_partition": blocks}


def regenerate_manifest(path: Path = MANIFEST_PATH) -> dict:
    manifest = build_manifest()
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return manifest


def load_manifest(path: Path = MANIFEST_PATH) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


if __name__ == "__main__":
    regenerate_manifest()
    print(f"wrote {MANIFEST_PATH}")
