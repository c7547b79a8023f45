"""Brute-force oracles that compute the fixture manifest.

Everything here is implemented independently of the main library (only
the JSONL reading is shared knowledge of the file format): exhaustive
DFS for path enumeration, full eigendecomposition for the 1-D
projection, explicit Bell-style partition search for modularity, manual
linear-interpolation quantiles, and exhaustive cosine scans for TF-IDF.
Used by regenerate_manifest() and directly by tests as the second route
of every dual-route check.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
import re
from pathlib import Path

import numpy as np

FIXTURE_DIR = Path(__file__).parent
GRAPH_PATH = FIXTURE_DIR / "toy_kg.jsonl"


# --------------------------------------------------------------------------
# file parsing (the one permitted shared piece of knowledge: the format)


def read_fixture(path: Path = GRAPH_PATH):
    entities = {}
    edges = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            if obj["kind"] == "entity":
                entities[obj["id"]] = obj
            else:
                edges.append((obj["source"], obj["target"], obj["type"]))
    # collapse duplicates, drop self-loops, mirroring the documented load rules
    deduped = []
    seen = set()
    for src, dst, rel in edges:
        if src == dst or (src, dst, rel) in seen:
            continue
        seen.add((src, dst, rel))
        deduped.append((src, dst, rel))
    return entities, deduped


# --------------------------------------------------------------------------
# tokenizer + TF-IDF oracle (exhaustive cosine over all documents)


def oracle_tokenize(text):
    return [t for t in re.findall(r"[0-9a-z]+", text.lower()) if len(t) >= 2]


def entity_document(obj):
    parts = [obj["name"], *obj.get("aliases", [])]
    if obj.get("description"):
        parts.append(obj["description"])
    return " ".join(parts)


def oracle_tfidf_topk(entities, keyword, k=10):
    n_docs = len(entities)
    doc_tokens = {eid: oracle_tokenize(entity_document(obj))
                  for eid, obj in entities.items()}
    df = {}
    for toks in doc_tokens.values():
        for term in set(toks):
            df[term] = df.get(term, 0) + 1

    def idf(term):
        return math.log(1.0 + n_docs / df[term]) if term in df else 0.0

    def vector(tokens):
        counts = {}
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
        return {t: c * idf(t) for t, c in counts.items()}

    q_vec = vector(oracle_tokenize(keyword))
    q_norm = math.sqrt(sum(v * v for v in q_vec.values()))
    if q_norm == 0:
        return []
    scored = []
    for eid in entities:
        d_vec = vector(doc_tokens[eid])
        d_norm = math.sqrt(sum(v * v for v in d_vec.values()))
        if d_norm == 0:
            continue
        dot = sum(q_vec[t] * d_vec.get(t, 0.0) for t in q_vec)
        score = dot / (q_norm * d_norm)
        if score > 0:
            scored.append((score, eid))
    scored.sort(key=lambda p: (-p[0], p[1]))
    return [[eid, score] for score, eid in scored[:k]]


def oracle_vocabulary_size(entities):
    terms = set()
    for obj in entities.values():
        terms.update(oracle_tokenize(entity_document(obj)))
    return len(terms)


# --------------------------------------------------------------------------
# path oracle: exhaustive DFS over simple paths, then sort + truncate


def oracle_paths(edges, start, goal, allowed, max_hops=5, max_paths=10):
    incident = {}
    for src, dst, rel in edges:
        if rel not in allowed:
            continue
        incident.setdefault(src, []).append((dst, rel))
        incident.setdefault(dst, []).append((src, rel))
    found = []

    def dfs(node, nodes, rels):
        if len(rels) > max_hops:
            return
        if node == goal and rels:
            found.append((nodes, rels))
            return
        if len(rels) == max_hops:
            return
        for nb, rel in incident.get(node, []):
            if nb in nodes:
                continue
            dfs(nb, nodes + (nb,), rels + (rel,))

    dfs(start, (start,), ())
    found.sort(key=lambda pr: (len(pr[1]), pr[0]))
    return [{"nodes": list(nodes), "relations": list(rels)}
            for nodes, rels in found[:max_paths]]


# --------------------------------------------------------------------------
# title-neighborhood oracle


def oracle_title_neighborhood(entities, edges, relevant, target_types,
                              title_type="Title"):
    incident = {}
    for src, dst, rel in edges:
        incident.setdefault(src, []).append((src, dst, rel))
        incident.setdefault(dst, []).append((src, dst, rel))
    nodes = set()
    picked = set()
    anchors = set()
    for eid in relevant:
        if entities[eid]["type"] == title_type:
            anchors.add(eid)
            nodes.add(eid)
        for src, dst, rel in incident.get(eid, []):
            other = dst if src == eid else src
            if entities[other]["type"] == title_type:
                anchors.add(other)
                picked.add((src, dst, rel))
                nodes.update((src, dst))
    for title in anchors:
        for src, dst, rel in incident.get(title, []):
            other = dst if src == title else src
            if entities[other]["type"] in target_types:
                picked.add((src, dst, rel))
                nodes.update((src, dst))
    return {"nodes": sorted(nodes), "edges": sorted(list(e) for e in picked)}


# --------------------------------------------------------------------------
# mock embedding + cosine oracle (re-derives the documented hash rule)


def oracle_mock_embedding(text, dim=32):
    raw = []
    for i in range(dim):
        digest = hashlib.sha256(f"{text}|{i}".encode("utf-8")).hexdigest()
        raw.append(int(digest[:8], 16) / 0xFFFFFFFF * 2.0 - 1.0)
    vec = np.array(raw)
    return vec / np.linalg.norm(vec)


def oracle_semantic_similarity(name_a, relation_type, name_b, keywords):
    text = f"{name_a} {relation_type.replace('_', ' ')} {name_b}"
    tv = oracle_mock_embedding(text)
    best = max(float(np.dot(tv, oracle_mock_embedding(k))) for k in keywords)
    return (best + 1.0) / 2.0


# --------------------------------------------------------------------------
# 1-D projection oracle: full eigendecomposition of the covariance


def oracle_project_1d(texts):
    matrix = np.array([oracle_mock_embedding(t) for t in texts])
    centered = matrix - matrix.mean(axis=0)
    if not np.any(centered):
        return [0.0] * len(texts)
    cov = centered.T @ centered / (len(texts) - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    component = eigvecs[:, -1]
    nonzero = np.nonzero(np.abs(component) > 1e-12)[0]
    if nonzero.size and component[nonzero[0]] < 0:
        component = -component
    return [float(z) for z in centered @ component]


# --------------------------------------------------------------------------
# quantile oracle: manual linear interpolation, h = (n-1)p


def oracle_quantile(values, p):
    ordered = sorted(values)
    h = (len(ordered) - 1) * p
    lo = int(math.floor(h))
    hi = min(lo + 1, len(ordered) - 1)
    return ordered[lo] + (h - lo) * (ordered[hi] - ordered[lo])


def oracle_completion_threshold(z):
    ordered = sorted(z)
    gaps = [b - a for a, b in zip(ordered, ordered[1:])]
    q25 = oracle_quantile(gaps, 0.25)
    q75 = oracle_quantile(gaps, 0.75)
    return q75 + (q75 - q25)


# --------------------------------------------------------------------------
# modularity + brute-force optimal partition


def oracle_modularity(nodes, weighted_edges, assignment):
    """Direct evaluation of the ordered-pair double sum."""
    m = sum(w for _, _, w in weighted_edges)
    if m == 0:
        return 0.0
    degree = {n: 0.0 for n in nodes}
    for a, b, w in weighted_edges:
        degree[a] += w
        degree[b] += w
    q = 0.0
    for i in nodes:
        for j in nodes:
            if assignment[i] != assignment[j]:
                continue
            w_ij = sum(w for a, b, w in weighted_edges
                       if {a, b} == {i, j} and i != j)
            q += w_ij - degree[i] * degree[j] / (2.0 * m)
    return q / (2.0 * m)


def all_partitions(items):
    """Every set partition of ``items`` (restricted-growth enumeration)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in all_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def oracle_best_partition(nodes, weighted_edges):
    best_q = -math.inf
    best_blocks = None
    for blocks in all_partitions(sorted(nodes)):
        assignment = {}
        for idx, block in enumerate(blocks):
            for n in block:
                assignment[n] = idx
        q = oracle_modularity(nodes, weighted_edges, assignment)
        if q > best_q + 1e-12:
            best_q = q
            best_blocks = [sorted(b) for b in blocks]
    best_blocks.sort(key=lambda b: b[0])
    return best_q, best_blocks


# --------------------------------------------------------------------------
# merge-to-cap oracle (independent rule simulation)


def oracle_merge_to_max(blocks, weighted_edges, theta_max):
    groups = [set(b) for b in blocks]
    while len(groups) > theta_max:
        best_key, best_pair = None, None
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                inter = sum(w for a, b, w in weighted_edges
                            if (a in groups[i] and b in groups[j])
                            or (a in groups[j] and b in groups[i]))
                key = (-inter, len(groups[i]) + len(groups[j]),
                       min(min(groups[i]), min(groups[j])))
                if best_key is None or key < best_key:
                    best_key, best_pair = key, (i, j)
        i, j = best_pair
        groups[i] |= groups[j]
        del groups[j]
    return sorted((sorted(g) for g in groups), key=lambda b: b[0])


# --------------------------------------------------------------------------
# verbalization oracle (independent formatting of the documented layout)


def oracle_verbalize(header_name, weighted_edges, names, descriptions=None):
    """weighted_edges: (source, target, rel_type, weight, provenance)."""
    descriptions = descriptions or {}
    if header_name is None:
        lines = ["Unanchored community"]
    else:
        lines = [f"Community around paper: {header_name}"]
    ordered = sorted(weighted_edges,
                     key=lambda e: (-e[3], (e[0], e[1], e[2])))
    for src, dst, rel, w, provenance in ordered:
        line = (f"{names[src]} -[{rel.replace('_', ' ')}]- {names[dst]} "
                f"(weight={w:.6f}, {provenance})")
        desc = descriptions.get((src, dst, rel))
        if provenance == "completed" and desc:
            line += f" :: {desc}"
        lines.append(line)
    return "\n".join(lines)
