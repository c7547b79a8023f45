"""Weighted community detection over the refined subgraph.

Deterministic Louvain (ascending node-id sweeps, strict-gain moves),
iterative merging down to a community cap, central-title selection by
weighted degree, and plain-text verbalization of each community.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .kg import COMPLETED, KnowledgeGraph
from .optimization import WeightedEdge, WeightedSubgraph

DEFAULT_THETA_MAX = 3

UNANCHORED_HEADER = "Unanchored community"


@dataclass
class Community:
    id: int
    members: set[str]
    central_title: Optional[str] = None
    theme: Optional[str] = None


@dataclass
class CommunityPartition:
    assignment: dict[str, int]
    communities: list[Community]
    modularity: float
    theta_max: int = DEFAULT_THETA_MAX


def _edge_weights(wsub: WeightedSubgraph) -> dict[tuple[str, str], float]:
    """Undirected pair -> summed weight (parallel original/completed edges merge)."""
    weights: dict[tuple[str, str], float] = {}
    for e in wsub.edges:
        a, b = e.relation.source, e.relation.target
        key = (min(a, b), max(a, b))
        weights[key] = weights.get(key, 0.0) + e.weight
    return weights


def modularity(wsub: WeightedSubgraph, assignment: dict[str, int]) -> float:
    """Standard weighted modularity; m = total undirected edge weight.

    Zero-edge graphs get Q = 0 by convention.
    """
    for node in wsub.nodes:
        if node not in assignment:
            raise ValueError(f"assignment is missing node {node!r}")
    pair_w = _edge_weights(wsub)
    m = sum(pair_w.values())
    if m == 0:
        return 0.0
    # sorted iteration keeps float accumulation order hash-seed independent
    degree: dict[str, float] = {n: 0.0 for n in sorted(wsub.nodes)}
    for (a, b), w in pair_w.items():
        degree[a] += w
        degree[b] += w
    intra: dict[int, float] = {}
    degree_sum: dict[int, float] = {}
    for (a, b), w in pair_w.items():
        if assignment[a] == assignment[b]:
            intra[assignment[a]] = intra.get(assignment[a], 0.0) + w
    for node, k in degree.items():
        c = assignment[node]
        degree_sum[c] = degree_sum.get(c, 0.0) + k
    q = 0.0
    for c in sorted(set(assignment[n] for n in wsub.nodes)):
        q += intra.get(c, 0.0) / m - (degree_sum.get(c, 0.0) / (2.0 * m)) ** 2
    return q


class _LouvainGraph:
    """Aggregatable weighted graph used internally by the Louvain passes."""

    def __init__(self, nodes: Sequence[str | int],
                 pair_w: dict[tuple, float], self_loops: dict):
        self.nodes = list(nodes)
        self.neighbors: dict = {n: {} for n in nodes}
        for (a, b), w in pair_w.items():
            self.neighbors[a][b] = self.neighbors[a].get(b, 0.0) + w
            self.neighbors[b][a] = self.neighbors[b].get(a, 0.0) + w
        self.self_loops = dict(self_loops)
        self.degree = {
            n: sum(self.neighbors[n].values()) + 2.0 * self.self_loops.get(n, 0.0)
            for n in nodes
        }
        self.m = sum(pair_w.values()) + sum(self_loops.values())


def _local_moves(graph: _LouvainGraph) -> tuple[dict, bool]:
    """One Louvain phase of repeated sweeps; returns (community map, moved?)."""
    community = {n: n for n in graph.nodes}
    comm_degree = {n: graph.degree[n] for n in graph.nodes}
    moved_any = False
    two_m = 2.0 * graph.m
    while True:
        moved_this_sweep = False
        for node in sorted(graph.nodes):
            current = community[node]
            # detach node before evaluating destinations
            comm_degree[current] -= graph.degree[node]
            links: dict = {}
            for nb, w in graph.neighbors[node].items():
                links[community[nb]] = links.get(community[nb], 0.0) + w
            best_comm, best_gain = current, links.get(current, 0.0) / graph.m \
                - graph.degree[node] * comm_degree.get(current, 0.0) / (two_m * graph.m)
            for cand in sorted(links):
                if cand == current:
                    continue
                gain = links[cand] / graph.m \
                    - graph.degree[node] * comm_degree.get(cand, 0.0) / (two_m * graph.m)
                if gain > best_gain + 1e-12:
                    best_comm, best_gain = cand, gain
            community[node] = best_comm
            comm_degree[best_comm] = comm_degree.get(best_comm, 0.0) + graph.degree[node]
            if best_comm != current:
                moved_this_sweep = True
                moved_any = True
        if not moved_this_sweep:
            break
    return community, moved_any


def _aggregate(graph: _LouvainGraph, community: dict) -> _LouvainGraph:
    comms = sorted(set(community.values()))
    relabel = {c: i for i, c in enumerate(comms)}
    pair_w: dict[tuple, float] = {}
    self_loops: dict = {c: 0.0 for c in range(len(comms))}
    for n in graph.nodes:
        self_loops[relabel[community[n]]] += graph.self_loops.get(n, 0.0)
    seen_pairs = set()
    for a in graph.nodes:
        for b, w in graph.neighbors[a].items():
            if (b, a) in seen_pairs or (a, b) in seen_pairs:
                continue
            seen_pairs.add((a, b))
            ca, cb = relabel[community[a]], relabel[community[b]]
            if ca == cb:
                self_loops[ca] += w
            else:
                key = (min(ca, cb), max(ca, cb))
                pair_w[key] = pair_w.get(key, 0.0) + w
    return _LouvainGraph(list(range(len(comms))), pair_w, self_loops)


def _canonical_partition(wsub: WeightedSubgraph,
                         raw_assignment: dict[str, int],
                         theta_max: int) -> CommunityPartition:
    """Relabel communities 0..k-1 ordered by smallest member id."""
    groups: dict[int, set[str]] = {}
    for node, c in raw_assignment.items():
        groups.setdefault(c, set()).add(node)
    ordered = sorted(groups.values(), key=lambda members: min(members))
    assignment = {}
    communities = []
    for new_id, members in enumerate(ordered):
        communities.append(Community(id=new_id, members=set(members)))
        for node in members:
            assignment[node] = new_id
    return CommunityPartition(
        assignment=assignment, communities=communities,
        modularity=modularity(wsub, assignment), theta_max=theta_max)


def louvain(wsub: WeightedSubgraph,
            theta_max: int = DEFAULT_THETA_MAX) -> CommunityPartition:
    """Two-phase Louvain with deterministic traversal order."""
    if not wsub.nodes:
        raise ValueError("subgraph has no nodes")
    pair_w = _edge_weights(wsub)
    graph = _LouvainGraph(sorted(wsub.nodes), pair_w, {})
    if graph.m == 0:
        return _canonical_partition(
            wsub, {n: i for i, n in enumerate(sorted(wsub.nodes))}, theta_max)

    # membership of each current super-node in terms of original nodes
    membership: dict = {n: {n} for n in graph.nodes}
    while True:
        community, moved = _local_moves(graph)
        if not moved:
            break
        new_graph = _aggregate(graph, community)
        comms = sorted(set(community.values()))
        relabel = {c: i for i, c in enumerate(comms)}
        new_membership: dict = {i: set() for i in range(len(comms))}
        for n in graph.nodes:
            new_membership[relabel[community[n]]] |= membership[n]
        graph, membership = new_graph, new_membership
        if len(graph.nodes) == 1:
            break
    assignment = {}
    for idx, super_node in enumerate(sorted(membership, key=str)):
        for node in membership[super_node]:
            assignment[node] = idx
    return _canonical_partition(wsub, assignment, theta_max)


def merge_to_max(partition: CommunityPartition, wsub: WeightedSubgraph,
                 theta_max: int = DEFAULT_THETA_MAX) -> CommunityPartition:
    """Greedily merge the most strongly connected community pair until the cap.

    Ties break toward fewer combined nodes, then the lexicographically
    smallest member id of the combined pair.
    """
    pair_w = _edge_weights(wsub)
    groups: list[set[str]] = [set(c.members) for c in partition.communities]
    while len(groups) > theta_max:
        best_key = None
        best_pair = None
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                inter = sum(
                    w for (a, b), w in pair_w.items()
                    if (a in groups[i] and b in groups[j])
                    or (a in groups[j] and b in groups[i]))
                key = (-inter, len(groups[i]) + len(groups[j]),
                       min(min(groups[i]), min(groups[j])))
                if best_key is None or key < best_key:
                    best_key, best_pair = key, (i, j)
        i, j = best_pair
        groups[i] |= groups[j]
        del groups[j]
    assignment = {}
    for idx, members in enumerate(sorted(groups, key=min)):
        for node in members:
            assignment[node] = idx
    return _canonical_partition(wsub, assignment, theta_max)


def central_title(wsub: WeightedSubgraph, graph: KnowledgeGraph,
                  community: Community) -> Optional[str]:
    """Title node with the highest within-community weighted degree, or None."""
    titles = sorted(
        eid for eid in community.members
        if graph.entity(eid).entity_type == graph.title_type)
    if not titles:
        return None
    pair_w = _edge_weights(wsub)
    best_id, best_degree = None, -1.0
    for title_id in titles:  # ascending id, so ties keep the smaller id
        degree = 0.0
        for (a, b), w in pair_w.items():
            if title_id == a and b in community.members:
                degree += w
            elif title_id == b and a in community.members:
                degree += w
        if degree > best_degree + 1e-15:
            best_id, best_degree = title_id, degree
    return best_id


def verbalize(wsub: WeightedSubgraph, graph: KnowledgeGraph,
              community: Community, central: Optional[str]) -> str:
    """Plain-text rendering: header plus one line per intra-community edge.

    Edges sort by descending weight, then (source, target, type) key.
    Completed edges append their stored description.
    """
    if central is not None:
        header = f"Community around paper: {graph.entity(central).name}"
    else:
        header = UNANCHORED_HEADER
    intra = [
        e for e in wsub.edges
        if e.relation.source in community.members
        and e.relation.target in community.members
    ]
    intra.sort(key=lambda e: (-e.weight, e.key()))
    lines = [header]
    for e in intra:
        rel_text = e.relation.relation_type.replace("_", " ")
        line = (f"{graph.entity(e.relation.source).name} -[{rel_text}]- "
                f"{graph.entity(e.relation.target).name} "
                f"(weight={e.weight:.6f}, {e.relation.provenance})")
        if e.relation.provenance == COMPLETED and e.description:
            line += f" :: {e.description}"
        lines.append(line)
    return "\n".join(lines)
