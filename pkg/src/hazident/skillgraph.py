"""Skill graph queries: acyclicity and malfunction impact propagation.

Edges point dependent -> prerequisite, so a malfunction in a skill
propagates against edge direction: everything that (transitively)
depends on the failed skill is affected.
"""

from __future__ import annotations

from dataclasses import dataclass

from hazident.model import Skill, SkillGraph


def check_acyclic(graph: SkillGraph) -> list[str] | None:
    """Return a cycle witness as a closed path (first == last), or None.

    Iterative DFS with an explicit stack; the witness lists skill ids in
    edge direction. Edges with unknown endpoints are ignored here — the
    validator reports them separately.
    """
    known = set(graph.skill_ids())
    adjacency: dict[str, list[str]] = {sid: [] for sid in known}
    for dependent, prerequisite in graph.edges:
        if dependent in known and prerequisite in known:
            adjacency[dependent].append(prerequisite)

    WHITE, GREY, BLACK = 0, 1, 2
    color = {sid: WHITE for sid in known}
    parent: dict[str, str] = {}
    for start in graph.skill_ids():
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GREY
        while stack:
            node, index = stack[-1]
            if index < len(adjacency[node]):
                stack[-1] = (node, index + 1)
                successor = adjacency[node][index]
                if color[successor] == GREY:
                    # Close the path: walk back from node to successor.
                    path = [node]
                    while path[-1] != successor:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path + [successor]
                if color[successor] == WHITE:
                    color[successor] = GREY
                    parent[successor] = node
                    stack.append((successor, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return None


@dataclass(frozen=True)
class ImpactSet:
    """Skills affected by a malfunction in ``origin`` (origin included)."""

    origin: str
    affected: frozenset[str]

    def __contains__(self, skill_id: str) -> bool:
        return skill_id in self.affected


def affected_skills(graph: SkillGraph, origin: str) -> ImpactSet:
    """All transitive dependents of ``origin`` plus origin itself.

    Raises KeyError for an unknown origin. Deterministic regardless of
    edge order (the result is a set).
    """
    graph.skill(origin)  # existence check
    dependents: dict[str, list[str]] = {sid: [] for sid in graph.skill_ids()}
    for dependent, prerequisite in graph.edges:
        if dependent in dependents and prerequisite in dependents:
            dependents[prerequisite].append(dependent)
    affected: set[str] = {origin}
    frontier = [origin]
    while frontier:
        node = frontier.pop()
        for dependent in dependents[node]:
            if dependent not in affected:
                affected.add(dependent)
                frontier.append(dependent)
    return ImpactSet(origin=origin, affected=frozenset(affected))


def topological_order(graph: SkillGraph) -> list[Skill]:
    """Skills ordered so every prerequisite precedes its dependents.

    Kahn's algorithm with config order as the tiebreaker; raises
    ValueError on cyclic graphs.
    """
    order_index = {s.id: i for i, s in enumerate(graph.skills)}
    out_count = {s.id: 0 for s in graph.skills}  # unresolved prerequisites
    dependents: dict[str, list[str]] = {s.id: [] for s in graph.skills}
    for dependent, prerequisite in set(graph.edges):
        out_count[dependent] += 1
        dependents[prerequisite].append(dependent)
    ready = sorted((sid for sid, n in out_count.items() if n == 0), key=order_index.__getitem__)
    result: list[str] = []
    while ready:
        node = ready.pop(0)
        result.append(node)
        released = []
        for dependent in dependents[node]:
            out_count[dependent] -= 1
            if out_count[dependent] == 0:
                released.append(dependent)
        ready.extend(sorted(released, key=order_index.__getitem__))
        ready.sort(key=order_index.__getitem__)
    if len(result) != len(graph.skills):
        raise ValueError("graph is cyclic; no topological order exists")
    by_id = {s.id: s for s in graph.skills}
    return [by_id[sid] for sid in result]
