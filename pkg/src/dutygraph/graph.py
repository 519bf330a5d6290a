"""Weighted DAG over positions and duty nodes, with path-based relevance."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .model import ResponsibilityCategory, ResponsibilityList, ResponsibilitySet


class EdgeKind(str, Enum):
    SUPERIOR_OF = "SUPERIOR_OF"  # position -> position
    ASSIGNED = "ASSIGNED"  # position -> node
    SUPERVISES = "SUPERVISES"  # node -> node


class CycleDetected(Exception):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("cycle: " + " -> ".join(cycle))


class UnknownVertex(KeyError):
    pass


class UnknownNode(KeyError):
    pass


@dataclass(frozen=True)
class RelationEdge:
    src: str
    dst: str
    kind: EdgeKind
    weight: float

    def __post_init__(self) -> None:
        if not 0 < self.weight <= 1:
            raise ValueError(f"edge {self.src}->{self.dst}: weight must be in (0, 1]")


@dataclass(frozen=True)
class RelationGraph:
    vertices: frozenset[str]
    edges: tuple[RelationEdge, ...]
    _adjacency: dict[str, list[RelationEdge]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        seen: set[tuple[str, str, EdgeKind]] = set()
        for e in self.edges:
            if e.src not in self.vertices or e.dst not in self.vertices:
                raise ValueError(f"edge {e.src}->{e.dst}: endpoint not a vertex")
            key = (e.src, e.dst, e.kind)
            if key in seen:
                raise ValueError(f"duplicate {e.kind.value} edge {e.src}->{e.dst}")
            seen.add(key)
            self._adjacency.setdefault(e.src, []).append(e)

    def outgoing(self, vertex: str) -> list[RelationEdge]:
        return self._adjacency.get(vertex, [])

    def to_doc(self) -> dict:
        """Flat edge-list document plus the topological order."""
        return {
            "vertices": sorted(self.vertices),
            "edges": [
                {"from": e.src, "to": e.dst, "kind": e.kind.value, "weight": e.weight}
                for e in sorted(self.edges, key=lambda e: (e.src, e.dst, e.kind.value))
            ],
            "order": assert_acyclic(self),
        }


def _find_cycle(graph: RelationGraph) -> list[str]:
    state: dict[str, int] = {}  # 0 on stack, 1 done
    stack: list[str] = []

    def visit(v: str) -> Optional[list[str]]:
        state[v] = 0
        stack.append(v)
        for e in graph.outgoing(v):
            if state.get(e.dst) == 0:
                i = stack.index(e.dst)
                return stack[i:] + [e.dst]
            if e.dst not in state:
                found = visit(e.dst)
                if found:
                    return found
        stack.pop()
        state[v] = 1
        return None

    for v in sorted(graph.vertices):
        if v not in state:
            found = visit(v)
            if found:
                return found
    raise AssertionError("no cycle present")


def assert_acyclic(graph: RelationGraph) -> list[str]:
    """Return a topological order of the vertices, or raise CycleDetected.

    Kahn's algorithm with lexicographic tie-breaking, so the order is
    deterministic for a given graph.
    """
    indegree: dict[str, int] = {v: 0 for v in graph.vertices}
    for e in graph.edges:
        indegree[e.dst] += 1
    ready = sorted(v for v, d in indegree.items() if d == 0)
    order: list[str] = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        changed = False
        for e in graph.outgoing(v):
            indegree[e.dst] -= 1
            if indegree[e.dst] == 0:
                ready.append(e.dst)
                changed = True
        if changed:
            ready.sort()
    if len(order) != len(graph.vertices):
        raise CycleDetected(_find_cycle(graph))
    return order


def build_graph(rset: ResponsibilitySet) -> RelationGraph:
    """Assemble the typed relation graph of one duty set.

    Superior and supervision edges carry weight 1; assignment weights are
    each node's weight divided by the largest weight at its position, so
    all edge weights stay in (0, 1] while relative importance is kept.
    """
    vertices: set[str] = set()
    edges: list[RelationEdge] = []

    position_ids = {p.position_id for p in rset.positions}
    vertices |= position_ids
    for p in rset.positions:
        if p.superior is not None and p.superior in position_ids:
            edges.append(RelationEdge(p.superior, p.position_id, EdgeKind.SUPERIOR_OF, 1.0))

    max_weight: dict[str, float] = {}
    for n in rset.nodes:
        max_weight[n.position_id] = max(max_weight.get(n.position_id, 0.0), n.weight)

    for n in rset.nodes:
        vertices.add(n.node_id)
        if n.position_id in position_ids:
            edges.append(
                RelationEdge(
                    n.position_id,
                    n.node_id,
                    EdgeKind.ASSIGNED,
                    n.weight / max_weight[n.position_id],
                )
            )

    node_ids = {n.node_id for n in rset.nodes}
    for n in rset.nodes:
        if n.supervised_by is not None and n.supervised_by in node_ids:
            edges.append(RelationEdge(n.supervised_by, n.node_id, EdgeKind.SUPERVISES, 1.0))

    graph = RelationGraph(vertices=frozenset(vertices), edges=tuple(edges))
    assert_acyclic(graph)
    return graph


def build_merged_graph(sets: Iterable[ResponsibilitySet]) -> RelationGraph:
    """Relation graph over several duty sets merged into one vertex space."""
    merged = ResponsibilitySet(
        set_id="merged",
        department_id="*",
        positions=tuple(p for s in sets for p in s.positions),
        lists=tuple(l for s in sets for l in s.lists),
        boundaries=(),
        nodes=tuple(n for s in sets for n in s.nodes),
    )
    return build_graph(merged)


@dataclass(frozen=True)
class NodeLinkage:
    """Outcome of matching one duty node against collected data."""

    node_id: str
    observed: bool
    position_id: Optional[str] = None  # confirmed assignment when observed
    referred_positions: tuple[str, ...] = ()  # candidates when unobserved
    warning: Optional[str] = None


def link_collected_node(
    graph: RelationGraph,
    node_id: str,
    observed: bool,
    candidate_lists: Iterable[ResponsibilityList],
) -> NodeLinkage:
    """Link a node to its position when seen in collected data; otherwise
    record a referral across every list that mentions it."""
    if node_id not in graph.vertices:
        raise UnknownNode(node_id)
    if observed:
        for e in graph.edges:
            if e.kind is EdgeKind.ASSIGNED and e.dst == node_id:
                return NodeLinkage(node_id=node_id, observed=True, position_id=e.src)
        return NodeLinkage(
            node_id=node_id, observed=True, warning="observed node has no assignment edge"
        )
    referred = sorted({l.position_id for l in candidate_lists if node_id in l.items})
    warning = None if referred else "node referenced by no list"
    return NodeLinkage(
        node_id=node_id, observed=False, referred_positions=tuple(referred), warning=warning
    )


def relevance(graph: RelationGraph, position_id: str, node_id: str, decay: float = 0.5) -> float:
    """Path-product correlation between a position and a duty node.

    Sums, over every directed path, the product of edge weights damped by
    ``decay`` per edge beyond the first. Exact dynamic program over the DAG.
    """
    if position_id not in graph.vertices:
        raise UnknownVertex(position_id)
    if node_id not in graph.vertices:
        raise UnknownVertex(node_id)
    if not 0 < decay <= 1:
        raise ValueError("decay must be in (0, 1]")

    memo: dict[str, float] = {}

    def damped(v: str) -> float:
        # Sum over paths v -> node of (edge-weight product) * decay^len(path).
        if v == node_id:
            return 1.0
        if v in memo:
            return memo[v]
        total = 0.0
        for e in graph.outgoing(v):
            total += e.weight * decay * damped(e.dst)
        memo[v] = total
        return total

    result = damped(position_id)
    return result / decay if result else 0.0
