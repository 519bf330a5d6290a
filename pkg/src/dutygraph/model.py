"""Core domain types and their structural validation.

Everything here is immutable after construction; mutation happens by
building a new configuration version upstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum, IntEnum
from typing import Iterable, Mapping, Optional


class RiskLevel(IntEnum):
    """Ordered severity of a risk source. Comparisons follow the rank."""

    LOW = 1
    MEDIUM = 2
    HIGH = 3
    CRITICAL = 4

    @classmethod
    def from_name(cls, name: str) -> "RiskLevel":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown risk level: {name!r}") from None


class ResponsibilityCategory(str, Enum):
    SUBJECT = "SUBJECT"
    SUPERVISION = "SUPERVISION"
    LEADERSHIP = "LEADERSHIP"


class CycleKind(str, Enum):
    APERIODIC = "APERIODIC"
    PERIODIC = "PERIODIC"


class TriggerKind(str, Enum):
    SCHEDULED = "SCHEDULED"
    EVENT_TRIGGERED = "EVENT_TRIGGERED"
    MANUAL = "MANUAL"


class EvaluationMethod(str, Enum):
    AUTOMATIC = "AUTOMATIC"
    EVALUATION = "EVALUATION"
    VOTING = "VOTING"


class TaskType(str, Enum):
    PRIMARY = "PRIMARY"
    SECONDARY = "SECONDARY"


class CollectionMethod(str, Enum):
    IOT = "IOT"
    MANUAL = "MANUAL"


class ReportingPeriod(str, Enum):
    WEEKLY = "WEEKLY"
    MONTHLY = "MONTHLY"


class ConflictingClassification(Exception):
    """Two merged rules map one event category to both SUBJECT and LEADERSHIP."""

    def __init__(self, category: str, position_id: str):
        self.category = category
        self.position_id = position_id
        super().__init__(
            f"category {category!r} classifies as both SUBJECT and LEADERSHIP "
            f"for position {position_id!r}"
        )


@dataclass(frozen=True)
class RiskSource:
    risk_id: str
    description: str
    level: RiskLevel
    category: str


@dataclass(frozen=True)
class ResponsibilityBoundary:
    """Machine-checkable accountability scope.

    ``upper_bound`` is every event category the holder answers for,
    ``lower_bound`` the minimal subset, and ``classify_rules`` how a
    covered category maps onto the duty hierarchy.
    """

    boundary_id: str
    source_rule: str
    upper_bound: frozenset[str]
    lower_bound: frozenset[str]
    classify_rules: Mapping[str, ResponsibilityCategory] = field(default_factory=dict)
    relative_cases: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.lower_bound <= self.upper_bound:
            raise ValueError(
                f"boundary {self.boundary_id}: lower bound must be within upper bound"
            )
        extra = set(self.classify_rules) - set(self.upper_bound)
        if extra:
            raise ValueError(
                f"boundary {self.boundary_id}: classify rules outside upper bound: {sorted(extra)}"
            )


@dataclass(frozen=True)
class CycleSpec:
    kind: CycleKind
    min_cycle: Optional[timedelta] = None
    anchor: Optional[datetime] = None

    def __post_init__(self) -> None:
        if self.kind is CycleKind.PERIODIC:
            if self.min_cycle is None or self.min_cycle <= timedelta(0):
                raise ValueError("periodic cycle requires a positive min_cycle")
            if self.anchor is None:
                raise ValueError("periodic cycle requires an anchor timestamp")
        else:
            if self.min_cycle is not None or self.anchor is not None:
                raise ValueError("aperiodic cycle carries no min_cycle or anchor")

    @classmethod
    def aperiodic(cls) -> "CycleSpec":
        return cls(kind=CycleKind.APERIODIC)

    @classmethod
    def periodic(cls, min_cycle: timedelta, anchor: datetime) -> "CycleSpec":
        return cls(kind=CycleKind.PERIODIC, min_cycle=min_cycle, anchor=anchor)


@dataclass(frozen=True)
class TriggerMethod:
    kind: TriggerKind
    event_category: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind is TriggerKind.EVENT_TRIGGERED and not self.event_category:
            raise ValueError("event-triggered method requires an event category")
        if self.kind is not TriggerKind.EVENT_TRIGGERED and self.event_category:
            raise ValueError("event category only applies to event-triggered methods")


@dataclass(frozen=True)
class ResponsibilityNode:
    """One task item owed by a position."""

    node_id: str
    title: str
    position_id: str
    category: ResponsibilityCategory
    task_type: TaskType
    mandatory: bool
    cycle: CycleSpec
    trigger: TriggerMethod
    evaluation: EvaluationMethod
    weight: float
    boundary_id: str
    collection: CollectionMethod
    risk_id: Optional[str] = None
    supervised_by: Optional[str] = None
    response_budget: Optional[timedelta] = None
    consensus: Optional[str] = None  # opaque, not interpreted

    def __post_init__(self) -> None:
        if self.weight <= 0:
            raise ValueError(f"node {self.node_id}: weight must be positive")
        if self.category is ResponsibilityCategory.SUPERVISION and self.supervised_by:
            raise ValueError(f"node {self.node_id}: supervision nodes are not supervised")
        if self.response_budget is not None and self.response_budget <= timedelta(0):
            raise ValueError(f"node {self.node_id}: response budget must be positive")


@dataclass(frozen=True)
class Position:
    position_id: str
    title: str
    department_id: str
    superior: Optional[str] = None
    subordinates: frozenset[str] = frozenset()
    risk_ids: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ResponsibilityList:
    list_id: str
    position_id: str
    items: tuple[str, ...]
    mandatory: bool
    reporting_period: ReportingPeriod

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError(f"list {self.list_id}: items must be nonempty")


@dataclass(frozen=True)
class ResponsibilitySet:
    """Per-department collection of positions, lists, nodes, and boundaries."""

    set_id: str
    department_id: str
    positions: tuple[Position, ...] = ()
    lists: tuple[ResponsibilityList, ...] = ()
    boundaries: tuple[ResponsibilityBoundary, ...] = ()
    nodes: tuple[ResponsibilityNode, ...] = ()

    def position(self, position_id: str) -> Optional[Position]:
        for p in self.positions:
            if p.position_id == position_id:
                return p
        return None

    def node(self, node_id: str) -> Optional[ResponsibilityNode]:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        return None


@dataclass(frozen=True)
class Violation:
    """One invariant violation; violations are data, not faults."""

    code: str
    subject: str
    message: str


ValidationReport = list[Violation]


def _duplicates(ids: Iterable[str]) -> set[str]:
    seen: set[str] = set()
    dups: set[str] = set()
    for i in ids:
        if i in seen:
            dups.add(i)
        seen.add(i)
    return dups


def _hierarchy_cycles(positions: Mapping[str, Position]) -> list[str]:
    """Positions sitting on a superior-chain cycle, via DFS over superior edges."""
    on_cycle: set[str] = set()
    state: dict[str, int] = {}  # 0 visiting, 1 done
    for start in positions:
        if start in state:
            continue
        path: list[str] = []
        cur: Optional[str] = start
        while cur is not None and cur in positions and state.get(cur) != 1:
            if state.get(cur) == 0:
                on_cycle.update(path[path.index(cur):])
                break
            state[cur] = 0
            path.append(cur)
            cur = positions[cur].superior
        for p in path:
            state[p] = 1
    return sorted(on_cycle)


def validate_set(
    rset: ResponsibilitySet,
    registry_boundaries: Mapping[str, ResponsibilityBoundary] | None = None,
    registry_risks: Mapping[str, RiskSource] | None = None,
) -> ValidationReport:
    """Collect every invariant violation in a duty set.

    An empty report means the set is valid. Cross-references may resolve
    inside the set or in the shared registries passed alongside.
    """
    report: ValidationReport = []
    boundaries = dict(registry_boundaries or {})
    boundaries.update({b.boundary_id: b for b in rset.boundaries})
    risks = dict(registry_risks or {})

    positions = {p.position_id: p for p in rset.positions}
    nodes = {n.node_id: n for n in rset.nodes}

    for dup in sorted(_duplicates(p.position_id for p in rset.positions)):
        report.append(Violation("duplicate-position", dup, "position id declared twice"))
    for dup in sorted(_duplicates(n.node_id for n in rset.nodes)):
        report.append(Violation("duplicate-node", dup, "node id declared twice"))
    for dup in sorted(_duplicates(l.list_id for l in rset.lists)):
        report.append(Violation("duplicate-list", dup, "list id declared twice"))
    for dup in sorted(_duplicates(b.boundary_id for b in rset.boundaries)):
        report.append(Violation("duplicate-boundary", dup, "boundary id declared twice"))

    for p in rset.positions:
        if p.superior is not None and p.superior not in positions:
            report.append(
                Violation("unknown-superior", p.position_id, f"superior {p.superior!r} not declared")
            )
        for sub in sorted(p.subordinates):
            if sub not in positions:
                report.append(
                    Violation("unknown-subordinate", p.position_id, f"subordinate {sub!r} not declared")
                )

    for pid in _hierarchy_cycles(positions):
        report.append(Violation("hierarchy-cycle", pid, "position sits on a superior-chain cycle"))

    for n in rset.nodes:
        if n.position_id not in positions:
            report.append(
                Violation("unknown-position", n.node_id, f"assigned position {n.position_id!r} not declared")
            )
        if n.boundary_id not in boundaries:
            report.append(
                Violation("unknown-boundary", n.node_id, f"boundary {n.boundary_id!r} not declared")
            )
        if n.risk_id is not None and risks and n.risk_id not in risks:
            report.append(Violation("unknown-risk", n.node_id, f"risk {n.risk_id!r} not declared"))
        if n.supervised_by is not None:
            sup = nodes.get(n.supervised_by)
            if sup is None:
                report.append(
                    Violation("unknown-supervisor", n.node_id, f"supervising node {n.supervised_by!r} not declared")
                )
            elif sup.category is not ResponsibilityCategory.SUPERVISION:
                report.append(
                    Violation(
                        "bad-supervisor",
                        n.node_id,
                        f"supervising node {n.supervised_by!r} is not a SUPERVISION node",
                    )
                )

    for lst in rset.lists:
        if lst.position_id not in positions:
            report.append(
                Violation("unknown-position", lst.list_id, f"owning position {lst.position_id!r} not declared")
            )
        for item in lst.items:
            node = nodes.get(item)
            if node is None:
                report.append(Violation("unknown-item", lst.list_id, f"item {item!r} not declared"))
            elif node.position_id != lst.position_id:
                report.append(
                    Violation(
                        "item-position-mismatch",
                        item,
                        f"item is assigned to {node.position_id!r} but listed under {lst.position_id!r}",
                    )
                )

    report.sort(key=lambda v: (v.code, v.subject, v.message))
    return report


NOT_COVERED = None  # classify_event result for categories outside the upper bound


def classify_event(
    boundary: ResponsibilityBoundary, category: str
) -> Optional[ResponsibilityCategory]:
    """Map an event category onto the duty hierarchy.

    Returns ``None`` (NOT_COVERED) when the category falls outside the
    boundary's upper bound; covered categories without an explicit rule
    default to SUBJECT: the assigned holder is the default accountable party.
    """
    if category not in boundary.upper_bound:
        return NOT_COVERED
    return boundary.classify_rules.get(category, ResponsibilityCategory.SUBJECT)


def _merge_rule(
    category: str, proposals: set[ResponsibilityCategory], position_id: str
) -> ResponsibilityCategory:
    # Supervision strictly layers on any other duty; subject/leadership
    # overlap indicates misconfiguration and cannot be auto-resolved.
    if ResponsibilityCategory.SUPERVISION in proposals:
        return ResponsibilityCategory.SUPERVISION
    if proposals == {ResponsibilityCategory.SUBJECT, ResponsibilityCategory.LEADERSHIP}:
        raise ConflictingClassification(category, position_id)
    return next(iter(proposals))


def derive_boundaries(
    sets: Iterable[ResponsibilitySet],
    registry_boundaries: Mapping[str, ResponsibilityBoundary] | None = None,
) -> list[ResponsibilityBoundary]:
    """Combine each position's node boundaries into one per-position boundary.

    Upper bound unions all covered categories; lower bound unions the lower
    bounds of mandatory nodes only. When a position's nodes share a single
    boundary it is passed through unchanged.
    """
    sets = list(sets)
    lookup: dict[str, ResponsibilityBoundary] = dict(registry_boundaries or {})
    for s in sets:
        lookup.update({b.boundary_id: b for b in s.boundaries})

    per_position: dict[str, list[ResponsibilityNode]] = {}
    for s in sets:
        for n in s.nodes:
            per_position.setdefault(n.position_id, []).append(n)

    derived: list[ResponsibilityBoundary] = []
    for position_id in sorted(per_position):
        nodes = per_position[position_id]
        source_ids = sorted({n.boundary_id for n in nodes if n.boundary_id in lookup})
        sources = [lookup[b] for b in source_ids]
        if not sources:
            continue
        if len(sources) == 1:
            derived.append(sources[0])
            continue

        upper: set[str] = set()
        lower: set[str] = set()
        proposals: dict[str, set[ResponsibilityCategory]] = {}
        cases: set[str] = set()
        for n in nodes:
            b = lookup.get(n.boundary_id)
            if b is None:
                continue
            upper |= b.upper_bound
            if n.mandatory:
                lower |= b.lower_bound
            cases.update(b.relative_cases)
            for cat, rule in b.classify_rules.items():
                proposals.setdefault(cat, set()).add(rule)

        rules = {
            cat: _merge_rule(cat, found, position_id)
            for cat, found in sorted(proposals.items())
        }
        derived.append(
            ResponsibilityBoundary(
                boundary_id=f"derived::{position_id}",
                source_rule="; ".join(b.source_rule for b in sources),
                upper_bound=frozenset(upper),
                lower_bound=frozenset(lower),
                classify_rules=rules,
                relative_cases=tuple(sorted(cases)),
            )
        )
    return derived
