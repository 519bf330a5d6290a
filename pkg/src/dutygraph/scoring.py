"""Fulfillment evaluation: gating, self-evaluation bonus, supervisory
deductions, per-list recommended scores, and period score composition."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Iterable, Mapping, Optional

from .canon import score2
from .model import (
    CollectionMethod,
    EvaluationMethod,
    ResponsibilityList,
    ResponsibilityNode,
    RiskSource,
)

# The deduction threshold is fixed: supervision scored strictly below half
# its maximum zeroes the supervised completion (scaled by the policy fraction).
SUPERVISORY_THRESHOLD = 0.5


class ScoreGate(str, Enum):
    DIRECT = "DIRECT"
    RISK_HOLD = "RISK_HOLD"


class MissingCompletion(KeyError):
    pass


@dataclass(frozen=True)
class FulfillmentRecord:
    """Submitted evidence that a duty was carried out in a window."""

    record_id: str
    node_id: str
    period_start: datetime
    period_end: datetime
    source: CollectionMethod
    submitted_at: datetime
    completion: float
    evidence: tuple[str, ...] = ()
    extension_note: Optional[str] = None
    self_eval: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0 <= self.completion <= 100:
            raise ValueError(f"record {self.record_id}: completion must be in [0, 100]")
        if self.self_eval is not None:
            if not 0 <= self.self_eval <= 100:
                raise ValueError(f"record {self.record_id}: self-eval must be in [0, 100]")
            if not self.extension_note:
                raise ValueError(
                    f"record {self.record_id}: self-eval requires an extension note"
                )
        if self.period_start >= self.period_end:
            raise ValueError(f"record {self.record_id}: window must not be empty")


@dataclass(frozen=True)
class SupervisionRecord:
    record_id: str
    supervision_node_id: str
    supervised_node_id: str
    period_start: datetime
    period_end: datetime
    supervisory_score: float
    supervisory_max: float
    submitted_at: datetime

    def __post_init__(self) -> None:
        if self.supervisory_max <= 0:
            raise ValueError(f"record {self.record_id}: supervisory max must be positive")
        if not 0 <= self.supervisory_score <= self.supervisory_max:
            raise ValueError(
                f"record {self.record_id}: supervisory score must be in [0, max]"
            )


@dataclass(frozen=True)
class ScoringPolicy:
    """Composition coefficients. Completion dominates by default."""

    alpha: float = 0.8  # task completion vs attendance inside the completion block
    beta: float = 0.7  # completion block vs performance assessment
    self_eval_cap: float = 10.0
    deduction_fraction: float = 1.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "deduction_fraction"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.self_eval_cap < 0:
            raise ValueError("self_eval_cap must be nonnegative")


@dataclass(frozen=True)
class ScoreBreakdown:
    position_id: str
    period: str
    list_completion: float
    attendance: float
    performance_assessment: float
    self_eval_bonus: float
    supervisory_deductions: tuple[tuple[str, float], ...]
    total: float

    def to_doc(self) -> dict:
        return {
            "position_id": self.position_id,
            "period": self.period,
            "list_completion": score2(self.list_completion),
            "attendance": score2(self.attendance),
            "performance_assessment": score2(self.performance_assessment),
            "self_eval_bonus": score2(self.self_eval_bonus),
            "supervisory_deductions": [
                {"node_id": n, "amount": score2(a)} for n, a in self.supervisory_deductions
            ],
            "total": score2(self.total),
        }


@dataclass(frozen=True)
class PeriodInputs:
    """Everything score composition needs for one position-period.

    ``completions`` maps each in-scope item to its aggregated completion in
    [0, 100]; items absent from the mapping had no expected window and stay
    out of the weighted mean. When ``completions`` is None it is derived
    from ``records`` directly (one implicit window per item).
    """

    lists: tuple[ResponsibilityList, ...]
    nodes: Mapping[str, ResponsibilityNode]
    records: tuple[FulfillmentRecord, ...] = ()
    supervision: tuple[SupervisionRecord, ...] = ()
    attendance_attended: int = 0
    attendance_required: int = 0
    attendance_node_ids: frozenset[str] = frozenset()
    completions: Optional[Mapping[str, float]] = None


def check_mandatory(
    node: ResponsibilityNode,
    record: FulfillmentRecord,
    open_risks: Iterable[str],
    risks: Mapping[str, RiskSource] | None = None,
) -> ScoreGate:
    """Gate a submission: mandatory work tied to a currently-alarming risk
    category is held until the risk clears; everything else scores directly."""
    if record.node_id != node.node_id:
        raise ValueError("record does not belong to this node")
    if not node.mandatory:
        return ScoreGate.DIRECT
    category = None
    if node.risk_id and risks:
        risk = risks.get(node.risk_id)
        category = risk.category if risk else None
    if category is not None and category in set(open_risks):
        return ScoreGate.RISK_HOLD
    return ScoreGate.DIRECT


def apply_self_eval(record: FulfillmentRecord, policy: ScoringPolicy) -> float:
    """Bonus for self-evaluated extension work, capped by policy."""
    if record.self_eval is None or not record.extension_note:
        return 0.0
    return min(record.self_eval * policy.self_eval_cap / 100.0, policy.self_eval_cap)


def apply_supervisory_rule(
    records: Iterable[SupervisionRecord],
    completions: Mapping[str, float],
    policy: ScoringPolicy,
) -> list[tuple[str, float]]:
    """Deduct the supervised task's completion when its supervision scored
    strictly below half of max. Exactly 50% is not deducted."""
    deductions: list[tuple[str, float]] = []
    for rec in sorted(records, key=lambda r: (r.supervised_node_id, r.record_id)):
        if rec.supervisory_score < SUPERVISORY_THRESHOLD * rec.supervisory_max:
            if rec.supervised_node_id not in completions:
                raise MissingCompletion(rec.supervised_node_id)
            amount = policy.deduction_fraction * completions[rec.supervised_node_id]
            deductions.append((rec.supervised_node_id, amount))
    return deductions


def _derive_completions(
    lists: Iterable[ResponsibilityList], records: Iterable[FulfillmentRecord]
) -> dict[str, float]:
    # One implicit window per item: the mean of its submitted completions,
    # or 0 when nothing was submitted.
    by_node: dict[str, list[float]] = {}
    for r in records:
        by_node.setdefault(r.node_id, []).append(r.completion)
    completions: dict[str, float] = {}
    for lst in lists:
        for item in lst.items:
            values = by_node.get(item)
            completions[item] = sum(values) / len(values) if values else 0.0
    return completions


def weighted_list_score(
    lst: ResponsibilityList,
    nodes: Mapping[str, ResponsibilityNode],
    completions: Mapping[str, float],
    deductions: Iterable[tuple[str, float]] = (),
    skip_items: frozenset[str] = frozenset(),
) -> Optional[float]:
    """Weight-normalized completion of one list minus its deductions,
    clamped to [0, 100]. None when no item is in scope."""
    total_w = 0.0
    acc = 0.0
    in_scope: set[str] = set()
    for item in lst.items:
        if item in skip_items or item not in completions:
            continue
        node = nodes.get(item)
        if node is None:
            continue
        in_scope.add(item)
        total_w += node.weight
        acc += node.weight * completions[item]
    if total_w == 0.0:
        return None
    score = acc / total_w
    score -= sum(amount for node_id, amount in deductions if node_id in in_scope)
    return max(0.0, min(100.0, score))


def recommend_scores(
    lists: Iterable[ResponsibilityList],
    nodes: Mapping[str, ResponsibilityNode],
    records: Iterable[FulfillmentRecord],
    supervision: Iterable[SupervisionRecord],
    policy: ScoringPolicy,
    completions: Optional[Mapping[str, float]] = None,
    attendance_node_ids: frozenset[str] = frozenset(),
) -> dict[str, float]:
    """Recommended score per list id. Lists with no item in scope score 0."""
    lists = tuple(lists)
    if completions is None:
        completions = _derive_completions(lists, records)
    deductions = apply_supervisory_rule(
        [s for s in supervision if s.supervised_node_id in completions], completions, policy
    )
    out: dict[str, float] = {}
    for lst in lists:
        score = weighted_list_score(lst, nodes, completions, deductions, attendance_node_ids)
        out[lst.list_id] = score if score is not None else 0.0
    return out


def compose_score(
    position_id: str,
    period: str,
    inputs: PeriodInputs,
    policy: ScoringPolicy,
) -> ScoreBreakdown:
    """Compose one position-period score from its components.

    total = clamp(beta * (alpha * completion + (1 - alpha) * attendance)
                  + (1 - beta) * assessment + bonus - deductions, 0, 100)
    """
    completions = (
        dict(inputs.completions)
        if inputs.completions is not None
        else _derive_completions(inputs.lists, inputs.records)
    )

    list_scores: list[float] = []
    for lst in inputs.lists:
        score = weighted_list_score(
            lst, inputs.nodes, completions, (), inputs.attendance_node_ids
        )
        if score is not None:
            list_scores.append(score)
    list_completion = sum(list_scores) / len(list_scores) if list_scores else 0.0

    attendance = (
        100.0 * inputs.attendance_attended / inputs.attendance_required
        if inputs.attendance_required > 0
        else 0.0
    )

    assessor_inputs = [
        r.completion
        for r in inputs.records
        if (n := inputs.nodes.get(r.node_id)) is not None
        and n.evaluation in (EvaluationMethod.EVALUATION, EvaluationMethod.VOTING)
    ]
    assessment = sum(assessor_inputs) / len(assessor_inputs) if assessor_inputs else 0.0

    bonus = min(
        sum(apply_self_eval(r, policy) for r in inputs.records), policy.self_eval_cap
    )

    deductions = apply_supervisory_rule(
        [s for s in inputs.supervision if s.supervised_node_id in completions],
        completions,
        policy,
    )

    composed = (
        policy.beta * (policy.alpha * list_completion + (1 - policy.alpha) * attendance)
        + (1 - policy.beta) * assessment
        + bonus
        - sum(a for _, a in deductions)
    )
    return ScoreBreakdown(
        position_id=position_id,
        period=period,
        list_completion=list_completion,
        attendance=attendance,
        performance_assessment=assessment,
        self_eval_bonus=bonus,
        supervisory_deductions=tuple(deductions),
        total=max(0.0, min(100.0, composed)),
    )
