"""Adequacy, capability and effectiveness assessment over an OPP framework.

Adequacy walks the links top-down from the method's objectives. Capability
and effectiveness walk bottom-up from indicator observations, each using its
own indicator categories. All arithmetic is done on exact fractions and only
converted to float when a report is built, so scores are reproducible and
monotone under additions.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional

from .model import (
    CAPABILITY_CATEGORIES,
    EFFECTIVENESS_CATEGORIES,
    IndicatorCategory,
    Layer,
    MethodDefinition,
    ObservationSet,
    OppaError,
    ReferenceFramework,
    require_valid_framework,
    validate_method,
    validate_observations,
)

log = logging.getLogger(__name__)

MISSING_PRINCIPLE = "missing-principle"
UNREALIZED_PRINCIPLE = "unrealized-principle"

# Attainment values use None for "unassessed".
Attainment = Optional[float]


class Direction(str, Enum):
    TOP_DOWN = "top-down"
    BOTTOM_UP = "bottom-up"


class AssessmentKind(str, Enum):
    CAPABILITY = "capability"
    EFFECTIVENESS = "effectiveness"

    @property
    def categories(self) -> frozenset[IndicatorCategory]:
        if self is AssessmentKind.CAPABILITY:
            return CAPABILITY_CATEGORIES
        return EFFECTIVENESS_CATEGORIES


@dataclass(frozen=True)
class CoverageDetail:
    subject: str
    required: frozenset[str]
    adopted: frozenset[str]

    @property
    def ratio(self) -> Fraction:
        return Fraction(len(self.adopted), len(self.required)) if self.required else Fraction(0)

    @property
    def missing(self) -> frozenset[str]:
        return self.required - self.adopted


@dataclass(frozen=True)
class ObjectiveAdequacy:
    principle_coverage: CoverageDetail
    practice_coverage: tuple[CoverageDetail, ...]
    score: float


@dataclass(frozen=True, order=True)
class SuspectFlag:
    code: str
    subject: str
    context: str


@dataclass(frozen=True)
class AdequacyReport:
    method: str
    per_objective: dict[str, ObjectiveAdequacy]
    overall_score: float
    suspect_flags: tuple[SuspectFlag, ...] = ()

    @property
    def suspect(self) -> bool:
        return bool(self.suspect_flags)


@dataclass(frozen=True)
class AttainmentDetail:
    subject: str
    attainment: Attainment
    evidence_coverage: float
    contributing: tuple[tuple[str, Attainment], ...] = ()

    @property
    def assessed(self) -> bool:
        return self.attainment is not None


@dataclass(frozen=True)
class AttainmentReport:
    kind: AssessmentKind
    method: str
    organization: str
    per_practice: dict[str, AttainmentDetail]
    per_principle: dict[str, AttainmentDetail]
    per_objective: dict[str, AttainmentDetail]
    overall: Attainment
    adequacy_context: AdequacyReport

    @property
    def qualified(self) -> bool:
        return self.adequacy_context.suspect


@dataclass(frozen=True)
class ComparisonRow:
    method: str
    overall_score: float
    # None marks an objective the method does not claim.
    per_objective: dict[str, Optional[float]]


@dataclass(frozen=True)
class ComparisonTable:
    framework_name: str
    framework_version: str
    objectives: tuple[str, ...]
    rows: tuple[ComparisonRow, ...]


def _mean(values: Iterable[Fraction]) -> Fraction:
    values = list(values)
    return sum(values, Fraction(0)) / len(values)


def objective_score(principle_ratio: Fraction, practice_ratios: list[Fraction]) -> Fraction:
    """Adequacy of one objective: principle coverage times mean practice coverage.

    Zero when no required principle is adopted. Kept separate so a different
    combination rule can be swapped in.
    """
    if not practice_ratios:
        return Fraction(0)
    return principle_ratio * _mean(practice_ratios)


def _require_method(framework: ReferenceFramework, method: MethodDefinition) -> None:
    report = validate_method(framework, method)
    if not report.valid:
        raise OppaError("method-invalid", f"method {method.id!r} failed validation", report.issues)


def assess_adequacy(framework: ReferenceFramework, method: MethodDefinition) -> AdequacyReport:
    require_valid_framework(framework)
    _require_method(framework, method)

    per_objective: dict[str, ObjectiveAdequacy] = {}
    flags: list[SuspectFlag] = []
    scores: list[Fraction] = []

    for objective_id in sorted(method.objectives):
        required = framework.children(Layer.OBJECTIVE, objective_id)
        principle_cov = CoverageDetail(objective_id, required, required & method.principles)
        practice_covs = []
        for principle_id in sorted(principle_cov.adopted):
            linked = framework.children(Layer.PRINCIPLE, principle_id)
            cov = CoverageDetail(principle_id, linked, linked & method.practices)
            practice_covs.append(cov)
            if not cov.adopted:
                flags.append(SuspectFlag(UNREALIZED_PRINCIPLE, principle_id, objective_id))
        for principle_id in principle_cov.missing:
            flags.append(SuspectFlag(MISSING_PRINCIPLE, principle_id, objective_id))

        score = objective_score(principle_cov.ratio, [c.ratio for c in practice_covs])
        scores.append(score)
        per_objective[objective_id] = ObjectiveAdequacy(
            principle_cov, tuple(practice_covs), float(score))

    return AdequacyReport(
        method=method.id,
        per_objective=per_objective,
        overall_score=float(_mean(scores)),
        suspect_flags=tuple(sorted(flags)),
    )


def _assess_attainment(
    kind: AssessmentKind,
    framework: ReferenceFramework,
    method: MethodDefinition,
    observations: ObservationSet,
    adequacy: AdequacyReport | None,
) -> AttainmentReport:
    if adequacy is None:
        raise OppaError(
            "adequacy-missing",
            f"{kind.value} requires the method's adequacy report; assess adequacy first",
        )
    if adequacy.method != method.id:
        raise OppaError(
            "mismatched-method",
            f"adequacy report is for {adequacy.method!r}, not {method.id!r}")
    if observations.method != method.id:
        raise OppaError(
            "mismatched-method",
            f"observations are recorded for {observations.method!r}, not {method.id!r}")
    require_valid_framework(framework)
    _require_method(framework, method)
    obs_report = validate_observations(framework, observations, method)
    if not obs_report.valid:
        raise OppaError("observations-invalid", "observation set failed validation", obs_report.issues)

    categories = framework.indicator_categories
    levels = {
        indicator_id: level.fraction
        for indicator_id, level in observations.levels().items()
        if categories[indicator_id] in kind.categories
    }
    ignored = len(observations.observations) - len(levels)
    if ignored:
        log.info("%s: ignoring %d observation(s) outside %s categories",
                 observations.organization, ignored, kind.value)

    def in_scope(practice_id: str) -> frozenset[str]:
        return frozenset(
            i for i in framework.children(Layer.PRACTICE, practice_id)
            if categories[i] in kind.categories
        )

    def coverage(indicators: frozenset[str]) -> float:
        if not indicators:
            return 0.0
        return float(Fraction(len(indicators & levels.keys()), len(indicators)))

    def aggregate(children: Iterable[tuple[str, Optional[Fraction]]]) -> Optional[Fraction]:
        assessed = [value for _, value in children if value is not None]
        return _mean(assessed) if assessed else None

    def as_float(value: Optional[Fraction]) -> Attainment:
        return None if value is None else float(value)

    practice_values: dict[str, Optional[Fraction]] = {}
    practice_indicators: dict[str, frozenset[str]] = {}
    per_practice: dict[str, AttainmentDetail] = {}
    for practice_id in sorted(method.practices):
        indicators = in_scope(practice_id)
        children = [(i, levels.get(i)) for i in sorted(indicators)]
        value = aggregate(children)
        practice_values[practice_id] = value
        practice_indicators[practice_id] = indicators
        per_practice[practice_id] = AttainmentDetail(
            practice_id, as_float(value), coverage(indicators),
            tuple((c, as_float(v)) for c, v in children))

    principle_values: dict[str, Optional[Fraction]] = {}
    principle_indicators: dict[str, frozenset[str]] = {}
    per_principle: dict[str, AttainmentDetail] = {}
    for principle_id in sorted(method.principles):
        practices = sorted(framework.children(Layer.PRINCIPLE, principle_id) & method.practices)
        children = [(p, practice_values[p]) for p in practices]
        value = aggregate(children)
        indicators = frozenset().union(*(practice_indicators[p] for p in practices))
        principle_values[principle_id] = value
        principle_indicators[principle_id] = indicators
        per_principle[principle_id] = AttainmentDetail(
            principle_id, as_float(value), coverage(indicators),
            tuple((c, as_float(v)) for c, v in children))

    objective_values: list[Fraction] = []
    per_objective: dict[str, AttainmentDetail] = {}
    for objective_id in sorted(method.objectives):
        principles = sorted(framework.children(Layer.OBJECTIVE, objective_id) & method.principles)
        children = [(p, principle_values[p]) for p in principles]
        value = aggregate(children)
        indicators = frozenset().union(*(principle_indicators[p] for p in principles))
        if value is not None:
            objective_values.append(value)
        per_objective[objective_id] = AttainmentDetail(
            objective_id, as_float(value), coverage(indicators),
            tuple((c, as_float(v)) for c, v in children))

    overall = _mean(objective_values) if objective_values else None
    return AttainmentReport(
        kind=kind,
        method=method.id,
        organization=observations.organization,
        per_practice=per_practice,
        per_principle=per_principle,
        per_objective=per_objective,
        overall=as_float(overall),
        adequacy_context=adequacy,
    )


def assess_capability(
    framework: ReferenceFramework,
    method: MethodDefinition,
    observations: ObservationSet,
    adequacy: AdequacyReport | None,
) -> AttainmentReport:
    """Bottom-up attainment from people, process and project indicators."""
    return _assess_attainment(AssessmentKind.CAPABILITY, framework, method, observations, adequacy)


def assess_effectiveness(
    framework: ReferenceFramework,
    method: MethodDefinition,
    observations: ObservationSet,
    adequacy: AdequacyReport | None,
) -> AttainmentReport:
    """Bottom-up attainment from process-artifact and product indicators."""
    return _assess_attainment(AssessmentKind.EFFECTIVENESS, framework, method, observations, adequacy)


def compare_adequacy(
    framework: ReferenceFramework, methods: list[MethodDefinition]
) -> ComparisonTable:
    if not methods:
        raise OppaError("method-invalid", "at least one method is required")
    seen: set[str] = set()
    for method in methods:
        if method.id in seen:
            raise OppaError("method-invalid", f"method id {method.id!r} given more than once")
        seen.add(method.id)

    reports = []
    for method in sorted(methods, key=lambda m: m.id):
        try:
            reports.append(assess_adequacy(framework, method))
        except OppaError as exc:
            if exc.code != "method-invalid":
                raise
            raise OppaError("method-invalid", f"method {method.id!r} failed validation", exc.issues) from exc

    objectives = tuple(sorted(set().union(*(r.per_objective for r in reports))))
    rows = tuple(
        ComparisonRow(
            method=r.method,
            overall_score=r.overall_score,
            per_objective={
                o: (r.per_objective[o].score if o in r.per_objective else None)
                for o in objectives
            },
        )
        for r in reports
    )
    return ComparisonTable(framework.name, framework.version, objectives, rows)


def reachability(
    framework: ReferenceFramework,
    direction: Direction | str,
    start: str,
    layer: Layer | str | None = None,
) -> set[str]:
    """Ids reachable from ``start`` along the links, excluding ``start``.

    ``layer`` disambiguates an id that is used in more than one layer.
    """
    direction = Direction(direction)
    layers = framework.layers_of(start)
    if layer is not None:
        layer = Layer(layer)
        if layer not in layers:
            raise OppaError("unknown-element", f"no {layer.value} with id {start!r}")
        layers = [layer]
    if not layers:
        raise OppaError("unknown-element", f"no element with id {start!r}")
    if len(layers) > 1:
        raise OppaError(
            "ambiguous-element",
            f"{start!r} names a {' and a '.join(l.value for l in layers)}; pass a layer")

    step = framework.children if direction is Direction.TOP_DOWN else framework.parents
    origin = (layers[0], start)
    seen = {origin}
    queue = deque([origin])
    while queue:
        node_layer, node_id = queue.popleft()
        next_layer = node_layer.below if direction is Direction.TOP_DOWN else node_layer.above
        if next_layer is None:
            continue
        for neighbour in step(node_layer, node_id):
            node = (next_layer, neighbour)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    seen.discard(origin)
    return {node_id for _, node_id in seen}
