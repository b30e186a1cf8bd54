"""OPP domain types and structural validation.

The framework is a four-layer graph: objectives -> principles -> practices
-> indicators. Links only ever join adjacent layers, so each link set is a
bipartite relation between two element kinds.
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Union

ID_PATTERN = re.compile(r"[a-z0-9-]+")
MAX_ID_LENGTH = 64

Link = tuple[str, str]
Subject = Union[str, Link]


class OppaError(Exception):
    """Raised when an operation's precondition fails.

    ``code`` is a stable token (``framework-invalid``, ``method-invalid``,
    ``adequacy-missing`` ...). ``issues`` carries the validation issues
    behind the failure, if any.
    """

    def __init__(self, code: str, message: str, issues: Iterable[Issue] = ()):
        super().__init__(message)
        self.code = code
        self.message = message
        self.issues = tuple(issues)

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def is_valid_id(value: object) -> bool:
    return (
        isinstance(value, str)
        and 0 < len(value) <= MAX_ID_LENGTH
        and ID_PATTERN.fullmatch(value) is not None
    )


class Layer(str, Enum):
    OBJECTIVE = "objective"
    PRINCIPLE = "principle"
    PRACTICE = "practice"
    INDICATOR = "indicator"

    @property
    def below(self) -> Layer | None:
        order = list(Layer)
        i = order.index(self)
        return order[i + 1] if i + 1 < len(order) else None

    @property
    def above(self) -> Layer | None:
        order = list(Layer)
        i = order.index(self)
        return order[i - 1] if i > 0 else None


class IndicatorCategory(str, Enum):
    PEOPLE = "people"
    PROCESS = "process"
    PROJECT = "project"
    PROCESS_ARTIFACT = "process-artifact"
    PRODUCT = "product"


CAPABILITY_CATEGORIES = frozenset(
    {IndicatorCategory.PEOPLE, IndicatorCategory.PROCESS, IndicatorCategory.PROJECT}
)
EFFECTIVENESS_CATEGORIES = frozenset(
    {IndicatorCategory.PROCESS_ARTIFACT, IndicatorCategory.PRODUCT}
)


class ObservationLevel(str, Enum):
    ABSENT = "absent"
    INITIAL = "initial"
    PARTIAL = "partial"
    SUBSTANTIAL = "substantial"
    FULL = "full"

    @property
    def fraction(self) -> Fraction:
        return _LEVEL_FRACTIONS[self]

    @property
    def numeric(self) -> float:
        return float(self.fraction)


_LEVEL_FRACTIONS = {
    level: Fraction(i, 4) for i, level in enumerate(ObservationLevel)
}


@dataclass(frozen=True)
class Objective:
    id: str
    name: str
    description: str = ""
    source: str = ""


@dataclass(frozen=True)
class Principle:
    id: str
    name: str
    description: str = ""
    source: str = ""


@dataclass(frozen=True)
class Practice:
    id: str
    name: str
    description: str = ""
    source: str = ""


@dataclass(frozen=True)
class Indicator:
    id: str
    name: str
    category: IndicatorCategory
    description: str = ""
    source: str = ""


Element = Union[Objective, Principle, Practice, Indicator]


def _element_key(element: Element) -> tuple[str, ...]:
    category = getattr(element, "category", "")
    return (
        element.id,
        element.name,
        str(getattr(category, "value", category)),
        element.description,
        element.source,
    )


@dataclass(frozen=True)
class ReferenceFramework:
    """Elements of the four layers plus the three adjacent-layer link sets.

    Element and link tuples are kept in canonical order, so two frameworks
    with the same content compare equal regardless of how they were built.
    Duplicates are retained on purpose: :func:`validate_framework` reports
    them instead of silently dropping them.
    """

    objectives: tuple[Objective, ...] = ()
    principles: tuple[Principle, ...] = ()
    practices: tuple[Practice, ...] = ()
    indicators: tuple[Indicator, ...] = ()
    op_links: tuple[Link, ...] = ()
    pp_links: tuple[Link, ...] = ()
    pi_links: tuple[Link, ...] = ()
    name: str = ""
    version: str = ""

    def __post_init__(self) -> None:
        for attr in ("objectives", "principles", "practices", "indicators"):
            object.__setattr__(
                self, attr, tuple(sorted(getattr(self, attr), key=_element_key))
            )
        for attr in ("op_links", "pp_links", "pi_links"):
            links = tuple(tuple(pair) for pair in getattr(self, attr))
            object.__setattr__(self, attr, tuple(sorted(links)))

    def elements(self, layer: Layer) -> tuple[Element, ...]:
        return {
            Layer.OBJECTIVE: self.objectives,
            Layer.PRINCIPLE: self.principles,
            Layer.PRACTICE: self.practices,
            Layer.INDICATOR: self.indicators,
        }[layer]

    def links_below(self, layer: Layer) -> tuple[Link, ...]:
        """Link set whose left endpoint lives in ``layer``."""
        return {
            Layer.OBJECTIVE: self.op_links,
            Layer.PRINCIPLE: self.pp_links,
            Layer.PRACTICE: self.pi_links,
            Layer.INDICATOR: (),
        }[layer]

    def ids(self, layer: Layer) -> frozenset[str]:
        return frozenset(e.id for e in self.elements(layer))

    @cached_property
    def _children(self) -> dict[tuple[Layer, str], frozenset[str]]:
        out: dict[tuple[Layer, str], set[str]] = defaultdict(set)
        for layer in (Layer.OBJECTIVE, Layer.PRINCIPLE, Layer.PRACTICE):
            for parent, child in self.links_below(layer):
                out[(layer, parent)].add(child)
        return {k: frozenset(v) for k, v in out.items()}

    @cached_property
    def _parents(self) -> dict[tuple[Layer, str], frozenset[str]]:
        out: dict[tuple[Layer, str], set[str]] = defaultdict(set)
        for layer in (Layer.OBJECTIVE, Layer.PRINCIPLE, Layer.PRACTICE):
            for parent, child in self.links_below(layer):
                out[(layer.below, child)].add(parent)
        return {k: frozenset(v) for k, v in out.items()}

    def children(self, layer: Layer, element_id: str) -> frozenset[str]:
        return self._children.get((layer, element_id), frozenset())

    def parents(self, layer: Layer, element_id: str) -> frozenset[str]:
        return self._parents.get((layer, element_id), frozenset())

    @cached_property
    def indicator_categories(self) -> dict[str, IndicatorCategory]:
        return {i.id: i.category for i in self.indicators}

    def layers_of(self, element_id: str) -> list[Layer]:
        return [layer for layer in Layer if element_id in self.ids(layer)]

    def restrict(self, keep: Iterable[str]) -> ReferenceFramework:
        """Sub-framework over the given ids, keeping links among them."""
        keep = set(keep)

        def links(pairs: tuple[Link, ...]) -> tuple[Link, ...]:
            return tuple(p for p in pairs if p[0] in keep and p[1] in keep)

        return ReferenceFramework(
            objectives=tuple(e for e in self.objectives if e.id in keep),
            principles=tuple(e for e in self.principles if e.id in keep),
            practices=tuple(e for e in self.practices if e.id in keep),
            indicators=tuple(e for e in self.indicators if e.id in keep),
            op_links=links(self.op_links),
            pp_links=links(self.pp_links),
            pi_links=links(self.pi_links),
            name=self.name,
            version=self.version,
        )


@dataclass(frozen=True)
class MethodDefinition:
    id: str
    name: str
    objectives: frozenset[str] = frozenset()
    principles: frozenset[str] = frozenset()
    practices: frozenset[str] = frozenset()
    notes: str = ""

    def __post_init__(self) -> None:
        for attr in ("objectives", "principles", "practices"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))

    def adopted(self, layer: Layer) -> frozenset[str]:
        return {
            Layer.OBJECTIVE: self.objectives,
            Layer.PRINCIPLE: self.principles,
            Layer.PRACTICE: self.practices,
        }.get(layer, frozenset())

    @classmethod
    def full_adoption(cls, framework: ReferenceFramework, method_id: str = "all") -> MethodDefinition:
        """A method adopting every objective, principle and practice."""
        return cls(
            id=method_id,
            name=method_id,
            objectives=framework.ids(Layer.OBJECTIVE),
            principles=framework.ids(Layer.PRINCIPLE),
            practices=framework.ids(Layer.PRACTICE),
        )


@dataclass(frozen=True)
class IndicatorObservation:
    indicator: str
    level: ObservationLevel
    evidence: str = ""
    observed_on: date = field(default_factory=date.today)


def _observation_key(o: IndicatorObservation) -> tuple:
    return (o.indicator, o.observed_on.isoformat(), o.level.fraction, o.evidence)


@dataclass(frozen=True)
class ObservationSet:
    organization: str
    method: str
    observations: tuple[IndicatorObservation, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "observations", tuple(sorted(self.observations, key=_observation_key))
        )

    def levels(self) -> dict[str, ObservationLevel]:
        return {o.indicator: o.level for o in self.observations}


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Issue:
    severity: Severity
    code: str
    message: str
    subject: Subject = ""

    def sort_key(self) -> tuple:
        subject = self.subject if isinstance(self.subject, tuple) else (self.subject,)
        return (self.code, subject, self.severity.value, self.message)

    def __str__(self) -> str:
        subject = " -> ".join(self.subject) if isinstance(self.subject, tuple) else self.subject
        return f"{self.severity.value}: [{self.code}] {subject}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "issues", tuple(sorted(self.issues, key=Issue.sort_key)))

    @property
    def valid(self) -> bool:
        return not self.errors

    @property
    def errors(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity is Severity.ERROR)

    @property
    def warnings(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity is Severity.WARNING)

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]


def _error(code: str, subject: Subject, message: str) -> Issue:
    return Issue(Severity.ERROR, code, message, subject)


def _warning(code: str, subject: Subject, message: str) -> Issue:
    return Issue(Severity.WARNING, code, message, subject)


_LINK_SETS = (
    ("op_links", Layer.OBJECTIVE, Layer.PRINCIPLE),
    ("pp_links", Layer.PRINCIPLE, Layer.PRACTICE),
    ("pi_links", Layer.PRACTICE, Layer.INDICATOR),
)


def validate_framework(framework: ReferenceFramework) -> ValidationReport:
    """Check every structural invariant and report violations as issues.

    Never raises for malformed content; an issue is produced instead.
    """
    issues: list[Issue] = []
    ids = {layer: framework.ids(layer) for layer in Layer}

    for layer in Layer:
        counts = Counter(e.id for e in framework.elements(layer))
        for element_id, n in counts.items():
            if n > 1:
                issues.append(_error(
                    "duplicate-id", element_id, f"{layer.value} id appears {n} times"))
        for element in framework.elements(layer):
            if not is_valid_id(element.id):
                issues.append(_error(
                    "invalid-id", str(element.id),
                    f"{layer.value} id must match [a-z0-9-]+ and be at most {MAX_ID_LENGTH} chars"))
            if not isinstance(element.name, str) or not element.name.strip():
                issues.append(_error("empty-name", str(element.id), f"{layer.value} has no name"))
        if layer is Layer.INDICATOR:
            for indicator in framework.indicators:
                if not isinstance(indicator.category, IndicatorCategory):
                    issues.append(_error(
                        "invalid-category", str(indicator.id),
                        f"unknown indicator category {indicator.category!r}"))

    # Only links with both endpoints resolved count towards connectivity.
    outgoing: dict[Layer, set[str]] = defaultdict(set)
    incoming: dict[Layer, set[str]] = defaultdict(set)
    for attr, upper, lower in _LINK_SETS:
        links = getattr(framework, attr)
        for pair, n in Counter(links).items():
            if n > 1:
                issues.append(_error("duplicate-link", pair, f"listed {n} times in {attr}"))
        for pair in set(links):
            left, right = pair
            problems = []
            if left not in ids[upper]:
                problems.append(_describe_unresolved(framework, left, upper))
            if right not in ids[lower]:
                problems.append(_describe_unresolved(framework, right, lower))
            if problems:
                issues.append(_error("dangling-link", pair, f"{attr}: " + "; ".join(problems)))
                continue
            outgoing[upper].add(left)
            incoming[lower].add(right)

    for objective_id in sorted(ids[Layer.OBJECTIVE] - outgoing[Layer.OBJECTIVE]):
        issues.append(_error("orphan-objective", objective_id, "objective links to no principle"))
    for principle_id in sorted(ids[Layer.PRINCIPLE]):
        missing = []
        if principle_id not in incoming[Layer.PRINCIPLE]:
            missing.append("no objective links to it")
        if principle_id not in outgoing[Layer.PRINCIPLE]:
            missing.append("it links to no practice")
        if missing:
            issues.append(_error("orphan-principle", principle_id, " and ".join(missing)))
    for practice_id in sorted(ids[Layer.PRACTICE] - incoming[Layer.PRACTICE]):
        issues.append(_error("orphan-practice", practice_id, "no principle links to it"))
    for indicator_id in sorted(ids[Layer.INDICATOR] - incoming[Layer.INDICATOR]):
        issues.append(_error("orphan-indicator", indicator_id, "no practice links to it"))

    return ValidationReport(tuple(issues))


def _describe_unresolved(framework: ReferenceFramework, element_id: str, expected: Layer) -> str:
    elsewhere = [layer.value for layer in framework.layers_of(element_id)]
    if elsewhere:
        return f"{element_id!r} is a {'/'.join(elsewhere)}, not a {expected.value}"
    return f"unknown {expected.value} {element_id!r}"


def require_valid_framework(framework: ReferenceFramework) -> None:
    report = validate_framework(framework)
    if not report.valid:
        raise OppaError(
            "framework-invalid",
            f"framework has {len(report.errors)} validation error(s)",
            report.issues,
        )


def validate_method(framework: ReferenceFramework, method: MethodDefinition) -> ValidationReport:
    require_valid_framework(framework)
    issues: list[Issue] = []

    if not is_valid_id(method.id):
        issues.append(_error("invalid-id", str(method.id), "method id must match [a-z0-9-]+"))
    if not method.objectives:
        issues.append(_error("empty-objectives", method.id, "method adopts no objectives"))

    for layer in (Layer.OBJECTIVE, Layer.PRINCIPLE, Layer.PRACTICE):
        known = framework.ids(layer)
        for element_id in sorted(method.adopted(layer) - known):
            issues.append(_error(
                f"unknown-{layer.value}", element_id,
                f"{layer.value} is not defined in the framework"))

    known_principles = method.principles & framework.ids(Layer.PRINCIPLE)
    for principle_id in sorted(known_principles):
        if not framework.parents(Layer.PRINCIPLE, principle_id) & method.objectives:
            issues.append(_warning(
                "unsupported-principle", principle_id,
                "none of the objectives this principle supports is adopted"))
    for practice_id in sorted(method.practices & framework.ids(Layer.PRACTICE)):
        if not framework.parents(Layer.PRACTICE, practice_id) & method.principles:
            issues.append(_warning(
                "unsupported-practice", practice_id,
                "none of the principles this practice reflects is adopted"))

    return ValidationReport(tuple(issues))


def validate_observations(
    framework: ReferenceFramework,
    observations: ObservationSet,
    method: MethodDefinition | None = None,
) -> ValidationReport:
    """Check indicator ids and duplicates; cross-check against ``method`` if given."""
    require_valid_framework(framework)
    issues: list[Issue] = []
    known = framework.ids(Layer.INDICATOR)

    counts = Counter(o.indicator for o in observations.observations)
    for indicator_id, n in sorted(counts.items()):
        if indicator_id not in known:
            issues.append(_error("unknown-indicator", indicator_id, "indicator is not defined in the framework"))
        if n > 1:
            issues.append(_error("duplicate-observation", indicator_id, f"observed {n} times"))

    if method is not None:
        if observations.method != method.id:
            issues.append(_error(
                "mismatched-method", observations.method,
                f"observations are recorded for {observations.method!r}, not {method.id!r}"))
        for indicator_id in sorted(set(counts) & known):
            if not framework.parents(Layer.INDICATOR, indicator_id) & method.practices:
                issues.append(_warning(
                    "unlinked-observation", indicator_id,
                    "indicator links to no practice adopted by the method"))

    return ValidationReport(tuple(issues))
