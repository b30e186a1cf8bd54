"""Reading and writing OPP documents, plus the shipped catalog and corpus.

Documents are JSON. Emission is canonical: keys sorted, elements sorted by
id, links sorted lexicographically, two-space indent, UTF-8, trailing
newline. Structurally equal inputs therefore emit identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from functools import lru_cache
from importlib import resources
from typing import Any, Callable

from .model import (
    Indicator,
    IndicatorCategory,
    IndicatorObservation,
    Issue,
    MethodDefinition,
    Objective,
    ObservationLevel,
    ObservationSet,
    OppaError,
    Practice,
    Principle,
    ReferenceFramework,
    Severity,
    require_valid_framework,
    validate_framework,
)

FORMAT_VERSION = 1

ANCHORED_IDS = frozenset({
    "flexible",
    "accommodate-change",
    "face-to-face-communication",
    "on-site-customer",
    "no-bruf",
})


class DocumentError(OppaError):
    """A document could not be turned into a model object.

    ``code`` is one of ``syntax-error``, ``schema-error`` or
    ``semantic-error``. Syntax errors carry a 1-based line and column.
    """

    def __init__(self, code: str, message: str, issues=(), line: int | None = None,
                 column: int | None = None):
        super().__init__(code, message, issues)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        where = f" (line {self.line}, column {self.column})" if self.line is not None else ""
        return f"{self.code}: {self.message}{where}"


def _schema(message: str) -> DocumentError:
    return DocumentError("schema-error", message)


def _no_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise _schema(f"duplicate key {key!r}")
        out[key] = value
    return out


def _load(document: bytes | str) -> dict[str, Any]:
    if isinstance(document, bytes):
        try:
            text = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError("syntax-error", f"not valid UTF-8 at byte {exc.start}") from exc
    else:
        text = document
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise DocumentError("syntax-error", exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict):
        raise _schema("top level must be an object")
    return data


def _dump(data: Any) -> bytes:
    return (json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


class _Reader:
    """Field access with schema checking; collects warnings as it goes."""

    def __init__(self, warnings: list[Issue] | None):
        self.warnings = warnings if warnings is not None else []

    def warn(self, code: str, subject: str, message: str) -> None:
        self.warnings.append(Issue(Severity.WARNING, code, message, subject))

    def keys(self, obj: Any, where: str, required: set[str], optional: set[str] = frozenset(),
             top_level: bool = False) -> dict[str, Any]:
        if not isinstance(obj, dict):
            raise _schema(f"{where} must be an object")
        missing = required - obj.keys()
        if missing:
            raise _schema(f"{where} is missing field(s): {', '.join(sorted(missing))}")
        unknown = obj.keys() - required - optional
        if unknown and top_level:
            raise _schema(f"unknown top-level field(s): {', '.join(sorted(unknown))}")
        for key in sorted(unknown):
            self.warn("unknown-key", where, f"ignoring unknown field {key!r}")
        return obj

    @staticmethod
    def string(obj: dict, key: str, where: str) -> str:
        value = obj[key]
        if not isinstance(value, str):
            raise _schema(f"{where}.{key} must be a string")
        return value

    @staticmethod
    def number(obj: dict, key: str, where: str) -> float:
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _schema(f"{where}.{key} must be a number")
        return float(value)

    @staticmethod
    def array(obj: dict, key: str, where: str) -> list:
        value = obj[key]
        if not isinstance(value, list):
            raise _schema(f"{where}.{key} must be a list")
        return value

    def id_set(self, obj: dict, key: str, where: str) -> frozenset[str]:
        items = self.array(obj, key, where)
        for item in items:
            if not isinstance(item, str):
                raise _schema(f"{where}.{key} entries must be strings")
        seen: set[str] = set()
        for item in items:
            if item in seen:
                self.warn("duplicate-entry", item, f"{key} lists {item!r} more than once")
            seen.add(item)
        return frozenset(items)

    def format_version(self, data: dict) -> None:
        version = data["format_version"]
        if isinstance(version, bool) or version != FORMAT_VERSION:
            raise _schema(f"unsupported format_version {version!r}; expected {FORMAT_VERSION}")


# -- catalogs ---------------------------------------------------------------

_ELEMENT_FIELDS = {"id", "name", "description", "source"}
_CATALOG_FIELDS = {
    "format_version", "metadata", "objectives", "principles", "practices",
    "indicators", "op_links", "pp_links", "pi_links",
}


def framework_to_dict(framework: ReferenceFramework) -> dict[str, Any]:
    def element(e) -> dict[str, str]:
        out = {"id": e.id, "name": e.name, "description": e.description, "source": e.source}
        if isinstance(e, Indicator):
            out["category"] = e.category.value
        return out

    return {
        "format_version": FORMAT_VERSION,
        "metadata": {"name": framework.name, "version": framework.version},
        "objectives": [element(e) for e in framework.objectives],
        "principles": [element(e) for e in framework.principles],
        "practices": [element(e) for e in framework.practices],
        "indicators": [element(e) for e in framework.indicators],
        "op_links": [list(p) for p in framework.op_links],
        "pp_links": [list(p) for p in framework.pp_links],
        "pi_links": [list(p) for p in framework.pi_links],
    }


def framework_from_dict(data: dict[str, Any], warnings: list[Issue] | None = None) -> ReferenceFramework:
    """Build a framework from a decoded document without semantic checks."""
    r = _Reader(warnings)
    r.keys(data, "catalog", _CATALOG_FIELDS, top_level=True)
    r.format_version(data)
    metadata = r.keys(data["metadata"], "metadata", {"name", "version"})

    def elements(key: str, cls: Callable, extra: set[str] = frozenset()):
        out = []
        for n, item in enumerate(r.array(data, key, "catalog")):
            where = f"{key}[{n}]"
            r.keys(item, where, _ELEMENT_FIELDS | extra)
            fields = {f: r.string(item, f, where) for f in _ELEMENT_FIELDS | extra}
            if "category" in fields:
                try:
                    fields["category"] = IndicatorCategory(fields["category"])
                except ValueError:
                    raise _schema(f"{where}.category {fields['category']!r} is not one of "
                                  + ", ".join(c.value for c in IndicatorCategory)) from None
            out.append(cls(**fields))
        return tuple(out)

    def links(key: str):
        out = []
        for n, pair in enumerate(r.array(data, key, "catalog")):
            if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
                raise _schema(f"{key}[{n}] must be a pair of id strings")
            out.append((pair[0], pair[1]))
        return tuple(out)

    return ReferenceFramework(
        objectives=elements("objectives", Objective),
        principles=elements("principles", Principle),
        practices=elements("practices", Practice),
        indicators=elements("indicators", Indicator, {"category"}),
        op_links=links("op_links"),
        pp_links=links("pp_links"),
        pi_links=links("pi_links"),
        name=r.string(metadata, "name", "metadata"),
        version=r.string(metadata, "version", "metadata"),
    )


def read_framework(document: bytes | str, warnings: list[Issue] | None = None) -> ReferenceFramework:
    """Syntax and schema checks only; the result may fail validate_framework."""
    return framework_from_dict(_load(document), warnings)


def parse_catalog(document: bytes | str, warnings: list[Issue] | None = None) -> ReferenceFramework:
    """Parse and validate a catalog document.

    Unknown nested keys are appended to ``warnings`` when a list is given.
    """
    framework = read_framework(document, warnings)
    report = validate_framework(framework)
    if not report.valid:
        raise DocumentError(
            "semantic-error", f"catalog has {len(report.errors)} validation error(s)", report.issues)
    if warnings is not None:
        warnings.extend(report.warnings)
    return framework


def emit_catalog(framework: ReferenceFramework) -> bytes:
    require_valid_framework(framework)
    return _dump(framework_to_dict(framework))


# -- methods ----------------------------------------------------------------

_METHOD_FIELDS = {"format_version", "id", "name", "objectives", "principles", "practices", "notes"}


def method_to_dict(method: MethodDefinition) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "id": method.id,
        "name": method.name,
        "objectives": sorted(method.objectives),
        "principles": sorted(method.principles),
        "practices": sorted(method.practices),
        "notes": method.notes,
    }


def parse_method(document: bytes | str, warnings: list[Issue] | None = None) -> MethodDefinition:
    """Parse a method document. Checking it against a framework is a separate step."""
    data = _load(document)
    r = _Reader(warnings)
    r.keys(data, "method", _METHOD_FIELDS, top_level=True)
    r.format_version(data)
    return MethodDefinition(
        id=r.string(data, "id", "method"),
        name=r.string(data, "name", "method"),
        objectives=r.id_set(data, "objectives", "method"),
        principles=r.id_set(data, "principles", "method"),
        practices=r.id_set(data, "practices", "method"),
        notes=r.string(data, "notes", "method"),
    )


def emit_method(method: MethodDefinition) -> bytes:
    return _dump(method_to_dict(method))


# -- observations -----------------------------------------------------------

_OBSERVATIONS_FIELDS = {"format_version", "organization", "method", "observations"}
_OBSERVATION_FIELDS = {"indicator", "level", "evidence", "observed_on"}


def parse_observations(document: bytes | str, warnings: list[Issue] | None = None) -> ObservationSet:
    data = _load(document)
    r = _Reader(warnings)
    r.keys(data, "observations", _OBSERVATIONS_FIELDS, top_level=True)
    r.format_version(data)
    items = []
    for n, item in enumerate(r.array(data, "observations", "observations")):
        where = f"observations[{n}]"
        r.keys(item, where, _OBSERVATION_FIELDS)
        level = r.string(item, "level", where)
        try:
            level = ObservationLevel(level)
        except ValueError:
            raise _schema(f"{where}.level {level!r} is not one of "
                          + ", ".join(l.value for l in ObservationLevel)) from None
        observed_on = r.string(item, "observed_on", where)
        try:
            observed_on = date.fromisoformat(observed_on)
        except ValueError:
            raise _schema(f"{where}.observed_on {observed_on!r} is not an ISO-8601 date") from None
        items.append(IndicatorObservation(
            indicator=r.string(item, "indicator", where),
            level=level,
            evidence=r.string(item, "evidence", where),
            observed_on=observed_on,
        ))
    return ObservationSet(
        organization=r.string(data, "organization", "observations"),
        method=r.string(data, "method", "observations"),
        observations=tuple(items),
    )


def emit_observations(observations: ObservationSet) -> bytes:
    return _dump({
        "format_version": FORMAT_VERSION,
        "organization": observations.organization,
        "method": observations.method,
        "observations": [
            {
                "indicator": o.indicator,
                "level": o.level.value,
                "evidence": o.evidence,
                "observed_on": o.observed_on.isoformat(),
            }
            for o in observations.observations
        ],
    })


# -- shipped data -----------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    method: MethodDefinition
    provenance: str


def _data(*parts: str) -> bytes:
    return resources.files("oppa").joinpath("data", *parts).read_bytes()


@lru_cache(maxsize=None)
def builtin_reference() -> ReferenceFramework:
    """The shipped reference catalog."""
    return parse_catalog(_data("reference.json"))


def anchored_fragment() -> ReferenceFramework:
    """The flexible -> accommodate-change -> three practices chain on its own."""
    return builtin_reference().restrict(ANCHORED_IDS)


@lru_cache(maxsize=None)
def _corpus() -> tuple[CorpusEntry, ...]:
    index = json.loads(_data("corpus.json"))
    return tuple(
        CorpusEntry(parse_method(_data("methods", item["file"])), item["provenance"])
        for item in index["entries"]
    )


def corpus() -> list[CorpusEntry]:
    """XP, Scrum and FDD mapped onto the builtin catalog."""
    return list(_corpus())


def corpus_method(method_id: str) -> MethodDefinition:
    for entry in _corpus():
        if entry.method.id == method_id:
            return entry.method
    known = ", ".join(e.method.id for e in _corpus())
    raise KeyError(f"no corpus method {method_id!r} (known: {known})")
