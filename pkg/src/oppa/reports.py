"""Machine-readable form of assessment reports.

Same conventions as the catalog documents. ``unassessed`` and
``not-claimed`` are written as those literal strings.
"""

from __future__ import annotations

from typing import Any, Optional, Union

from .assessment import (
    AdequacyReport,
    AssessmentKind,
    AttainmentDetail,
    AttainmentReport,
    ComparisonRow,
    ComparisonTable,
    CoverageDetail,
    ObjectiveAdequacy,
    SuspectFlag,
)
from .catalog import FORMAT_VERSION, DocumentError, _dump, _load

UNASSESSED = "unassessed"
NOT_CLAIMED = "not-claimed"

Report = Union[AdequacyReport, AttainmentReport, ComparisonTable]


def _coverage(c: CoverageDetail) -> dict[str, Any]:
    return {
        "subject": c.subject,
        "required": sorted(c.required),
        "adopted": sorted(c.adopted),
        "missing": sorted(c.missing),
        "ratio": float(c.ratio),
    }


def _adequacy(report: AdequacyReport) -> dict[str, Any]:
    return {
        "method": report.method,
        "overall_score": report.overall_score,
        "per_objective": {
            o: {
                "principle_coverage": _coverage(a.principle_coverage),
                "practice_coverage": [_coverage(c) for c in a.practice_coverage],
                "score": a.score,
            }
            for o, a in report.per_objective.items()
        },
        "suspect_flags": [
            {"code": f.code, "subject": f.subject, "context": f.context}
            for f in report.suspect_flags
        ],
    }


def _attainment_value(value: Optional[float]) -> Union[float, str]:
    return UNASSESSED if value is None else value


def _detail(d: AttainmentDetail) -> dict[str, Any]:
    return {
        "subject": d.subject,
        "attainment": _attainment_value(d.attainment),
        "evidence_coverage": d.evidence_coverage,
        "contributing": [[c, _attainment_value(v)] for c, v in d.contributing],
    }


def report_to_dict(report: Report) -> dict[str, Any]:
    if isinstance(report, AdequacyReport):
        body = {"report": "adequacy", **_adequacy(report)}
    elif isinstance(report, AttainmentReport):
        body = {
            "report": report.kind.value,
            "method": report.method,
            "organization": report.organization,
            "overall": _attainment_value(report.overall),
            "qualified": report.qualified,
            "per_practice": {k: _detail(v) for k, v in report.per_practice.items()},
            "per_principle": {k: _detail(v) for k, v in report.per_principle.items()},
            "per_objective": {k: _detail(v) for k, v in report.per_objective.items()},
            "adequacy_context": _adequacy(report.adequacy_context),
        }
    elif isinstance(report, ComparisonTable):
        body = {
            "report": "comparison",
            "framework": {"name": report.framework_name, "version": report.framework_version},
            "objectives": list(report.objectives),
            "rows": [
                {
                    "method": row.method,
                    "overall_score": row.overall_score,
                    "per_objective": {
                        o: (NOT_CLAIMED if s is None else s) for o, s in row.per_objective.items()
                    },
                }
                for row in report.rows
            ],
        }
    else:
        raise TypeError(f"not a report: {type(report).__name__}")
    return {"format_version": FORMAT_VERSION, **body}


def emit_report(report: Report) -> bytes:
    return _dump(report_to_dict(report))


def _score(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError("schema-error", f"{where} must be a number")
    return float(value)


def _maybe(value: Any, marker: str, where: str) -> Optional[float]:
    return None if value == marker else _score(value, where)


def _coverage_from(d: dict[str, Any]) -> CoverageDetail:
    return CoverageDetail(d["subject"], frozenset(d["required"]), frozenset(d["adopted"]))


def _adequacy_from(d: dict[str, Any]) -> AdequacyReport:
    return AdequacyReport(
        method=d["method"],
        overall_score=_score(d["overall_score"], "overall_score"),
        per_objective={
            o: ObjectiveAdequacy(
                _coverage_from(a["principle_coverage"]),
                tuple(_coverage_from(c) for c in a["practice_coverage"]),
                _score(a["score"], f"per_objective.{o}.score"),
            )
            for o, a in d["per_objective"].items()
        },
        suspect_flags=tuple(
            SuspectFlag(f["code"], f["subject"], f["context"]) for f in d["suspect_flags"]
        ),
    )


def _detail_from(d: dict[str, Any]) -> AttainmentDetail:
    return AttainmentDetail(
        subject=d["subject"],
        attainment=_maybe(d["attainment"], UNASSESSED, "attainment"),
        evidence_coverage=_score(d["evidence_coverage"], "evidence_coverage"),
        contributing=tuple((c, _maybe(v, UNASSESSED, "contributing")) for c, v in d["contributing"]),
    )


def report_from_dict(data: dict[str, Any]) -> Report:
    if data.get("format_version") != FORMAT_VERSION:
        raise DocumentError("schema-error", f"unsupported format_version {data.get('format_version')!r}")
    kind = data.get("report")
    try:
        if kind == "adequacy":
            return _adequacy_from(data)
        if kind in (AssessmentKind.CAPABILITY.value, AssessmentKind.EFFECTIVENESS.value):
            return AttainmentReport(
                kind=AssessmentKind(kind),
                method=data["method"],
                organization=data["organization"],
                per_practice={k: _detail_from(v) for k, v in data["per_practice"].items()},
                per_principle={k: _detail_from(v) for k, v in data["per_principle"].items()},
                per_objective={k: _detail_from(v) for k, v in data["per_objective"].items()},
                overall=_maybe(data["overall"], UNASSESSED, "overall"),
                adequacy_context=_adequacy_from(data["adequacy_context"]),
            )
        if kind == "comparison":
            return ComparisonTable(
                framework_name=data["framework"]["name"],
                framework_version=data["framework"]["version"],
                objectives=tuple(data["objectives"]),
                rows=tuple(
                    ComparisonRow(
                        method=row["method"],
                        overall_score=_score(row["overall_score"], "overall_score"),
                        per_objective={
                            o: _maybe(s, NOT_CLAIMED, f"{row['method']}.{o}")
                            for o, s in row["per_objective"].items()
                        },
                    )
                    for row in data["rows"]
                ),
            )
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise DocumentError("schema-error", f"malformed {kind} report: {exc!r}") from exc
    raise DocumentError("schema-error", f"unknown report kind {kind!r}")


def parse_report(document: bytes | str) -> Report:
    return report_from_dict(_load(document))


def parse_adequacy_report(document: bytes | str) -> AdequacyReport:
    report = parse_report(document)
    if not isinstance(report, AdequacyReport):
        raise DocumentError("schema-error", "expected an adequacy report")
    return report
