"""Plain-text tables for reports."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import click

from .assessment import (
    MISSING_PRINCIPLE,
    UNREALIZED_PRINCIPLE,
    AdequacyReport,
    AttainmentReport,
    ComparisonTable,
)
from .reports import NOT_CLAIMED, UNASSESSED, Report

Style = Callable[[str], str]


def _plain(text: str) -> str:
    return text


def _fmt(value: Optional[float], marker: str = UNASSESSED) -> str:
    return marker if value is None else f"{value:.2f}"


def _table(header: Sequence[str], rows: Sequence[Sequence[str]], heading: Style) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]

    def line(cells: Sequence[str]) -> str:
        first, *rest = cells
        parts = [first.ljust(widths[0])] + [c.rjust(w) for c, w in zip(rest, widths[1:])]
        return "  ".join(parts).rstrip()

    return [heading(line(header)), *(line(r) for r in rows)]


def _adequacy_text(report: AdequacyReport, heading: Style, alert: Style) -> list[str]:
    lines = [heading(f"Adequacy of {report.method}"), ""]
    rows = []
    for objective_id, detail in report.per_objective.items():
        cov = detail.principle_coverage
        practice = detail.practice_coverage
        mean_practice = (sum(float(c.ratio) for c in practice) / len(practice)) if practice else 0.0
        rows.append([
            objective_id,
            f"{len(cov.adopted)}/{len(cov.required)}",
            f"{mean_practice:.2f}",
            _fmt(detail.score),
        ])
    lines += _table(["OBJECTIVE", "PRINCIPLES", "PRACTICES", "SCORE"], rows, heading)
    lines += ["", f"OVERALL  {_fmt(report.overall_score)}", "", heading("GAPS")]

    missing = {(f.context, f.subject) for f in report.suspect_flags if f.code == MISSING_PRINCIPLE}
    unrealized = {(f.context, f.subject) for f in report.suspect_flags if f.code == UNREALIZED_PRINCIPLE}
    for objective_id, detail in report.per_objective.items():
        entries = []
        for principle_id in sorted(detail.principle_coverage.missing):
            if (objective_id, principle_id) in missing:
                entries.append(alert(f"    {MISSING_PRINCIPLE}: {principle_id}"))
        for cov in detail.practice_coverage:
            if not cov.missing:
                continue
            tag = f" [{UNREALIZED_PRINCIPLE}]" if (objective_id, cov.subject) in unrealized else ""
            entries.append(f"    {cov.subject}{tag}: missing {', '.join(sorted(cov.missing))}")
        if entries:
            lines.append(f"  {objective_id}")
            lines += entries
    return lines


def _attainment_text(report: AttainmentReport, heading: Style, alert: Style) -> list[str]:
    title = report.kind.value.capitalize()
    lines = [heading(f"{title} of {report.method} at {report.organization}")]
    if report.qualified:
        lines.append(alert(
            f"qualified: adequacy has {len(report.adequacy_context.suspect_flags)} suspect flag(s)"))
    lines.append("")

    for label, details in (
        ("OBJECTIVE", report.per_objective),
        ("PRINCIPLE", report.per_principle),
        ("PRACTICE", report.per_practice),
    ):
        rows = [[k, _fmt(d.attainment), f"{d.evidence_coverage:.2f}"] for k, d in details.items()]
        lines += _table([label, "ATTAINMENT", "EVIDENCE"], rows, heading)
        lines.append("")

    lines += [f"OVERALL  {_fmt(report.overall)}", "", heading("GAPS")]
    for practice_id, detail in report.per_practice.items():
        unobserved = [c for c, v in detail.contributing if v is None]
        if not detail.contributing:
            lines.append(alert(f"  {practice_id}: no {report.kind.value} indicators linked"))
        elif unobserved:
            lines.append(f"  {practice_id}: unobserved {', '.join(unobserved)}")
    for flag in report.adequacy_context.suspect_flags:
        lines.append(alert(f"  {flag.code}: {flag.subject} ({flag.context})"))
    return lines


def _comparison_text(table: ComparisonTable, heading: Style) -> list[str]:
    name = " ".join(p for p in (table.framework_name, table.framework_version) if p)
    lines = [heading(f"Adequacy comparison ({name})" if name else "Adequacy comparison"), ""]
    header = ["METHOD", "OVERALL", *table.objectives]
    rows = [
        [row.method, _fmt(row.overall_score),
         *(_fmt(row.per_objective[o], NOT_CLAIMED) for o in table.objectives)]
        for row in table.rows
    ]
    return lines + _table(header, rows, heading)


def render_text(report: Report, color: bool = False) -> str:
    """Render a report as an aligned text table; deterministic for equal reports."""
    heading: Style = (lambda s: click.style(s, bold=True)) if color else _plain
    alert: Style = (lambda s: click.style(s, fg="yellow")) if color else _plain
    if isinstance(report, AdequacyReport):
        lines = _adequacy_text(report, heading, alert)
    elif isinstance(report, AttainmentReport):
        lines = _attainment_text(report, heading, alert)
    elif isinstance(report, ComparisonTable):
        lines = _comparison_text(report, heading)
    else:
        raise TypeError(f"not a report: {type(report).__name__}")
    return "\n".join(lines) + "\n"
