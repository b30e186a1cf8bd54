"""``oppa`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 ``--fail-under``
threshold not met, 4 I/O failure.
"""

from __future__ import annotations

import os
import sys
from enum import IntEnum
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .assessment import (
    assess_adequacy,
    assess_capability,
    assess_effectiveness,
    compare_adequacy,
)
from .catalog import (
    DocumentError,
    builtin_reference,
    corpus_method,
    emit_catalog,
    parse_catalog,
    parse_method,
    parse_observations,
    read_framework,
)
from .model import (
    Issue,
    Layer,
    MethodDefinition,
    ObservationSet,
    OppaError,
    ReferenceFramework,
    validate_framework,
    validate_method,
    validate_observations,
)
from .render import render_text
from .reports import Report, emit_report, parse_adequacy_report


class ExitCode(IntEnum):
    SUCCESS = 0
    USAGE = 1
    INVALID = 2
    BELOW_THRESHOLD = 3
    IO_ERROR = 4


class CliFailure(Exception):
    def __init__(self, exit_code: ExitCode, message: str, issues: tuple[Issue, ...] = ()):
        super().__init__(message)
        self.exit_code = exit_code
        self.message = message
        self.issues = issues


_USAGE_CODES = {"adequacy-missing"}


class OppaGroup(click.Group):
    """Maps every failure onto the documented exit codes."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.UsageError as exc:
            exc.show()
            sys.exit(ExitCode.USAGE)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(ExitCode.USAGE)
        except CliFailure as exc:
            for issue in exc.issues:
                click.echo(str(issue), err=True)
            click.echo(f"Error: {exc.message}", err=True)
            sys.exit(exc.exit_code)
        except OppaError as exc:
            for issue in exc.issues:
                click.echo(str(issue), err=True)
            click.echo(f"Error: {exc}", err=True)
            sys.exit(ExitCode.USAGE if exc.code in _USAGE_CODES else ExitCode.INVALID)
        if standalone_mode:
            sys.exit(rv if isinstance(rv, int) else ExitCode.SUCCESS)
        return rv


def _use_color() -> bool:
    return not os.environ.get("OPPA_NO_COLOR")


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliFailure(ExitCode.IO_ERROR, f"cannot read {path}: {exc.strerror or exc}") from exc


def _parse(kind: str, path: str, parser, warnings: list[Issue]):
    try:
        return parser(_read(path), warnings)
    except DocumentError as exc:
        raise CliFailure(ExitCode.INVALID, f"{path}: {exc}", exc.issues) from exc


def _echo_warnings(warnings: list[Issue]) -> None:
    for issue in warnings:
        click.echo(str(issue), err=True)


def load_catalog(ref: str) -> ReferenceFramework:
    if ref == "builtin":
        return builtin_reference()
    warnings: list[Issue] = []
    framework = _parse("catalog", ref, parse_catalog, warnings)
    _echo_warnings(warnings)
    return framework


def load_method(framework: ReferenceFramework, ref: str) -> MethodDefinition:
    if ref.startswith("corpus:"):
        try:
            method = corpus_method(ref.removeprefix("corpus:"))
        except KeyError as exc:
            raise click.BadParameter(exc.args[0], param_hint="'--method'") from exc
    else:
        warnings: list[Issue] = []
        method = _parse("method", ref, parse_method, warnings)
        _echo_warnings(warnings)
    report = validate_method(framework, method)
    if not report.valid:
        raise CliFailure(ExitCode.INVALID, f"method {method.id!r} failed validation", report.issues)
    _echo_warnings(list(report.warnings))
    return method


def load_observations(framework: ReferenceFramework, path: str, method: MethodDefinition) -> ObservationSet:
    warnings: list[Issue] = []
    observations = _parse("observations", path, parse_observations, warnings)
    _echo_warnings(warnings)
    report = validate_observations(framework, observations, method)
    if not report.valid:
        raise CliFailure(ExitCode.INVALID, f"{path}: observations failed validation", report.issues)
    _echo_warnings(list(report.warnings))
    return observations


def _emit(report: Report, fmt: str) -> None:
    if fmt == "json":
        click.echo(emit_report(report).decode("utf-8"), nl=False)
    else:
        click.echo(render_text(report, color=_use_color()), nl=False)


def _check_threshold(score: float, fail_under: Optional[float], what: str) -> int:
    if fail_under is not None and score < fail_under:
        click.echo(f"{what} {score:.2f} is below --fail-under {fail_under:.2f}", err=True)
        return ExitCode.BELOW_THRESHOLD
    return ExitCode.SUCCESS


catalog_option = click.option(
    "--catalog", "catalog_ref", default="builtin", show_default=True,
    metavar="<path|builtin>", help="Reference catalog document.")
format_option = click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
fail_under_option = click.option(
    "--fail-under", type=click.FloatRange(0.0, 1.0), default=None, metavar="<0..1>",
    help="Exit with status 3 when the overall score is below this value.")


@click.group(cls=OppaGroup)
@click.version_option(__version__, prog_name="oppa")
def cli() -> None:
    """Assess agile methods against an Objectives-Principles-Practices catalog."""


@cli.command()
@catalog_option
@click.option("--method", "method_ref", metavar="<path|corpus:id>")
@click.option("--observations", "observations_path", metavar="<path>")
def validate(catalog_ref: str, method_ref: Optional[str], observations_path: Optional[str]) -> int:
    """Validate a catalog, and optionally a method and observation set against it."""
    if catalog_ref == "builtin":
        framework = builtin_reference()
    else:
        warnings: list[Issue] = []
        try:
            # Semantic problems are reported below, so skip parse_catalog's check.
            framework = read_framework(_read(catalog_ref), warnings)
        except DocumentError as exc:
            raise CliFailure(ExitCode.INVALID, f"{catalog_ref}: {exc}", exc.issues) from exc
        _echo_warnings(warnings)
    report = validate_framework(framework)
    for issue in report.issues:
        click.echo(str(issue), err=True)
    if not report.valid:
        raise CliFailure(ExitCode.INVALID, f"{catalog_ref}: catalog is invalid")
    click.echo(
        f"catalog {catalog_ref}: valid ({len(framework.objectives)} objectives, "
        f"{len(framework.principles)} principles, {len(framework.practices)} practices, "
        f"{len(framework.indicators)} indicators)")

    if method_ref is not None:
        method = load_method(framework, method_ref)
        click.echo(f"method {method_ref}: valid")
        if observations_path is not None:
            load_observations(framework, observations_path, method)
            click.echo(f"observations {observations_path}: valid")
    elif observations_path is not None:
        warnings = []
        observations = _parse("observations", observations_path, parse_observations, warnings)
        _echo_warnings(warnings)
        report = validate_observations(framework, observations)
        for issue in report.issues:
            click.echo(str(issue), err=True)
        if not report.valid:
            raise CliFailure(ExitCode.INVALID, f"{observations_path}: observations are invalid")
        click.echo(f"observations {observations_path}: valid")
    return ExitCode.SUCCESS


@cli.command()
@catalog_option
@click.option("--method", "method_ref", required=True, metavar="<path|corpus:id>")
@format_option
@fail_under_option
def adequacy(catalog_ref: str, method_ref: str, fmt: str, fail_under: Optional[float]) -> int:
    """Top-down adequacy of a method."""
    framework = load_catalog(catalog_ref)
    method = load_method(framework, method_ref)
    report = assess_adequacy(framework, method)
    _emit(report, fmt)
    return _check_threshold(report.overall_score, fail_under, f"adequacy of {method.id}")


def _attainment_command(kind: str, assess):
    @cli.command(name=kind, help=f"Bottom-up {kind} of a method within an organization.")
    @catalog_option
    @click.option("--method", "method_ref", required=True, metavar="<path|corpus:id>")
    @click.option("--observations", "observations_path", required=True, metavar="<path>")
    @click.option("--adequacy", "adequacy_path", metavar="<path>",
                  help="Adequacy report (JSON) for the same method.")
    @click.option("--compute-adequacy", is_flag=True,
                  help="Compute the adequacy report inline instead of reading one.")
    @format_option
    def command(catalog_ref, method_ref, observations_path, adequacy_path, compute_adequacy, fmt) -> int:
        if adequacy_path is None and not compute_adequacy:
            raise click.UsageError(
                f"{kind} requires the method's adequacy to be determined first: "
                "pass --adequacy <path> or --compute-adequacy")
        if adequacy_path is not None and compute_adequacy:
            raise click.UsageError("--adequacy and --compute-adequacy are mutually exclusive")
        framework = load_catalog(catalog_ref)
        method = load_method(framework, method_ref)
        observations = load_observations(framework, observations_path, method)
        if compute_adequacy:
            adequacy_report = assess_adequacy(framework, method)
        else:
            try:
                adequacy_report = parse_adequacy_report(_read(adequacy_path))
            except DocumentError as exc:
                raise CliFailure(ExitCode.INVALID, f"{adequacy_path}: {exc}") from exc
        _emit(assess(framework, method, observations, adequacy_report), fmt)
        return ExitCode.SUCCESS

    return command


capability = _attainment_command("capability", assess_capability)
effectiveness = _attainment_command("effectiveness", assess_effectiveness)


@cli.command()
@catalog_option
@click.option("--method", "method_refs", required=True, multiple=True, metavar="<path|corpus:id>")
@format_option
@fail_under_option
def compare(catalog_ref: str, method_refs: tuple[str, ...], fmt: str, fail_under: Optional[float]) -> int:
    """Adequacy of several methods side by side."""
    framework = load_catalog(catalog_ref)
    methods = [load_method(framework, ref) for ref in method_refs]
    table = compare_adequacy(framework, methods)
    _emit(table, fmt)
    status = ExitCode.SUCCESS
    for row in table.rows:
        status = max(status, _check_threshold(row.overall_score, fail_under, f"adequacy of {row.method}"))
    return status


@cli.group()
def catalog() -> None:
    """Inspect reference catalogs."""


@catalog.command()
@click.option("--builtin", "use_builtin", is_flag=True, help="Show the shipped catalog (default).")
@click.option("--catalog", "catalog_path", metavar="<path>")
@format_option
def show(use_builtin: bool, catalog_path: Optional[str], fmt: str) -> int:
    """Print a catalog."""
    if use_builtin and catalog_path:
        raise click.UsageError("--builtin and --catalog are mutually exclusive")
    framework = load_catalog(catalog_path or "builtin")
    if fmt == "json":
        click.echo(emit_catalog(framework).decode("utf-8"), nl=False)
    else:
        click.echo(catalog_text(framework), nl=False)
    return ExitCode.SUCCESS


def catalog_text(framework: ReferenceFramework) -> str:
    lines = [f"{framework.name} {framework.version}".strip(), ""]
    for objective in framework.objectives:
        lines.append(f"{objective.id}  {objective.name}")
        for principle_id in sorted(framework.children(Layer.OBJECTIVE, objective.id)):
            lines.append(f"  {principle_id}")
            for practice_id in sorted(framework.children(Layer.PRINCIPLE, principle_id)):
                lines.append(f"    {practice_id}")
    lines += ["", "INDICATORS"]
    for indicator in framework.indicators:
        practices = ", ".join(sorted(framework.parents(Layer.INDICATOR, indicator.id)))
        lines.append(f"  {indicator.id} [{indicator.category.value}] <- {practices}")
    return "\n".join(lines) + "\n"


def main() -> None:
    cli(prog_name="oppa")


if __name__ == "__main__":
    main()
