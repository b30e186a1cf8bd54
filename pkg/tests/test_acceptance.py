"""Exit criteria. Each test records one PASS/FAIL line, printed in the summary."""

from __future__ import annotations

import dataclasses
import random
import time
from fractions import Fraction
from pathlib import Path

from click.testing import CliRunner

from helpers import (
    CAPABILITY,
    EFFECTIVENESS,
    as_float,
    attainment_oracle,
    closure_oracle,
    flags_oracle,
    random_framework,
    random_method,
    random_observations,
)
from oppa.assessment import (
    assess_adequacy,
    assess_capability,
    assess_effectiveness,
    compare_adequacy,
    reachability,
)
from oppa.catalog import (
    builtin_reference,
    corpus,
    emit_catalog,
    emit_method,
    emit_observations,
    parse_catalog,
    parse_method,
    parse_observations,
)
from oppa.cli import ExitCode, cli
from oppa.model import (
    IndicatorObservation,
    Layer,
    MethodDefinition,
    ObservationLevel,
    ObservationSet,
    OppaError,
    validate_method,
)
from oppa.reports import emit_report, parse_report

HERE = Path(__file__).parent
OBSERVATIONS = str(HERE / "data" / "acme_xp_observations.json")
CORPUS_ARGS = ["--method", "corpus:xp", "--method", "corpus:scrum", "--method", "corpus:fdd"]

RESULTS: list[str] = []


def record(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number:02d} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_ac01_anchored_chain():
    start = time.perf_counter()
    framework = builtin_reference()
    chain = [
        ("flexible", "accommodate-change"),
        ("accommodate-change", "face-to-face-communication"),
        ("accommodate-change", "on-site-customer"),
        ("accommodate-change", "no-bruf"),
    ]
    links = set(framework.op_links) | set(framework.pp_links)
    down = reachability(framework, "top-down", "flexible")
    up = reachability(framework, "bottom-up", "no-bruf")
    elapsed = time.perf_counter() - start
    ok = (
        all(pair in links for pair in chain)
        and framework.children(Layer.OBJECTIVE, "flexible") == {"accommodate-change"}
        and {b for _, b in chain} <= down
        and "flexible" in up
        and elapsed < 1.0
    )
    record(1, "flexible -> accommodate-change chain and reachability", ok, f"{elapsed * 1000:.1f} ms")


def test_ac02_transpose_duality():
    rng = random.Random(2002)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        framework = random_framework(rng, max_elements=20)
        oracle = closure_oracle(framework)
        up = {y: reachability(framework, "bottom-up", y) for y in oracle}
        for x in oracle:
            down = reachability(framework, "top-down", x)
            mismatches += down != oracle[x]
            for y in oracle:
                mismatches += (y in down) != (x in up[y])
    elapsed = time.perf_counter() - start
    record(2, "transpose duality vs Warshall oracle", mismatches == 0 and elapsed < 30,
           f"200 frameworks, {mismatches} mismatches, {elapsed:.2f} s")


def test_ac03_full_adoption_identity():
    rng = random.Random(2003)
    failures = 0
    for _ in range(100):
        framework = random_framework(rng)
        report = assess_adequacy(framework, MethodDefinition.full_adoption(framework))
        failures += not (
            report.overall_score == 1.0
            and not report.suspect_flags
            and all(d.score == 1.0 for d in report.per_objective.values())
        )
    record(3, "full adoption scores exactly 1.0", failures == 0, f"100 frameworks, {failures} failures")


def test_ac04_flag_soundness():
    rng = random.Random(2004)
    mismatches = 0
    for _ in range(200):
        framework = random_framework(rng)
        method = random_method(rng, framework)
        flags = {(f.code, f.subject, f.context) for f in assess_adequacy(framework, method).suspect_flags}
        mismatches += flags != flags_oracle(framework, method)
    record(4, "suspect flags equal brute-force set differences", mismatches == 0,
           f"200 pairs, {mismatches} mismatches")


def test_ac05_monotonicity():
    rng = random.Random(2005)
    additions = violations = 0
    while additions < 500:
        framework = random_framework(rng)
        method = random_method(rng, framework)
        practices = sorted(
            r for p in method.principles for r in framework.children(Layer.PRINCIPLE, p)
            if r not in method.practices)
        principles = sorted(
            p for o in method.objectives for p in framework.children(Layer.OBJECTIVE, o)
            if p not in method.principles)
        if rng.random() < 0.5 and practices:
            grown = dataclasses.replace(method, practices=method.practices | {rng.choice(practices)})
        elif principles:
            principle = rng.choice(principles)
            linked = framework.children(Layer.PRINCIPLE, principle)
            extra = set() if linked & method.practices else {rng.choice(sorted(linked))}
            grown = dataclasses.replace(
                method, principles=method.principles | {principle}, practices=method.practices | extra)
        else:
            continue
        before = assess_adequacy(framework, method)
        after = assess_adequacy(framework, grown)
        additions += 1
        violations += any(
            after.per_objective[o].score < before.per_objective[o].score for o in method.objectives)
        violations += after.overall_score < before.overall_score
    record(5, "adequacy monotone under additions", violations == 0,
           f"{additions} additions, {violations} violations")


def test_ac06_category_separation():
    rng = random.Random(2006)
    differences = 0
    for _ in range(100):
        framework = random_framework(rng)
        method = random_method(rng, framework)
        obs = random_observations(rng, framework, method.id)
        adequacy = assess_adequacy(framework, method)
        category = {i.id: i.category.value for i in framework.indicators}

        def only(categories):
            return dataclasses.replace(obs, observations=tuple(
                o for o in obs.observations if category[o.indicator] in categories))

        differences += emit_report(assess_capability(framework, method, obs, adequacy)) != emit_report(
            assess_capability(framework, method, only(CAPABILITY), adequacy))
        differences += emit_report(assess_effectiveness(framework, method, obs, adequacy)) != emit_report(
            assess_effectiveness(framework, method, only(EFFECTIVENESS), adequacy))
    record(6, "category separation (bit-identical)", differences == 0,
           f"100 observation sets, {differences} differences")


def test_ac07_ordering_constraint(monkeypatch):
    monkeypatch.setenv("OPPA_NO_COLOR", "1")
    runner = CliRunner()
    outcomes = []
    framework = builtin_reference()
    xp = next(e.method for e in corpus() if e.method.id == "xp")
    try:
        assess_capability(framework, xp, ObservationSet("Acme", "xp"), None)
        outcomes.append(False)
    except OppaError as exc:
        outcomes.append(exc.code == "adequacy-missing")
    for kind in ("capability", "effectiveness"):
        base = [kind, "--catalog", "builtin", "--method", "corpus:xp", "--observations", OBSERVATIONS]
        refused = runner.invoke(cli, base)
        outcomes.append(refused.exit_code == ExitCode.USAGE and "adequacy" in refused.stderr)
        allowed = runner.invoke(cli, [*base, "--compute-adequacy", "--format", "json"])
        report = parse_report(allowed.stdout) if allowed.exit_code == 0 else None
        outcomes.append(
            report is not None
            and report.adequacy_context == assess_adequacy(framework, xp)
            and report.kind.value == kind)
    record(7, "adequacy-before-capability/effectiveness ordering", all(outcomes),
           f"{sum(outcomes)}/{len(outcomes)} checks")


def test_ac08_comparative_study(monkeypatch):
    monkeypatch.setenv("OPPA_NO_COLOR", "1")
    runner = CliRunner()
    framework = builtin_reference()
    valid = all(validate_method(framework, e.method).valid for e in corpus())
    start = time.perf_counter()
    text = [runner.invoke(cli, ["compare", "--catalog", "builtin", *CORPUS_ARGS]) for _ in range(2)]
    elapsed = (time.perf_counter() - start) / 2
    as_json = runner.invoke(cli, ["compare", "--catalog", "builtin", *CORPUS_ARGS, "--format", "json"])
    golden_text = (HERE / "golden" / "compare_corpus.txt").read_text()
    golden_json = (HERE / "golden" / "compare_corpus.json").read_text()
    rows = [line.split()[0] for line in text[0].stdout.splitlines()[3:]]
    ok = (
        valid
        and all(r.exit_code == 0 for r in (*text, as_json))
        and text[0].stdout == text[1].stdout == golden_text
        and as_json.stdout == golden_json
        and rows == ["fdd", "scrum", "xp"]
        and elapsed < 1.0
    )
    record(8, "XP/Scrum/FDD comparison matches golden files", ok,
           f"rows {rows}, {elapsed * 1000:.1f} ms per run")


def test_ac09_round_trip():
    rng = random.Random(2009)
    failures = 0
    for n in range(200):
        framework = random_framework(rng)
        method = random_method(rng, framework, f"m{n}")
        obs = random_observations(rng, framework, method.id)
        adequacy = assess_adequacy(framework, method)
        reports = [adequacy, assess_capability(framework, method, obs, adequacy),
                   assess_effectiveness(framework, method, obs, adequacy),
                   compare_adequacy(framework, [method, random_method(rng, framework, "z")])]
        failures += parse_catalog(emit_catalog(framework)) != framework
        failures += parse_method(emit_method(method)) != method
        failures += parse_observations(emit_observations(obs)) != obs
        failures += sum(parse_report(emit_report(r)) != r for r in reports)
    record(9, "parse(emit(x)) == x for all document kinds", failures == 0,
           f"200 instances x 7 documents, {failures} failures")


def test_ac10_attainment_arithmetic():
    framework = builtin_reference()
    day = IndicatorObservation("x", ObservationLevel.FULL).observed_on
    method = MethodDefinition("m", "M", {"continuous-improvement"}, {"reflect-and-adjust"}, {"daily-standup"})
    obs = ObservationSet("Acme", "m", (
        IndicatorObservation("team-communication", ObservationLevel.PARTIAL, "", day),
        IndicatorObservation("team-size-fit", ObservationLevel.FULL, "", day),
    ))
    report = assess_capability(framework, method, obs, assess_adequacy(framework, method))
    hand = report.per_practice["daily-standup"].attainment == float((Fraction(1, 2) + 1) / 2) == 0.75

    rng = random.Random(2010)
    mismatches = 0
    for _ in range(100):
        fw = random_framework(rng)
        m = random_method(rng, fw)
        sparse = random_observations(rng, fw, m.id, density=rng.uniform(0.0, 0.3))
        adequacy = assess_adequacy(fw, m)
        for assess, categories in ((assess_capability, CAPABILITY), (assess_effectiveness, EFFECTIVENESS)):
            r = assess(fw, m, sparse, adequacy)
            practice, principle, objective, overall = attainment_oracle(fw, m, sparse, categories)
            mismatches += {k: d.attainment for k, d in r.per_practice.items()} != {
                k: as_float(v) for k, v in practice.items()}
            mismatches += {k: d.attainment for k, d in r.per_principle.items()} != {
                k: as_float(v) for k, v in principle.items()}
            mismatches += {k: d.attainment for k, d in r.per_objective.items()} != {
                k: as_float(v) for k, v in objective.items()}
            mismatches += r.overall != as_float(overall)
    record(10, "attainment arithmetic and unassessed propagation", hand and mismatches == 0,
           f"hand case {'ok' if hand else 'wrong'}, 100 sparse sets, {mismatches} mismatches")
