"""Random instance generators and brute-force oracles for the test suite.

The oracles deliberately avoid the package's traversal helpers: they work
straight from the raw link tuples.
"""

from __future__ import annotations

import random
from datetime import date, timedelta
from fractions import Fraction

from oppa.model import (
    Indicator,
    IndicatorCategory,
    IndicatorObservation,
    MethodDefinition,
    Objective,
    ObservationLevel,
    ObservationSet,
    Practice,
    Principle,
    ReferenceFramework,
)

LEVEL_VALUES = {
    "absent": Fraction(0),
    "initial": Fraction(1, 4),
    "partial": Fraction(1, 2),
    "substantial": Fraction(3, 4),
    "full": Fraction(1),
}
CAPABILITY = {"people", "process", "project"}
EFFECTIVENESS = {"process-artifact", "product"}


def _connect(rng: random.Random, upper: list[str], lower: list[str], density: float,
             need_out: bool, need_in: bool) -> set[tuple[str, str]]:
    links = {(u, l) for u in upper for l in lower if rng.random() < density}
    if need_out:
        for u in upper:
            if not any(a == u for a, _ in links):
                links.add((u, rng.choice(lower)))
    if need_in:
        for l in lower:
            if not any(b == l for _, b in links):
                links.add((rng.choice(upper), l))
    return links


def random_framework(rng: random.Random, max_elements: int = 20) -> ReferenceFramework:
    """A valid framework with at most ``max_elements`` elements in total."""
    n_obj = rng.randint(1, 4)
    n_pri = rng.randint(1, 5)
    n_pra = rng.randint(1, 6)
    n_ind = rng.randint(0, max(0, min(6, max_elements - n_obj - n_pri - n_pra)))
    objectives = [f"o{i}" for i in range(n_obj)]
    principles = [f"p{i}" for i in range(n_pri)]
    practices = [f"r{i}" for i in range(n_pra)]
    indicators = [f"i{i}" for i in range(n_ind)]
    density = rng.uniform(0.05, 0.5)
    categories = list(IndicatorCategory)
    return ReferenceFramework(
        objectives=tuple(Objective(i, i.upper()) for i in objectives),
        principles=tuple(Principle(i, i.upper()) for i in principles),
        practices=tuple(Practice(i, i.upper()) for i in practices),
        indicators=tuple(Indicator(i, i.upper(), rng.choice(categories)) for i in indicators),
        op_links=tuple(_connect(rng, objectives, principles, density, True, True)),
        pp_links=tuple(_connect(rng, principles, practices, density, True, True)),
        pi_links=tuple(_connect(rng, practices, indicators, density, False, True)) if indicators else (),
        name="random",
        version=str(rng.randint(0, 99)),
    )


def _subset(rng: random.Random, items, p: float) -> set[str]:
    return {x for x in items if rng.random() < p}


def random_method(rng: random.Random, framework: ReferenceFramework, method_id: str = "m") -> MethodDefinition:
    objectives = _subset(rng, [o.id for o in framework.objectives], rng.uniform(0.2, 1.0))
    if not objectives:
        objectives = {rng.choice(framework.objectives).id}
    return MethodDefinition(
        id=method_id,
        name=method_id.upper(),
        objectives=objectives,
        principles=_subset(rng, [p.id for p in framework.principles], rng.uniform(0.0, 1.0)),
        practices=_subset(rng, [p.id for p in framework.practices], rng.uniform(0.0, 1.0)),
    )


def random_observations(rng: random.Random, framework: ReferenceFramework, method_id: str = "m",
                        density: float | None = None) -> ObservationSet:
    density = rng.uniform(0.0, 1.0) if density is None else density
    start = date(2024, 1, 1)
    return ObservationSet(
        organization=f"org-{rng.randint(0, 9)}",
        method=method_id,
        observations=tuple(
            IndicatorObservation(
                indicator=i.id,
                level=rng.choice(list(ObservationLevel)),
                evidence=f"note {rng.randint(0, 999)}",
                observed_on=start + timedelta(days=rng.randint(0, 700)),
            )
            for i in framework.indicators
            if rng.random() < density
        ),
    )


# -- oracles ----------------------------------------------------------------

def closure_oracle(framework: ReferenceFramework) -> dict[str, set[str]]:
    """Top-down reachability for every node by Warshall over an adjacency matrix."""
    nodes = sorted(
        {e.id for e in framework.objectives} | {e.id for e in framework.principles}
        | {e.id for e in framework.practices} | {e.id for e in framework.indicators}
    )
    index = {n: k for k, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for a, b in (*framework.op_links, *framework.pp_links, *framework.pi_links):
        reach[index[a]][index[b]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    return {nodes[i]: {nodes[j] for j in range(n) if reach[i][j] and i != j} for i in range(n)}


def flags_oracle(framework: ReferenceFramework, method: MethodDefinition) -> set[tuple[str, str, str]]:
    out = set()
    for o in method.objectives:
        required = {p for (a, p) in framework.op_links if a == o}
        for p in required - method.principles:
            out.add(("missing-principle", p, o))
        for p in required & method.principles:
            practices = {r for (a, r) in framework.pp_links if a == p}
            if not practices & method.practices:
                out.add(("unrealized-principle", p, o))
    return out


def adequacy_oracle(framework: ReferenceFramework, method: MethodDefinition) -> dict[str, Fraction]:
    scores = {}
    for o in method.objectives:
        required = {p for (a, p) in framework.op_links if a == o}
        adopted = required & method.principles
        if not adopted:
            scores[o] = Fraction(0)
            continue
        ratios = []
        for p in adopted:
            practices = {r for (a, r) in framework.pp_links if a == p}
            ratios.append(Fraction(len(practices & method.practices), len(practices)))
        scores[o] = Fraction(len(adopted), len(required)) * sum(ratios) / len(ratios)
    return scores


def attainment_oracle(framework: ReferenceFramework, method: MethodDefinition,
                      observations: ObservationSet, categories: set[str]):
    """(practice, principle, objective, overall) attainments; None means unassessed."""
    category = {i.id: i.category.value for i in framework.indicators}
    observed = {o.indicator: LEVEL_VALUES[o.level.value] for o in observations.observations
                if category[o.indicator] in categories}

    def mean_or_none(values):
        values = [v for v in values if v is not None]
        return sum(values, Fraction(0)) / len(values) if values else None

    practice = {}
    for r in method.practices:
        practice[r] = mean_or_none(observed.get(i) for (a, i) in framework.pi_links if a == r)
    principle = {}
    for p in method.principles:
        principle[p] = mean_or_none(practice[r] for (a, r) in framework.pp_links
                                    if a == p and r in method.practices)
    objective = {}
    for o in method.objectives:
        objective[o] = mean_or_none(principle[p] for (a, p) in framework.op_links
                                    if a == o and p in method.principles)
    return practice, principle, objective, mean_or_none(objective.values())


def as_float(value):
    return None if value is None else float(value)
