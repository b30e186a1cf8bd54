from __future__ import annotations

import pytest

from oppa.catalog import anchored_fragment, builtin_reference, corpus
from oppa.model import MethodDefinition


@pytest.fixture
def builtin():
    return builtin_reference()


@pytest.fixture
def fragment():
    return anchored_fragment()


@pytest.fixture
def corpus_methods():
    return sorted((entry.method for entry in corpus()), key=lambda m: m.id)


@pytest.fixture
def flexible_method():
    return MethodDefinition(
        id="flex",
        name="Flexible with face-to-face communication",
        objectives={"flexible"},
        principles={"accommodate-change"},
        practices={"face-to-face-communication"},
    )


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
