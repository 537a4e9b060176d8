from __future__ import annotations

from pathlib import Path

import pytest

from ucm.parser import parse, parse_file
from ucm.resolver import resolve
from ucm.validation import validate

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS = REPO_ROOT / "corpus"

_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record a one-line pass notice for an acceptance criterion; lines are
    echoed in the terminal summary."""

    def report(criterion: int, text: str) -> None:
        _acceptance_lines.append(f"ACCEPTANCE {criterion}: PASS - {text}")

    return report


def pytest_runtest_logreport(report):
    if report.when == "call" and report.failed and "test_acceptance" in report.nodeid:
        _acceptance_lines.append(f"ACCEPTANCE ({report.nodeid.split('::')[-1]}): FAIL")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def pipeline(source: str, file: str = "fixture.ucm"):
    """parse + resolve + validate; returns every diagnostic in one list."""
    model, parse_diags = parse(source, file)
    if model is None:
        return None, parse_diags
    resolved, resolve_diags = resolve(model)
    return resolved, resolve_diags + validate(resolved)


@pytest.fixture(scope="session")
def smartstore():
    model, diags = parse_file(CORPUS / "smartstore.ucm")
    assert model is not None, [d.message for d in diags]
    return model


@pytest.fixture(scope="session")
def smartstore_resolved(smartstore):
    resolved, diags = resolve(smartstore)
    assert diags == []
    return resolved


@pytest.fixture(scope="session")
def firealarm():
    model, diags = parse_file(CORPUS / "firealarm.ucm")
    assert model is not None, [d.message for d in diags]
    return model


@pytest.fixture(scope="session")
def firealarm_resolved(firealarm):
    resolved, diags = resolve(firealarm)
    assert diags == []
    return resolved
