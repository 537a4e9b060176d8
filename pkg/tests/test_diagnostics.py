from __future__ import annotations

import pytest

from ucm.diagnostics import CODES, Diagnostic, Severity, render_diagnostic, sort_diagnostics
from ucm.spans import SourceSpan


def span(file="store.ucm", start=0, end=1, line=1, column=1):
    return SourceSpan(file, start, end, line, column)


def test_severity_follows_code_prefix():
    assert Diagnostic("E004", "x", span()).severity is Severity.ERROR
    assert Diagnostic("W001", "x", span()).severity is Severity.WARNING
    for code in CODES:
        assert code[0] in "EW"


def test_unknown_code_rejected():
    with pytest.raises(ValueError):
        Diagnostic("E999", "x", span())


def test_render_contains_location_code_and_message():
    source = "\n" * 11 + "4. raise HardwareException::Nope\n"
    diag = Diagnostic("E004", "exception 'HardwareException::Nope' is not defined", span(start=11, end=12, line=12))
    text = render_diagnostic(diag, source)
    assert text.startswith("store.ucm:12:")
    assert "E004" in text
    assert "error" in text
    assert "not defined" in text


def test_render_lists_suggestions_in_order():
    diag = Diagnostic("E002", "bad step", span(), suggestions=["3", "4"])
    text = render_diagnostic(diag, "1. x\n")
    first = text.index("suggestion: 3")
    second = text.index("suggestion: 4")
    assert first < second


def test_render_zero_length_span_at_end_of_file():
    source = "model M"
    diag = Diagnostic("E000", "expected more", span(start=7, end=7))
    text = render_diagnostic(diag, source)
    assert text.startswith("store.ucm:1:8:")  # one past the last column
    assert "^" in text


def test_render_related_notes():
    related = [(span(start=0, end=1, line=1, column=1), "first definition")]
    diag = Diagnostic("E014", "duplicate", span(start=5, end=6, line=2, column=1), related=related)
    text = render_diagnostic(diag, "abc\nabc\n")
    assert "note: store.ucm:1:1: first definition" in text


def test_render_is_deterministic():
    source = "line one\nline two\n"
    diag = Diagnostic("W002", "never raised", span(start=9, end=17, line=2), suggestions=["drop it"])
    assert render_diagnostic(diag, source) == render_diagnostic(diag, source)


def test_sort_orders_by_file_offset_code():
    d1 = Diagnostic("E003", "a", span(file="b.ucm", start=5, end=6))
    d2 = Diagnostic("E001", "b", span(file="a.ucm", start=9, end=10))
    d3 = Diagnostic("E002", "c", span(file="b.ucm", start=5, end=6))
    assert [d.code for d in sort_diagnostics([d1, d2, d3])] == ["E001", "E002", "E003"]


def test_to_dict_is_json_friendly():
    import json

    diag = Diagnostic("E010", "msg", span(), suggestions=["s"])
    payload = json.loads(json.dumps(diag.to_dict()))
    assert payload["code"] == "E010"
    assert payload["severity"] == "error"
    assert payload["line"] == 1
