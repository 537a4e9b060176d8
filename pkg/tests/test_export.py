from __future__ import annotations

import json
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings

from strategies import model_source
from ucm.export import (
    SummaryTable,
    export_dot,
    export_json,
    export_xmi,
    import_json,
    render_table,
)
from ucm.parser import parse
from ucm.resolver import resolve

MINIMAL = "model M modes { default normal Normal } exceptions { }"


def resolved_of(src: str):
    model, diags = parse(src, "t.ucm")
    assert model is not None, diags
    return resolve(model)[0]


# -- tables --------------------------------------------------------------------


def test_markdown_one_by_one_table_contract():
    table = SummaryTable("t", ["H"], [["v"]])
    assert render_table(table, "md") == "| H |\n| --- |\n| v |\n"


def test_markdown_escapes_pipes():
    table = SummaryTable("t", ["H"], [["a|b"]])
    assert "a\\|b" in render_table(table, "md")


def test_csv_quotes_cells_with_commas():
    table = SummaryTable("t", ["H"], [["a,b"]])
    assert render_table(table, "csv") == 'H\r\n"a,b"\r\n'


def test_csv_quotes_embedded_quotes_and_newlines():
    table = SummaryTable("t", ["H"], [['say "hi"'], ["two\nlines"]])
    text = render_table(table, "csv")
    assert '"say ""hi"""' in text
    assert '"two\nlines"' in text
    assert text.endswith("\r\n")


def test_row_width_must_match_columns():
    with pytest.raises(ValueError):
        SummaryTable("t", ["A", "B"], [["only one"]])


def test_render_table_rejects_unknown_format():
    with pytest.raises(ValueError):
        render_table(SummaryTable("t", ["H"], []), "html")


def test_table_rendering_is_deterministic(smartstore_resolved):
    from ucm.analysis import exception_summary, exception_table

    table = exception_table(exception_summary(smartstore_resolved))
    assert render_table(table, "md") == render_table(table, "md")
    assert render_table(table, "csv") == render_table(table, "csv")


# -- JSON ------------------------------------------------------------------------


def test_minimal_model_exports_expected_shape():
    resolved = resolved_of(MINIMAL)
    doc = json.loads(export_json(resolved))
    assert doc["formatVersion"] == 1
    assert doc["name"] == "M"
    assert doc["usecases"] == []
    assert len(doc["modes"]) == 1
    assert list(doc.keys()) == ["formatVersion", "name", "modes", "exceptions", "services", "usecases"]


def test_import_of_export_parses_cleanly(smartstore_resolved):
    text = export_json(smartstore_resolved)
    model, diags = import_json(text)
    assert diags == []
    assert model is not None
    assert model.name == "SmartStore"


def test_round_trip_is_idempotent(smartstore_resolved, firealarm_resolved):
    for resolved in (smartstore_resolved, firealarm_resolved):
        once = export_json(resolved)
        again_model, diags = import_json(once)
        assert diags == []
        assert export_json(again_model) == once


def test_unknown_format_version_is_an_error():
    model, diags = import_json('{"formatVersion": 2}')
    assert model is None
    assert len(diags) == 1
    assert diags[0].code == "E000"
    assert "formatVersion" in diags[0].message


def test_truncated_document_is_schema_error_without_partial_model(smartstore_resolved):
    text = export_json(smartstore_resolved)
    model, diags = import_json(text[: len(text) // 2])
    assert model is None
    assert diags and diags[0].code == "E000"


def test_non_object_document_rejected():
    model, diags = import_json("[1, 2]")
    assert model is None
    assert "object" in diags[0].message


def test_imported_spans_are_synthetic(smartstore_resolved):
    model, _ = import_json(export_json(smartstore_resolved))
    assert model.span.start == model.span.end == 0
    assert model.use_cases[0].span.file == "<synthetic>"


# -- XMI -------------------------------------------------------------------------


def test_minimal_model_has_exactly_one_mode_element():
    resolved = resolved_of(MINIMAL)
    root = ET.fromstring(export_xmi(resolved))
    modes = root.findall(".//{http://ucm4iot/1.0}Mode")
    assert len(modes) == 1
    assert modes[0].get("name") == "Normal"
    assert root.tag == "{http://www.omg.org/XMI}XMI"
    assert root.get("{http://www.omg.org/XMI}version") == "2.0"


def test_handler_element_carries_idrefs(smartstore_resolved):
    text = export_xmi(smartstore_resolved)
    root = ET.fromstring(text)
    ns = {"ucm": "http://ucm4iot/1.0", "xmi": "http://www.omg.org/XMI"}
    handlers = root.findall(".//ucm:Handler", ns)
    assert len(handlers) == 8
    by_id = {el.get("{http://www.omg.org/XMI}id"): el for el in root.iter() if el.get("{http://www.omg.org/XMI}id")}
    sensor = next(h for h in handlers if h.get("name") == "ServiceSensor")
    contexts = sensor.findall("ucm:Context", ns)
    assert len(contexts) == 3
    for ctx in contexts:
        assert by_id[ctx.get("contextUseCase")].get("name") == "IdentifyItem"
        assert by_id[ctx.get("exception")].get("name") in (
            "TagUnavailable",
            "PressureUndetected",
            "WeightUnavailable",
        )


def test_xmi_is_well_formed_and_deterministic(smartstore_resolved, firealarm_resolved):
    for resolved in (smartstore_resolved, firealarm_resolved):
        first = export_xmi(resolved)
        second = export_xmi(resolved)
        assert first == second
        ET.fromstring(first)  # well-formedness


def test_xmi_steps_reference_invoked_usecases(smartstore_resolved):
    root = ET.fromstring(export_xmi(smartstore_resolved))
    ns = {"ucm": "http://ucm4iot/1.0"}
    invokes = [s for s in root.findall(".//ucm:Step", ns) if s.get("kind") == "invocation"]
    assert invokes
    assert all(s.get("invokes") for s in invokes)


# -- DOT -------------------------------------------------------------------------


def test_dot_marks_handlers_dashed(smartstore_resolved):
    text = export_dot(smartstore_resolved)
    assert '"HandleFireHazard" [shape=ellipse, style=dashed];' in text
    assert '"UseSmartStore" [shape=ellipse];' in text


def test_dot_labels_interrupt_relations():
    src = """model M
modes { default normal Normal }
exceptions { exception HardwareException::X }
usecase A {
  scope: "s" level: user-goal intention: "i" multiplicity: "m"
  primary: Human::P
  main { 1. raise HardwareException::X outcome success }
}
handler H {
  scope: "s" level: user-goal intention: "i" multiplicity: "m"
  primary: Human::P
  contexts: A on HardwareException::X interrupt-fail
  main { 1. P -> System : "fix" outcome success }
}
"""
    text = export_dot(resolved_of(src))
    assert '"H" -> "A" [label="<<interrupt & fail>>", style=dashed];' in text


def test_dot_edgeless_model_is_valid_graph():
    text = export_dot(resolved_of(MINIMAL))
    assert text.startswith('digraph "M" {')
    assert text.rstrip().endswith("}")


def test_dot_connects_actors_and_invocations(smartstore_resolved):
    text = export_dot(smartstore_resolved)
    assert '"Human::Customer" [shape=box];' in text
    assert '"Human::Customer" -> "Shopping" [arrowhead=none];' in text
    assert '"Shopping" -> "EnterStore" [label="<<include>>"];' in text
    assert export_dot(smartstore_resolved) == text


# -- generated-model properties ---------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(source=model_source())
def test_generated_models_parse_deterministically(source):
    first, d1 = parse(source, "gen.ucm")
    second, d2 = parse(source, "gen.ucm")
    assert d1 == [] and d2 == [], (d1, source)
    assert first == second


@settings(max_examples=40, deadline=None)
@given(source=model_source())
def test_generated_models_round_trip_through_json(source):
    model, diags = parse(source, "gen.ucm")
    assert diags == [], source
    once = export_json(model)
    back, import_diags = import_json(once)
    assert import_diags == []
    assert export_json(back) == once


@settings(max_examples=25, deadline=None)
@given(source=model_source())
def test_generated_models_export_xmi_and_dot(source):
    model, diags = parse(source, "gen.ucm")
    assert diags == [], source
    resolved, _ = resolve(model)
    ET.fromstring(export_xmi(resolved))
    assert export_dot(resolved).startswith("digraph")
