from __future__ import annotations

from ucm.model import StepKind, UseCase
from ucm.parser import parse
from ucm.resolver import reachable_use_cases, resolve

HEADER = """model M
modes { default normal Normal }
exceptions { exception HardwareException::EntryFailure }
"""

UC = """usecase %s {
  scope: "s"
  level: user-goal
  intention: "i"
  multiplicity: "m"
  primary: Human::P
  main {
%s
    outcome success
  }
}
"""


def build(*usecases: tuple[str, str], header: str = HEADER) -> str:
    return header + "".join(UC % uc for uc in usecases)


def resolved_of(src: str):
    model, diags = parse(src, "t.ucm")
    assert model is not None, [d.message for d in diags]
    return resolve(model)


def test_declared_raise_binds_without_diagnostics():
    src = build(("A", "    1. raise HardwareException::EntryFailure"))
    resolved, diags = resolved_of(src)
    errors = [d for d in diags if d.code.startswith("E")]
    assert errors == []
    step = resolved.model.use_cases[0].main.steps[0]
    assert resolved.binding_for(step.payload.span) is resolved.model.exceptions[0]


def test_unresolved_invocation_is_e003():
    src = build(("A", "    1. invoke NoSuchUC"))
    _, diags = resolved_of(src)
    e003 = [d for d in diags if d.code == "E003"]
    assert len(e003) == 1
    assert "NoSuchUC" in e003[0].message


def test_exception_plain_name_clash_is_e014():
    header = """model M
modes { default normal Normal }
exceptions {
  exception HardwareException::X
  exception SoftwareException::X
}
"""
    src = build(("A", "    1. raise HardwareException::X"), header=header)
    _, diags = resolved_of(src)
    e014 = [d for d in diags if d.code == "E014"]
    assert len(e014) == 1
    assert e014[0].span.line == 5  # the second declaration
    assert e014[0].related


def test_duplicate_mode_service_usecase_are_e014():
    src = """model M
modes { default normal Normal normal Normal }
exceptions { }
services { service S provides A service S provides A }
""" + (UC % ("A", "    1. internal \"x\"")) + (UC % ("A", "    1. internal \"x\""))
    _, diags = resolved_of(src)
    assert sum(1 for d in diags if d.code == "E014") == 3


def test_double_default_mode_is_e014():
    src = "model M modes { default normal A default degraded B } exceptions { }"
    _, diags = resolved_of(src)
    assert [d.code for d in diags] == ["E014"]


def test_actor_category_conflict_is_e014():
    src = HEADER + """usecase A {
  scope: "s"
  level: user-goal
  intention: "i"
  multiplicity: "m"
  primary: Human::P
  main { 1. internal "x" outcome success }
}
usecase B {
  scope: "s"
  level: user-goal
  intention: "i"
  multiplicity: "m"
  primary: Software::P
  main { 1. internal "x" outcome success }
}
"""
    _, diags = resolved_of(src)
    e014 = [d for d in diags if d.code == "E014"]
    assert len(e014) == 1
    assert "Software" in e014[0].message
    assert e014[0].related


def test_unresolved_continue_and_goto_are_e012():
    src = build(("A", "    1. goto 7"))
    _, diags = resolved_of(src)
    assert [d.code for d in diags] == ["E012"]


def test_unresolved_mode_switch_is_e013():
    src = HEADER + """usecase A {
  scope: "s"
  level: user-goal
  intention: "i"
  multiplicity: "m"
  primary: Human::P
  main {
    mode switch: Turbo
    1. internal "x"
    outcome success
  }
}
"""
    _, diags = resolved_of(src)
    assert "E013" in [d.code for d in diags]


def test_context_references_bind_to_usecase_and_exception():
    src = build(("A", "    1. raise HardwareException::EntryFailure")) + """handler H {
  scope: "s"
  level: user-goal
  intention: "i"
  multiplicity: "m"
  primary: Human::Tech
  contexts: A on HardwareException::EntryFailure interrupt-continue
  main {
    1. Tech -> System : "fixes"
    outcome success
  }
}
"""
    resolved, diags = resolved_of(src)
    assert [d.code for d in diags if d.code.startswith("E")] == []
    ctx = resolved.model.use_cases[1].contexts[0]
    assert isinstance(resolved.binding_for(ctx.use_case_span), UseCase)
    assert resolved.binding_for(ctx.exception.span) is resolved.model.exceptions[0]


def test_reachable_transitive_closure():
    src = build(
        ("A", "    1. invoke B"),
        ("B", "    1. invoke C"),
        ("C", '    1. internal "leaf"'),
    )
    resolved, _ = resolved_of(src)
    assert reachable_use_cases(resolved, "A") == {"A", "B", "C"}
    assert reachable_use_cases(resolved, "C") == {"C"}
    assert reachable_use_cases(resolved, "Nope") == set()


def test_reachable_terminates_on_cycles():
    src = build(("A", "    1. invoke B"), ("B", "    1. invoke A"))
    resolved, _ = resolved_of(src)
    assert reachable_use_cases(resolved, "A") == {"A", "B"}


def test_reachable_is_a_fixed_point(smartstore_resolved):
    reach = reachable_use_cases(smartstore_resolved, "AddToCart")
    assert {"AddToCart", "IdentifyItem", "RecognizeUser"} <= reach
    for member in reach:
        assert reachable_use_cases(smartstore_resolved, member) <= reach


def test_clean_resolve_binds_every_reference(smartstore_resolved):
    resolved = smartstore_resolved
    for uc in resolved.model.use_cases:
        for step in uc.all_steps():
            if step.kind is StepKind.INVOCATION:
                assert resolved.binding_for(step.span) is not None, step.label.text
            if step.kind is StepKind.RAISE:
                assert resolved.binding_for(step.payload.span) is not None
        for ctx in uc.contexts:
            assert resolved.binding_for(ctx.use_case_span) is not None
            assert resolved.binding_for(ctx.exception.span) is not None
        scenarios = ([uc.main] if uc.main else []) + list(uc.all_blocks())
        for seq in scenarios:
            for switch in (seq.entry_switch, seq.exit_switch):
                if switch is not None:
                    assert resolved.binding_for(switch.span) is not None
            if seq.outcome.continue_target is not None:
                assert resolved.binding_for(seq.outcome.span) is not None
        for block in uc.all_blocks():
            assert resolved.binding_for(block.span) is not None


def test_resolve_is_pure(smartstore):
    first, d1 = resolve(smartstore)
    second, d2 = resolve(smartstore)
    assert d1 == d2
    assert list(first.bindings.keys()) == list(second.bindings.keys())
    assert first.use_case_by_name.keys() == second.use_case_by_name.keys()
