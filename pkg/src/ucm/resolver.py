"""Name resolution: symbol tables and reference bindings over a parsed model.

Resolution never aborts; every unresolvable reference or duplicate
definition becomes one diagnostic (E003, E004, E012, E013, E014) and all
resolvable references are bound regardless.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, sort_diagnostics
from .model import (
    ActorRef,
    ExceptionDef,
    ExceptionRef,
    ExtensionBlock,
    Invocation,
    Model,
    ModeDecl,
    ModeSwitch,
    ControlFlow,
    Scenario,
    ServiceDecl,
    Step,
    StepKind,
    StepLabel,
    UseCase,
)
from .spans import SourceSpan

BindingKey = tuple[str, int, int]


def _key(span: SourceSpan) -> BindingKey:
    return (span.file, span.start, span.end)


@dataclass
class RaiseSite:
    """One occurrence of an exception: a raise step with its surroundings."""

    use_case: UseCase
    block: ExtensionBlock | None  # None when raised in the main scenario
    step: Step

    @property
    def exception(self) -> ExceptionRef:
        assert isinstance(self.step.payload, ExceptionRef)
        return self.step.payload


@dataclass
class ResolvedModel:
    """A model plus lookup tables and one binding per resolvable reference.

    Immutable by convention after resolve(); safe to share across readers.
    """

    model: Model
    use_case_by_name: dict[str, UseCase] = field(default_factory=dict)
    exception_by_qualified_name: dict[str, ExceptionDef] = field(default_factory=dict)
    mode_by_name: dict[str, ModeDecl] = field(default_factory=dict)
    service_by_name: dict[str, ServiceDecl] = field(default_factory=dict)
    bindings: dict[BindingKey, object] = field(default_factory=dict)
    declared_actors: dict[str, list[ActorRef]] = field(default_factory=dict)

    def binding_for(self, span: SourceSpan) -> object | None:
        return self.bindings.get(_key(span))

    def raise_sites(self) -> list[RaiseSite]:
        sites: list[RaiseSite] = []
        for uc in self.model.use_cases:
            if uc.main:
                for step in uc.main.steps:
                    if step.kind is StepKind.RAISE:
                        sites.append(RaiseSite(uc, None, step))
            for block in uc.all_blocks():
                for step in block.steps():
                    if step.kind is StepKind.RAISE:
                        sites.append(RaiseSite(uc, block, step))
        return sites

    def invocations_of(self, uc: UseCase) -> list[tuple[Step, UseCase]]:
        """Resolved invocation steps of one use case, in document order."""
        out = []
        for step in uc.all_steps():
            if step.kind is StepKind.INVOCATION:
                target = self.binding_for(step.span)
                if isinstance(target, UseCase):
                    out.append((step, target))
        return out


def resolve(ast: Model) -> tuple[ResolvedModel, list[Diagnostic]]:
    """Build symbol tables and bind every reference site; pure and
    deterministic for a given tree."""
    resolved = ResolvedModel(ast)
    diags: list[Diagnostic] = []

    _collect_definitions(resolved, diags)
    _collect_actors(resolved, diags)
    for uc in ast.use_cases:
        _bind_use_case(resolved, uc, diags)
    return resolved, sort_diagnostics(diags)


def _collect_definitions(resolved: ResolvedModel, diags: list[Diagnostic]) -> None:
    ast = resolved.model
    default_seen: ModeDecl | None = None
    for mode in ast.modes:
        if mode.name in resolved.mode_by_name:
            diags.append(_duplicate("mode", mode.name, mode.span, resolved.mode_by_name[mode.name].span))
        else:
            resolved.mode_by_name[mode.name] = mode
        if mode.is_default:
            if default_seen is not None:
                diags.append(
                    Diagnostic(
                        "E014",
                        f"mode '{mode.name}' marked default but '{default_seen.name}' already is",
                        mode.span,
                        related=[(default_seen.span, "first default mode")],
                    )
                )
            else:
                default_seen = mode

    plain_names: dict[str, ExceptionDef] = {}
    for exc in ast.exceptions:
        if exc.name in plain_names:
            diags.append(_duplicate("exception", exc.name, exc.span, plain_names[exc.name].span))
            continue
        plain_names[exc.name] = exc
        resolved.exception_by_qualified_name[exc.qualified_name] = exc

    for svc in ast.services:
        if svc.name in resolved.service_by_name:
            diags.append(_duplicate("service", svc.name, svc.span, resolved.service_by_name[svc.name].span))
        else:
            resolved.service_by_name[svc.name] = svc

    for uc in ast.use_cases:
        if uc.name in resolved.use_case_by_name:
            diags.append(_duplicate("use case", uc.name, uc.name_span, resolved.use_case_by_name[uc.name].name_span))
        else:
            resolved.use_case_by_name[uc.name] = uc


def _collect_actors(resolved: ResolvedModel, diags: list[Diagnostic]) -> None:
    """Actors are global entities identified by (category, name); reusing a
    name under a different category is a duplicate definition."""
    first_category: dict[str, ActorRef] = {}
    for uc in resolved.model.use_cases:
        refs = uc.all_actors()
        resolved.declared_actors[uc.name] = refs
        for ref in refs:
            if ref.category is None:
                continue
            prior = first_category.get(ref.name)
            if prior is None:
                first_category[ref.name] = ref
            elif prior.category != ref.category:
                diags.append(
                    Diagnostic(
                        "E014",
                        f"actor '{ref.name}' redeclared as {ref.category} but previously {prior.category}",
                        ref.span,
                        related=[(prior.span, f"first declared as {prior.qualified_name}")],
                    )
                )


def _duplicate(what: str, name: str, span: SourceSpan, first: SourceSpan) -> Diagnostic:
    return Diagnostic(
        "E014",
        f"duplicate {what} '{name}'",
        span,
        related=[(first, "first definition")],
    )


def _bind_use_case(resolved: ResolvedModel, uc: UseCase, diags: list[Diagnostic]) -> None:
    label_index = {step.label.text: step for step in reversed(uc.all_steps())}

    def bind_exception(ref: ExceptionRef) -> None:
        target = resolved.exception_by_qualified_name.get(ref.qualified_name)
        if target is None:
            diags.append(
                Diagnostic(
                    "E004",
                    f"exception '{ref.qualified_name}' is not defined in the header",
                    ref.span,
                )
            )
        else:
            resolved.bindings[_key(ref.span)] = target

    def bind_mode(switch: ModeSwitch | None) -> None:
        if switch is None:
            return
        target = resolved.mode_by_name.get(switch.mode)
        if target is None:
            diags.append(Diagnostic("E013", f"mode '{switch.mode}' is not declared", switch.span))
        else:
            resolved.bindings[_key(switch.span)] = target

    def bind_step_ref(label: StepLabel, span: SourceSpan, what: str) -> None:
        target = label_index.get(label.text)
        if target is None:
            diags.append(Diagnostic("E012", f"{what} names no existing step: '{label.text}'", span))
        else:
            resolved.bindings[_key(span)] = target

    def bind_steps(steps: list[Step]) -> None:
        for step in steps:
            payload = step.payload
            if step.kind is StepKind.INVOCATION:
                assert isinstance(payload, Invocation)
                target = resolved.use_case_by_name.get(payload.target)
                if target is None:
                    diags.append(
                        Diagnostic("E003", f"invoked use case '{payload.target}' is not defined", step.span)
                    )
                else:
                    resolved.bindings[_key(step.span)] = target
            elif step.kind is StepKind.RAISE:
                assert isinstance(payload, ExceptionRef)
                bind_exception(payload)
            elif step.kind is StepKind.CONTROL_FLOW:
                assert isinstance(payload, ControlFlow)
                if payload.goto is not None:
                    bind_step_ref(payload.goto, step.span, "goto target")
                if payload.repeat_from is not None:
                    bind_step_ref(payload.repeat_from, step.span, "repeat range start")
                if payload.repeat_to is not None and payload.repeat_to != payload.repeat_from:
                    # second target recorded via diagnostics only; the span key
                    # already binds the range start
                    if payload.repeat_to.text not in label_index:
                        diags.append(
                            Diagnostic(
                                "E012",
                                f"repeat range end names no existing step: '{payload.repeat_to.text}'",
                                step.span,
                            )
                        )

    def bind_outcome(scenario_or_block: Scenario | ExtensionBlock) -> None:
        outcome = scenario_or_block.outcome
        if outcome.continue_target is not None:
            bind_step_ref(outcome.continue_target, outcome.span, "continue target")

    def bind_anchor(block: ExtensionBlock, parent_steps: list[Step]) -> None:
        parent_labels = {s.label.text for s in parent_steps}
        anchor = block.label.anchor_label()
        if anchor is None:
            diags.append(
                Diagnostic(
                    "E012",
                    f"block label '{block.label.text}' does not end in a letter naming an anchor",
                    block.span,
                )
            )
            return
        if anchor.anchor_hi is not None and not anchor.suffix:
            targets = [str(n) for n in (anchor.anchor_lo, anchor.anchor_hi)]
        else:
            targets = [anchor.text]
        missing = [t for t in targets if t not in parent_labels]
        if missing:
            diags.append(
                Diagnostic(
                    "E012",
                    f"block anchor '{anchor.text}' names no existing step in its parent sequence",
                    block.span,
                )
            )
        else:
            first = next(s for s in parent_steps if s.label.text == targets[0])
            resolved.bindings[_key(block.span)] = first

    def walk_block(block: ExtensionBlock, parent_steps: list[Step]) -> None:
        bind_anchor(block, parent_steps)
        bind_mode(block.entry_switch)
        bind_mode(block.exit_switch)
        steps = block.steps()
        bind_steps(steps)
        bind_outcome(block)
        if block.kind.value == "exceptional":
            pass  # raise-count rule lives in validation (E008)
        for nested in block.nested_blocks():
            walk_block(nested, steps)

    for ctx in uc.contexts:
        target = resolved.use_case_by_name.get(ctx.use_case)
        if target is None:
            diags.append(
                Diagnostic("E003", f"context use case '{ctx.use_case}' is not defined", ctx.use_case_span)
            )
        else:
            resolved.bindings[_key(ctx.use_case_span)] = target
        bind_exception(ctx.exception)

    main_steps: list[Step] = []
    if uc.main:
        bind_mode(uc.main.entry_switch)
        bind_mode(uc.main.exit_switch)
        main_steps = uc.main.steps
        bind_steps(main_steps)
        bind_outcome(uc.main)
    for block in uc.extensions:
        walk_block(block, main_steps)


def reachable_use_cases(resolved: ResolvedModel, root: str) -> set[str]:
    """Transitive closure over invocation edges, root included; empty set
    when the root is unknown. Terminates on cyclic graphs."""
    if root not in resolved.use_case_by_name:
        return set()
    seen: set[str] = set()
    stack = [root]
    while stack:
        name = stack.pop()
        if name in seen:
            continue
        seen.add(name)
        uc = resolved.use_case_by_name[name]
        for _, target in resolved.invocations_of(uc):
            if target.name not in seen:
                stack.append(target.name)
    return seen
