"""Invocation-graph analysis and generated summaries.

Builds the directed graph of `invoke` steps between non-handler use cases,
enumerates simple root-to-target paths, and derives the exception, handler,
mode-switch and mode-service summaries from a resolved model. Cyclic
invocation structures abort path-based summaries with E015.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic
from .export import SummaryTable
from .model import (
    ExtensionBlock,
    Interaction,
    Model,
    Step,
    StepKind,
    UseCase,
)
from .resolver import RaiseSite, ResolvedModel, reachable_use_cases
from .spans import SourceSpan, ZERO_SPAN

GLOBAL_SOURCE = "(global)"


@dataclass(frozen=True)
class Edge:
    caller: str
    callee: str
    at_step: str
    span: SourceSpan = ZERO_SPAN

    def __str__(self) -> str:
        return f"{self.caller} -> {self.callee} (step {self.at_step})"


@dataclass
class InvocationGraph:
    """Non-handler use cases and one edge per invocation step; parallel
    invocations of the same target are distinct edges."""

    nodes: list[str]
    edges: list[Edge]

    @property
    def roots(self) -> list[str]:
        invoked = {e.callee for e in self.edges}
        return [n for n in self.nodes if n not in invoked]

    def successors(self) -> dict[str, list[Edge]]:
        adj: dict[str, list[Edge]] = {n: [] for n in self.nodes}
        for edge in self.edges:
            adj[edge.caller].append(edge)
        return adj


@dataclass(frozen=True)
class PathRecord:
    """A simple path through the invocation graph, as use-case names."""

    use_cases: tuple[str, ...]

    def __str__(self) -> str:
        return " -> ".join(self.use_cases)


class InvocationCycleError(Exception):
    """Raised when path enumeration meets a cycle; carries an E015 diagnostic
    with one witness cycle."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def build_invocation_graph(resolved: ResolvedModel) -> InvocationGraph:
    nodes = [uc.name for uc in resolved.model.use_cases if not uc.is_handler]
    node_set = set(nodes)
    edges = []
    for uc in resolved.model.use_cases:
        if uc.is_handler:
            continue
        for step, target in resolved.invocations_of(uc):
            if target.name in node_set:
                edges.append(Edge(uc.name, target.name, step.label.text, step.span))
    return InvocationGraph(nodes, edges)


def _find_cycle(graph: InvocationGraph) -> list[str] | None:
    adj = graph.successors()
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in graph.nodes}
    parent: dict[str, str] = {}

    for start in graph.nodes:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GREY
        while stack:
            node, i = stack[-1]
            if i < len(adj[node]):
                stack[-1] = (node, i + 1)
                nxt = adj[node][i].callee
                if color[nxt] == GREY:
                    cycle = [nxt]
                    cur = node
                    while cur != nxt:
                        cycle.append(cur)
                        cur = parent[cur]
                    cycle.append(nxt)
                    cycle.reverse()
                    return cycle
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    parent[nxt] = node
                    stack.append((nxt, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return None


def ensure_acyclic(graph: InvocationGraph) -> None:
    cycle = _find_cycle(graph)
    if cycle is not None:
        witness = " -> ".join(cycle)
        span = ZERO_SPAN
        for edge in graph.edges:
            if edge.caller == cycle[0] and edge.callee == cycle[1]:
                span = edge.span
                break
        raise InvocationCycleError(
            Diagnostic("E015", f"invocation cycle detected: {witness}", span)
        )


def _paths_between(adj: dict[str, list[Edge]], source: str, target: str) -> list[PathRecord]:
    """All simple source-to-target paths; parallel edges each contribute a
    path. Paths end at the first arrival at target."""
    records: list[PathRecord] = []

    def walk(node: str, trail: list[str]) -> None:
        if node == target:
            records.append(PathRecord(tuple(trail)))
            return
        for edge in adj[node]:
            if edge.callee not in trail:
                trail.append(edge.callee)
                walk(edge.callee, trail)
                trail.pop()

    walk(source, [source])
    return sorted(records, key=lambda r: r.use_cases)


def enumerate_paths(graph: InvocationGraph, target: str) -> list[PathRecord]:
    """All simple root-to-target paths, ordered lexicographically by node
    sequence. Raises ValueError for an unknown target and
    InvocationCycleError (E015) on cyclic graphs."""
    if target not in graph.nodes:
        raise ValueError(f"unknown use case '{target}'")
    ensure_acyclic(graph)
    adj = graph.successors()
    records: list[PathRecord] = []
    for root in graph.roots:
        records.extend(_paths_between(adj, root, target))
    return sorted(records, key=lambda r: r.use_cases)


# -- exception summary ------------------------------------------------------


@dataclass
class ExceptionSummaryRow:
    exception: str
    is_global: bool
    source_use_case: str
    handlers: list[str]
    situations: list[str]
    participating_actors: list[str]
    paths: list[PathRecord]


def _handlers_by_exception(resolved: ResolvedModel) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for uc in resolved.model.use_cases:
        if not uc.is_handler:
            continue
        for ctx in uc.contexts:
            bucket = out.setdefault(ctx.exception.qualified_name, [])
            if uc.name not in bucket:
                bucket.append(uc.name)
    return out


def _anchored_steps(uc: UseCase, block: ExtensionBlock) -> list[Step]:
    anchor = block.label.anchor_label()
    if anchor is None:
        return []
    if anchor.anchor_hi is not None and not anchor.suffix:
        wanted = [str(n) for n in range(anchor.anchor_lo, anchor.anchor_hi + 1)]
    else:
        wanted = [anchor.text]
    by_label = {}
    for step in uc.all_steps():
        by_label.setdefault(step.label.text, step)
    return [by_label[w] for w in wanted if w in by_label]


def _participants(uc: UseCase, site: RaiseSite) -> list[str]:
    """Actors named by interaction steps inside the raising block and by the
    steps the block is anchored to."""
    if site.block is None:
        return []
    steps = site.block.steps() + _anchored_steps(uc, site.block)
    actors: list[str] = []
    for step in steps:
        if step.kind is StepKind.INTERACTION and isinstance(step.payload, Interaction):
            for end in (step.payload.source, step.payload.target):
                if end != "System" and end not in actors:
                    actors.append(end)
    return actors


def exception_summary(resolved: ResolvedModel, view: str | None = None) -> list[ExceptionSummaryRow]:
    """Global view (view=None): one row per occurrence of a non-global
    exception, with all root paths to the occurrence's use case; each raised
    global exception collapses to a single ``(global)`` row without paths.

    Use-case view (view=name): occurrences within the named use case or
    anything it reaches, paths re-rooted at the viewed use case; global
    exceptions keep their single pathless row.
    """
    graph = build_invocation_graph(resolved)
    ensure_acyclic(graph)
    handlers = _handlers_by_exception(resolved)
    sites = resolved.raise_sites()

    reach: set[str] | None = None
    if view is not None:
        uc = resolved.use_case_by_name.get(view)
        if uc is None or uc.is_handler:
            raise ValueError(f"unknown use case '{view}'")
        reach = reachable_use_cases(resolved, view)

    adj = graph.successors()
    rows = []
    for exc in resolved.model.exceptions:
        qname = exc.qualified_name
        exc_sites = [s for s in sites if s.exception.qualified_name == qname]
        if not exc_sites:
            continue
        if exc.is_global:
            situations = []
            actors: list[str] = []
            for site in exc_sites:
                if site.block is not None and site.block.guard and site.block.guard not in situations:
                    situations.append(site.block.guard)
                for actor in _participants(site.use_case, site):
                    if actor not in actors:
                        actors.append(actor)
            rows.append(
                ExceptionSummaryRow(
                    qname, True, GLOBAL_SOURCE, handlers.get(qname, []), situations, actors, []
                )
            )
            continue
        for site in exc_sites:
            source = site.use_case.name
            if reach is not None and source not in reach:
                continue
            if site.use_case.is_handler or source not in graph.nodes:
                paths: list[PathRecord] = []
            elif view is None:
                paths = enumerate_paths(graph, source)
            else:
                paths = _paths_between(adj, view, source)
            rows.append(
                ExceptionSummaryRow(
                    qname,
                    False,
                    source,
                    handlers.get(qname, []),
                    [site.block.guard] if site.block is not None and site.block.guard else [],
                    _participants(site.use_case, site),
                    paths,
                )
            )
    return rows


# -- handler summary ---------------------------------------------------------


@dataclass
class HandlerSummaryRow:
    handler: str
    dependent_use_cases: list[str]
    handled_exceptions: list[str]
    actors: list[str]
    total_invocation_paths: int


def handler_summary(resolved: ResolvedModel) -> list[HandlerSummaryRow]:
    """One row per handler. The path total sums the global-view path counts
    of every occurrence of every handled exception; actors that appear in no
    non-handler use case are marked exceptional with ``*``."""
    global_rows = exception_summary(resolved, view=None)
    paths_by_exception: dict[str, int] = {}
    for row in global_rows:
        paths_by_exception[row.exception] = paths_by_exception.get(row.exception, 0) + len(row.paths)

    base_actor_names: set[str] = set()
    for uc in resolved.model.use_cases:
        if not uc.is_handler:
            base_actor_names.update(ref.name for ref in uc.all_actors())

    rows = []
    for uc in resolved.model.use_cases:
        if not uc.is_handler:
            continue
        dependents: list[str] = []
        handled: list[str] = []
        for ctx in uc.contexts:
            if ctx.use_case not in dependents:
                dependents.append(ctx.use_case)
            if ctx.exception.qualified_name not in handled:
                handled.append(ctx.exception.qualified_name)
        actors = []
        for ref in uc.all_actors():
            marked = ref.name if ref.name in base_actor_names else f"{ref.name}*"
            if marked not in actors:
                actors.append(marked)
        total = sum(paths_by_exception.get(name, 0) for name in handled)
        rows.append(HandlerSummaryRow(uc.name, dependents, handled, actors, total))
    return rows


# -- mode tables -------------------------------------------------------------


@dataclass
class ModeSwitchRow:
    use_case: str
    location: str
    from_mode: str
    to_mode: str


def _handler_entry_mode(resolved: ResolvedModel, handler: UseCase, default: str) -> str:
    """Handlers start in the mode their triggering exception's block switched
    into, when that is unambiguous; otherwise in the default mode."""
    wanted = {ctx.exception.qualified_name for ctx in handler.contexts}
    candidates: list[str] = []
    for site in resolved.raise_sites():
        if site.exception.qualified_name not in wanted or site.block is None:
            continue
        switch = site.block.entry_switch or site.block.exit_switch
        if switch is not None and switch.mode not in candidates:
            candidates.append(switch.mode)
    if len(candidates) == 1:
        return candidates[0]
    return default


def mode_switch_table(resolved: ResolvedModel) -> list[ModeSwitchRow]:
    """One row per mode-switch statement with the mode in effect at that
    point. Non-handler use cases start in the default mode; switches onto the
    current mode are no-ops and yield no row."""
    default_mode = resolved.model.default_mode()
    default = default_mode.name if default_mode else ""
    rows: list[ModeSwitchRow] = []

    def emit(uc: UseCase, location: str, current: str, to_mode: str) -> str:
        if to_mode != current:
            rows.append(ModeSwitchRow(uc.name, location, current, to_mode))
        return to_mode

    def walk_block(uc: UseCase, block: ExtensionBlock, inherited: str) -> None:
        current = inherited
        if block.entry_switch is not None:
            current = emit(uc, f"block {block.label.text}-begin", current, block.entry_switch.mode)
        for nested in block.nested_blocks():
            walk_block(uc, nested, current)
        if block.exit_switch is not None:
            emit(uc, f"block {block.label.text}-end", current, block.exit_switch.mode)

    for uc in resolved.model.use_cases:
        entry = _handler_entry_mode(resolved, uc, default) if uc.is_handler else default
        current = entry
        if uc.main is not None:
            if uc.main.entry_switch is not None:
                current = emit(uc, "main-begin", current, uc.main.entry_switch.mode)
            for block in uc.extensions:
                walk_block(uc, block, current)
            if uc.main.exit_switch is not None:
                emit(uc, "main-end", current, uc.main.exit_switch.mode)
    return rows


@dataclass
class ModeServiceRow:
    mode: str
    kind: str
    services: list[str]


def mode_service_table(model: Model) -> list[ModeServiceRow]:
    """One row per declared mode, in declaration order."""
    return [ModeServiceRow(m.name, m.kind.value, list(m.offered_services)) for m in model.modes]


# -- presentation adapters ---------------------------------------------------


def exception_table(rows: list[ExceptionSummaryRow], title: str = "Exception summary") -> SummaryTable:
    columns = ["Exception", "Source Use Case", "Handlers", "Situations", "Participating Actors", "Paths"]
    cells = []
    for row in rows:
        name = f"{row.exception}::global" if row.is_global else row.exception
        cells.append(
            [
                name,
                row.source_use_case,
                ", ".join(row.handlers),
                "; ".join(row.situations),
                ", ".join(row.participating_actors),
                "; ".join(str(p) for p in row.paths),
            ]
        )
    return SummaryTable(title, columns, cells)


def handler_table(rows: list[HandlerSummaryRow], title: str = "Handler summary") -> SummaryTable:
    columns = ["Handler", "Dependent Use Cases", "Handled Exceptions", "Actors", "Invocation Paths"]
    cells = [
        [
            row.handler,
            ", ".join(row.dependent_use_cases),
            ", ".join(row.handled_exceptions),
            ", ".join(row.actors),
            str(row.total_invocation_paths),
        ]
        for row in rows
    ]
    return SummaryTable(title, columns, cells)


def mode_switch_summary_table(rows: list[ModeSwitchRow], title: str = "Mode switches") -> SummaryTable:
    columns = ["Use Case", "Location", "From Mode", "To Mode"]
    cells = [[r.use_case, r.location, r.from_mode, r.to_mode] for r in rows]
    return SummaryTable(title, columns, cells)


def mode_service_summary_table(rows: list[ModeServiceRow], title: str = "Mode summary") -> SummaryTable:
    columns = ["Mode", "Type", "Available Services"]
    cells = [[r.mode, r.kind, ", ".join(r.services)] for r in rows]
    return SummaryTable(title, columns, cells)
