"""Static analysis: recursion structure, fixpoint blocks, negation checks.

Two IDBs are mutually recursive when they share a strongly connected
component of the dependency graph. Within a component the declared
evaluation order groups members into maximal same-polarity runs, the
alternation blocks; a program is stratified when no component mixes
least- and greatest-fixpoint predicates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Diagnostic, Program


def build_dependency_graph(program: Program) -> dict[str, set[str]]:
    """Edges head -> body predicate, restricted to IDBs; negated
    occurrences count as dependencies too."""
    idbs = program.idbs
    graph: dict[str, set[str]] = {p: set() for p in idbs}
    for rule in program.rules:
        for lit in rule.body:
            if lit.pred in idbs:
                graph[rule.head_pred].add(lit.pred)
    return graph


def strongly_connected_components(graph: dict[str, set[str]]) -> list[list[str]]:
    """Tarjan's algorithm; components come out dependencies-first."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = [0]

    def visit(v: str) -> None:
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in sorted(graph.get(v, ())):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(comp)

    for v in sorted(graph):
        if v not in index:
            visit(v)
    return out


@dataclass
class Block:
    polarity: str  # "lfp" | "gfp"
    idbs: list[str]


@dataclass
class SCC:
    members: list[str]  # in declared evaluation order
    blocks: list[Block]
    recursive: bool

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def mixed(self) -> bool:
        return len(self.blocks) > 1


@dataclass
class AlternationStructure:
    sccs: list[SCC]  # topologically ordered, dependencies first
    stratified: bool
    strata_count: int
    max_k: int
    diagnostics: list[Diagnostic] = field(default_factory=list)


def analyze_alternation(program: Program,
                        graph: dict[str, set[str]] | None = None) -> AlternationStructure:
    if graph is None:
        graph = build_dependency_graph(program)
    position = {name: i for i, name in enumerate(program.idb_order)}
    diagnostics: list[Diagnostic] = []
    sccs: list[SCC] = []

    for comp in strongly_connected_components(graph):
        members = sorted(comp, key=lambda n: position.get(n, len(position)))
        recursive = len(members) > 1 or members[0] in graph.get(members[0], ())
        blocks: list[Block] = []
        for name in members:
            pol = "gfp" if program.is_gfp(name) else "lfp"
            if blocks and blocks[-1].polarity == pol:
                blocks[-1].idbs.append(name)
            else:
                blocks.append(Block(pol, [name]))
        if len(blocks) > 1 and not program.order_declared:
            diagnostics.append(Diagnostic(
                f"mixed recursive group {{{', '.join(members)}}} needs an explicit "
                ".order declaration"))
        sccs.append(SCC(members=members, blocks=blocks, recursive=recursive))

    stratified = all(not s.mixed for s in sccs)
    max_k = max((s.k for s in sccs), default=0)
    return AlternationStructure(sccs=sccs, stratified=stratified,
                                strata_count=len(sccs), max_k=max_k,
                                diagnostics=diagnostics)


def check_negation_restriction(program: Program) -> list[Diagnostic]:
    """Negated IDBs must be defined purely from extensional data.

    A body literal ~q with q an IDB is acceptable only when every rule
    with head q has an all-EDB body; negated EDBs always pass, negated
    parameters never do (their values are opaque).
    """
    idbs = program.idbs
    params = set(program.params)
    out: list[Diagnostic] = []
    seen: set[str] = set()
    for rule in program.rules:
        for lit in rule.body:
            if lit.positive:
                continue
            if lit.pred in params:
                out.append(Diagnostic(
                    f"parameter {lit.pred} may not be negated", rule.span))
                continue
            if lit.pred not in idbs or lit.pred in seen:
                continue
            seen.add(lit.pred)
            for defining in program.rules_for(lit.pred):
                offenders = [l.pred for l in defining.body
                             if l.pred in idbs or l.pred in params]
                if offenders:
                    out.append(Diagnostic(
                        f"{lit.pred} is negated but its rule "
                        f"{defining.head_str()} depends on {offenders[0]}",
                        defining.span))
    return out


def analyze(program: Program) -> AlternationStructure:
    """Full static pass: alternation structure plus negation diagnostics."""
    structure = analyze_alternation(program)
    structure.diagnostics.extend(check_negation_restriction(program))
    return structure
