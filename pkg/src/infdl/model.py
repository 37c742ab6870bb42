"""Core data model: programs, databases, interpretations.

A program is a finite set of function-free Horn rules over extensional
(EDB) and intensional (IDB) predicates. IDB predicates may be tagged
``gfp``, in which case they are computed as greatest fixpoints; untagged
IDBs are least fixpoints. Heads are at most unary, so interpretations
are plain sets of domain elements (the empty tuple stands in for the
single "element" of a nullary predicate).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


def is_variable(term: str) -> bool:
    """Terms starting with an uppercase letter or underscore are variables."""
    return bool(term) and (term[0].isupper() or term[0] == "_")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: SourceSpan | None = None

    def __str__(self) -> str:
        if self.span is not None:
            return f"{self.span}: {self.message}"
        return self.message


@dataclass(frozen=True)
class Literal:
    positive: bool
    pred: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        sign = "" if self.positive else "~"
        if not self.args:
            return f"{sign}{self.pred}"
        return f"{sign}{self.pred}({','.join(self.args)})"


@dataclass(frozen=True)
class Rule:
    head_pred: str
    head_args: tuple[str, ...]
    body: tuple[Literal, ...]
    span: SourceSpan | None = field(default=None, compare=False)

    def head_str(self) -> str:
        if not self.head_args:
            return self.head_pred
        return f"{self.head_pred}({','.join(self.head_args)})"

    def __str__(self) -> str:
        return f"{self.head_str()} <- {', '.join(str(l) for l in self.body)}."

    def variables(self) -> set[str]:
        out = {a for a in self.head_args if is_variable(a)}
        for lit in self.body:
            out.update(a for a in lit.args if is_variable(a))
        return out


@dataclass
class Program:
    """Rules plus the evaluation-order and tag declarations.

    idb_order lists every IDB, leftmost evaluated first (innermost).
    gfp holds the tagged IDB names. params are predicates whose values
    are supplied from outside instead of by rules.
    """

    rules: list[Rule]
    idb_order: list[str]
    gfp: frozenset[str] = frozenset()
    params: tuple[str, ...] = ()
    monadic_declared: bool = False
    order_declared: bool = False

    @property
    def idbs(self) -> set[str]:
        return {r.head_pred for r in self.rules} | set(self.gfp)

    @property
    def edbs(self) -> set[str]:
        named = self.idbs | set(self.params)
        out = set()
        for rule in self.rules:
            for lit in rule.body:
                if lit.pred not in named:
                    out.add(lit.pred)
        return out

    def rules_for(self, pred: str) -> list[Rule]:
        return [r for r in self.rules if r.head_pred == pred]

    def arities(self) -> dict[str, int]:
        """First-seen arity of every predicate (conflicts are diagnosed)."""
        out: dict[str, int] = {}
        for rule in self.rules:
            out.setdefault(rule.head_pred, len(rule.head_args))
            for lit in rule.body:
                out.setdefault(lit.pred, len(lit.args))
        return out

    def is_gfp(self, pred: str) -> bool:
        return pred in self.gfp


@dataclass
class Database:
    domain: frozenset[str]
    relations: dict[str, frozenset[tuple[str, ...]]]

    @property
    def size(self) -> int:
        return len(self.domain)

    def tuples(self, pred: str) -> frozenset[tuple[str, ...]]:
        return self.relations.get(pred, frozenset())


# An interpretation assigns each IDB (and each parameter) a set of tuples:
# {()} for a true nullary predicate, sets of 1-tuples for unary ones.
Interpretation = dict[str, frozenset]


def top_value(arity: int, domain: frozenset[str]) -> frozenset:
    if arity == 0:
        return frozenset({()})
    return frozenset((c,) for c in domain)


def bottom_value() -> frozenset:
    return frozenset()


def validate_program(program: Program, monadic: bool = True) -> list[Diagnostic]:
    """Check structural invariants; an empty list means the program is well formed."""
    out: list[Diagnostic] = []
    arities: dict[str, int] = {}

    def check_arity(pred: str, arity: int, span: SourceSpan | None) -> None:
        seen = arities.setdefault(pred, arity)
        if seen != arity:
            out.append(Diagnostic(
                f"predicate {pred} used with arity {arity} but earlier with {seen}", span))

    idbs = program.idbs
    for rule in program.rules:
        check_arity(rule.head_pred, len(rule.head_args), rule.span)
        for lit in rule.body:
            check_arity(lit.pred, len(lit.args), rule.span)
        if monadic and len(rule.head_args) > 1:
            out.append(Diagnostic(
                f"head {rule.head_str()} has arity {len(rule.head_args)}, at most 1 allowed",
                rule.span))
        if not rule.body:
            out.append(Diagnostic(f"rule {rule.head_str()} has an empty body", rule.span))
        bound = set()
        for lit in rule.body:
            if lit.positive:
                bound.update(a for a in lit.args if is_variable(a))
        for var in rule.head_args:
            if is_variable(var) and var not in bound:
                out.append(Diagnostic(
                    f"head variable {var} of {rule.head_str()} is not bound by a "
                    "positive body literal", rule.span))
        for lit in rule.body:
            if not lit.positive:
                unsafe = [a for a in lit.args if is_variable(a) and a not in bound]
                if unsafe:
                    out.append(Diagnostic(
                        f"variable {unsafe[0]} occurs only in the negative literal {lit}",
                        rule.span))

    # Untagged IDBs must have an initialization rule somewhere: a predicate
    # whose every rule mentions itself cannot leave the empty set.
    for pred in sorted(idbs):
        if program.is_gfp(pred):
            continue
        rules = program.rules_for(pred)
        if rules and all(any(l.pred == pred for l in r.body) for r in rules):
            out.append(Diagnostic(
                f"{pred} is untagged but every one of its rules is self-recursive; "
                "it can never derive anything"))

    order = program.idb_order
    if set(order) != idbs:
        missing = sorted(idbs - set(order))
        extra = sorted(set(order) - idbs)
        if missing:
            out.append(Diagnostic(f"evaluation order omits IDBs: {', '.join(missing)}"))
        if extra:
            out.append(Diagnostic(f"evaluation order names non-IDBs: {', '.join(extra)}"))
    if len(set(order)) != len(order):
        out.append(Diagnostic("evaluation order repeats a predicate"))

    for p in program.params:
        if p in idbs:
            out.append(Diagnostic(f"parameter {p} is also defined by rules"))

    return out


def ground_instances(rule: Rule, db: Database) -> list[Rule]:
    """All substitutions of the rule's variables by domain constants."""
    vs = sorted(rule.variables())
    if not vs:
        return [rule]
    out = []
    for combo in itertools.product(sorted(db.domain), repeat=len(vs)):
        subst = dict(zip(vs, combo))

        def app(args: tuple[str, ...]) -> tuple[str, ...]:
            return tuple(subst.get(a, a) for a in args)

        out.append(Rule(
            rule.head_pred, app(rule.head_args),
            tuple(Literal(l.positive, l.pred, app(l.args)) for l in rule.body),
            rule.span))
    return out


def print_program(program: Program) -> str:
    lines = []
    if program.monadic_declared:
        lines.append(".monadic")
    if program.gfp:
        lines.append(".gfp " + ", ".join(sorted(program.gfp)))
    if program.idb_order:
        lines.append(".order " + ", ".join(program.idb_order))
    if program.params:
        lines.append(".param " + ", ".join(program.params))
    for rule in program.rules:
        lines.append(str(rule))
    return "\n".join(lines) + "\n"


def print_database(db: Database) -> str:
    lines = [".domain " + ", ".join(sorted(db.domain, key=element_key))]
    for pred in sorted(db.relations):
        for tup in sorted(db.relations[pred]):
            if tup:
                lines.append(f"{pred}({','.join(tup)}).")
            else:
                lines.append(f"{pred}.")
    return "\n".join(lines) + "\n"


def element_key(c: str):
    """Sort numerals numerically, everything else lexically after them."""
    if c.lstrip("-").isdigit():
        return (0, int(c), c)
    return (1, 0, c)
