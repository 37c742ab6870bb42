"""Branching-time front-end: formulas compiled to monadic rule programs.

Formulas are in positive normal form (negation on propositions only)
with least/greatest fixpoint binders and next-step modalities. CTL
operators are sugar that expands to fixpoint form before compilation.
A transition system is queried by compiling the formula over its
successor-relation signature and evaluating the resulting program with
the system as the database: the answer to the root predicate is the set
of satisfying states.

The universal modality AX compiles to one conjunctive rule over all
declared successor relations, so the signature must declare every
relation total and functional for AX to be meaningful; states missing a
successor never satisfy AX.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import Database, Literal, Program, Rule, element_key


class CompileError(Exception):
    pass


class Formula:
    """Base class; nodes are immutable and compare structurally."""


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class NegProp(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Ex(Formula):
    """Exists-next: some successor satisfies sub (one relation or all)."""
    sub: Formula
    rel: str | None = None


@dataclass(frozen=True)
class Ax(Formula):
    """All-next over every declared successor relation."""
    sub: Formula


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class EU(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class AU(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class EW(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class AW(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class EF(Formula):
    sub: Formula


@dataclass(frozen=True)
class AF(Formula):
    sub: Formula


@dataclass(frozen=True)
class EG(Formula):
    sub: Formula


@dataclass(frozen=True)
class AG(Formula):
    sub: Formula


@dataclass(frozen=True)
class ModalSignature:
    relations: tuple[str, ...]
    functional: frozenset[str] = frozenset()

    def all_functional(self) -> bool:
        return set(self.relations) <= self.functional


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or, EU, AU, EW, AW)):
        return (f.left, f.right)
    if isinstance(f, (Ex, Ax, EF, AF, EG, AG)):
        return (f.sub,)
    if isinstance(f, (Mu, Nu)):
        return (f.body,)
    return ()


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def _binder_vars(f: Formula) -> set[str]:
    out = {f.var} if isinstance(f, (Mu, Nu)) else set()
    for c in children(f):
        out |= _binder_vars(c)
    return out


def _smart_and(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Top):
        return b
    if isinstance(b, Top):
        return a
    if isinstance(a, Bot) or isinstance(b, Bot):
        return Bot()
    return And(a, b)


def _smart_or(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Bot):
        return b
    if isinstance(b, Bot):
        return a
    if isinstance(a, Top) or isinstance(b, Top):
        return Top()
    return Or(a, b)


def desugar(f: Formula) -> Formula:
    """Expand CTL sugar into fixpoint form; plain fixpoint inputs pass through.

    Until is a least fixpoint of "goal now or step and recurse"; weak
    until is the greatest fixpoint with the right-hand side persisting,
    so A(false W p) says p holds along every path forever. Introduced
    binder variables are fresh with respect to the whole input.
    """
    used = _binder_vars(f)
    counter = itertools.count()

    def fresh() -> str:
        while True:
            name = f"V{next(counter)}"
            if name not in used:
                used.add(name)
                return name

    def go(node: Formula) -> Formula:
        if isinstance(node, (Prop, NegProp, Top, Bot, Var)):
            return node
        if isinstance(node, And):
            return And(go(node.left), go(node.right))
        if isinstance(node, Or):
            return Or(go(node.left), go(node.right))
        if isinstance(node, Ex):
            return Ex(go(node.sub), node.rel)
        if isinstance(node, Ax):
            return Ax(go(node.sub))
        if isinstance(node, Mu):
            return Mu(node.var, go(node.body))
        if isinstance(node, Nu):
            return Nu(node.var, go(node.body))
        if isinstance(node, (EU, AU)):
            a, b = go(node.left), go(node.right)
            v = fresh()
            step = Ex(Var(v)) if isinstance(node, EU) else Ax(Var(v))
            return Mu(v, _smart_or(b, _smart_and(a, step)))
        if isinstance(node, (EW, AW)):
            a, b = go(node.left), go(node.right)
            v = fresh()
            step = Ex(Var(v)) if isinstance(node, EW) else Ax(Var(v))
            return Nu(v, _smart_and(b, _smart_or(a, step)))
        if isinstance(node, (EF, AF)):
            a = go(node.sub)
            v = fresh()
            step = Ex(Var(v)) if isinstance(node, EF) else Ax(Var(v))
            return Mu(v, _smart_or(a, step))
        if isinstance(node, (EG, AG)):
            a = go(node.sub)
            v = fresh()
            step = Ax(Var(v)) if isinstance(node, AG) else Ex(Var(v))
            return Nu(v, _smart_and(a, step))
        raise CompileError(f"unknown formula node {node!r}")

    return go(f)


def alternation_depth(f: Formula) -> int:
    """Longest chain of dependently nested binders with alternating polarity.

    A chain grows from binder b to an inner binder b' of opposite
    polarity only when b's variable occurs free below b', i.e. the inner
    fixpoint genuinely depends on the outer one. Formulas without
    binders have depth 0; alternation-free formulas have depth 1.
    """
    g = desugar(f)
    binders: list[tuple[Formula, Formula]] = []  # (binder, enclosing subtree root)

    def free_vars(node: Formula, bound: frozenset[str]) -> set[str]:
        if isinstance(node, Var):
            return set() if node.name in bound else {node.name}
        if isinstance(node, (Mu, Nu)):
            return free_vars(node.body, bound | {node.var})
        out: set[str] = set()
        for c in children(node):
            out |= free_vars(c, bound)
        return out

    # Collect binder nodes with their subtree free variables and nesting paths.
    entries: list[dict] = []

    def walk(node: Formula, ancestors: list[int]) -> None:
        here = ancestors
        if isinstance(node, (Mu, Nu)):
            entries.append({
                "node": node,
                "pol": "mu" if isinstance(node, Mu) else "nu",
                "free": free_vars(node, frozenset()),
                "ancestors": list(ancestors),
            })
            here = ancestors + [len(entries) - 1]
        for c in children(node):
            walk(c, here)

    walk(g, [])
    if not entries:
        return 0

    # entries are in preorder, so inner binders come after their ancestors.
    length = [1] * len(entries)
    for i in range(len(entries) - 1, -1, -1):
        e = entries[i]
        for j in range(i + 1, len(entries)):
            inner = entries[j]
            if i in inner["ancestors"] and inner["pol"] != e["pol"] \
                    and e["node"].var in inner["free"]:
                length[i] = max(length[i], 1 + length[j])
    return max(length)


# Compilation produces body templates before variable names are fixed:
# the anchor slot None stands for the head variable, integers for local
# existential variables.
_Body = list[tuple[bool, str, tuple]]

_TOP_NAME = "top@0"
_GUARD_KEY = (10 ** 9, 10 ** 9)


@dataclass
class CompiledQuery:
    program: Program
    goal: str


class _Compiler:
    def __init__(self, sig: ModalSignature, witness: tuple[str, int] | None):
        self.sig = sig
        self.witness = witness  # (edb name, arity) used to encode falsity
        self.rules: list[Rule] = []
        self.idb_keys: dict[str, tuple[int, int]] = {}
        self.gfp: set[str] = set()
        self.gfp_binder_idx: set[int] = set()
        self.counter = itertools.count()
        self.top_used = False

    def node_index(self) -> int:
        return next(self.counter)

    def need_top(self) -> str:
        if not self.top_used:
            self.top_used = True
            self.gfp.add(_TOP_NAME)
            self.idb_keys[_TOP_NAME] = _GUARD_KEY
            self.rules.append(Rule(_TOP_NAME, ("X",),
                                   (Literal(True, _TOP_NAME, ("X",)),)))
        return _TOP_NAME

    def bot_body(self) -> _Body:
        if self.witness is None:
            raise CompileError(
                "falsity needs at least one relation or proposition in scope")
        name, arity = self.witness
        args = (None, 0) if arity == 2 else (None,)
        return [(True, name, args), (False, name, args)]

    def instantiate(self, body: _Body, fresh: itertools.count) -> tuple[Literal, ...]:
        names: dict[int, str] = {}
        lits = []
        for positive, pred, args in body:
            out = []
            for a in args:
                if a is None:
                    out.append("X")
                elif isinstance(a, int):
                    if a not in names:
                        names[a] = f"Y{next(fresh)}"
                    out.append(names[a])
                else:
                    out.append(a)
            lits.append(Literal(positive, pred, tuple(out)))
        return tuple(lits)

    def add_idb(self, name: str, gfp: bool, key: tuple[int, int],
                bodies: list[_Body]) -> None:
        self.idb_keys[name] = key
        if gfp:
            self.gfp.add(name)
        for body in bodies:
            fresh = itertools.count(1)
            lits = self.instantiate(body, fresh)
            if not any(l.positive and "X" in l.args for l in lits):
                # No positive literal anchors the head variable; guard with
                # the all-domain helper to keep the rule safe.
                lits = (Literal(True, self.need_top(), ("X",)),) + lits
            self.rules.append(Rule(name, ("X",), lits))

    @staticmethod
    def _shift(body: _Body, offset: int, anchor) -> _Body:
        out = []
        for positive, pred, args in body:
            mapped = tuple(
                anchor if a is None else (a + offset if isinstance(a, int) else a)
                for a in args)
            out.append((positive, pred, mapped))
        return out

    @staticmethod
    def _max_slot(body: _Body) -> int:
        slots = [a for _, _, args in body for a in args if isinstance(a, int)]
        return max(slots) + 1 if slots else 0

    def compile(self, node: Formula, env: dict[str, str],
                binder_idx: int) -> list[_Body]:
        idx = self.node_index()
        if isinstance(node, Prop):
            return [[(True, node.name, (None,))]]
        if isinstance(node, NegProp):
            return [[(False, node.name, (None,))]]
        if isinstance(node, Top):
            return [[(True, self.need_top(), (None,))]]
        if isinstance(node, Bot):
            return [list(self.bot_body())]
        if isinstance(node, Var):
            if node.name not in env:
                raise CompileError(f"free variable {node.name}")
            return [[(True, env[node.name], (None,))]]
        if isinstance(node, And):
            left = self.compile(node.left, env, binder_idx)
            right = self.compile(node.right, env, binder_idx)
            out = []
            for la in left:
                off = self._max_slot(la)
                for lb in right:
                    out.append(la + self._shift(lb, off, None))
            return out
        if isinstance(node, Or):
            return self.compile(node.left, env, binder_idx) \
                + self.compile(node.right, env, binder_idx)
        if isinstance(node, Ex):
            rels = (node.rel,) if node.rel else self.sig.relations
            if node.rel and node.rel not in self.sig.relations:
                raise CompileError(f"relation {node.rel} is not in the signature")
            sub = self.compile(node.sub, env, binder_idx)
            out = []
            for r in rels:
                for sb in sub:
                    body: _Body = [(True, r, (None, 0))]
                    out.append(body + self._shift(sb, 1, 0))
            return out
        if isinstance(node, Ax):
            if not self.sig.relations:
                raise CompileError("AX needs at least one successor relation")
            if not self.sig.all_functional():
                raise CompileError(
                    "AX compiles only over relations declared functional")
            sub = self.compile(node.sub, env, binder_idx)
            sub = self._single_reference(sub, idx, env, binder_idx)
            body: _Body = []
            slot = 0
            for r in self.sig.relations:
                body.append((True, r, (None, slot)))
                slot += 1
            off = slot
            for i in range(len(self.sig.relations)):
                shifted = self._shift(sub[0], off, i)
                body.extend(shifted)
                off += self._max_slot(sub[0])
            return [body]
        if isinstance(node, (Mu, Nu)):
            name = f"{node.var}@{idx}"
            inner_env = dict(env)
            inner_env[node.var] = name
            bodies = self.compile(node.body, inner_env, idx)
            if bodies == [[(True, name, (None,))]]:
                # Pure self-reference: the least fixpoint is empty, the
                # greatest is the whole domain.
                if isinstance(node, Mu):
                    return [list(self.bot_body())]
                return [[(True, self.need_top(), (None,))]]
            if not bodies:
                # No way to derive anything: behave as an empty relation.
                return []
            self.add_idb(name, isinstance(node, Nu), (idx, -1), bodies)
            return [[(True, name, (None,))]]
        raise CompileError(f"cannot compile sugar node {node!r}; desugar first")

    def _single_reference(self, shapes: list[_Body], idx: int,
                          env: dict[str, str], binder_idx: int) -> list[_Body]:
        """Collapse a multi-rule shape into one unary predicate call."""
        if len(shapes) == 1:
            return shapes
        name = f"aux@{idx}"
        gfp = binder_idx in self.gfp_binder_idx
        self.add_idb(name, gfp, (binder_idx, idx), shapes)
        return [[(True, name, (None,))]]


def _pick_witness(f: Formula, sig: ModalSignature) -> tuple[str, int] | None:
    if sig.relations:
        return (sig.relations[0], 2)

    props: list[str] = []

    def walk(node: Formula) -> None:
        if isinstance(node, (Prop, NegProp)):
            props.append(node.name)
        for c in children(node):
            walk(c)

    walk(f)
    if props:
        return (props[0], 1)
    return None


def compile_formula(f: Formula, sig: ModalSignature) -> CompiledQuery:
    """Compile a (desugared or sugared) formula to a monadic rule program.

    Each fixpoint binder becomes one IDB named var@i with i the node's
    preorder position; greatest-fixpoint binders are tagged. The
    evaluation order puts inner binders first. The goal predicate of a
    non-binder root is a wrapper named root@0.
    """
    g = desugar(f)
    comp = _Compiler(sig, _pick_witness(g, sig))

    # Pre-scan binder polarity by preorder index so aux predicates can
    # inherit the tag of their innermost enclosing binder.
    counter = itertools.count()

    def scan(node: Formula) -> None:
        idx = next(counter)
        if isinstance(node, Nu):
            comp.gfp_binder_idx.add(idx)
        for c in children(node):
            scan(c)

    scan(g)

    bodies = comp.compile(g, {}, -1)
    if isinstance(g, (Mu, Nu)) and len(bodies) == 1 and len(bodies[0]) == 1 \
            and bodies[0][0][1] in comp.idb_keys:
        goal = bodies[0][0][1]
    else:
        goal = "root@0"
        if bodies:
            comp.add_idb(goal, False, (-1, -1), bodies)
        else:
            # Unsatisfiable root: give the goal an explicitly empty definition.
            comp.add_idb(goal, False, (-1, -1), [comp.bot_body()])

    order = sorted(comp.idb_keys, key=lambda n: comp.idb_keys[n], reverse=True)
    program = Program(rules=comp.rules, idb_order=order,
                      gfp=frozenset(comp.gfp), params=(),
                      monadic_declared=True, order_declared=True)
    return CompiledQuery(program=program, goal=goal)


def model_check(f: Formula, kripke: Database, sig: ModalSignature,
                state: str | None = None):
    """Satisfying states of f in the structure, or membership of one state."""
    from . import engine

    compiled = compile_formula(f, sig)
    if compiled.goal not in compiled.program.idbs:
        answer: frozenset = frozenset()
    else:
        result = engine.eval_queries(compiled.program, kripke,
                                     goals={compiled.goal})
        answer = result.answers[compiled.goal]
    states = {t[0] for t in answer}
    if state is not None:
        if state not in kripke.domain:
            raise CompileError(f"unknown state {state}")
        return state in states
    return sorted(states, key=element_key)
