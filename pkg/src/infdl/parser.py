"""Text formats: rule programs, fact databases, transition systems, formulas.

Program syntax, one rule per statement:

    phi(X) <- q(X).
    psi(Y) :- psi(X), suc(X,Y).      % <- and :- are interchangeable
    .gfp phi2                        % tag IDBs as greatest fixpoints
    .order theta1, phi2              % evaluation order, innermost first
    .param g                         % externally supplied predicates
    .monadic

Variables start with an uppercase letter or underscore; constants are
integers or lowercase identifiers. `~` negates a body literal. `%`
starts a comment. Database files hold ground facts plus an optional
`.domain c1, c2, ...` directive. Transition systems are line oriented:
`state s;`, `label s p;`, `trans rel s t;`.
"""

from __future__ import annotations

from .model import (
    Database, Literal, Program, Rule, SourceSpan, is_variable,
)
from . import temporal


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


_SYMBOLS = ("<-", ":-", "(", ")", ",", "~", "|", "&", "!", ";")


class _Token:
    __slots__ = ("kind", "text", "span")

    def __init__(self, kind: str, text: str, span: SourceSpan):
        self.kind = kind  # ident | int | sym | directive | dot | eof
        self.text = text
        self.span = span

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text}"


def _ident_char(c: str) -> bool:
    return c.isalnum() or c in "_@"


def _tokenize(text: str, filename: str, directives: bool) -> list[_Token]:
    toks: list[_Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        span = SourceSpan(filename, line, col)
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if directives and c == "." and i + 1 < n and text[i + 1].isalpha():
            j = i + 1
            while j < n and _ident_char(text[j]):
                j += 1
            toks.append(_Token("directive", text[i + 1:j], span))
            col += j - i
            i = j
            continue
        if c == ".":
            toks.append(_Token("dot", ".", span))
            i += 1
            col += 1
            continue
        two = text[i:i + 2]
        if two in _SYMBOLS:
            toks.append(_Token("sym", two, span))
            i += 2
            col += 2
            continue
        if c in _SYMBOLS:
            toks.append(_Token("sym", c, span))
            i += 1
            col += 1
            continue
        if c.isdigit() or (c == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Token("int", text[i:j], span))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and _ident_char(text[j]):
                j += 1
            toks.append(_Token("ident", text[i:j], span))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", span)
    toks.append(_Token("eof", "", SourceSpan(filename, line, col)))
    return toks


class _Cursor:
    def __init__(self, toks: list[_Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> _Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise ParseError(f"expected {want}, found {t.text or 'end of input'}", t.span)
        return self.next()


def _parse_name_list(cur: _Cursor) -> list[str]:
    names = [cur.expect("ident").text]
    while cur.peek().kind == "sym" and cur.peek().text == ",":
        cur.next()
        names.append(cur.expect("ident").text)
    return names


def _parse_atom(cur: _Cursor) -> tuple[str, tuple[str, ...], SourceSpan]:
    tok = cur.expect("ident")
    args: list[str] = []
    if cur.peek().kind == "sym" and cur.peek().text == "(":
        cur.next()
        while True:
            t = cur.peek()
            if t.kind not in ("ident", "int"):
                raise ParseError(f"expected a term, found {t.text or 'end of input'}", t.span)
            args.append(cur.next().text)
            t = cur.peek()
            if t.kind == "sym" and t.text == ",":
                cur.next()
                continue
            cur.expect("sym", ")")
            break
    return tok.text, tuple(args), tok.span


def parse_program(text: str, filename: str = "<string>") -> Program:
    cur = _Cursor(_tokenize(text, filename, directives=True))
    rules: list[Rule] = []
    gfp: list[str] = []
    order: list[str] | None = None
    params: list[str] | None = None
    monadic = False
    seen_directives: set[str] = set()

    while cur.peek().kind != "eof":
        tok = cur.peek()
        if tok.kind == "directive":
            cur.next()
            if tok.text in seen_directives:
                raise ParseError(f"duplicate directive .{tok.text}", tok.span)
            seen_directives.add(tok.text)
            if tok.text == "monadic":
                monadic = True
            elif tok.text == "gfp":
                gfp = _parse_name_list(cur)
            elif tok.text == "order":
                order = _parse_name_list(cur)
            elif tok.text == "param":
                params = _parse_name_list(cur)
            else:
                raise ParseError(f"unknown directive .{tok.text}", tok.span)
            continue
        head_pred, head_args, span = _parse_atom(cur)
        arrow = cur.peek()
        if not (arrow.kind == "sym" and arrow.text in ("<-", ":-")):
            raise ParseError(f"expected <- or :- after rule head, found "
                             f"{arrow.text or 'end of input'}", arrow.span)
        cur.next()
        body: list[Literal] = []
        while True:
            positive = True
            if cur.peek().kind == "sym" and cur.peek().text == "~":
                cur.next()
                positive = False
            pred, args, _ = _parse_atom(cur)
            body.append(Literal(positive, pred, args))
            t = cur.peek()
            if t.kind == "sym" and t.text == ",":
                cur.next()
                continue
            cur.expect("dot")
            break
        rules.append(Rule(head_pred, head_args, tuple(body), span))

    heads = {r.head_pred for r in rules}
    body_preds = {l.pred for r in rules for l in r.body}
    for name in gfp:
        if name not in heads and name in body_preds:
            raise ParseError(f".gfp tags {name}, which heads no rule and is extensional")
    idbs = heads | set(gfp)
    if params:
        clash = idbs & set(params)
        if clash:
            raise ParseError(f".param names defined predicates: {', '.join(sorted(clash))}")

    if order is not None:
        missing = sorted(idbs - set(order))
        if missing:
            raise ParseError(f".order omits IDBs: {', '.join(missing)}")
        unknown = sorted(set(order) - idbs)
        if unknown:
            raise ParseError(f".order names unknown predicates: {', '.join(unknown)}")
        if len(set(order)) != len(order):
            raise ParseError(".order repeats a predicate")
    else:
        # Canonical order: first head occurrence, then rule-less tagged IDBs.
        order = []
        for r in rules:
            if r.head_pred not in order:
                order.append(r.head_pred)
        for name in gfp:
            if name not in order:
                order.append(name)

    return Program(rules=rules, idb_order=order, gfp=frozenset(gfp),
                   params=tuple(params or ()), monadic_declared=monadic,
                   order_declared="order" in seen_directives)


def parse_database(text: str, filename: str = "<string>") -> Database:
    cur = _Cursor(_tokenize(text, filename, directives=True))
    relations: dict[str, set[tuple[str, ...]]] = {}
    arities: dict[str, int] = {}
    domain: set[str] = set()
    seen_domain = False

    while cur.peek().kind != "eof":
        tok = cur.peek()
        if tok.kind == "directive":
            cur.next()
            if tok.text != "domain":
                raise ParseError(f"unknown directive .{tok.text} in a database file", tok.span)
            if seen_domain:
                raise ParseError("duplicate directive .domain", tok.span)
            seen_domain = True
            while True:
                t = cur.peek()
                if t.kind not in ("ident", "int"):
                    raise ParseError("expected a constant after .domain", t.span)
                domain.add(cur.next().text)
                if cur.peek().kind == "sym" and cur.peek().text == ",":
                    cur.next()
                    continue
                break
            continue
        pred, args, span = _parse_atom(cur)
        cur.expect("dot")
        for a in args:
            if is_variable(a):
                raise ParseError(f"fact {pred} contains a variable {a}", span)
        seen = arities.setdefault(pred, len(args))
        if seen != len(args):
            raise ParseError(
                f"{pred} used with arity {len(args)} but earlier with {seen}", span)
        relations.setdefault(pred, set()).add(args)
        domain.update(args)

    return Database(domain=frozenset(domain),
                    relations={p: frozenset(ts) for p, ts in relations.items()})


def parse_kripke(text: str, filename: str = "<string>") -> Database:
    states: set[str] = set()
    labels: dict[str, set[tuple[str, ...]]] = {}
    trans: dict[str, set[tuple[str, ...]]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        lstr = raw.split("%", 1)[0].strip()
        if not lstr:
            continue
        span = SourceSpan(filename, lineno, 1)
        if not lstr.endswith(";"):
            raise ParseError("line must end with ';'", span)
        parts = lstr[:-1].split()
        if parts[0] == "state" and len(parts) == 2:
            if parts[1] in states:
                raise ParseError(f"duplicate state {parts[1]}", span)
            states.add(parts[1])
        elif parts[0] == "label" and len(parts) == 3:
            s, prop = parts[1], parts[2]
            if s not in states:
                raise ParseError(f"label on undeclared state {s}", span)
            labels.setdefault(prop, set()).add((s,))
        elif parts[0] == "trans" and len(parts) == 4:
            rel, s, t = parts[1], parts[2], parts[3]
            for st in (s, t):
                if st not in states:
                    raise ParseError(f"transition references undeclared state {st}", span)
            trans.setdefault(rel, set()).add((s, t))
        else:
            raise ParseError(f"expected 'state s;', 'label s p;' or 'trans rel s t;', "
                             f"found {lstr!r}", span)

    relations = {p: frozenset(ts) for p, ts in labels.items()}
    relations.update({r: frozenset(ts) for r, ts in trans.items()})
    return Database(domain=frozenset(states), relations=relations)


_FORMULA_KEYWORDS = {"mu", "nu", "true", "false",
                     "A", "E", "U", "W", "AX", "EX", "AF", "EF", "AG", "EG"}


def parse_formula(text: str, filename: str = "<formula>") -> temporal.Formula:
    cur = _Cursor(_tokenize(text, filename, directives=False))
    f = _formula(cur, ())
    tok = cur.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.span)
    return f


def _formula(cur: _Cursor, bound: tuple[str, ...]) -> temporal.Formula:
    tok = cur.peek()
    if tok.kind == "ident" and tok.text in ("mu", "nu"):
        cur.next()
        var = cur.expect("ident")
        if var.text in _FORMULA_KEYWORDS or not var.text[0].isupper():
            raise ParseError(f"fixpoint variable must be uppercase and not a keyword, "
                             f"found {var.text}", var.span)
        cur.expect("dot")
        body = _formula(cur, bound + (var.text,))
        cls = temporal.Mu if tok.text == "mu" else temporal.Nu
        return cls(var.text, body)
    return _or(cur, bound)


def _or(cur: _Cursor, bound: tuple[str, ...]) -> temporal.Formula:
    f = _and(cur, bound)
    while cur.peek().kind == "sym" and cur.peek().text == "|":
        cur.next()
        f = temporal.Or(f, _and(cur, bound))
    return f


def _and(cur: _Cursor, bound: tuple[str, ...]) -> temporal.Formula:
    f = _unary(cur, bound)
    while cur.peek().kind == "sym" and cur.peek().text == "&":
        cur.next()
        f = temporal.And(f, _unary(cur, bound))
    return f


_UNARY_CTL = {"AX": temporal.Ax, "EX": temporal.Ex,
              "AF": temporal.AF, "EF": temporal.EF,
              "AG": temporal.AG, "EG": temporal.EG}


def _unary(cur: _Cursor, bound: tuple[str, ...]) -> temporal.Formula:
    tok = cur.peek()
    if tok.kind == "sym" and tok.text == "(":
        cur.next()
        f = _formula(cur, bound)
        cur.expect("sym", ")")
        return f
    if tok.kind == "sym" and tok.text == "!":
        cur.next()
        prop = cur.peek()
        if prop.kind != "ident" or prop.text in _FORMULA_KEYWORDS \
                or prop.text[0].isupper():
            raise ParseError("negation applies to propositions only", prop.span)
        cur.next()
        return temporal.NegProp(prop.text)
    if tok.kind != "ident":
        raise ParseError(f"expected a formula, found {tok.text or 'end of input'}", tok.span)
    if tok.text in ("mu", "nu"):
        return _formula(cur, bound)
    if tok.text == "true":
        cur.next()
        return temporal.Top()
    if tok.text == "false":
        cur.next()
        return temporal.Bot()
    if tok.text in _UNARY_CTL:
        cur.next()
        return _UNARY_CTL[tok.text](_unary(cur, bound))
    if tok.text in ("A", "E"):
        cur.next()
        cur.expect("sym", "(")
        left = _formula(cur, bound)
        op = cur.expect("ident")
        if op.text not in ("U", "W"):
            raise ParseError(f"expected U or W, found {op.text}", op.span)
        right = _formula(cur, bound)
        cur.expect("sym", ")")
        table = {("A", "U"): temporal.AU, ("A", "W"): temporal.AW,
                 ("E", "U"): temporal.EU, ("E", "W"): temporal.EW}
        return table[(tok.text, op.text)](left, right)
    cur.next()
    if tok.text[0].isupper():
        if tok.text not in bound:
            raise ParseError(f"unbound fixpoint variable {tok.text}", tok.span)
        return temporal.Var(tok.text)
    return temporal.Prop(tok.text)
