import random

import pytest

from infdl.analysis import analyze
from infdl.model import print_program
from infdl.parser import (
    parse_database,
    parse_formula,
    parse_kripke,
    parse_program,
)
from infdl.temporal import (
    AG,
    Ax,
    CompileError,
    ModalSignature,
    Mu,
    NegProp,
    Nu,
    Or,
    Prop,
    Var,
    alternation_depth,
    compile_formula,
    desugar,
    model_check,
    size,
)

SIG1 = ModalSignature(relations=("suc",))
SIG1F = ModalSignature(relations=("suc",), functional=frozenset({"suc"}))
SIG2 = ModalSignature(relations=("suc0", "suc1"),
                      functional=frozenset({"suc0", "suc1"}))

CORPUS = [
    "p",
    "!p",
    "p & q",
    "EF p",
    "AG p",
    "E(p U q)",
    "A(q W p)",
    "AF AG p",
    "A(true U A(false W p))",
    "mu X. (p | EX X)",
    "nu Y. mu X. ((p & Y) | EX X)",
    "mu X. (nu Y. (p & AX Y)) | AX X",
]


def rules_as_text(program):
    return sorted(str(r) for r in program.rules)


def test_sugar_forms_desugar_alike():
    a = desugar(parse_formula("A(true U A(false W p))"))
    b = desugar(parse_formula("AF A(false W p)"))
    assert a == b
    # and AG is the W-with-false special case
    assert desugar(parse_formula("A(false W p)")) == \
        desugar(parse_formula("AG p"))


def test_desugar_ef_shape():
    g = desugar(parse_formula("EF p"))
    assert isinstance(g, Mu)
    body = g.body
    assert isinstance(body, Or)
    assert body.left == Prop("p")
    assert body.right.sub == Var(g.var)


def test_desugar_leaves_plain_fixpoints_alone():
    f = parse_formula("nu Y. mu X. ((p & Y) | EX X)")
    assert desugar(f) == f


def test_desugar_fresh_variables_avoid_capture():
    f = parse_formula("mu V0. (p | EX V0)")
    g = desugar(AG(f))
    assert isinstance(g, Nu)
    assert g.var != "V0"


def test_alternation_depth_goldens():
    assert alternation_depth(parse_formula("p")) == 0
    assert alternation_depth(parse_formula("p & !q")) == 0
    assert alternation_depth(parse_formula("EF p")) == 1
    assert alternation_depth(parse_formula("nu Y. mu X. ((p & Y) | EX X)")) == 2
    # nesting without dependence does not alternate: neither inner binder
    # below reads the enclosing variable
    assert alternation_depth(parse_formula("A(true U A(false W p))")) == 1
    assert alternation_depth(parse_formula("nu Y. (q & mu X. (p | EX X))")) == 1


def test_compile_golden_alternating():
    f = parse_formula("mu X. (nu Y. (p & AX Y)) | AX X")
    out = compile_formula(f, SIG2)
    assert out.goal == "X@0"
    prog = out.program
    assert prog.gfp == frozenset({"Y@2"})
    assert list(prog.idb_order) == ["Y@2", "X@0"]
    assert rules_as_text(prog) == sorted([
        "Y@2(X) <- p(X), suc0(X,Y1), suc1(X,Y2), Y@2(Y1), Y@2(Y2).",
        "X@0(X) <- Y@2(X).",
        "X@0(X) <- suc0(X,Y1), suc1(X,Y2), X@0(Y1), X@0(Y2).",
    ])


def test_compile_sugared_input_matches_explicit_fixpoints():
    sugared = compile_formula(parse_formula("A(true U A(false W p))"), SIG2)
    assert sugared.goal == "V1@0"
    assert rules_as_text(sugared.program) == sorted([
        "V0@2(X) <- p(X), suc0(X,Y1), suc1(X,Y2), V0@2(Y1), V0@2(Y2).",
        "V1@0(X) <- V0@2(X).",
        "V1@0(X) <- suc0(X,Y1), suc1(X,Y2), V1@0(Y1), V1@0(Y2).",
    ])


def test_compile_bare_proposition():
    out = compile_formula(parse_formula("p"), SIG1)
    assert out.goal == "root@0"
    assert rules_as_text(out.program) == ["root@0(X) <- p(X)."]


def test_compile_negated_proposition():
    # a purely negative body cannot bind the head variable, so the
    # compiler ranges it over a universal guard predicate
    out = compile_formula(parse_formula("!p"), SIG1)
    assert rules_as_text(out.program) == sorted([
        "root@0(X) <- top@0(X), ~p(X).",
        "top@0(X) <- top@0(X).",
    ])
    assert "top@0" in out.program.gfp
    db = parse_database(".domain 1, 2\np(1).")
    assert model_check(parse_formula("!p"), db, SIG1) == ["2"]


def test_compile_ef_two_rules():
    out = compile_formula(parse_formula("EF p"), SIG1)
    assert out.goal == "V0@0"
    prog = out.program
    assert prog.gfp == frozenset()
    assert rules_as_text(prog) == sorted([
        "V0@0(X) <- p(X).",
        "V0@0(X) <- suc(X,Y1), V0@0(Y1).",
    ])


def test_compiled_output_reparses():
    for text in CORPUS:
        out = compile_formula(parse_formula(text), SIG2)
        back = parse_program(print_program(out.program))
        assert rules_as_text(back) == rules_as_text(out.program)
        assert back.gfp == out.program.gfp
        assert back.idb_order == out.program.idb_order


def test_idb_count_bounded_by_formula_size():
    # one IDB per binder, plus at most a goal wrapper and the guard
    for text in CORPUS:
        f = parse_formula(text)
        prog = compile_formula(f, SIG2).program
        assert len(prog.idb_order) <= size(desugar(f)) + 1


def test_compiled_alternation_tracks_depth():
    for text in CORPUS:
        f = parse_formula(text)
        prog = compile_formula(f, SIG2).program
        structure = analyze(prog)
        assert not structure.diagnostics
        assert structure.max_k <= max(alternation_depth(f), 1)
    ex2 = parse_formula("nu Y. (q & mu X. (p | EX X))")
    structure = analyze(compile_formula(ex2, SIG1).program)
    assert structure.stratified
    assert structure.max_k == 1


def test_compile_is_deterministic():
    for text in CORPUS:
        f = parse_formula(text)
        a = compile_formula(f, SIG2)
        b = compile_formula(f, SIG2)
        assert a == b


def test_compile_requires_functional_for_ax():
    with pytest.raises(CompileError, match="functional"):
        compile_formula(parse_formula("AX p"), SIG1)
    compile_formula(parse_formula("AX p"), SIG1F)


def test_model_check_ag_on_total_loop():
    kripke = parse_kripke(
        "state 1;\nstate 2;\ntrans suc 1 2;\ntrans suc 2 1;\n"
        "label 1 p;\nlabel 2 p;\n")
    assert model_check(parse_formula("AG p"), kripke, SIG1F) == ["1", "2"]
    assert model_check(parse_formula("AG p"), kripke, SIG1F, state="1") is True


def test_model_check_ex_true_needs_a_successor():
    kripke = parse_kripke("state s;\nlabel s p;\n")
    assert model_check(parse_formula("EX true"), kripke, SIG1) == []
    assert model_check(parse_formula("p"), kripke, SIG1) == ["s"]


def test_model_check_unknown_state():
    kripke = parse_kripke("state s;\n")
    with pytest.raises(CompileError, match="unknown state"):
        model_check(parse_formula("p"), kripke, SIG1, state="t")


def test_model_check_af_ag_on_fixture(struc2_kripke):
    f = parse_formula("A(true U A(false W p))")
    assert model_check(f, struc2_kripke, SIG2) == []
    assert model_check(parse_formula("EF p"), struc2_kripke, SIG2) == \
        ["1", "2", "3"]


def test_model_check_eu_golden():
    kripke = parse_kripke(
        "state 1;\nstate 2;\nstate 3;\n"
        "trans suc 1 2;\ntrans suc 2 3;\n"
        "label 1 p;\nlabel 2 p;\nlabel 3 q;\n")
    assert model_check(parse_formula("E(p U q)"), kripke, SIG1) == \
        ["1", "2", "3"]
    assert model_check(parse_formula("E(q U p)"), kripke, SIG1) == ["1", "2"]


def test_random_formula_compiles_and_checks():
    rng = random.Random(11)
    states = [str(i) for i in range(1, 5)]
    lines = [f"state {s};" for s in states]
    for s in states:
        lines.append(f"trans suc {s} {states[rng.randrange(4)]};")
        if rng.random() < 0.5:
            lines.append(f"label {s} p;")
    kripke = parse_kripke("\n".join(lines) + "\n")
    for text in ("EF p", "E(p U p)", "AG p", "AF p", "EG p"):
        result = model_check(parse_formula(text), kripke, SIG1F)
        assert set(result) <= set(states)
