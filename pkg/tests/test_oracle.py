import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infdl.analysis import analyze
from infdl.bench import gen_alternating, gen_database, gen_stratified
from infdl.engine import EvaluationContext, apply_t, eval_queries
from infdl.model import Database
from infdl.oracle import OracleError, eval_by_enumeration, eval_nested
from infdl.parser import parse_database, parse_program

from conftest import elems


def test_nested_on_the_alternating_fixture(exalt, struc2):
    result = eval_nested(EvaluationContext(exalt, struc2))
    assert result.answers["phi2"] == frozenset()
    assert result.answers["theta1"] == frozenset()


def test_nested_on_the_stratified_fixture(exstrat, struc3):
    result = eval_nested(EvaluationContext(exstrat, struc3))
    assert elems(result.answers["phi"]) == {"1", "2", "3"}
    assert elems(result.answers["psi"]) == {"1", "2", "3"}


def test_nested_matches_engine_on_fixtures(exstrat, struc3, exalt, struc2):
    for prog, db in ((exstrat, struc3), (exalt, struc2)):
        engine_answers = eval_queries(prog, db).answers
        oracle_answers = eval_nested(EvaluationContext(prog, db)).answers
        assert engine_answers == oracle_answers


def test_edb_only_program_reaches_fixpoint_in_one_step(struc3):
    prog = parse_program("phi(X) <- q(X).\npsi(X) <- p(X), r(X).")
    ctx = EvaluationContext(prog, struc3)
    answers = eval_nested(ctx).answers
    assert answers == apply_t(ctx, sorted(ctx.idbs), ctx.initial())


def test_enumeration_on_the_alternating_fixture(exalt, struc2):
    ctx = EvaluationContext(exalt, struc2)
    assert eval_by_enumeration(ctx, "phi2") == frozenset()
    assert eval_by_enumeration(ctx, "theta1") == frozenset()


def test_enumeration_single_lfp(struc3):
    prog = parse_program("phi(X) <- q(X).")
    ctx = EvaluationContext(prog, struc3)
    assert eval_by_enumeration(ctx, "phi") == frozenset({"3"})


def test_enumeration_rejects_large_domains():
    prog = parse_program("phi(X) <- q(X).")
    db = parse_database(".domain " + ", ".join(str(i) for i in range(1, 14)))
    with pytest.raises(OracleError, match="too large"):
        eval_by_enumeration(EvaluationContext(prog, db), "phi")


def test_enumeration_rejects_three_blocks():
    rng = random.Random(5)
    prog = gen_alternating(rng, 3, 3)
    db = gen_database(rng, 3)
    with pytest.raises(OracleError, match="two blocks"):
        eval_by_enumeration(EvaluationContext(prog, db), "l3")


def test_enumeration_rejects_unknown_predicate(exstrat, struc3):
    with pytest.raises(OracleError):
        eval_by_enumeration(EvaluationContext(exstrat, struc3), "ghost")


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_nested_equals_engine_on_random_programs(seed):
    rng = random.Random(seed)
    if rng.random() < 0.5:
        prog = gen_stratified(rng, rng.randint(1, 5))
    else:
        k = rng.randint(2, 3)
        prog = gen_alternating(rng, k, rng.randint(k, 5))
    db = gen_database(rng, rng.randint(1, 5))
    assert eval_queries(prog, db).answers == \
        eval_nested(EvaluationContext(prog, db)).answers


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_nested_equals_enumeration_up_to_two_blocks(seed):
    rng = random.Random(seed)
    if rng.random() < 0.4:
        prog = gen_stratified(rng, rng.randint(1, 3))
    else:
        prog = gen_alternating(rng, 2, rng.randint(2, 4))
    db = gen_database(rng, rng.randint(1, 4))
    ctx = EvaluationContext(prog, db)
    nested = eval_nested(ctx).answers
    structure = analyze(prog)
    for scc in structure.sccs:
        for name in scc.members:
            assert eval_by_enumeration(ctx, name) == frozenset(
                t[0] for t in nested[name])


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_nested_step_bound_with_singleton_blocks(seed):
    # the k(n+1)^k step bound is stated for one predicate per block
    rng = random.Random(seed)
    k = rng.randint(2, 3)
    prog = gen_alternating(rng, k, k)
    db = gen_database(rng, rng.randint(0, 4))
    result = eval_nested(EvaluationContext(prog, db))
    assert result.stats.t_applications <= k * (db.size + 1) ** k


def test_nested_on_empty_domain(exalt):
    db = Database(domain=frozenset(), relations={})
    answers = eval_nested(EvaluationContext(exalt, db)).answers
    assert answers == {"theta1": frozenset(), "phi2": frozenset()}
