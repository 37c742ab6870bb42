"""Reference evaluators used as ground truth in tests.

eval_nested implements the recursive definition of the nested fixpoint
directly: to solve a block given fixed values for the blocks outside
it, start from the block's polarity constant and repeatedly (fully
re-solve all blocks inside it, then take one simultaneous step of the
block), stopping as soon as the block's value re-occurs.

The code deliberately avoids the engine's step operator and update
discipline: literal truth is re-implemented here and block members are
stepped simultaneously from one snapshot, where the engine updates them
one at a time. Only the ground-instance enumeration and the data types
are shared. eval_by_enumeration is a second, even blunter reference for
components with at most two blocks: try every candidate value of the
outer block and keep the extreme fixpoint.
"""

from __future__ import annotations

import itertools

from .analysis import AlternationStructure, analyze
from .engine import EvaluationContext, EvaluationResult, Stats
from .model import bottom_value, top_value


class OracleError(Exception):
    pass


def _truth(ctx: EvaluationContext, lit, interp, neg_fixed) -> bool:
    if lit.pred in ctx.fixed_params:
        found = lit.args in ctx.fixed_params[lit.pred]
    elif lit.pred in ctx.idbs:
        if lit.positive:
            found = lit.args in interp[lit.pred]
        else:
            found = lit.args in neg_fixed[lit.pred]
    else:
        found = lit.args in ctx.db.tuples(lit.pred)
    return found if lit.positive else not found


def _fixed_negated_values(ctx: EvaluationContext) -> dict:
    """Values of negated IDBs, derived in one pass from the database."""
    negated = {lit.pred for r in ctx.program.rules for lit in r.body
               if not lit.positive and lit.pred in ctx.idbs}
    out = {}
    for pred in negated:
        derived = set()
        for g in ctx.ground_rules(pred):
            if all(_truth(ctx, lit, {}, {}) for lit in g.body):
                derived.add(g.head_args)
        out[pred] = frozenset(derived)
    return out


def _step(ctx: EvaluationContext, members, interp, neg_fixed) -> dict:
    """One simultaneous step over the members, from a single snapshot."""
    new = {}
    for pred in members:
        derived = set()
        for g in ctx.ground_rules(pred):
            if all(_truth(ctx, lit, interp, neg_fixed) for lit in g.body):
                derived.add(g.head_args)
        new[pred] = frozenset(derived)
    return new


def _const(ctx: EvaluationContext, pred: str) -> frozenset:
    if ctx.program.is_gfp(pred):
        return top_value(ctx.arity[pred], ctx.db.domain)
    return bottom_value()


def eval_nested(ctx: EvaluationContext,
                structure: AlternationStructure | None = None) -> EvaluationResult:
    if structure is None:
        structure = analyze(ctx.program)
    neg_fixed = _fixed_negated_values(ctx)
    interp = {p: _const(ctx, p) for p in ctx.idbs}
    steps = 0

    for scc in structure.sccs:
        blocks = scc.blocks

        def solve(j: int) -> None:
            nonlocal steps
            if j == 0:
                return
            block = blocks[j - 1]
            for m in block.idbs:
                interp[m] = _const(ctx, m)
            while True:
                solve(j - 1)
                new = _step(ctx, block.idbs, interp, neg_fixed)
                steps += 1
                if all(new[m] == interp[m] for m in block.idbs):
                    break
                interp.update(new)

        solve(len(blocks))

    stats = Stats(t_applications=steps, productive_rounds=0, per_block=[])
    return EvaluationResult(answers=dict(interp), stats=stats, trace=None)


_ENUM_LIMIT = 1 << 14


def eval_by_enumeration(ctx: EvaluationContext, single_idb: str):
    """Extreme-fixpoint answer for one IDB by trying all outer values.

    Only components with at most two blocks and at most 12 domain
    elements are accepted. Returns the set of elements for a unary
    predicate, a boolean for a nullary one. Components evaluated before
    the target one are filled in with eval_nested.
    """
    if ctx.db.size > 12:
        raise OracleError("instance too large: domain exceeds 12 elements")
    structure = analyze(ctx.program)
    target = None
    for scc in structure.sccs:
        if single_idb in scc.members:
            target = scc
            break
    if target is None:
        raise OracleError(f"{single_idb} is not an IDB")
    if len(target.blocks) > 2:
        raise OracleError("component has more than two blocks")

    base = eval_nested(ctx, structure).answers
    outer = target.blocks[-1]
    inner = target.blocks[0] if len(target.blocks) == 2 else None
    neg_fixed = _fixed_negated_values(ctx)

    member_candidates = []
    total = 1
    for m in outer.idbs:
        space = [()] if ctx.arity[m] == 0 else sorted(ctx.db.domain)
        subsets = []
        for mask in range(1 << len(space)):
            if ctx.arity[m] == 0:
                subsets.append(frozenset({()}) if mask else frozenset())
            else:
                subsets.append(frozenset(
                    (space[i],) for i in range(len(space)) if mask >> i & 1))
        member_candidates.append(subsets)
        total *= len(subsets)
        if total > _ENUM_LIMIT:
            raise OracleError("instance too large: candidate space exceeds limit")

    def inner_fixpoint(interp: dict) -> None:
        if inner is None:
            return
        for m in inner.idbs:
            interp[m] = _const(ctx, m)
        while True:
            new = _step(ctx, inner.idbs, interp, neg_fixed)
            if all(new[m] == interp[m] for m in inner.idbs):
                return
            interp.update(new)

    kept = []
    for combo in itertools.product(*member_candidates):
        interp = dict(base)
        for m, v in zip(outer.idbs, combo):
            interp[m] = v
        inner_fixpoint(interp)
        new = _step(ctx, outer.idbs, interp, neg_fixed)
        if all(new[m] == interp[m] for m in outer.idbs):
            kept.append(interp)

    def leq(a: dict, b: dict) -> bool:
        return all(a[m] <= b[m] for m in outer.idbs)

    want_greatest = outer.polarity == "gfp"
    extreme = None
    for cand in kept:
        if all(leq(other, cand) if want_greatest else leq(cand, other)
               for other in kept):
            extreme = cand
            break
    if extreme is None:
        raise OracleError("no extreme fixpoint found; component is not monotone")

    value = extreme[single_idb]
    if ctx.arity[single_idb] == 0:
        return bool(value)
    return frozenset(t[0] for t in value)
