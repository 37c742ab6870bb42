"""Command-line interface.

Subcommands: check (static analysis report), eval (engine), oracle
(reference evaluator), mc (temporal model checking), bench (random
bound-validation trials with CSV and PNG output). Exit status 0 on
success, 1 on file/parse/analysis errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench as benchlib
from .analysis import analyze
from .engine import (MODE_EARLY, MODE_LITERAL, DiagnosticsError,
                     EvaluationContext, eval_queries)
from .model import element_key, print_program, validate_program
from .oracle import eval_nested
from .parser import (ParseError, parse_database, parse_formula, parse_kripke,
                     parse_program)
from .temporal import CompileError, ModalSignature, compile_formula, model_check


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return 1


def _report_diagnostics(diags) -> int:
    for d in diags:
        print(str(d), file=sys.stderr)
    return 1


def _render_interp(interp, arity) -> dict:
    out = {}
    for name in sorted(interp):
        value = interp[name]
        if arity.get(name, 1) == 0:
            out[name] = bool(value)
        else:
            out[name] = sorted((t[0] for t in value), key=element_key)
    return out


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return "{" + ", ".join(v) + "}"


def _stats_payload(stats) -> dict:
    return {
        "tApplications": stats.t_applications,
        "productiveRounds": stats.productive_rounds,
        "perBlock": stats.per_block,
    }


def _print_result(args, program, result) -> None:
    arity = program.arities()
    answers = _render_interp(result.answers, arity)
    if args.json:
        payload = {
            "answers": answers,
            "stats": _stats_payload(result.stats),
            "trace": None if result.trace is None else
                     [_render_interp(step, arity) for step in result.trace],
        }
        print(json.dumps(payload, indent=2))
        return
    for name, value in answers.items():
        print(f"{name} = {_format_value(value)}")
    if getattr(args, "stats", False):
        print(f"tApplications: {result.stats.t_applications}")
        print(f"productiveRounds: {result.stats.productive_rounds}")
        for entry in result.stats.per_block:
            print(f"block {','.join(entry['idbs'])} ({entry['polarity']}): "
                  f"rounds {entry['rounds']}, tApplications {entry['tApplications']}")
    if getattr(args, "trace", False) and result.trace is not None:
        for i, step in enumerate(result.trace):
            rendered = _render_interp(step, arity)
            parts = [f"{n} = {_format_value(v)}" for n, v in rendered.items()]
            print(f"step {i}: " + "; ".join(parts))


def _load_pair(args):
    program = parse_program(_read(args.program), args.program)
    db = parse_database(_read(args.database), args.database)
    return program, db


def cmd_check(args) -> int:
    try:
        program = parse_program(_read(args.program), args.program)
    except (OSError, ParseError) as e:
        return _fail(str(e))
    diags = validate_program(program)
    structure = analyze(program)
    diags = diags + structure.diagnostics
    payload = {
        "sccs": [scc.members for scc in structure.sccs],
        "blocks": [[{"polarity": b.polarity, "idbs": b.idbs} for b in scc.blocks]
                   for scc in structure.sccs],
        "k": structure.max_k,
        "stratified": structure.stratified,
        "diagnostics": [str(d) for d in diags],
    }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for i, scc in enumerate(structure.sccs, 1):
            desc = " ".join(f"{b.polarity}{{{','.join(b.idbs)}}}" for b in scc.blocks)
            print(f"scc {i}: {desc}")
        print(f"stratified: {'true' if structure.stratified else 'false'}")
        print(f"k: {structure.max_k}")
        for d in diags:
            print(str(d))
    return 1 if diags else 0


def cmd_eval(args) -> int:
    try:
        program, db = _load_pair(args)
    except (OSError, ParseError) as e:
        return _fail(str(e))
    if program.params:
        return _fail("program declares parameters; parameter values can only "
                     "be supplied through the library interface")
    mode = MODE_LITERAL if args.literal_bounds else MODE_EARLY
    goals = set(args.query) if args.query else None
    try:
        result = eval_queries(program, db, goals, mode=mode, want_trace=args.trace)
    except DiagnosticsError as e:
        return _report_diagnostics(e.diagnostics)
    _print_result(args, program, result)
    return 0


def cmd_oracle(args) -> int:
    try:
        program, db = _load_pair(args)
    except (OSError, ParseError) as e:
        return _fail(str(e))
    if program.params:
        return _fail("program declares parameters; parameter values can only "
                     "be supplied through the library interface")
    diags = validate_program(program)
    structure = analyze(program)
    if diags or structure.diagnostics:
        return _report_diagnostics(diags + structure.diagnostics)
    result = eval_nested(EvaluationContext(program, db), structure)
    _print_result(args, program, result)
    return 0


def _default_signature(kripke) -> tuple[str, ...]:
    binary = [name for name, tuples in kripke.relations.items()
              if tuples and all(len(t) == 2 for t in tuples)]
    return tuple(sorted(binary))


def cmd_mc(args) -> int:
    try:
        kripke = parse_kripke(_read(args.kripke), args.kripke)
        formula = parse_formula(args.formula)
    except (OSError, ParseError) as e:
        return _fail(str(e))
    if args.sig:
        relations = tuple(s.strip() for s in args.sig.split(",") if s.strip())
    else:
        relations = _default_signature(kripke)
    functional = frozenset(relations) if args.functional else frozenset()
    sig = ModalSignature(relations=relations, functional=functional)
    try:
        if args.emit_datalog:
            compiled = compile_formula(formula, sig)
            text = print_program(compiled.program)
            if args.json:
                print(json.dumps({"program": text, "goal": compiled.goal}, indent=2))
            else:
                print(f"% goal: {compiled.goal}")
                print(text, end="")
            return 0
        answer = model_check(formula, kripke, sig, state=args.state)
    except (CompileError, DiagnosticsError) as e:
        if isinstance(e, DiagnosticsError):
            return _report_diagnostics(e.diagnostics)
        return _fail(str(e))
    if args.state is not None:
        if args.json:
            print(json.dumps({"formula": args.formula, "state": args.state,
                              "holds": answer}))
        else:
            print("true" if answer else "false")
    else:
        if args.json:
            print(json.dumps({"formula": args.formula, "states": answer}))
        else:
            print("{" + ", ".join(answer) + "}")
    return 0


def cmd_bench(args) -> int:
    try:
        config = benchlib.BenchConfig(n=args.n, k=args.k, idbs=args.idbs,
                                      seed=args.seed, trials=args.trials)
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    results = benchlib.report(config, args.out)
    violations = [r for r in results if r.measured > r.bound]
    if args.json:
        payload = [{
            "trial": r.trial, "n": r.n, "k": r.k, "idbs": r.idbs,
            "blocks": list(r.block_sizes), "measured": r.measured,
            "bound": r.bound, "ratio": round(r.ratio, 4),
            "oracle": r.oracle_agrees,
        } for r in results]
        print(json.dumps(payload, indent=2))
    else:
        for r in results:
            oracle = "-" if r.oracle_agrees is None else str(r.oracle_agrees).lower()
            print(f"trial {r.trial}: measured {r.measured} bound {r.bound} "
                  f"ratio {r.ratio:.3f} oracle {oracle}")
        print(f"wrote {os.path.join(args.out, 'bench.csv')} and "
              f"{os.path.join(args.out, 'bench.png')}")
    if violations:
        print(f"{len(violations)} trial(s) exceeded the bound", file=sys.stderr)
        return 1
    if any(r.oracle_agrees is False for r in results):
        print("reference evaluator disagreed on at least one trial", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="infdl",
        description="Evaluate rule programs with least/greatest fixpoint "
                    "predicates; model-check temporal formulas on finite "
                    "transition systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="print the dependency and alternation report")
    check.add_argument("program")
    check.add_argument("--json", action="store_true")

    ev = sub.add_parser("eval", help="evaluate a program on a database")
    ev.add_argument("program")
    ev.add_argument("database")
    ev.add_argument("--query", action="append", default=[],
                    help="restrict reported answers to this predicate (repeatable)")
    ev.add_argument("--trace", action="store_true",
                    help="record intermediate interpretations")
    ev.add_argument("--stats", action="store_true",
                    help="print step counters")
    mode = ev.add_mutually_exclusive_group()
    mode.add_argument("--literal-bounds", action="store_true",
                      help="run the full theoretical pass counts")
    mode.add_argument("--early-exit", action="store_true",
                      help="stop each loop when its value repeats (default)")
    ev.add_argument("--json", action="store_true")

    orc = sub.add_parser("oracle", help="evaluate with the reference evaluator")
    orc.add_argument("program")
    orc.add_argument("database")
    orc.add_argument("--json", action="store_true")

    mc = sub.add_parser("mc", help="model-check a temporal formula")
    mc.add_argument("kripke")
    mc.add_argument("--formula", required=True)
    mc.add_argument("--sig", help="comma-separated successor relation names "
                                  "(default: the binary relations of the structure)")
    mc.add_argument("--functional", action="store_true",
                    help="declare every signature relation total and functional")
    mc.add_argument("--state", help="report membership of this state only")
    mc.add_argument("--emit-datalog", action="store_true",
                    help="print the compiled program instead of evaluating")
    mc.add_argument("--json", action="store_true")

    bench = sub.add_parser("bench", help="random bound-validation trials")
    bench.add_argument("--n", type=int, default=3, help="domain size")
    bench.add_argument("--k", type=int, default=2, help="alternation blocks")
    bench.add_argument("--idbs", type=int, default=2, help="recursive predicates")
    bench.add_argument("--trials", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default=".", help="directory for bench.csv and bench.png")
    bench.add_argument("--json", action="store_true")

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"check": cmd_check, "eval": cmd_eval, "oracle": cmd_oracle,
                "mc": cmd_mc, "bench": cmd_bench}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
