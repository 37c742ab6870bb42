"""Random program generator and iteration-bound harness.

Programs are generated with their recursion shape fixed by construction
rather than by filtering: k=1 configurations produce stratified programs
(every component single-polarity), k>=2 configurations produce a single
mixed component with exactly k alternating blocks. The harness runs the
engine with literal pass counts, compares the measured step counts to
the closed-form bound, and cross-checks answers against the reference
evaluator on small domains. Reports go to a CSV file and a PNG plot.
"""

from __future__ import annotations

import csv
import os
import random
from dataclasses import dataclass

from .analysis import analyze
from .engine import MODE_LITERAL, EvaluationContext, eval_queries
from .model import Database, Literal, Program, Rule
from .oracle import eval_nested


@dataclass(frozen=True)
class BenchConfig:
    n: int
    k: int
    idbs: int
    seed: int = 0
    trials: int = 10

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("domain size must be non-negative")
        if not 1 <= self.k <= self.idbs:
            raise ValueError("need 1 <= k <= idbs")
        if self.trials < 1:
            raise ValueError("need at least one trial")


@dataclass(frozen=True)
class TrialResult:
    trial: int
    n: int
    k: int
    idbs: int
    block_sizes: tuple[int, ...]
    measured: int
    bound: int
    oracle_agrees: bool | None

    @property
    def ratio(self) -> float:
        return self.measured / self.bound if self.bound else 0.0


def stratified_bound(n: int, idb_count: int) -> int:
    return n * idb_count


def alternating_bound(n: int, block_sizes) -> int:
    """Literal-mode step count for blocks of the given sizes, innermost first."""
    k = len(block_sizes)
    total = block_sizes[0] * n * (n + 1) ** (k - 1)
    for j in range(2, k + 1):
        total += block_sizes[j - 1] * (n + 1) ** (k - j + 1)
    return total


def gen_database(rng: random.Random, n: int) -> Database:
    domain = [str(i) for i in range(1, n + 1)]
    relations = {
        "suc": frozenset((a, b) for a in domain for b in domain
                         if rng.random() < 0.35),
        "p": frozenset((c,) for c in domain if rng.random() < 0.5),
        "q": frozenset((c,) for c in domain if rng.random() < 0.5),
    }
    return Database(domain=frozenset(domain), relations=relations)


def _base_rule(rng: random.Random, head: str) -> Rule:
    shape = rng.randrange(3)
    if shape == 0:
        body = (Literal(True, "q", ("X",)),)
    elif shape == 1:
        body = (Literal(True, "p", ("X",)),)
    else:
        body = (Literal(True, "p", ("X",)), Literal(True, "q", ("X",)))
    return Rule(head, ("X",), body)


def _link_rule(rng: random.Random, head: str, ref: str) -> Rule:
    shape = rng.randrange(3)
    if shape == 0:
        body = (Literal(True, ref, ("X",)),)
    elif shape == 1:
        body = (Literal(True, "p", ("X",)), Literal(True, ref, ("X",)))
    else:
        body = (Literal(True, "suc", ("X", "Y")), Literal(True, ref, ("Y",)))
    return Rule(head, ("X",), body)


def _self_rule(rng: random.Random, head: str) -> Rule:
    if rng.random() < 0.5:
        return Rule(head, ("X",),
                    (Literal(True, "suc", ("X", "Y")), Literal(True, head, ("Y",))))
    return Rule(head, ("Y",),
                (Literal(True, head, ("X",)), Literal(True, "suc", ("X", "Y"))))


def gen_stratified(rng: random.Random, idb_count: int) -> Program:
    """Program whose components are all singletons: each predicate
    references only itself, earlier predicates, and the database."""
    names = [f"s{i}" for i in range(1, idb_count + 1)]
    rules = []
    gfp = set()
    for i, name in enumerate(names):
        rules.append(_base_rule(rng, name))
        if i > 0 and rng.random() < 0.6:
            rules.append(_link_rule(rng, name, names[rng.randrange(i)]))
        if rng.random() < 0.6:
            rules.append(_self_rule(rng, name))
        if rng.random() < 0.3:
            gfp.add(name)
    return Program(rules=rules, idb_order=names, gfp=frozenset(gfp))


def gen_alternating(rng: random.Random, k: int, idb_count: int) -> Program:
    """One mixed component with exactly k blocks.

    Block j has a leader l{j}; leaders form a cycle (each references the
    next-inner one, the innermost references the outermost). Spare
    predicates become combiners in blocks 2..k: a combiner reads only
    its block's leader plus the database, is updated after the leader,
    and is read back by the leader. That keeps every block's value a
    one-step function of its leader, so the literal pass counts reach
    the fixpoint: the innermost block stays a single predicate and each
    outer level needs one pass to seed the combiners plus at most n
    productive ones.
    """
    if k < 2:
        raise ValueError("an alternating program needs at least two blocks")
    extras = idb_count - k
    combiners: dict[int, list[str]] = {j: [] for j in range(2, k + 1)}
    for _ in range(extras):
        j = rng.randrange(2, k + 1)
        combiners[j].append(f"c{j}x{len(combiners[j]) + 1}")

    order = []
    for j in range(1, k + 1):
        order.append(f"l{j}")
        order.extend(combiners.get(j, []))

    first = rng.choice(("lfp", "gfp"))
    other = "gfp" if first == "lfp" else "lfp"
    gfp = set()
    for j in range(1, k + 1):
        if (first if j % 2 == 1 else other) == "gfp":
            gfp.add(f"l{j}")
            gfp.update(combiners.get(j, []))

    rules = [_link_rule(rng, "l1", f"l{k}")]
    if rng.random() < 0.5:
        rules.append(_base_rule(rng, "l1"))
    if rng.random() < 0.5:
        rules.append(_self_rule(rng, "l1"))
    for j in range(2, k + 1):
        leader = f"l{j}"
        rules.append(_link_rule(rng, leader, f"l{j - 1}"))
        for c in combiners[j]:
            rules.append(_link_rule(rng, leader, c))
            rules.append(_link_rule(rng, c, leader))
            if rng.random() < 0.4:
                rules.append(_base_rule(rng, c))
        if rng.random() < 0.5:
            rules.append(_self_rule(rng, leader))

    return Program(rules=rules, idb_order=order, gfp=frozenset(gfp),
                   order_declared=True)


def run_trial(rng: random.Random, trial: int, config: BenchConfig) -> TrialResult:
    db = gen_database(rng, config.n)
    if config.k == 1:
        program = gen_stratified(rng, config.idbs)
        result = eval_queries(program, db)
        measured = result.stats.productive_rounds
        sizes = tuple(1 for _ in range(config.idbs))
        bound = stratified_bound(config.n, config.idbs)
    else:
        program = gen_alternating(rng, config.k, config.idbs)
        result = eval_queries(program, db, mode=MODE_LITERAL)
        measured = result.stats.t_applications
        structure = analyze(program)
        sizes = tuple(len(b.idbs) for b in structure.sccs[0].blocks)
        bound = alternating_bound(config.n, sizes)
    oracle_agrees = None
    if config.n <= 5:
        reference = eval_nested(EvaluationContext(program, db))
        oracle_agrees = reference.answers == result.answers
    return TrialResult(trial=trial, n=config.n, k=config.k, idbs=config.idbs,
                       block_sizes=sizes, measured=measured, bound=bound,
                       oracle_agrees=oracle_agrees)


def run_bench(config: BenchConfig) -> list[TrialResult]:
    rng = random.Random(config.seed)
    return [run_trial(rng, t, config) for t in range(config.trials)]


def write_csv(results: list[TrialResult], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "n", "k", "idbs", "blocks",
                         "measured", "bound", "ratio", "oracle"])
        for r in results:
            oracle = "" if r.oracle_agrees is None else str(r.oracle_agrees).lower()
            writer.writerow([r.trial, r.n, r.k, r.idbs,
                             "+".join(str(m) for m in r.block_sizes),
                             r.measured, r.bound, f"{r.ratio:.4f}", oracle])


def write_plot(results: list[TrialResult], path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    trials = [r.trial for r in results]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(trials, [r.bound for r in results], "-", color="tab:red",
            label="bound", linewidth=1.5)
    ax.plot(trials, [r.measured for r in results], "o", color="tab:blue",
            label="measured", markersize=4)
    ax.set_xlabel("trial")
    ax.set_ylabel("step count")
    r0 = results[0]
    ax.set_title(f"measured vs bound (n={r0.n}, k={r0.k}, idbs={r0.idbs})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def report(config: BenchConfig, out_dir: str) -> list[TrialResult]:
    results = run_bench(config)
    os.makedirs(out_dir, exist_ok=True)
    write_csv(results, os.path.join(out_dir, "bench.csv"))
    write_plot(results, os.path.join(out_dir, "bench.png"))
    return results
