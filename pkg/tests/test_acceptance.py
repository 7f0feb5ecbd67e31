"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS or FAIL line that is repeated in the pytest
terminal summary.
"""

import csv
import io
import random
import time

from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CORPUS, GOLD, C, T, encode_decode, parse_term, record, use_alpha_equal
from oracles import ground_satisfiable, random_ground_problem, random_horn_problem
from parakeet.cli import main
from parakeet.clausify import clausify_problem
from parakeet.instantiation import infer_proof, transform
from parakeet.kernel import SubstRule, axiom_leaves, check_proof, count_steps, iter_tree
from parakeet.parser import parse_file
from parakeet.pipeline import (
    RunOptions,
    attempt,
    instantiate_problem,
    instantiations,
    prove_problem,
    render,
    run_instantiate,
    run_replay,
)
from parakeet.prover import ProverLimits, Refutation, prove
from parakeet.surface import SApp, SConst, SVar, alpha_eq, has_lambda, normalize, show
from parakeet.terms import Subst, apply_subst, compose, subst_clause
from strategies import substitutions, terms
from test_surface import lam_terms


def _g(text):
    return T(text, GOLD)


# 1 -------------------------------------------------------------------------


def test_criterion_1_successor_example():
    start = time.perf_counter()
    problem = parse_file(CORPUS / "worked_example.p")
    report, att = run_instantiate(problem, RunOptions())
    elapsed = time.perf_counter() - start
    uses = infer_proof(att.proof)
    expected = [
        (C("~less(1,Suc(Suc(x)))", GOLD), {}),
        (C("~less(m,n) | less(Suc(m),Suc(n))", GOLD), {"y": _g("Suc(x)"), "m": _g("0"), "n": _g("Suc(x)")}),
        (C("Suc(0) = 1", GOLD), {"y": _g("Suc(x)")}),
        (C("less(0,Suc(n))", GOLD), {"n": _g("x")}),
    ]
    infer_ok = len(uses) == len(expected) and all(
        use_alpha_equal(c, s, u.clause, u.sub) for (c, s), u in zip(expected, uses)
    )
    insts = {i.fact: i.bindings for i in report.instantiations}
    sugg_ok = (
        insts.get("F1") == {"m": SConst("0"), "n": parse_term("Suc x")}
        and insts.get("F3") == {"n": SConst("x")}
        and insts.get("F2") == {}
        and "F1 with {m -> 0, n -> Suc(x)}" in report.suggestions
        and "F3 with {n -> x}" in report.suggestions
    )
    ok = infer_ok and sugg_ok and elapsed < 1.0
    record(1, ok, f"infer matches={infer_ok}, suggestions={report.suggestions}, {elapsed:.3f}s")
    assert ok


# 2 -------------------------------------------------------------------------


def _theorem1_holds(proof) -> tuple[bool, str]:
    uses = {(u.clause, u.sub) for u in infer_proof(proof)}
    t = transform(proof)
    if check_proof(t) is not None:
        return False, "transformed proof does not check"
    if any(isinstance(n.rule, SubstRule) for n in iter_tree(t.root)):
        return False, "Subst step left"
    if count_steps(t) > count_steps(proof):
        return False, "proof grew"
    for leaf in axiom_leaves(t.root):
        src = t.registry.get(leaf)
        if src is None or src.origin is None or (src.origin, src.sub) not in uses:
            return False, f"leaf {leaf} is not an instantiated axiom"
        if subst_clause(src.sub, src.origin) != leaf:
            return False, f"leaf {leaf} disagrees with its source"
    return True, ""


def _random_provable(n: int, seed: int = 2024):
    rng = random.Random(seed)
    found = []
    attempts = 0
    while len(found) < n and attempts < 5000:
        attempts += 1
        facts, goal = random_horn_problem(rng)
        out = prove(facts, goal, ProverLimits(2000, 2))
        if isinstance(out, Refutation):
            found.append(out.proof)
    return found


def test_criterion_2_theorem_1_suite():
    start = time.perf_counter()
    proofs = []
    for path in sorted(CORPUS.iterdir()):
        att = prove_problem(parse_file(path), RunOptions())
        assert att.proof is not None, path.name
        proofs.append((path.name, att.proof))
    random_proofs = _random_provable(100)
    proofs += [(f"random#{i}", p) for i, p in enumerate(random_proofs)]
    failures = []
    for name, p in proofs:
        ok, why = _theorem1_holds(p)
        if not ok:
            failures.append(f"{name}: {why}")
    elapsed = time.perf_counter() - start
    ok = not failures and len(random_proofs) >= 100 and elapsed < 60
    record(
        2,
        ok,
        f"{len(proofs)} proofs ({len(random_proofs)} random), {len(failures)} failures, {elapsed:.1f}s",
    )
    assert ok, failures[:5]


# 3 -------------------------------------------------------------------------


def test_criterion_3_merged_instantiation():
    problem = parse_file(CORPUS / "even_power.p")
    report, att = run_instantiate(problem, RunOptions())
    merged = [i for i in report.instantiations if i.fact == "E"]
    want = {"x": SConst("a"), "y": SConst("b"), "n": SConst("2")}
    one = len(merged) == 1 and merged[0].bindings == want
    # the instantiated fact clausifies to exactly the instantiated clauses
    used = {subst_clause(u.sub, u.clause) for u in infer_proof(att.proof) if u.source.name == "E"}
    replayed = clausify_problem(instantiate_problem(problem, report.instantiations))
    reclausified = {c for f in replayed.facts for c in f.clauses}
    same = reclausified == used and len(used) == 2
    ok = one and same
    record(3, ok, f"suggestions={report.suggestions}, reclausified matches={same}")
    assert ok


# 4 -------------------------------------------------------------------------


def test_criterion_4_lambda_instantiation():
    problem = parse_file(CORPUS / "surj_lambda.p")
    report, _ = run_instantiate(problem, RunOptions())
    (inst,) = [i for i in report.instantiations if i.fact == "surjD"]
    f_ok = alpha_eq(inst.bindings.get("f"), parse_term("\\c. g (Suc c)"))
    y = inst.bindings.get("y")
    witness = SApp(SConst("Suc"), SApp(SConst("g"), SVar("_w%0")))
    y_ok = y is not None and show(y) == "Suc (g _)" and alpha_eq(y, witness, wildcards_equal=True)
    ok = f_ok and y_ok
    record(4, ok, render(inst, problem.calls))
    assert ok


# 5 -------------------------------------------------------------------------


def test_criterion_5_extensionality():
    limits = ProverLimits(10_000, 60)
    inst5 = parse_file(CORPUS / "surj_ext_instantiated.p")
    without = attempt(inst5, limits, False, "lifting")
    with_ext = attempt(inst5, limits, True, "lifting")
    example_ok = without.status != "refutation" and with_ext.status == "refutation"

    needs = parse_file(CORPUS / "needs_ext.p")
    orig_without = attempt(needs, limits, False, "lifting")
    report = run_replay(needs, RunOptions(limits=limits))
    fixture_ok = (
        orig_without.status != "refutation"
        and report.outcome == "refutation"
        and report.ext_used
        and report.replay_outcome == "refutation"
        and not report.replay_ext_used
    )
    ok = example_ok and fixture_ok
    record(
        5,
        ok,
        f"instantiated example: no ext -> {without.status} ({without.stats.generated} generated), "
        f"ext -> {with_ext.status}; needs_ext: original without ext -> {orig_without.status}, "
        f"replay ext used={report.replay_ext_used}",
    )
    assert ok


# 6 -------------------------------------------------------------------------

_LAW_FAILURES: list = []
_ROUND_TRIP_FAILURES: list = []
_COUNTS = {"law": 0, "exact": 0, "lambda": 0}


@settings(max_examples=1000, deadline=None, database=None)
@given(substitutions(), substitutions(), terms())
def _composition_law(s1, s2, t):
    _COUNTS["law"] += 1
    if apply_subst(compose(s1, s2), t) != apply_subst(s1, apply_subst(s2, t)):
        _LAW_FAILURES.append((s1, s2, t))


def _first_order_terms():
    leaves = st.sampled_from([SConst("a"), SConst("b"), SConst("f"), SVar("x"), SVar("y")])
    return st.recursive(leaves, lambda ch: st.tuples(ch, ch).map(lambda p: SApp(*p)), max_leaves=8)


@settings(max_examples=1000, deadline=None, database=None)
@given(_first_order_terms(), st.sampled_from(["lifting", "combinators"]))
def _round_trip_exact(t, mode):
    _COUNTS["exact"] += 1
    decoded, _ = encode_decode(t, mode, as_fact=True)
    if decoded != t:
        _ROUND_TRIP_FAILURES.append(("exact", mode, t, decoded))


@settings(max_examples=1000, deadline=None, database=None)
@given(lam_terms(), st.sampled_from(["lifting", "combinators"]), st.booleans())
def _round_trip_lambda(t, mode, as_fact):
    _COUNTS["lambda"] += 1
    try:
        expected = normalize(t, budget=2000)
    except Exception:
        return
    decoded, _ = encode_decode(t, mode, as_fact)
    good = decoded == t if not has_lambda(t) else alpha_eq(decoded, expected)
    if not good:
        _ROUND_TRIP_FAILURES.append(("lambda", mode, t, decoded))


def test_criterion_6_property_suites():
    _composition_law()
    _round_trip_exact()
    _round_trip_lambda()
    ok = not _LAW_FAILURES and not _ROUND_TRIP_FAILURES and min(_COUNTS.values()) >= 1000
    record(
        6,
        ok,
        f"composition law {_COUNTS['law']} cases, round trip {_COUNTS['exact']} exact + "
        f"{_COUNTS['lambda']} with lambdas, failures {len(_LAW_FAILURES) + len(_ROUND_TRIP_FAILURES)}",
    )
    assert ok, (_LAW_FAILURES[:3], _ROUND_TRIP_FAILURES[:3])


# 7 -------------------------------------------------------------------------


def test_criterion_7_bench(tmp_path, capsys):
    target = tmp_path / "bench.csv"
    code = main(["bench", str(CORPUS), "--format", "csv", "--csv", str(target)])
    capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    refuted = [r for r in rows if r["outcome"] == "refutation"]
    not_worse = [
        r for r in refuted if r["replay_outcome"] == "refutation" and int(r["replay_generated"]) <= int(r["generated"])
    ]
    steps_ok = all(r["steps_after"] and int(r["steps_after"]) <= int(r["steps_before"]) for r in refuted)
    rate = len(not_worse) / len(rows) if rows else 0.0
    reductions = sorted(float(r["reduction"]) for r in refuted if r["reduction"] != "")
    ok = code == 0 and len(refuted) == len(rows) and rate >= 0.8 and steps_ok
    record(
        7,
        ok,
        f"{len(rows)} problems, replay not worse on {rate:.0%}, steps never grow={steps_ok}, "
        f"generated-clause reductions {reductions}",
    )
    assert ok


# 8 -------------------------------------------------------------------------


def test_criterion_8_ground_soundness():
    rng = random.Random(8)
    unsound, missed, unsat = [], [], 0
    for i in range(200):
        clauses = random_ground_problem(rng)
        sat = ground_satisfiable(clauses)
        unsat += not sat
        out = prove([(f"c{j}", c) for j, c in enumerate(clauses)], [], ProverLimits(5000, 5))
        if sat and out.status == "refutation":
            unsound.append(i)
        if not sat and out.status != "refutation":
            missed.append(i)
    ok = not unsound and not missed
    record(8, ok, f"200 problems ({unsat} unsatisfiable), unsound {unsound}, missed {missed}")
    assert ok
