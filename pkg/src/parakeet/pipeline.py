"""End-to-end runs: prove a problem, suggest fact instantiations, replay them."""

from __future__ import annotations

import statistics
from dataclasses import asdict, dataclass, field

from .clausify import ClausifiedProblem, clausify_problem
from .decoder import DecodeContext, decode_instantiation
from .instantiation import Instantiation, filter_fact_uses, infer_proof, merge_all, transform
from .kernel import Proof, SubstRule, check_proof, count_steps, format_proof, iter_tree
from .parser import Fact, Problem
from .prover import ProverLimits, Refutation, SearchStats, prove
from .surface import formula_free_vars, formula_subst, normalize_formula, show

EXT_MODES = ("auto", "on", "off")
REPLAY_FACTOR = 5.0
REPLAY_FLOOR_SECONDS = 1.0


@dataclass
class RunOptions:
    limits: ProverLimits = field(default_factory=ProverLimits)
    # None means: use the problem file's option (or its default)
    lambda_mode: str | None = None
    ext: str | None = None
    undefined: bool | None = None


@dataclass
class Attempt:
    status: str
    stats: SearchStats
    ext_used: bool
    proof: Proof | None = None
    clausified: ClausifiedProblem | None = None


@dataclass
class RunReport:
    problem: str
    outcome: str
    proof_text: str = ""
    suggestions: list[str] = field(default_factory=list)
    instantiations: list[Instantiation] = field(default_factory=list)
    stats: SearchStats | None = None
    ext_used: bool = False
    steps_before: int | None = None
    steps_after: int | None = None
    transform_ok: bool | None = None
    subst_free: bool | None = None
    replay_outcome: str | None = None
    replay_stats: SearchStats | None = None
    replay_ext_used: bool = False
    errors: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "problem": self.problem,
            "outcome": self.outcome,
            "suggestions": list(self.suggestions),
            "stats": asdict(self.stats) if self.stats else None,
            "ext_used": self.ext_used,
            "steps_before": self.steps_before,
            "steps_after": self.steps_after,
            "transform_ok": self.transform_ok,
            "subst_free": self.subst_free,
            "replay_outcome": self.replay_outcome,
            "replay_stats": asdict(self.replay_stats) if self.replay_stats else None,
            "replay_ext_used": self.replay_ext_used,
            "errors": list(self.errors),
        }
        if self.proof_text:
            out["proof"] = self.proof_text
        return out


def _lambda_mode(problem: Problem, opts: RunOptions) -> str:
    return opts.lambda_mode or problem.options.lambda_mode


def _undefined(problem: Problem, opts: RunOptions) -> bool:
    return problem.options.undefined if opts.undefined is None else opts.undefined


def _ext_rounds(problem: Problem, opts: RunOptions) -> list[bool]:
    mode = opts.ext
    if mode is None:
        return [problem.options.ext]
    if mode not in EXT_MODES:
        raise ValueError(f"ext mode must be one of {', '.join(EXT_MODES)}")
    return {"on": [True], "off": [False], "auto": [False, True]}[mode]


def attempt(problem: Problem, limits: ProverLimits, use_ext: bool, lambda_mode: str) -> Attempt:
    cp = clausify_problem(problem, lambda_mode)
    lim = ProverLimits(limits.max_generated_clauses, limits.max_seconds, use_ext, limits.seed)
    outcome = prove(cp.axioms(), cp.goal_clauses(), lim)
    proof = outcome.proof if isinstance(outcome, Refutation) else None
    return Attempt(outcome.status, outcome.stats, use_ext, proof, cp)


def prove_problem(problem: Problem, opts: RunOptions) -> Attempt:
    mode = _lambda_mode(problem, opts)
    result = None
    for use_ext in _ext_rounds(problem, opts):
        result = attempt(problem, opts.limits, use_ext, mode)
        if result.proof is not None:
            break
    return result


# -- suggestions --------------------------------------------------------------


def render(inst: Instantiation, calls: dict[str, int] | None = None) -> str:
    body = ", ".join(f"{v} -> {show(t, calls)}" for v, t in inst.bindings.items())
    return f"{inst.fact} with {{{body}}}"


def instantiations(problem: Problem, cp: ClausifiedProblem, proof: Proof, undefined: bool) -> list[Instantiation]:
    """Decoded, finalized and merged instantiations of the problem's facts."""
    ctx = DecodeContext.for_problem(cp, undefined)
    order = {f.name: f.free_vars for f in problem.facts}
    raws = [r for r in filter_fact_uses(infer_proof(proof), proof.registry) if r.fact in order]
    decoded = [decode_instantiation(r, ctx, order[r.fact]) for r in raws]
    merged = merge_all(decoded)
    for inst in merged:
        pos = {v: i for i, v in enumerate(order[inst.fact])}
        inst.bindings = dict(sorted(inst.bindings.items(), key=lambda kv: pos.get(kv[0], len(pos))))
    rank = {f.name: i for i, f in enumerate(problem.facts)}
    return sorted(merged, key=lambda inst: rank[inst.fact])


def instantiate_problem(problem: Problem, insts: list[Instantiation]) -> Problem:
    """The problem restricted to the used facts, each replaced by its instances."""
    facts: list[Fact] = []
    seen: dict[str, int] = {}
    for inst in insts:
        fact = problem.fact(inst.fact)
        seen[fact.name] = seen.get(fact.name, 0) + 1
        name = fact.name if seen[fact.name] == 1 else f"{fact.name}#{seen[fact.name]}"
        f = normalize_formula(formula_subst(fact.formula, dict(inst.bindings)))
        facts.append(Fact(name, f, formula_free_vars(f), fact.line))
    return Problem(
        facts=facts,
        goal=problem.goal,
        options=problem.options,
        negated_goals=list(problem.negated_goals),
        calls=dict(problem.calls),
        explicit=set(problem.explicit),
        name=problem.name,
    )


def is_subst_free(p: Proof) -> bool:
    return not any(isinstance(n.rule, SubstRule) for n in iter_tree(p.root))


def run_instantiate(problem: Problem, opts: RunOptions, with_proof: bool = False) -> tuple[RunReport, Attempt]:
    att = prove_problem(problem, opts)
    report = RunReport(problem.name, att.status, stats=att.stats, ext_used=att.ext_used)
    if att.proof is None:
        return report, att
    if with_proof:
        report.proof_text = format_proof(att.proof)
    insts = instantiations(problem, att.clausified, att.proof, _undefined(problem, opts))
    report.instantiations = insts
    for inst in insts:
        report.errors.extend(inst.errors)
    if any(not inst.is_empty() for inst in insts):
        report.suggestions = [render(inst, problem.calls) for inst in insts]
    report.steps_before = count_steps(att.proof)
    try:
        t = transform(att.proof)
    except ValueError as exc:
        report.errors.append(f"transform failed: {exc}")
        report.transform_ok = False
        return report, att
    report.steps_after = count_steps(t)
    report.subst_free = is_subst_free(t)
    report.transform_ok = check_proof(t) is None and report.steps_after <= report.steps_before
    return report, att


def run_replay(problem: Problem, opts: RunOptions, with_proof: bool = False) -> RunReport:
    report, att = run_instantiate(problem, opts, with_proof)
    if att.proof is None:
        return report
    replayed = instantiate_problem(problem, report.instantiations)
    limits = ProverLimits(
        opts.limits.max_generated_clauses,
        max(REPLAY_FACTOR * att.stats.elapsed, REPLAY_FLOOR_SECONDS),
        False,
        opts.limits.seed,
    )
    rounds = [False] if opts.ext == "off" else [False, True]
    mode = _lambda_mode(problem, opts)
    result = None
    for use_ext in rounds:
        try:
            result = attempt(replayed, limits, use_ext, mode)
        except ValueError as exc:
            report.errors.append(f"replay failed: {exc}")
            return report
        if result.proof is not None:
            break
    report.replay_outcome = result.status
    report.replay_stats = result.stats
    report.replay_ext_used = result.ext_used
    return report


# -- benchmark ----------------------------------------------------------------

BENCH_COLUMNS = [
    "problem",
    "outcome",
    "generated",
    "elapsed",
    "steps_before",
    "steps_after",
    "transform_ok",
    "subst_free",
    "replay_outcome",
    "replay_generated",
    "replay_elapsed",
    "replay_ext",
    "reduction",
    "error",
]


def bench_row(name: str, report: RunReport | None, error: str = "") -> dict:
    if report is None:
        row = {c: "" for c in BENCH_COLUMNS}
        row.update(problem=name, outcome="error", error=error)
        return row
    gen = report.stats.generated if report.stats else ""
    rgen = report.replay_stats.generated if report.replay_stats else ""
    reduction = ""
    if report.replay_outcome == "refutation" and gen:
        reduction = round(1.0 - rgen / gen, 4)
    return {
        "problem": name,
        "outcome": report.outcome,
        "generated": gen,
        "elapsed": round(report.stats.elapsed, 4) if report.stats else "",
        "steps_before": report.steps_before if report.steps_before is not None else "",
        "steps_after": report.steps_after if report.steps_after is not None else "",
        "transform_ok": "" if report.transform_ok is None else report.transform_ok,
        "subst_free": "" if report.subst_free is None else report.subst_free,
        "replay_outcome": report.replay_outcome or "",
        "replay_generated": rgen,
        "replay_elapsed": round(report.replay_stats.elapsed, 4) if report.replay_stats else "",
        "replay_ext": report.replay_ext_used if report.replay_outcome else "",
        "reduction": reduction,
        "error": "; ".join(report.errors),
    }


def summarize(rows: list[dict]) -> dict:
    n = len(rows)
    refuted = [r for r in rows if r["outcome"] == "refutation"]
    replayed = [r for r in refuted if r["replay_outcome"] == "refutation"]
    reductions = [r["reduction"] for r in replayed if r["reduction"] != ""]

    def rate(k, total):
        return round(k / total, 4) if total else 0.0

    return {
        "problems": n,
        "errors": sum(r["outcome"] == "error" for r in rows),
        "refutation_rate": rate(len(refuted), n),
        "transform_success_rate": rate(sum(r["transform_ok"] is True for r in refuted), len(refuted)),
        "subst_free_rate": rate(sum(r["subst_free"] is True for r in refuted), len(refuted)),
        "replay_success_rate": rate(len(replayed), len(refuted)),
        "replay_not_worse_rate": rate(
            sum(r["replay_generated"] <= r["generated"] for r in replayed), len(refuted)
        ),
        "median_reduction": round(statistics.median(reductions), 4) if reductions else 0.0,
    }
