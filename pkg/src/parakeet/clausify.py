"""Clausification of surface formulas into first-order clauses.

Steps per formula: beta-eta normalization, negation normal form, outside-in
Skolemization (Skolem terms take every universal in scope, fact variables
first), CNF by distribution with a definitional fallback, encoding of
lambdas (lifting or SKBCI combinators) and finally the first-order encoding
where symbols with a fixed minimum arity are applied directly and anything
else goes through the binary ``app`` symbol.

Fact variables keep their names in the clauses, so a substitution found by
the prover can be read back as an instantiation of the fact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count

from .kernel import AxiomSource
from .parser import Fact, Problem
from .surface import (
    FAll,
    FAnd,
    FAtom,
    FEq,
    FEx,
    FIff,
    FImp,
    FNot,
    FOr,
    Formula,
    SApp,
    SConst,
    SLam,
    STerm,
    SVar,
    alpha_key,
    consts,
    formula_free_vars,
    formula_subst,
    formula_terms,
    free_vars,
    lams,
    mk_app,
    normalize_formula,
    spine,
    subst,
)
from .terms import APP, COMBINATORS, EQ, LIFT_PREFIX, SKOLEM_PREFIX, App, Clause, Literal, Term, Var

CNF_LIMIT = 64


class ClausifyError(ValueError):
    pass


@dataclass(frozen=True)
class SkolemInfo:
    name: str
    arity: int
    deps: tuple[str, ...]
    origin: str


@dataclass(frozen=True)
class LiftDef:
    """``symbol p1 ... pn = body`` for a lifted lambda."""

    symbol: str
    params: tuple[str, ...]
    body: STerm

    def as_lambda(self) -> STerm:
        return lams(self.params, self.body)


# surface literal: (positive, FAtom | FEq)
SLit = tuple


@dataclass
class ClausifiedFact:
    name: str
    clauses: list[Clause]
    var_maps: list[dict[str, str]]
    skolems: list[SkolemInfo] = field(default_factory=list)
    lifted: list[LiftDef] = field(default_factory=list)
    kind: str = "fact"

    def sources(self) -> list[tuple[AxiomSource, Clause]]:
        return [
            (AxiomSource(self.name, self.kind, tuple(sorted(vm.items()))), c)
            for c, vm in zip(self.clauses, self.var_maps)
        ]


@dataclass
class ClausifiedProblem:
    facts: list[ClausifiedFact]
    goal: ClausifiedFact
    defs: list[tuple[AxiomSource, Clause]]
    skolems: dict[str, SkolemInfo]
    lifted: dict[str, LiftDef]
    combinators: set[str]
    arities: dict[str, int]
    lambda_mode: str

    def axioms(self) -> list[tuple[AxiomSource, Clause]]:
        out = []
        for f in self.facts:
            out.extend(f.sources())
        return out + list(self.defs)

    def goal_clauses(self) -> list[Clause]:
        return list(self.goal.clauses)

    def symbols(self) -> set[str]:
        out = set()
        for _, c in self.axioms():
            out |= _clause_symbols(c)
        for c in self.goal.clauses:
            out |= _clause_symbols(c)
        return out


def _clause_symbols(c: Clause) -> set[str]:
    out = set()
    stack = [l.atom for l in c]
    while stack:
        t = stack.pop()
        if isinstance(t, App):
            out.add(t.sym)
            stack.extend(t.args)
    return out


# -- combinator definitions -------------------------------------------------


def _v(n):
    return SVar(n)


COMBINATOR_DEFS: dict[str, tuple[tuple[str, ...], STerm]] = {
    "I": (("x",), _v("x")),
    "K": (("x", "y"), _v("x")),
    "S": (("f", "g", "x"), SApp(SApp(_v("f"), _v("x")), SApp(_v("g"), _v("x")))),
    "B": (("f", "g", "x"), SApp(_v("f"), SApp(_v("g"), _v("x")))),
    "C": (("f", "g", "x"), SApp(SApp(_v("f"), _v("x")), _v("g"))),
}


def combinator_lambda(name: str) -> STerm:
    params, body = COMBINATOR_DEFS[name]
    return lams(params, body)


def bracket(t: STerm, used: set[str] | None = None) -> STerm:
    """Turner-style bracket abstraction of every lambda in ``t``."""
    used = used if used is not None else set()
    if isinstance(t, SLam):
        return _abstract(t.var, bracket(t.body, used), used)
    if isinstance(t, SApp):
        return SApp(bracket(t.fun, used), bracket(t.arg, used))
    return t


def _abstract(x: str, t: STerm, used: set[str]) -> STerm:
    def comb(name):
        used.add(name)
        return SConst(name)

    if t == SVar(x):
        return comb("I")
    if x not in free_vars(t):
        return SApp(comb("K"), t)
    # t is an application mentioning x
    f, a = t.fun, t.arg
    in_f, in_a = x in free_vars(f), x in free_vars(a)
    if a == SVar(x) and not in_f:
        return f
    if not in_f:
        return mk_app(comb("B"), [f, _abstract(x, a, used)])
    if not in_a:
        return mk_app(comb("C"), [_abstract(x, f, used), a])
    return mk_app(comb("S"), [_abstract(x, f, used), _abstract(x, a, used)])


# -- the clausifier ---------------------------------------------------------


class Clausifier:
    """Shared state (Skolem and lifting counters, tables) for one problem."""

    def __init__(self, lambda_mode: str = "lifting"):
        if lambda_mode not in ("lifting", "combinators"):
            raise ClausifyError(f"unknown lambda mode {lambda_mode!r}")
        self.lambda_mode = lambda_mode
        self.skolems: dict[str, SkolemInfo] = {}
        self.lifted: dict[str, LiftDef] = {}
        self._lift_keys: dict = {}
        self.combinators: set[str] = set()
        self._sk = count()
        self._ll = count()
        self._df = count()

    # NNF ---------------------------------------------------------------

    def nnf(self, f: Formula, positive: bool = True) -> Formula:
        if isinstance(f, (FAtom, FEq)):
            return f if positive else FNot(f)
        if isinstance(f, FNot):
            return self.nnf(f.body, not positive)
        if isinstance(f, FAnd):
            cls = FAnd if positive else FOr
            return cls(self.nnf(f.lhs, positive), self.nnf(f.rhs, positive))
        if isinstance(f, FOr):
            cls = FOr if positive else FAnd
            return cls(self.nnf(f.lhs, positive), self.nnf(f.rhs, positive))
        if isinstance(f, FImp):
            if positive:
                return FOr(self.nnf(f.lhs, False), self.nnf(f.rhs, True))
            return FAnd(self.nnf(f.lhs, True), self.nnf(f.rhs, False))
        if isinstance(f, FIff):
            a, b = f.lhs, f.rhs
            if positive:
                return FAnd(
                    FOr(self.nnf(a, False), self.nnf(b, True)),
                    FOr(self.nnf(a, True), self.nnf(b, False)),
                )
            return FAnd(
                FOr(self.nnf(a, True), self.nnf(b, True)),
                FOr(self.nnf(a, False), self.nnf(b, False)),
            )
        if isinstance(f, FAll):
            cls = FAll if positive else FEx
            return cls(f.var, self.nnf(f.body, positive))
        if isinstance(f, FEx):
            cls = FEx if positive else FAll
            return cls(f.var, self.nnf(f.body, positive))
        raise TypeError(f"not a formula: {f!r}")

    # Skolemization ------------------------------------------------------

    def skolemize(self, f: Formula, scope: list[str], used: set[str], origin: str) -> Formula:
        if isinstance(f, (FAtom, FEq, FNot)):
            return f
        if isinstance(f, (FAnd, FOr)):
            return type(f)(
                self.skolemize(f.lhs, scope, used, origin),
                self.skolemize(f.rhs, scope, used, origin),
            )
        if isinstance(f, FAll):
            name = f.var
            k = 0
            while name in used:
                k += 1
                name = f"{f.var}%{k}"
            used.add(name)
            body = formula_subst(f.body, {f.var: SVar(name)}) if name != f.var else f.body
            return self.skolemize(body, scope + [name], used, origin)
        if isinstance(f, FEx):
            sym = f"{SKOLEM_PREFIX}{next(self._sk)}"
            self.skolems[sym] = SkolemInfo(sym, len(scope), tuple(scope), origin)
            term = mk_app(SConst(sym), [SVar(v) for v in scope])
            return self.skolemize(formula_subst(f.body, {f.var: term}), scope, used, origin)
        raise TypeError(f"unexpected formula in NNF: {f!r}")

    # CNF ----------------------------------------------------------------

    def cnf(self, f: Formula, origin: str) -> list[list[SLit]]:
        if isinstance(f, FNot):
            return [[(False, f.body)]]
        if isinstance(f, (FAtom, FEq)):
            return [[(True, f)]]
        if isinstance(f, FAnd):
            return self.cnf(f.lhs, origin) + self.cnf(f.rhs, origin)
        fa, fb = f.lhs, f.rhs
        a, b = self.cnf(fa, origin), self.cnf(fb, origin)
        if len(a) * len(b) > CNF_LIMIT:
            if len(a) > len(b):
                a, b, fa, fb = b, a, fb, fa
            b = self._define(fb, b, origin)
        return [x + y for x in a for y in b]

    def _define(self, sub: Formula, clauses: list[list[SLit]], origin: str) -> list[list[SLit]]:
        """Name ``sub`` by a fresh predicate; return the one-literal stand-in."""
        sym = f"{SKOLEM_PREFIX}def{next(self._df)}"
        vs = formula_free_vars(sub)
        self.skolems[sym] = SkolemInfo(sym, len(vs), tuple(vs), origin)
        atom = FAtom(mk_app(SConst(sym), [SVar(v) for v in vs]))
        self._pending_defs.extend([[(False, atom)] + c for c in clauses])
        return [[(True, atom)]]

    # lambdas ------------------------------------------------------------

    def lift(self, t: STerm) -> STerm:
        if isinstance(t, SLam):
            names, body = [], t
            while isinstance(body, SLam):
                if body.var in names:
                    # a repeated binder shadows the outer one
                    fresh = body.var
                    while fresh in names or fresh in free_vars(body.body):
                        fresh += "'"
                    body = SLam(fresh, subst(body.body, {body.var: SVar(fresh)}))
                names.append(body.var)
                body = body.body
            body = self.lift(body)
            closed_over = [v for v in free_vars(body) if v not in names]
            key = alpha_key(lams(closed_over + names, body))
            sym = self._lift_keys.get(key)
            if sym is None:
                sym = f"{LIFT_PREFIX}{next(self._ll)}"
                self._lift_keys[key] = sym
                self.lifted[sym] = LiftDef(sym, tuple(closed_over + names), body)
            return mk_app(SConst(sym), [SVar(v) for v in closed_over])
        if isinstance(t, SApp):
            return SApp(self.lift(t.fun), self.lift(t.arg))
        return t

    def encode_lambdas(self, t: STerm) -> STerm:
        if self.lambda_mode == "lifting":
            return self.lift(t)
        return bracket(t, self.combinators)

    # per formula ---------------------------------------------------------

    def surface_clauses(self, f: Formula, scope: list[str], origin: str, negate: bool = False) -> list[list[SLit]]:
        f = normalize_formula(f)
        f = self.nnf(f, not negate)
        f = self.skolemize(f, list(scope), set(scope), origin)
        self._pending_defs: list[list[SLit]] = []
        clauses = self.cnf(f, origin) + self._pending_defs
        out = []
        for c in clauses:
            lits: list[SLit] = []
            for pol, atom in c:
                atom = _map_atom(atom, self.encode_lambdas)
                if (pol, atom) not in lits:
                    lits.append((pol, atom))
            if any((not p, a) in lits for p, a in lits):
                continue
            if any(p and isinstance(a, FEq) and a.lhs == a.rhs for p, a in lits):
                continue
            out.append(lits)
        return out

    def definition_clauses(self) -> list[tuple[str, list[SLit]]]:
        out = []
        for sym, d in self.lifted.items():
            lhs = mk_app(SConst(sym), [SVar(p) for p in d.params])
            out.append((sym, [(True, FEq(lhs, d.body))]))
        for name in COMBINATORS:
            if name in self.combinators:
                params, body = COMBINATOR_DEFS[name]
                lhs = mk_app(SConst(name), [SVar(p) for p in params])
                out.append((name, [(True, FEq(lhs, body))]))
        return out


def _map_atom(atom, fn):
    if isinstance(atom, FAtom):
        return FAtom(fn(atom.term))
    return FEq(fn(atom.lhs), fn(atom.rhs))


# -- first-order encoding ----------------------------------------------------


def _reserved_curried(name: str, mode: str) -> bool:
    return name.startswith(LIFT_PREFIX) or (mode == "combinators" and name in COMBINATORS)


def compute_arities(clause_lists, mode: str) -> tuple[dict[str, int], dict[str, int]]:
    """Minimum applied arity of each constant in term position, and predicate arities."""
    term_ar: dict[str, int] = {}
    pred_ar: dict[str, int] = {}

    def visit(t: STerm):
        head, args = spine(t)
        if isinstance(head, SConst):
            n = 0 if _reserved_curried(head.name, mode) else len(args)
            term_ar[head.name] = min(term_ar.get(head.name, n), n)
        elif isinstance(head, SLam):
            raise ClausifyError("lambda left after encoding")
        for a in args:
            visit(a)

    for clauses in clause_lists:
        for c in clauses:
            for _, atom in c:
                if isinstance(atom, FEq):
                    visit(atom.lhs)
                    visit(atom.rhs)
                    continue
                head, args = spine(atom.term)
                if not isinstance(head, SConst):
                    raise ClausifyError(f"atom must be headed by a predicate constant, not {head!r}")
                old = pred_ar.setdefault(head.name, len(args))
                if old != len(args):
                    raise ClausifyError(f"predicate {head.name!r} used with {old} and {len(args)} arguments")
                for a in args:
                    visit(a)
    clash = set(term_ar) & set(pred_ar)
    if clash:
        raise ClausifyError(f"symbols used both as predicate and as term: {', '.join(sorted(clash))}")
    return term_ar, pred_ar


def to_fo(t: STerm, arities: dict[str, int]) -> Term:
    head, args = spine(t)
    if isinstance(head, SConst):
        k = arities.get(head.name, 0)
        base: Term = App(head.name, [to_fo(a, arities) for a in args[:k]])
        rest = args[k:]
    elif isinstance(head, SVar):
        base = Var(head.name)
        rest = args
    else:
        raise ClausifyError("cannot encode a lambda as a first-order term")
    for a in rest:
        base = App(APP, (base, to_fo(a, arities)))
    return base


def to_fo_clause(lits: list[SLit], arities: dict[str, int]) -> Clause:
    out = []
    for pol, atom in lits:
        if isinstance(atom, FEq):
            fo = App(EQ, (to_fo(atom.lhs, arities), to_fo(atom.rhs, arities)))
        else:
            head, args = spine(atom.term)
            fo = App(head.name, [to_fo(a, arities) for a in args])
        out.append(Literal(pol, fo))
    return Clause(out)


def clausify_problem(problem: Problem, lambda_mode: str | None = None) -> ClausifiedProblem:
    mode = lambda_mode or problem.options.lambda_mode
    cl = Clausifier(mode)
    if mode == "combinators":
        clashing = _user_symbols(problem) & set(COMBINATORS)
        if clashing:
            raise ClausifyError(f"combinator names used as problem symbols: {', '.join(sorted(clashing))}")

    fact_lits = []
    for fact in problem.facts:
        fact_lits.append(cl.surface_clauses(fact.formula, fact.free_vars, fact.name))
    goal_lits: list[list[SLit]] = []
    if problem.goal is not None:
        goal_lits += cl.surface_clauses(problem.goal, [], "goal", negate=True)
    for g in problem.negated_goals:
        goal_lits += cl.surface_clauses(g, [], "goal")
    def_lits = cl.definition_clauses()

    term_ar, pred_ar = compute_arities(fact_lits + [goal_lits] + [[c for _, c in def_lits]], mode)
    facts = []
    for fact, lits in zip(problem.facts, fact_lits):
        free = set(fact.free_vars)
        clauses, maps = [], []
        for c in lits:
            fo = to_fo_clause(c, term_ar)
            clauses.append(fo)
            maps.append({v: v for v in fo.variables() if v in free})
        facts.append(
            ClausifiedFact(
                fact.name,
                clauses,
                maps,
                [s for s in cl.skolems.values() if s.origin == fact.name],
            )
        )
    goal = ClausifiedFact("goal", [to_fo_clause(c, term_ar) for c in goal_lits], [{} for _ in goal_lits], kind="goal")
    defs = [(AxiomSource(sym, "def"), to_fo_clause(c, term_ar)) for sym, c in def_lits]
    for f in facts:
        f.lifted = list(cl.lifted.values())
    arities = dict(term_ar)
    arities.update(pred_ar)
    return ClausifiedProblem(facts, goal, defs, dict(cl.skolems), dict(cl.lifted), set(cl.combinators), arities, mode)


def _user_symbols(problem: Problem) -> set[str]:
    out = set()
    fs = [f.formula for f in problem.facts] + ([problem.goal] if problem.goal is not None else [])
    for f in fs + list(problem.negated_goals):
        for t in formula_terms(f):
            out |= consts(t)
    return out


def clausify(name: str, formula: Formula, lambda_mode: str = "lifting") -> ClausifiedFact:
    """Clausify a single fact on its own."""
    problem = Problem(facts=[Fact(name, formula, formula_free_vars(formula))])
    return clausify_problem(problem, lambda_mode).facts[0]


def lambda_lift(t: STerm) -> tuple[Term, list[tuple[AxiomSource, Clause]]]:
    """Lift every lambda of ``t``; return its encoding and the definitions."""
    cl = Clausifier("lifting")
    lifted = cl.lift(normalize_formula(FAtom(t)).term)
    return _encode_alone(cl, lifted, "lifting")


def combinator_encode(t: STerm) -> tuple[Term, list[tuple[AxiomSource, Clause]]]:
    cl = Clausifier("combinators")
    enc = bracket(normalize_formula(FAtom(t)).term, cl.combinators)
    return _encode_alone(cl, enc, "combinators")


def _encode_alone(cl: Clausifier, t: STerm, mode: str):
    defs = cl.definition_clauses()
    lits = [[(True, FEq(t, t))]] + [c for _, c in defs]
    term_ar, _ = compute_arities([lits], mode)
    return to_fo(t, term_ar), [(AxiomSource(sym, "def"), to_fo_clause(c, term_ar)) for sym, c in defs]
