"""Small builders shared by the test modules."""

from __future__ import annotations

import itertools
import re
from pathlib import Path

from parakeet.kernel import (
    Axiom,
    AxiomSource,
    Equality,
    Proof,
    ProofNode,
    Resolve,
    SubstRule,
    derive,
)
from parakeet.terms import App, Clause, Literal, Subst, Term, Var, eq

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
VARS = frozenset("xyzmnuvw") | {"x1", "x2", "f", "g"}
# in the successor example x is a fixed constant of the goal
GOLD = frozenset("mny")

_TOKEN = re.compile(r"\s*([A-Za-z0-9_%]+|[(),])")


def T(text: str, variables=VARS) -> Term:
    """Parse ``less(m, Suc(n))`` style terms; names in ``variables`` are variables."""
    toks = _TOKEN.findall(text)
    pos = 0

    def term():
        nonlocal pos
        name = toks[pos]
        pos += 1
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            args = [term()]
            while toks[pos] == ",":
                pos += 1
                args.append(term())
            assert toks[pos] == ")"
            pos += 1
            return App(name, args)
        return Var(name) if name in variables else App(name)

    out = term()
    assert pos == len(toks), text
    return out


def L(text: str, variables=VARS) -> Literal:
    """``~p(x)``, ``s = t`` and ``s != t`` literals."""
    text = text.strip()
    if "!=" in text:
        a, b = text.split("!=")
        return Literal(False, eq(T(a, variables), T(b, variables)))
    if "=" in text:
        a, b = text.split("=")
        return Literal(True, eq(T(a, variables), T(b, variables)))
    if text.startswith("~"):
        return Literal(False, T(text[1:], variables))
    return Literal(True, T(text, variables))


def C(text: str, variables=VARS) -> Clause:
    text = text.strip()
    if text in ("", "False"):
        return Clause()
    return Clause(L(p, variables) for p in text.split("|"))


def S(**bindings) -> Subst:
    return Subst({k: T(v) for k, v in bindings.items()})


# -- the twelve-step successor proof ----------------------------------------


def golden_proof(step11: Subst | None = None) -> Proof:
    """The hand-written twelve-step refutation of ``less(1, Suc(Suc(x)))``.

    ``step11`` replaces the substitution of the eleventh step (used to
    build a broken variant).
    """
    n1 = derive(Axiom(), clause=C("~less(1,Suc(Suc(x)))", GOLD))
    n2 = derive(Axiom(), clause=C("~less(m,n) | less(Suc(m),Suc(n))", GOLD))
    n3 = derive(SubstRule(Subst({"m": T("0", GOLD), "n": T("y", GOLD)})), [n2])
    n4 = derive(Axiom(), clause=C("Suc(0) = 1", GOLD))
    n5 = derive(Equality(L("less(Suc(0),Suc(y))", GOLD), (0,), T("1", GOLD)))
    n6 = derive(Resolve(eq(T("Suc(0)", GOLD), T("1", GOLD))), [n4, n5])
    n7 = derive(Resolve(T("less(Suc(0),Suc(y))", GOLD)), [n3, n6])
    n8 = derive(SubstRule(Subst({"y": T("Suc(x)", GOLD)})), [n7])
    n9 = derive(Resolve(T("less(1,Suc(Suc(x)))", GOLD)), [n1, n8])
    n10 = derive(Axiom(), clause=C("less(0,Suc(n))", GOLD))
    n11 = derive(SubstRule(step11 if step11 is not None else Subst({"n": T("x", GOLD)})), [n10])
    n12 = ProofNode(Clause(), Resolve(T("less(0,Suc(x))", GOLD)), (n9, n11))
    registry = {
        n1.clause: AxiomSource("goal", "goal"),
        n2.clause: AxiomSource("F1", "fact", (("m", "m"), ("n", "n"))),
        n4.clause: AxiomSource("F2", "fact"),
        n10.clause: AxiomSource("F3", "fact", (("n", "n"),)),
    }
    return Proof(n12, registry)


# -- comparison up to variable renaming ---------------------------------------


def _rename(t: Term, r: dict) -> Term:
    if isinstance(t, Var):
        return Var(r.get(t.name, t.name))
    return App(t.sym, tuple(_rename(a, r) for a in t.args))


def _vars_of(t: Term, out: list):
    if isinstance(t, Var):
        if t.name not in out:
            out.append(t.name)
    else:
        for a in t.args:
            _vars_of(a, out)


def use_alpha_equal(clause1: Clause, sub1, clause2: Clause, sub2) -> bool:
    """Same (clause, substitution) pair after renaming the variables of the second."""
    names1: list = []
    names2: list = []
    for lit in clause1:
        _vars_of(lit.atom, names1)
    for k, v in sub1.items():
        if k not in names1:
            names1.append(k)
        _vars_of(v, names1)
    for lit in clause2:
        _vars_of(lit.atom, names2)
    for k, v in sub2.items():
        if k not in names2:
            names2.append(k)
        _vars_of(v, names2)
    if len(names1) != len(names2):
        return False
    for perm in itertools.permutations(names1):
        r = dict(zip(names2, perm))
        c = Clause(Literal(l.positive, _rename(l.atom, r)) for l in clause2)
        s = {r[k]: _rename(v, r) for k, v in sub2.items()}
        if c == clause1 and s == dict(sub1):
            return True
    return False


# -- surface terms ----------------------------------------------------------


def parse_term(text: str):
    """A surface term; every unbound name is a constant."""
    from parakeet.parser import parse_problem
    from parakeet.surface import FAtom

    goal = parse_problem(f"goal : Holds ({text})").goal
    assert isinstance(goal, FAtom)
    return goal.term.arg


def encode_decode(t, mode: str, as_fact: bool = False):
    """Clausify ``Holds t`` (as goal or fact), then decode the encoded argument.

    Returns the decoded surface term and the first-order encoding.
    """
    from parakeet.clausify import clausify_problem
    from parakeet.decoder import DecodeContext, decode_term, expand_combinators
    from parakeet.parser import Fact, Problem
    from parakeet.surface import FAtom, SApp, SConst, free_vars

    f = FAtom(SApp(SConst("Holds"), t))
    if as_fact:
        problem = Problem(facts=[Fact("F", f, free_vars(t))], goal=FAtom(SConst("Goal")))
        clause = None
    else:
        problem = Problem(goal=f)
    cp = clausify_problem(problem, mode)
    clauses = cp.facts[0].clauses if as_fact else cp.goal.clauses
    (clause,) = clauses
    (lit,) = clause.literals
    enc = lit.atom.args[0]
    ctx = DecodeContext.for_problem(cp)
    return expand_combinators(decode_term(enc, ctx), ctx), enc


# -- acceptance report --------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
