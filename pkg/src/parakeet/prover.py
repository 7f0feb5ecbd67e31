"""Given-clause saturation with ordered resolution and paramodulation.

Every inference is replayed in the fine-grained calculus as it happens, so
each kept clause carries a proof node and a refutation is a checkable proof.
Binary inferences rename both premises apart and record a ``Subst`` step
per premise in that premise's own variable names.
"""

from __future__ import annotations

import heapq
import logging
import random
import time
from dataclasses import dataclass
from itertools import count

from .kbo import KBO, default_precedence
from .kernel import (
    Axiom,
    AxiomSource,
    Equality,
    Proof,
    ProofError,
    ProofNode,
    Refl,
    Resolve,
    SubstRule,
    check_proof,
    derive,
)
from .terms import (
    APP,
    SKOLEM_PREFIX,
    App,
    Term,
    Clause,
    Fresh,
    Literal,
    Var,
    apply_subst,
    compose,
    eq,
    mgu,
    neg,
    pos,
    positions,
    subst_clause,
    subst_literal,
    subsumes,
    subterm_at,
    symbols,
)

log = logging.getLogger(__name__)

EXT_NAME = "ext"
EXT_SKOLEM = SKOLEM_PREFIX + "ext"


class ArityClash(ValueError):
    pass


@dataclass
class ProverLimits:
    max_generated_clauses: int = 20000
    max_seconds: float = 10.0
    use_ext: bool = False
    seed: int | None = None

    def __post_init__(self):
        if self.max_generated_clauses <= 0 or self.max_seconds <= 0:
            raise ValueError("prover limits must be positive")


@dataclass
class SearchStats:
    generated: int = 0
    kept: int = 0
    elapsed: float = 0.0


@dataclass
class Refutation:
    proof: Proof
    stats: SearchStats
    status = "refutation"


@dataclass
class Saturated:
    stats: SearchStats
    status = "saturated"


@dataclass
class ResourceOut:
    stats: SearchStats
    status = "resource-out"


ProverOutcome = Refutation | Saturated | ResourceOut


def ext_clause() -> Clause:
    f, g = Var("f"), Var("g")
    w = App(EXT_SKOLEM, (f, g))
    return Clause([neg(eq(App(APP, (f, w)), App(APP, (g, w)))), pos(eq(f, g))])


def inject_ext(axioms: list) -> list:
    """Append the clausified extensionality axiom under the name ``ext``."""
    src = AxiomSource(EXT_NAME, "ext", (("f", "f"), ("g", "g")))
    return list(axioms) + [(src, ext_clause())]


def check_arities(clauses) -> dict[str, int]:
    table: dict[str, int] = {}
    for c in clauses:
        for lit in c:
            for sym, n in symbols(lit.atom):
                if table.setdefault(sym, n) != n:
                    raise ArityClash(f"symbol {sym!r} used with arities {table[sym]} and {n}")
    return table


@dataclass(eq=False)
class _Kept:
    clause: Clause
    node: ProofNode
    age: int
    weight: int
    active: bool = False


def _flatten(lit: Literal) -> list[tuple]:
    """Pre-order keys of a literal with, for each key, the index past its subterm."""
    out: list = [[lit.positive, 1]]

    def go(t):
        i = len(out)
        out.append(["*" if isinstance(t, Var) else (t.sym, len(t.args)), 0])
        if isinstance(t, App):
            for a in t.args:
                go(a)
        out[i][1] = len(out)

    go(lit.atom)
    return [tuple(x) for x in out]


class _GeneralizationIndex:
    """Discrimination tree returning items stored under literals that may
    generalize a query literal (repeated variables are not checked)."""

    def __init__(self):
        self.root: dict = {}

    def insert(self, lit: Literal, item) -> None:
        node = self.root
        for key, _ in _flatten(lit):
            node = node.setdefault(key, {})
        node.setdefault(None, []).append(item)

    def retrieve(self, lit: Literal):
        flat = _flatten(lit)
        stack = [(self.root, 0)]
        while stack:
            node, i = stack.pop()
            if i == len(flat):
                yield from node.get(None, ())
                continue
            key, end = flat[i]
            child = node.get(key)
            if child is not None:
                stack.append((child, i + 1))
            if i > 0:
                star = node.get("*")
                if star is not None:
                    stack.append((star, end))


class _Search:
    def __init__(self, kbo: KBO, limits: ProverLimits):
        self.kbo = kbo
        self.limits = limits
        self.fresh = Fresh()
        self.ages = count()
        self.active: list[_Kept] = []
        self.all_kept: list[_Kept] = []
        self.by_weight: list = []
        self.by_age: list = []
        self.picks = 0
        self.stats = SearchStats()
        self.start = time.monotonic()
        self.empty: ProofNode | None = None
        self.index = _GeneralizationIndex()

    # -- bookkeeping --------------------------------------------------------

    def out_of_resources(self) -> bool:
        if self.stats.generated >= self.limits.max_generated_clauses:
            return True
        return time.monotonic() - self.start > self.limits.max_seconds

    def add(self, node: ProofNode, generated: bool = True) -> None:
        c = node.clause
        if generated:
            self.stats.generated += 1
        if c.is_empty():
            if self.empty is None:
                self.empty = node
            return
        if c.is_tautology():
            return
        if self.subsumed(c):
            return
        k = _Kept(c, node, next(self.ages), c.weight())
        self.index.insert(c.literals[0], k)
        self.all_kept.append(k)
        self.stats.kept += 1
        heapq.heappush(self.by_weight, (k.weight, k.age, k))
        heapq.heappush(self.by_age, (k.age, k))

    def select(self) -> _Kept | None:
        self.picks += 1
        heap = self.by_age if self.picks % 6 == 0 else self.by_weight
        other = self.by_weight if heap is self.by_age else self.by_age
        for h in (heap, other):
            while h:
                k = heapq.heappop(h)[-1]
                if not k.active:
                    return k
        return None

    def subsumed(self, c: Clause) -> bool:
        tried: set[int] = set()
        for lit in c:
            for k in self.index.retrieve(lit):
                if id(k) in tried:
                    continue
                tried.add(id(k))
                if subsumes(k.clause, c):
                    return True
        return False

    # -- recording helpers ---------------------------------------------------

    def instantiate(self, node: ProofNode, sub) -> ProofNode:
        sub = sub.restrict(node.clause.variables())
        if not sub:
            return node
        return derive(SubstRule(sub), [node])

    def rename(self, c: Clause):
        return self.fresh.renaming(c.variables())

    def maximal(self, lit: Literal, c: Clause) -> bool:
        return self.kbo.maximal(lit, c.literals)

    # -- inferences ----------------------------------------------------------

    def resolutions(self, g: _Kept, a: _Kept):
        same = g is a
        renamed = None
        for lg in g.clause:
            for la in a.clause:
                if lg.positive == la.positive:
                    continue
                if same and not lg.positive:
                    continue
                if lg.atom.sym != la.atom.sym:
                    continue
                if renamed is None:
                    renamed = self.rename(g.clause), self.rename(a.clause)
                node = self.resolve(g, lg, a, la, *renamed)
                if node is not None:
                    yield node

    def resolve(self, g: _Kept, lg: Literal, a: _Kept, la: Literal, rg, ra):
        theta = mgu(apply_subst(rg, lg.atom), apply_subst(ra, la.atom))
        if theta is None:
            return None
        sg = compose(theta, rg)
        sa = compose(theta, ra)
        lg2, la2 = subst_literal(sg, lg), subst_literal(sa, la)
        ng, na = self.instantiate(g.node, sg), self.instantiate(a.node, sa)
        if not (self.maximal(lg2, ng.clause) and self.maximal(la2, na.clause)):
            return None
        pair = [ng, na] if not lg.positive else [na, ng]
        try:
            return derive(Resolve(lg2.atom), pair)
        except ProofError:
            return None

    def factors(self, g: _Kept):
        lits = [l for l in g.clause if l.positive]
        for i, l1 in enumerate(lits):
            for l2 in lits[i + 1 :]:
                if l1.atom.sym != l2.atom.sym:
                    continue
                theta = mgu(l1.atom, l2.atom)
                if theta is None:
                    continue
                node = self.instantiate(g.node, theta)
                if self.maximal(subst_literal(theta, l1), node.clause):
                    yield node

    def equality_resolutions(self, g: _Kept):
        for lit in g.clause:
            if lit.positive or not lit.is_equality():
                continue
            s, t = lit.atom.args
            theta = mgu(s, t)
            if theta is None:
                continue
            node = self.instantiate(g.node, theta)
            if not self.maximal(subst_literal(theta, lit), node.clause):
                continue
            st = apply_subst(theta, s)
            try:
                yield derive(Resolve(eq(st, st)), [node, derive(Refl(st))])
            except ProofError:
                continue

    def paramodulations(self, e: _Kept, d: _Kept):
        """Rewrite with a positive equation of ``e`` inside ``d``."""
        renamed = None
        for elit in e.clause:
            if not (elit.positive and elit.is_equality()):
                continue
            for side in (0, 1):
                lhs = elit.atom.args[side]
                if isinstance(lhs, Var):
                    continue
                for dlit in d.clause:
                    for path, u in positions(dlit.atom):
                        if not path or isinstance(u, Var) or u.sym != lhs.sym:
                            continue
                        if renamed is None:
                            renamed = self.rename(e.clause), self.rename(d.clause)
                        node = self.paramodulate(e, elit, side, d, dlit, path, *renamed)
                        if node is not None:
                            yield node

    def paramodulate(self, e, elit, side, d, dlit, path, re_, rd):
        eatom = apply_subst(re_, elit.atom)
        l, r = eatom.args[side], eatom.args[1 - side]
        u = apply_subst(rd, subterm_at(dlit.atom, path))
        theta = mgu(l, u)
        if theta is None:
            return None
        lt, rt = apply_subst(theta, l), apply_subst(theta, r)
        if lt == rt or self.kbo.greater(rt, lt):
            return None
        se, sd = compose(theta, re_), compose(theta, rd)
        elit2, dlit2 = subst_literal(se, elit), subst_literal(sd, dlit)
        ne, nd = self.instantiate(e.node, se), self.instantiate(d.node, sd)
        if not (self.maximal(elit2, ne.clause) and self.maximal(dlit2, nd.clause)):
            return None
        try:
            if side == 1:
                ne = flip_equation(ne, rt, lt)
            eqn = derive(Equality(dlit2, tuple(path), rt))
            x = derive(Resolve(eq(lt, rt)), [ne, eqn])
            return derive(Resolve(dlit2.atom), [nd, x])
        except ProofError:
            return None

    def infer_all(self, g: _Kept):
        yield from self.factors(g)
        yield from self.equality_resolutions(g)
        for a in list(self.active):
            yield from self.resolutions(g, a)
            yield from self.paramodulations(g, a)
            if a is not g:
                yield from self.paramodulations(a, g)

    def run(self) -> str:
        while True:
            if self.empty is not None:
                return "refutation"
            if self.out_of_resources():
                return "resource-out"
            g = self.select()
            if g is None:
                return "saturated"
            g.active = True
            self.active.append(g)
            for node in self.infer_all(g):
                self.add(node)
                if self.empty is not None:
                    return "refutation"
                if self.out_of_resources():
                    return "resource-out"


def flip_equation(node: ProofNode, s: Term, t: Term) -> ProofNode:
    """From a clause containing ``s = t`` derive the same clause with ``t = s``."""
    e = derive(Equality(pos(eq(s, s)), (0,), t))
    x = derive(Resolve(eq(s, t)), [node, e])
    return derive(Resolve(eq(s, s)), [x, derive(Refl(s))])


def _source(item) -> AxiomSource:
    return item if isinstance(item, AxiomSource) else AxiomSource(str(item))


def prove(axioms, goal_clauses, limits: ProverLimits | None = None, precedence: list[str] | None = None) -> ProverOutcome:
    """Search for a refutation of ``axioms`` plus ``goal_clauses``.

    ``axioms`` is a list of ``(name_or_source, clause)`` pairs; goal clauses
    are registered under the goal marker.
    """
    limits = limits or ProverLimits()
    axioms = list(axioms)
    if limits.use_ext and not any(_source(n).name == EXT_NAME for n, _ in axioms):
        axioms = inject_ext(axioms)
    inputs = [(_source(n), c) for n, c in axioms]
    inputs += [(AxiomSource("goal", "goal"), c) for c in goal_clauses]
    check_arities(c for _, c in inputs)

    if precedence is None:
        order: dict[str, None] = {}
        for _, c in inputs:
            for lit in c:
                for sym, _n in symbols(lit.atom):
                    order.setdefault(sym, None)
        precedence = default_precedence(list(order))

    if limits.seed is not None:
        random.Random(limits.seed).shuffle(inputs)

    search = _Search(KBO(precedence), limits)
    registry: dict = {}
    for src, c in inputs:
        if c in registry:
            continue
        registry[c] = src
        search.stats.generated += 1
        search.add(ProofNode(c, Axiom(), ()), generated=False)
    status = search.run()
    search.stats.elapsed = time.monotonic() - search.start
    log.debug("search %s: %s", status, search.stats)
    if status == "refutation":
        proof = Proof(search.empty, registry)
        violation = check_proof(proof)
        if violation is not None:
            raise RuntimeError(f"prover emitted an invalid proof: {violation}")
        return Refutation(proof, search.stats)
    if status == "saturated":
        return Saturated(search.stats)
    return ResourceOut(search.stats)

