"""Recover axiom instantiations from a proof and push substitutions to the leaves.

``infer`` collects every axiom leaf with the composition of all ``Subst``
steps on its path to the root.  ``transform`` rebuilds the proof from
instantiated axioms only, without any ``Subst`` step and without growing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kernel import (
    Assume,
    Axiom,
    AxiomSource,
    Equality,
    Proof,
    ProofNode,
    Refl,
    Resolve,
    SubstRule,
    check_proof,
    derive,
)
from .surface import STerm, alpha_key
from .terms import EMPTY, Clause, Subst, Term, apply_subst, compose, neg, pos, subst_clause, subst_literal


class RegistryError(KeyError):
    pass


@dataclass(frozen=True)
class AxiomUse:
    clause: Clause
    sub: Subst
    source: AxiomSource | None = None


def infer(node: ProofNode, acc: Subst = EMPTY, registry: dict | None = None) -> list[AxiomUse]:
    """Axiom leaves under ``node`` with their accumulated substitutions, left to right."""
    out: list[AxiomUse] = []
    stack = [(node, acc)]
    while stack:
        n, a = stack.pop()
        rule = n.rule
        if isinstance(rule, Axiom):
            src = registry.get(n.clause) if registry is not None else None
            out.append(AxiomUse(n.clause, a, src))
        elif isinstance(rule, SubstRule):
            stack.append((n.premises[0], compose(a, rule.sub)))
        elif isinstance(rule, Resolve):
            stack.append((n.premises[1], a))
            stack.append((n.premises[0], a))
    return out


def infer_proof(p: Proof) -> list[AxiomUse]:
    return infer(p.root, EMPTY, p.registry)


@dataclass(eq=False)
class AnnotatedNode:
    """A proof node paired with the substitution accumulated above it."""

    node: ProofNode
    acc: Subst
    premises: tuple["AnnotatedNode", ...] = ()

    @property
    def instantiated(self) -> Clause:
        return subst_clause(self.acc, self.node.clause)


def annotate(p: Proof | ProofNode) -> AnnotatedNode:
    root = p.root if isinstance(p, Proof) else p
    memo: dict = {}

    def go(n: ProofNode, acc: Subst) -> AnnotatedNode:
        key = (id(n), acc)
        if key in memo:
            return memo[key]
        rule = n.rule
        if isinstance(rule, SubstRule):
            prem = (go(n.premises[0], compose(acc, rule.sub)),)
        else:
            prem = tuple(go(q, acc) for q in n.premises)
        out = memo[key] = AnnotatedNode(n, acc, prem)
        return out

    return go(root, EMPTY)


def _pivot_orientation(node: ProofNode) -> bool:
    """True if the first premise carries the positive pivot literal."""
    atom = node.rule.atom
    c1, c2 = (q.clause for q in node.premises)
    return pos(atom) in c1 and neg(atom) in c2


def transform(p: Proof) -> Proof:
    """Rebuild ``p`` so that every axiom is used in instantiated form.

    The result contains no ``Subst`` step, has at most as many steps as
    ``p`` and its root is a subset of the root of ``p`` (hence empty).
    Every instantiated axiom is registered once, remembering the original
    clause and the accumulated substitution.
    """
    bad = check_proof(p)
    if bad is not None:
        raise ValueError(f"refusing to transform an invalid proof: {bad}")
    registry: dict[Clause, AxiomSource] = {}
    memo: dict = {}

    # iterative post-order over (node, accumulator) pairs
    stack = [(p.root, EMPTY, False)]
    while stack:
        n, acc, expanded = stack.pop()
        key = (id(n), acc)
        if key in memo:
            continue
        rule = n.rule
        if isinstance(rule, SubstRule):
            inner = (n.premises[0], compose(acc, rule.sub))
            child_key = (id(inner[0]), inner[1])
            if child_key in memo:
                memo[key] = memo[child_key]
            elif not expanded:
                stack.append((n, acc, True))
                stack.append((inner[0], inner[1], False))
            else:
                memo[key] = memo[child_key]
            continue
        if isinstance(rule, Resolve):
            kids = [(id(q), acc) for q in n.premises]
            if not all(k in memo for k in kids):
                if expanded:
                    raise AssertionError("premise left unprocessed")
                stack.append((n, acc, True))
                for q in reversed(n.premises):
                    stack.append((q, acc, False))
                continue
            memo[key] = _transform_resolve(n, acc, memo[kids[0]], memo[kids[1]])
            continue
        memo[key] = _transform_leaf(n, acc, registry, p.registry)

    root = memo[(id(p.root), EMPTY)]
    return Proof(root, registry)


def _transform_leaf(n: ProofNode, acc: Subst, registry: dict, old_registry: dict) -> ProofNode:
    rule = n.rule
    if isinstance(rule, Axiom):
        c = subst_clause(acc, n.clause)
        if c not in registry:
            src = old_registry.get(n.clause) or AxiomSource("?")
            registry[c] = AxiomSource(src.name, src.kind, src.var_map, n.clause, acc)
        return ProofNode(c, Axiom(), ())
    if not acc:
        return n
    if isinstance(rule, Assume):
        return derive(Assume(apply_subst(acc, rule.atom)))
    if isinstance(rule, Refl):
        return derive(Refl(apply_subst(acc, rule.term)))
    if isinstance(rule, Equality):
        return derive(Equality(subst_literal(acc, rule.lit), rule.path, apply_subst(acc, rule.replacement)))
    raise TypeError(f"unexpected rule {rule!r}")


def _transform_resolve(n: ProofNode, acc: Subst, t1: ProofNode, t2: ProofNode) -> ProofNode:
    atom = apply_subst(acc, n.rule.atom)
    p, m = pos(atom), neg(atom)
    first_positive = _pivot_orientation(n)
    tp, tn = (t1, t2) if first_positive else (t2, t1)
    if p in tp.clause and m in tn.clause:
        if (t1, t2) == (n.premises[0], n.premises[1]) and not acc:
            return n
        # keep the original premise order unless it makes the pivot ambiguous
        if not first_positive and p in t1.clause and m in t2.clause:
            return derive(Resolve(atom), [tp, tn])
        return derive(Resolve(atom), [t1, t2])
    # some child already lost its pivot literal, so it alone subsumes the conclusion
    if t1 is tp and p not in tp.clause:
        return t1
    if t1 is tn and m not in tn.clause:
        return t1
    return t2


# -- from axiom uses to fact instantiations ---------------------------------


@dataclass
class RawInstantiation:
    """First-order bindings for the free variables of one fact.

    ``targets`` lists the fact variables that occur in the clause the
    bindings were read from; ``bindings`` may leave some of them unbound.
    """

    fact: str
    bindings: dict[str, Term]
    targets: tuple[str, ...]


@dataclass
class Instantiation:
    """Surface-level bindings for the free variables of one fact."""

    fact: str
    bindings: dict[str, STerm]
    errors: list[str] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not self.bindings


def filter_fact_uses(uses: list[AxiomUse], fact_table: dict[Clause, AxiomSource] | None = None) -> list[RawInstantiation]:
    """Keep uses of facts (and ext), rename to fact variables, drop the rest."""
    out = []
    for use in uses:
        src = use.source
        if src is None:
            if fact_table is None or use.clause not in fact_table:
                raise RegistryError(f"axiom clause {use.clause} has no registered source")
            src = fact_table[use.clause]
        if src.kind in ("goal", "def"):
            continue
        var_map = dict(src.var_map)
        in_clause = [v for v in use.clause.variables() if v in var_map]
        bindings = {var_map[v]: use.sub[v] for v in in_clause if v in use.sub}
        out.append(RawInstantiation(src.name, bindings, tuple(var_map[v] for v in in_clause)))
    return out


def _compatible(a: Instantiation, b: Instantiation) -> bool:
    for k, v in b.bindings.items():
        if k in a.bindings and alpha_key(a.bindings[k], True) != alpha_key(v, True):
            return False
    return True


def merge_all(insts: list[Instantiation]) -> list[Instantiation]:
    """Greedy first-fit merge of instantiations of the same fact.

    Two instantiations merge when they agree (up to alpha-equivalence, with
    wildcards treated as equal) on every shared variable.  Exact duplicates
    collapse.
    """
    groups: list[Instantiation] = []
    for inst in insts:
        for g in groups:
            if g.fact == inst.fact and _compatible(g, inst):
                for k, v in inst.bindings.items():
                    g.bindings.setdefault(k, v)
                g.errors.extend(e for e in inst.errors if e not in g.errors)
                break
        else:
            groups.append(Instantiation(inst.fact, dict(inst.bindings), list(inst.errors)))
    return groups
