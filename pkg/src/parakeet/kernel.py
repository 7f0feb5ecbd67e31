"""Fine-grained proof objects and an independent checker.

Six rules: Axiom, Assume, Subst, Refl, Equality, Resolve.  A proof node
stores its clause, the rule (with payload) and its premises; the checker
recomputes every conclusion from the premises and compares.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .terms import (
    EMPTY,
    App,
    Clause,
    Literal,
    Subst,
    Term,
    Var,
    eq,
    neg,
    pos,
    replace_at,
    subst_clause,
    subterm_at,
)


class ProofError(ValueError):
    pass


class RuleArityError(ProofError):
    pass


class PivotError(ProofError):
    pass


class PathError(ProofError):
    pass


@dataclass(frozen=True)
class Axiom:
    arity = 0
    name = "Axiom"


@dataclass(frozen=True)
class Assume:
    atom: Term
    arity = 0
    name = "Assume"


@dataclass(frozen=True)
class SubstRule:
    sub: Subst
    arity = 1
    name = "Subst"


@dataclass(frozen=True)
class Refl:
    term: Term
    arity = 0
    name = "Refl"


@dataclass(frozen=True)
class Equality:
    """``s != t | ~L[s]_p | L[t]_p`` where ``s`` is read off ``lit`` at ``path``."""

    lit: Literal
    path: tuple[int, ...]
    replacement: Term
    arity = 0
    name = "Equality"


@dataclass(frozen=True)
class Resolve:
    atom: Term
    arity = 2
    name = "Resolve"


Rule = Axiom | Assume | SubstRule | Refl | Equality | Resolve


class ProofNode:
    """A derived clause together with the rule and premises that justify it.

    Nodes compare by identity; a prover may share one node between several
    parents, which makes the proof a DAG that we count as a tree.
    """

    __slots__ = ("clause", "rule", "premises")

    def __init__(self, clause: Clause, rule: Rule, premises: tuple[ProofNode, ...] = ()):
        self.clause = clause
        self.rule = rule
        self.premises = tuple(premises)

    def __repr__(self):
        return f"ProofNode({self.rule.name}, {self.clause})"


@dataclass(frozen=True)
class AxiomSource:
    """Where an axiom clause came from.

    ``kind`` is one of ``fact``, ``goal``, ``def`` (lambda/combinator
    definitions) or ``ext``.  ``var_map`` maps clause variables to the free
    variables of the source fact.  Instantiated axioms produced by
    :func:`parakeet.instantiation.transform` also remember the original
    clause and the substitution applied to it.
    """

    name: str
    kind: str = "fact"
    var_map: tuple[tuple[str, str], ...] = ()
    origin: Clause | None = None
    sub: Subst | None = None

    @property
    def is_goal(self) -> bool:
        return self.kind == "goal"


@dataclass
class Proof:
    root: ProofNode
    registry: dict[Clause, AxiomSource] = field(default_factory=dict)


def equality_clause(lit: Literal, path: tuple[int, ...], t: Term) -> Clause:
    if not path:
        raise PathError("Equality path must address a proper subterm of the atom")
    try:
        s = subterm_at(lit.atom, path)
        new_atom = replace_at(lit.atom, tuple(path), t)
    except IndexError as exc:
        raise PathError(f"path {list(path)} is not valid in {lit}") from exc
    return Clause([neg(eq(s, t)), lit.negate(), Literal(lit.positive, new_atom)])


def resolve_clauses(atom: Term, c1: Clause, c2: Clause) -> Clause:
    p, n = pos(atom), neg(atom)
    if p in c1 and n in c2:
        return Clause([l for l in c1 if l != p] + [l for l in c2 if l != n])
    if n in c1 and p in c2:
        return Clause([l for l in c1 if l != n] + [l for l in c2 if l != p])
    raise PivotError(f"pivot {atom} does not occur with opposite signs in the premises")


def conclusion(rule: Rule, premises: list[Clause] | tuple[Clause, ...]) -> Clause:
    """The clause a rule derives from the given premise clauses."""
    if len(premises) != rule.arity:
        raise RuleArityError(f"{rule.name} expects {rule.arity} premises, got {len(premises)}")
    if isinstance(rule, Assume):
        return Clause([pos(rule.atom), neg(rule.atom)])
    if isinstance(rule, Refl):
        return Clause([pos(eq(rule.term, rule.term))])
    if isinstance(rule, Equality):
        return equality_clause(rule.lit, tuple(rule.path), rule.replacement)
    if isinstance(rule, SubstRule):
        return subst_clause(rule.sub, premises[0])
    if isinstance(rule, Resolve):
        return resolve_clauses(rule.atom, premises[0], premises[1])
    raise ProofError("Axiom clauses are supplied, not derived")


def derive(rule: Rule, premises=(), clause: Clause | None = None) -> ProofNode:
    premises = tuple(premises)
    if isinstance(rule, Axiom):
        if premises:
            raise RuleArityError("Axiom takes no premises")
        if clause is None:
            raise ProofError("Axiom needs the clause it introduces")
        return ProofNode(clause, rule, ())
    return ProofNode(conclusion(rule, [p.clause for p in premises]), rule, premises)


def axiom(clause: Clause) -> ProofNode:
    return ProofNode(clause, Axiom(), ())


def postorder(root: ProofNode) -> list[ProofNode]:
    """Distinct nodes, premises before conclusions, left to right."""
    seen: set[int] = set()
    out: list[ProofNode] = []
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for prem in reversed(node.premises):
            if id(prem) not in seen:
                stack.append((prem, False))
    return out


def numbering(root: ProofNode) -> dict[int, int]:
    return {id(n): i for i, n in enumerate(postorder(root), start=1)}


@dataclass(frozen=True)
class Violation:
    step: int
    rule: str
    reason: str

    def __str__(self):
        return f"step ({self.step}) {self.rule}: {self.reason}"


def check_proof(p: Proof) -> Violation | None:
    """``None`` if every node is justified, otherwise the first violation."""
    nodes = postorder(p.root)
    num = {id(n): i for i, n in enumerate(nodes, start=1)}
    for node in nodes:
        step = num[id(node)]
        rule = node.rule
        if isinstance(rule, Axiom):
            if node.premises:
                return Violation(step, rule.name, "axiom with premises")
            if node.clause not in p.registry:
                return Violation(step, rule.name, f"clause {node.clause} is not a registered axiom")
            continue
        try:
            expected = conclusion(rule, [q.clause for q in node.premises])
        except ProofError as exc:
            return Violation(step, rule.name, str(exc))
        if expected != node.clause:
            return Violation(step, rule.name, f"derives {expected}, node claims {node.clause}")
    if not p.root.clause.is_empty():
        return Violation(num[id(p.root)], p.root.rule.name, "root is not the empty clause")
    return None


def count_steps(p: Proof | ProofNode) -> int:
    """Number of nodes when the proof is unfolded into a tree."""
    root = p.root if isinstance(p, Proof) else p
    sizes: dict[int, int] = {}
    for node in postorder(root):
        sizes[id(node)] = 1 + sum(sizes[id(q)] for q in node.premises)
    return sizes[id(root)]


def iter_tree(root: ProofNode):
    """Pre-order over the unfolded tree (shared nodes visited once per use)."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.premises))


def axiom_leaves(root: ProofNode) -> list[Clause]:
    return [n.clause for n in postorder(root) if isinstance(n.rule, Axiom)]


# -- text listing -----------------------------------------------------------


def format_proof(p: Proof) -> str:
    """Numbered listing, one step per line."""
    nodes = postorder(p.root)
    num = {id(n): i for i, n in enumerate(nodes, start=1)}
    lines = []
    for node in nodes:
        i = num[id(node)]
        rule = node.rule
        if isinstance(rule, SubstRule):
            head = f"Subst from ({num[id(node.premises[0])]}) using {rule.sub}"
        elif isinstance(rule, Resolve):
            a, b = (num[id(q)] for q in node.premises)
            head = f"Resolve from ({a}) and ({b})"
        else:
            head = rule.name
        lines.append(f"({i}) {head}: {node.clause}")
    return "\n".join(lines)


# -- machine-readable form --------------------------------------------------


def term_to_json(t: Term):
    if isinstance(t, Var):
        return {"v": t.name}
    return [t.sym, *(term_to_json(a) for a in t.args)]


def term_from_json(x) -> Term:
    if isinstance(x, dict):
        return Var(x["v"])
    return App(x[0], [term_from_json(a) for a in x[1:]])


def _lit_json(lit: Literal):
    return [lit.positive, term_to_json(lit.atom)]


def _lit_from(x) -> Literal:
    return Literal(bool(x[0]), term_from_json(x[1]))


def _sub_json(s: Subst):
    return {k: term_to_json(v) for k, v in s.items()}


def _sub_from(x) -> Subst:
    return Subst({k: term_from_json(v) for k, v in x.items()})


def dump_proof(p: Proof) -> str:
    """One JSON object per line, premises before conclusions."""
    nodes = postorder(p.root)
    num = {id(n): i for i, n in enumerate(nodes, start=1)}
    out = []
    for node in nodes:
        rule = node.rule
        rec: dict = {
            "id": num[id(node)],
            "rule": rule.name,
            "premises": [num[id(q)] for q in node.premises],
            "clause": [_lit_json(l) for l in node.clause],
        }
        if isinstance(rule, Assume):
            rec["atom"] = term_to_json(rule.atom)
        elif isinstance(rule, SubstRule):
            rec["sub"] = _sub_json(rule.sub)
        elif isinstance(rule, Refl):
            rec["term"] = term_to_json(rule.term)
        elif isinstance(rule, Equality):
            rec["lit"] = _lit_json(rule.lit)
            rec["path"] = list(rule.path)
            rec["term"] = term_to_json(rule.replacement)
        elif isinstance(rule, Resolve):
            rec["atom"] = term_to_json(rule.atom)
        elif isinstance(rule, Axiom) and node.clause in p.registry:
            src = p.registry[node.clause]
            rec["source"] = {
                "name": src.name,
                "kind": src.kind,
                "var_map": [list(kv) for kv in src.var_map],
            }
            if src.origin is not None:
                rec["source"]["origin"] = [_lit_json(l) for l in src.origin]
            if src.sub is not None:
                rec["source"]["sub"] = _sub_json(src.sub)
        out.append(json.dumps(rec, separators=(",", ":")))
    return "\n".join(out) + "\n"


def load_proof(text: str) -> Proof:
    nodes: dict[int, ProofNode] = {}
    registry: dict[Clause, AxiomSource] = {}
    last = None
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        clause = Clause(_lit_from(x) for x in rec["clause"])
        premises = tuple(nodes[i] for i in rec["premises"])
        kind = rec["rule"]
        if kind == "Axiom":
            rule: Rule = Axiom()
            if "source" in rec:
                s = rec["source"]
                registry[clause] = AxiomSource(
                    s["name"],
                    s["kind"],
                    tuple(tuple(kv) for kv in s["var_map"]),
                    Clause(_lit_from(x) for x in s["origin"]) if "origin" in s else None,
                    _sub_from(s["sub"]) if "sub" in s else None,
                )
        elif kind == "Assume":
            rule = Assume(term_from_json(rec["atom"]))
        elif kind == "Subst":
            rule = SubstRule(_sub_from(rec["sub"]))
        elif kind == "Refl":
            rule = Refl(term_from_json(rec["term"]))
        elif kind == "Equality":
            rule = Equality(_lit_from(rec["lit"]), tuple(rec["path"]), term_from_json(rec["term"]))
        elif kind == "Resolve":
            rule = Resolve(term_from_json(rec["atom"]))
        else:
            raise ProofError(f"unknown rule {kind!r}")
        last = nodes[rec["id"]] = ProofNode(clause, rule, premises)
    if last is None:
        raise ProofError("empty proof text")
    return Proof(last, registry)


__all__ = [
    "EMPTY",
    "Assume",
    "Axiom",
    "AxiomSource",
    "Equality",
    "PathError",
    "PivotError",
    "Proof",
    "ProofError",
    "ProofNode",
    "Refl",
    "Resolve",
    "RuleArityError",
    "SubstRule",
    "Violation",
    "axiom",
    "axiom_leaves",
    "check_proof",
    "conclusion",
    "count_steps",
    "derive",
    "dump_proof",
    "format_proof",
    "load_proof",
    "postorder",
]
