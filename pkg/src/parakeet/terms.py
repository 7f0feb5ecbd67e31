"""Untyped first-order terms, literals, clauses and substitutions.

Terms are immutable and hash-consed only in the weak sense that their hash
is computed once at construction.  Clauses are sets of literals, stored as
a sorted tuple so that equal sets compare and print identically.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping

EQ = "="
APP = "app"
SKOLEM_PREFIX = "sk%"
LIFT_PREFIX = "ll%"
WILDCARD_PREFIX = "_w%"
UNDEFINED = "undefined"
COMBINATORS = ("S", "K", "B", "C", "I")


class Term:
    __slots__ = ()

    def is_var(self) -> bool:
        return False


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("v", name))

    def is_var(self) -> bool:
        return True

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class App(Term):
    __slots__ = ("sym", "args", "_hash", "_key", "_size")

    def __init__(self, sym: str, args: Iterable[Term] = ()):
        self.sym = sym
        self.args = tuple(args)
        self._hash = hash((sym, self.args))
        self._key = None
        self._size = None

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.sym == other.sym
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.sym!r}, {list(self.args)!r})"

    def __str__(self):
        if self.sym == EQ and len(self.args) == 2:
            return f"{self.args[0]} = {self.args[1]}"
        if not self.args:
            return self.sym
        return f"{self.sym}({','.join(str(a) for a in self.args)})"


def const(name: str) -> App:
    return App(name, ())


def term_key(t: Term) -> tuple:
    """Total order key: variables first, then symbol, arity, arguments."""
    if isinstance(t, Var):
        return (0, t.name)
    if t._key is None:
        t._key = (1, t.sym, len(t.args), tuple(term_key(a) for a in t.args))
    return t._key


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if t._size is None:
        t._size = 1 + sum(size(a) for a in t.args)
    return t._size


def variables(t: Term) -> Iterator[str]:
    """Variable names of ``t`` in left-to-right order (with repeats)."""
    if isinstance(t, Var):
        yield t.name
    else:
        for a in t.args:
            yield from variables(a)


def var_set(t: Term) -> set[str]:
    return set(variables(t))


def occurs(name: str, t: Term) -> bool:
    if isinstance(t, Var):
        return t.name == name
    return any(occurs(name, a) for a in t.args)


def symbols(t: Term) -> Iterator[tuple[str, int]]:
    if isinstance(t, App):
        yield t.sym, len(t.args)
        for a in t.args:
            yield from symbols(a)


def subterm_at(t: Term, path: Iterable[int]) -> Term:
    for i in path:
        if not isinstance(t, App) or not 0 <= i < len(t.args):
            raise IndexError(f"invalid path into {t}")
        t = t.args[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    if not isinstance(t, App) or not 0 <= path[0] < len(t.args):
        raise IndexError(f"invalid path into {t}")
    i = path[0]
    args = list(t.args)
    args[i] = replace_at(args[i], path[1:], new)
    return App(t.sym, args)


def positions(t: Term, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Term]]:
    """All (path, subterm) pairs of ``t`` in pre-order."""
    yield prefix, t
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from positions(a, prefix + (i,))


class Literal:
    __slots__ = ("positive", "atom", "_hash")

    def __init__(self, positive: bool, atom: Term):
        self.positive = positive
        self.atom = atom
        self._hash = hash((positive, atom))

    def __eq__(self, other):
        return (
            isinstance(other, Literal)
            and self._hash == other._hash
            and self.positive == other.positive
            and self.atom == other.atom
        )

    def __hash__(self):
        return self._hash

    def negate(self) -> Literal:
        return Literal(not self.positive, self.atom)

    def is_equality(self) -> bool:
        return isinstance(self.atom, App) and self.atom.sym == EQ and len(self.atom.args) == 2

    def key(self) -> tuple:
        return (term_key(self.atom), self.positive)

    def __repr__(self):
        return f"Literal({self.positive}, {self.atom!r})"

    def __str__(self):
        if self.positive:
            return str(self.atom)
        if self.is_equality():
            lhs, rhs = self.atom.args
            return f"{lhs} != {rhs}"
        return f"~{self.atom}"


def pos(atom: Term) -> Literal:
    return Literal(True, atom)


def neg(atom: Term) -> Literal:
    return Literal(False, atom)


def eq(lhs: Term, rhs: Term) -> Term:
    return App(EQ, (lhs, rhs))


class Clause:
    """A finite set of literals; the empty clause is ``False``."""

    __slots__ = ("literals", "_hash")

    def __init__(self, literals: Iterable[Literal] = ()):
        self.literals = tuple(sorted(set(literals), key=Literal.key))
        self._hash = hash(self.literals)

    def __eq__(self, other):
        return isinstance(other, Clause) and self._hash == other._hash and self.literals == other.literals

    def __hash__(self):
        return self._hash

    def __iter__(self):
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    def __contains__(self, lit):
        return lit in self.literals

    def is_empty(self) -> bool:
        return not self.literals

    def variables(self) -> list[str]:
        seen = {}
        for lit in self.literals:
            for v in variables(lit.atom):
                seen.setdefault(v, None)
        return list(seen)

    def weight(self) -> int:
        return sum(size(lit.atom) for lit in self.literals)

    def is_tautology(self) -> bool:
        lits = set(self.literals)
        for lit in self.literals:
            if lit.positive and lit.is_equality() and lit.atom.args[0] == lit.atom.args[1]:
                return True
            if lit.positive and Literal(False, lit.atom) in lits:
                return True
        return False

    def subset(self, other: Clause) -> bool:
        return set(self.literals) <= set(other.literals)

    def __repr__(self):
        return f"Clause({list(self.literals)!r})"

    def __str__(self):
        if not self.literals:
            return "False"
        return " | ".join(str(lit) for lit in self.literals)


class Subst(Mapping):
    """Finite map from variable names to terms, applied simultaneously.

    Identity bindings ``x -> x`` are never stored.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Mapping[str, Term] | Iterable[tuple[str, Term]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        self._map = {k: v for k, v in items if not (isinstance(v, Var) and v.name == k)}
        self._hash = None

    def __getitem__(self, name):
        return self._map[name]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Subst):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __repr__(self):
        return f"Subst({self._map!r})"

    def __str__(self):
        return "{" + ", ".join(f"{k} -> {v}" for k, v in self._map.items()) + "}"

    def restrict(self, names: Iterable[str]) -> Subst:
        names = set(names)
        return Subst({k: v for k, v in self._map.items() if k in names})

    def __call__(self, t: Term) -> Term:
        return apply_subst(self, t)


EMPTY = Subst()


def apply_subst(s: Mapping[str, Term], t: Term) -> Term:
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t.name, t)
    if not t.args:
        return t
    new_args = tuple(apply_subst(s, a) for a in t.args)
    if all(x is y for x, y in zip(new_args, t.args)):
        return t
    return App(t.sym, new_args)


def subst_literal(s: Mapping[str, Term], lit: Literal) -> Literal:
    atom = apply_subst(s, lit.atom)
    return lit if atom is lit.atom else Literal(lit.positive, atom)


def subst_clause(s: Mapping[str, Term], c: Clause) -> Clause:
    if not s:
        return c
    return Clause(subst_literal(s, lit) for lit in c.literals)


def compose(s1: Mapping[str, Term], s2: Mapping[str, Term]) -> Subst:
    """``compose(s1, s2)`` applies ``s2`` first, then ``s1``."""
    out = {x: apply_subst(s1, t) for x, t in s2.items()}
    for x, t in s1.items():
        if x not in s2:
            out[x] = t
    return Subst(out)


def _walk(t: Term, b: dict[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in b:
        t = b[t.name]
    return t


def _occurs_walk(name: str, t: Term, b: dict[str, Term]) -> bool:
    t = _walk(t, b)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs_walk(name, a, b) for a in t.args)


def _resolve(t: Term, b: dict[str, Term]) -> Term:
    t = _walk(t, b)
    if isinstance(t, Var) or not t.args:
        return t
    return App(t.sym, (_resolve(a, b) for a in t.args))


def unify_into(pairs: Iterable[tuple[Term, Term]], b: dict[str, Term]) -> bool:
    """Extend triangular bindings ``b`` so that every pair unifies."""
    stack = list(pairs)
    while stack:
        s, t = stack.pop()
        s = _walk(s, b)
        t = _walk(t, b)
        if s is t or s == t:
            continue
        if isinstance(s, Var):
            if _occurs_walk(s.name, t, b):
                return False
            b[s.name] = t
        elif isinstance(t, Var):
            if _occurs_walk(t.name, s, b):
                return False
            b[t.name] = s
        else:
            if s.sym != t.sym or len(s.args) != len(t.args):
                return False
            stack.extend(zip(s.args, t.args))
    return True


def solved(b: dict[str, Term]) -> Subst:
    return Subst({x: _resolve(t, b) for x, t in b.items()})


def mgu(t1: Term, t2: Term) -> Subst | None:
    """Most general unifier of two terms, or ``None``.  Occurs check is on."""
    b: dict[str, Term] = {}
    if not unify_into([(t1, t2)], b):
        return None
    return solved(b)


def mgu_many(pairs: Iterable[tuple[Term, Term]]) -> Subst | None:
    b: dict[str, Term] = {}
    if not unify_into(pairs, b):
        return None
    return solved(b)


def match_into(pattern: Term, target: Term, b: dict[str, Term]) -> bool:
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = b.get(p.name)
            if bound is None:
                b[p.name] = t
            elif bound != t:
                return False
        elif isinstance(t, Var) or p.sym != t.sym or len(p.args) != len(t.args):
            return False
        else:
            stack.extend(zip(p.args, t.args))
    return True


def match(pattern: Term, target: Term) -> Subst | None:
    """Substitution ``s`` with ``s(pattern) == target``; target variables are rigid."""
    b: dict[str, Term] = {}
    if not match_into(pattern, target, b):
        return None
    return Subst(b)


def subsumes(c: Clause, d: Clause) -> bool:
    """True if some substitution maps every literal of ``c`` into ``d``."""
    if len(c) > len(d):
        return False
    lits = sorted(c.literals, key=lambda l: -size(l.atom))
    dlits = d.literals

    def go(i: int, b: dict[str, Term]) -> bool:
        if i == len(lits):
            return True
        lit = lits[i]
        for cand in dlits:
            if cand.positive != lit.positive:
                continue
            nb = dict(b)
            if match_into(lit.atom, cand.atom, nb) and go(i + 1, nb):
                return True
        return False

    return go(0, {})


def variant(c: Clause, d: Clause) -> bool:
    return len(c) == len(d) and subsumes(c, d) and subsumes(d, c)


def base_name(name: str) -> str:
    return name.split("%", 1)[0] if "%" in name and not name.startswith("%") else name


class Fresh:
    """Per-problem supply of fresh variable names ``base%N``."""

    def __init__(self, start: int = 1):
        self._counter = itertools.count(start)

    def name(self, base: str) -> str:
        return f"{base_name(base) or 'v'}%{next(self._counter)}"

    def renaming(self, names: Iterable[str]) -> Subst:
        return Subst({n: Var(self.name(n)) for n in names})
