"""Surface language: untyped lambda terms and first-order formulas over them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Union

from .terms import WILDCARD_PREFIX


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class SConst:
    name: str


@dataclass(frozen=True)
class SApp:
    fun: "STerm"
    arg: "STerm"


@dataclass(frozen=True)
class SLam:
    var: str
    body: "STerm"


STerm = Union[SVar, SConst, SApp, SLam]


def is_wildcard(name: str) -> bool:
    return name.startswith(WILDCARD_PREFIX)


def mk_app(head: STerm, args) -> STerm:
    for a in args:
        head = SApp(head, a)
    return head


def spine(t: STerm) -> tuple[STerm, list[STerm]]:
    args = []
    while isinstance(t, SApp):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def lams(names, body: STerm) -> STerm:
    for n in reversed(list(names)):
        body = SLam(n, body)
    return body


def free_vars(t: STerm) -> list[str]:
    """Free variable names in order of first occurrence."""
    out: dict[str, None] = {}

    def go(t, bound):
        if isinstance(t, SVar):
            if t.name not in bound:
                out.setdefault(t.name, None)
        elif isinstance(t, SApp):
            go(t.fun, bound)
            go(t.arg, bound)
        elif isinstance(t, SLam):
            go(t.body, bound | {t.var})

    go(t, frozenset())
    return list(out)


def all_names(t: STerm) -> set[str]:
    if isinstance(t, (SVar, SConst)):
        return {t.name}
    if isinstance(t, SApp):
        return all_names(t.fun) | all_names(t.arg)
    return {t.var} | all_names(t.body)


def consts(t: STerm) -> set[str]:
    if isinstance(t, SConst):
        return {t.name}
    if isinstance(t, SApp):
        return consts(t.fun) | consts(t.arg)
    if isinstance(t, SLam):
        return consts(t.body)
    return set()


def has_lambda(t: STerm) -> bool:
    if isinstance(t, SLam):
        return True
    if isinstance(t, SApp):
        return has_lambda(t.fun) or has_lambda(t.arg)
    return False


def fresh_name(base: str, avoid: set[str]) -> str:
    name = base
    while name in avoid:
        name += "'"
    return name


def subst(t: STerm, mapping: dict[str, STerm]) -> STerm:
    """Capture-avoiding simultaneous substitution of free variables."""
    if not mapping:
        return t
    if isinstance(t, SVar):
        return mapping.get(t.name, t)
    if isinstance(t, SConst):
        return t
    if isinstance(t, SApp):
        return SApp(subst(t.fun, mapping), subst(t.arg, mapping))
    inner = {k: v for k, v in mapping.items() if k != t.var}
    if not inner:
        return t
    body_free = set(free_vars(t.body))
    incoming = set()
    for k, v in inner.items():
        if k in body_free:
            incoming.update(free_vars(v))
    if t.var in incoming:
        new = fresh_name(t.var, incoming | body_free | set(inner))
        inner[t.var] = SVar(new)
        return SLam(new, subst(t.body, inner))
    return SLam(t.var, subst(t.body, inner))


def normalize(t: STerm, budget: int = 10_000) -> STerm:
    """Beta-eta normal form; raises ``NormalizationError`` past ``budget`` beta steps."""
    steps = [0]

    def nf(t):
        if isinstance(t, (SVar, SConst)):
            return t
        if isinstance(t, SLam):
            body = nf(t.body)
            if (
                isinstance(body, SApp)
                and body.arg == SVar(t.var)
                and t.var not in free_vars(body.fun)
            ):
                return body.fun
            return SLam(t.var, body)
        head, args = spine(t)
        head = nf(head)
        while isinstance(head, SLam) and args:
            steps[0] += 1
            if steps[0] > budget:
                raise NormalizationError(f"beta-eta normalization exceeded {budget} steps")
            reduced = subst(head.body, {head.var: args[0]})
            args = args[1:]
            head, more = spine(reduced)
            args = more + args
            head = nf(head)
        return mk_app(head, [nf(a) for a in args])

    return nf(t)


def _debruijn(t: STerm, env: tuple, wildcards: bool):
    if isinstance(t, SVar):
        if t.name in env:
            return ("b", env.index(t.name))
        if wildcards and is_wildcard(t.name):
            return ("w",)
        return ("v", t.name)
    if isinstance(t, SConst):
        return ("c", t.name)
    if isinstance(t, SApp):
        return ("a", _debruijn(t.fun, env, wildcards), _debruijn(t.arg, env, wildcards))
    return ("l", _debruijn(t.body, (t.var,) + env, wildcards))


def alpha_key(t: STerm, wildcards_equal: bool = False):
    return _debruijn(t, (), wildcards_equal)


def alpha_eq(s: STerm, t: STerm, wildcards_equal: bool = False) -> bool:
    return alpha_key(s, wildcards_equal) == alpha_key(t, wildcards_equal)


def is_normal(t: STerm) -> bool:
    """No beta-redex and no eta-redex anywhere in ``t``."""
    if isinstance(t, (SVar, SConst)):
        return True
    if isinstance(t, SLam):
        b = t.body
        if isinstance(b, SApp) and b.arg == SVar(t.var) and t.var not in free_vars(b.fun):
            return False
        return is_normal(b)
    if isinstance(t.fun, SLam):
        return False
    return is_normal(t.fun) and is_normal(t.arg)


def rename_bound(t: STerm, alphabet: str = "abcdefghijklmnopqrstuvwxyz") -> STerm:
    """Rename every binder to the first letter not already used in its body."""
    if isinstance(t, (SVar, SConst)):
        return t
    if isinstance(t, SApp):
        return SApp(rename_bound(t.fun, alphabet), rename_bound(t.arg, alphabet))
    body = rename_bound(t.body, alphabet)
    taken = all_names(body) - {t.var}
    for name in itertools.chain(alphabet, (f"{c}{i}" for i in itertools.count(1) for c in alphabet)):
        if name not in taken:
            break
    if name == t.var:
        return SLam(name, body)
    return SLam(name, subst(body, {t.var: SVar(name)}))


# -- printing ---------------------------------------------------------------


def show(t: STerm, calls: dict[str, int] | None = None) -> str:
    """Render ``t`` by juxtaposition.

    Constants listed in ``calls`` (name -> arity) are printed with call
    syntax ``f(a, b)`` when applied to at least that many arguments.
    """
    if isinstance(t, SVar):
        return "_" if is_wildcard(t.name) else t.name
    if isinstance(t, SConst):
        return t.name
    if isinstance(t, SLam):
        return f"\\{t.var}. {show(t.body, calls)}"
    head, args = spine(t)
    if calls and isinstance(head, SConst) and calls.get(head.name, 0) and len(args) >= calls[head.name]:
        k = calls[head.name]
        first = f"{head.name}({', '.join(show(a, calls) for a in args[:k])})"
        rest = [_atomic(a, calls) for a in args[k:]]
        return " ".join([first] + rest)
    parts = [_atomic(head, calls)] + [_atomic(a, calls) for a in args]
    return " ".join(parts)


def _atomic(t: STerm, calls=None) -> str:
    if isinstance(t, SLam):
        return f"({show(t, calls)})"
    if isinstance(t, SApp):
        s = show(t, calls)
        head, args = spine(t)
        if calls and isinstance(head, SConst) and len(args) == calls.get(head.name, -1):
            return s
        return f"({s})"
    return show(t, calls)


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class FAtom:
    term: STerm


@dataclass(frozen=True)
class FEq:
    lhs: STerm
    rhs: STerm


@dataclass(frozen=True)
class FNot:
    body: "Formula"


@dataclass(frozen=True)
class FAnd:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class FOr:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class FImp:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class FIff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class FAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class FEx:
    var: str
    body: "Formula"


Formula = Union[FAtom, FEq, FNot, FAnd, FOr, FImp, FIff, FAll, FEx]
BINARY = (FAnd, FOr, FImp, FIff)
QUANT = (FAll, FEx)


def map_terms(f: Formula, fn: Callable[[STerm], STerm]) -> Formula:
    if isinstance(f, FAtom):
        return FAtom(fn(f.term))
    if isinstance(f, FEq):
        return FEq(fn(f.lhs), fn(f.rhs))
    if isinstance(f, FNot):
        return FNot(map_terms(f.body, fn))
    if isinstance(f, BINARY):
        return type(f)(map_terms(f.lhs, fn), map_terms(f.rhs, fn))
    return type(f)(f.var, map_terms(f.body, fn))


def formula_terms(f: Formula):
    if isinstance(f, FAtom):
        yield f.term
    elif isinstance(f, FEq):
        yield f.lhs
        yield f.rhs
    elif isinstance(f, FNot):
        yield from formula_terms(f.body)
    elif isinstance(f, BINARY):
        yield from formula_terms(f.lhs)
        yield from formula_terms(f.rhs)
    else:
        yield from formula_terms(f.body)


def formula_free_vars(f: Formula) -> list[str]:
    out: dict[str, None] = {}

    def go(f, bound):
        if isinstance(f, FAtom):
            terms = [f.term]
        elif isinstance(f, FEq):
            terms = [f.lhs, f.rhs]
        elif isinstance(f, FNot):
            go(f.body, bound)
            return
        elif isinstance(f, BINARY):
            go(f.lhs, bound)
            go(f.rhs, bound)
            return
        else:
            go(f.body, bound | {f.var})
            return
        for t in terms:
            for v in free_vars(t):
                if v not in bound:
                    out.setdefault(v, None)

    go(f, frozenset())
    return list(out)


def formula_subst(f: Formula, mapping: dict[str, STerm]) -> Formula:
    """Capture-avoiding substitution for free variables of a formula."""
    if not mapping:
        return f
    if isinstance(f, (FAtom, FEq)):
        return map_terms(f, lambda t: subst(t, mapping))
    if isinstance(f, FNot):
        return FNot(formula_subst(f.body, mapping))
    if isinstance(f, BINARY):
        return type(f)(formula_subst(f.lhs, mapping), formula_subst(f.rhs, mapping))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    if not inner:
        return f
    incoming = set()
    body_free = set(formula_free_vars(f.body))
    for k, v in inner.items():
        if k in body_free:
            incoming.update(free_vars(v))
    if f.var in incoming:
        new = fresh_name(f.var, incoming | body_free | set(inner))
        inner[f.var] = SVar(new)
        return type(f)(new, formula_subst(f.body, inner))
    return type(f)(f.var, formula_subst(f.body, inner))


def normalize_formula(f: Formula) -> Formula:
    return map_terms(f, normalize)


_PREC = {FIff: 1, FImp: 2, FOr: 3, FAnd: 4}
_OPS = {FIff: "<->", FImp: "->", FOr: "|", FAnd: "&"}


def show_formula(f: Formula, ctx: int = 0, calls: dict[str, int] | None = None) -> str:
    if isinstance(f, FAtom):
        return show(f.term, calls)
    if isinstance(f, FEq):
        return f"{show(f.lhs, calls)} = {show(f.rhs, calls)}"
    if isinstance(f, FNot):
        inner = show_formula(f.body, 5, calls)
        return f"~{inner}"
    if isinstance(f, QUANT):
        q = "!" if isinstance(f, FAll) else "?"
        s = f"{q}{f.var}. {show_formula(f.body, 0, calls)}"
        return f"({s})" if ctx > 0 else s
    p = _PREC[type(f)]
    # -> is right associative, the others left associative
    lp, rp = (p + 1, p) if isinstance(f, FImp) else (p, p + 1)
    s = f"{show_formula(f.lhs, lp, calls)} {_OPS[type(f)]} {show_formula(f.rhs, rp, calls)}"
    return f"({s})" if ctx > p else s
