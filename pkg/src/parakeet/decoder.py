"""Turn first-order substitution terms back into readable surface terms.

The pipeline for one instantiation is decode (undo ``app`` and n-ary
application), expand (replace combinators and lifted symbols by their
lambdas and beta-eta normalize), eliminate Skolem terms (each becomes a
wildcard, arguments included) and finalize (give unbound or leftover
variables the value ``undefined`` or a wildcard).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count

from .clausify import ClausifiedProblem, combinator_lambda
from .instantiation import Instantiation, RawInstantiation
from .surface import (
    NormalizationError,
    SApp,
    SConst,
    SLam,
    STerm,
    SVar,
    alpha_key,
    free_vars,
    is_wildcard,
    mk_app,
    normalize,
    rename_bound,
    spine,
    subst,
)
from .prover import EXT_SKOLEM
from .terms import APP, SKOLEM_PREFIX, UNDEFINED, WILDCARD_PREFIX, Term, Var


class DecodeError(ValueError):
    pass


@dataclass
class DecodeContext:
    # every first-order symbol the decoder may meet; None accepts anything
    symbols: set[str] | None = None
    skolems: dict[str, int] = field(default_factory=dict)
    definitions: dict[str, STerm] = field(default_factory=dict)
    undefined: bool = True
    wildcards: count = field(default_factory=count)

    def fresh_wildcard(self) -> SVar:
        return SVar(f"{WILDCARD_PREFIX}{next(self.wildcards)}")

    @classmethod
    def for_problem(cls, cp: ClausifiedProblem, undefined: bool = True) -> DecodeContext:
        definitions = {sym: d.as_lambda() for sym, d in cp.lifted.items()}
        for name in cp.combinators:
            definitions[name] = combinator_lambda(name)
        skolems = {name: info.arity for name, info in cp.skolems.items()}
        skolems[EXT_SKOLEM] = 2
        symbols = cp.symbols() | {EXT_SKOLEM, APP}
        return cls(symbols, skolems, definitions, undefined)


def decode_term(t: Term, ctx: DecodeContext) -> STerm:
    if isinstance(t, Var):
        return SVar(t.name)
    if t.sym == APP and len(t.args) == 2:
        return SApp(decode_term(t.args[0], ctx), decode_term(t.args[1], ctx))
    if ctx.symbols is not None and t.sym not in ctx.symbols:
        raise DecodeError(f"unknown symbol {t.sym!r}")
    return mk_app(SConst(t.sym), [decode_term(a, ctx) for a in t.args])


def expand_combinators(t: STerm, ctx: DecodeContext) -> STerm:
    """Replace defined symbols by their lambdas and beta-eta normalize."""

    def unfold(t):
        if isinstance(t, SConst):
            # definitions may mention other defined symbols; they never cycle
            return unfold(ctx.definitions[t.name]) if t.name in ctx.definitions else t
        if isinstance(t, SApp):
            return SApp(unfold(t.fun), unfold(t.arg))
        if isinstance(t, SLam):
            return SLam(t.var, unfold(t.body))
        return t

    if not ctx.definitions:
        return t
    try:
        out = normalize(unfold(t))
    except NormalizationError as exc:
        raise DecodeError(str(exc)) from exc
    return rename_bound(out)


def _is_skolem(name: str, ctx: DecodeContext) -> bool:
    return name in ctx.skolems or name.startswith(SKOLEM_PREFIX)


def eliminate_skolems(t: STerm, ctx: DecodeContext, table: dict | None = None) -> STerm:
    """Replace each Skolem term, arguments included, by a wildcard.

    Identical Skolem terms share one wildcard through ``table``.
    """
    table = {} if table is None else table
    head, args = spine(t)
    if isinstance(head, SConst) and _is_skolem(head.name, ctx):
        k = min(ctx.skolems.get(head.name, len(args)), len(args))
        key = alpha_key(mk_app(head, args[:k]))
        if key not in table:
            table[key] = ctx.fresh_wildcard()
        return mk_app(table[key], [eliminate_skolems(a, ctx, table) for a in args[k:]])
    if isinstance(head, SLam):
        head = SLam(head.var, eliminate_skolems(head.body, ctx, table))
    return mk_app(head, [eliminate_skolems(a, ctx, table) for a in args])


def finalize(
    fact: str,
    bindings: dict[str, STerm],
    targets: tuple[str, ...] | list[str],
    ctx: DecodeContext,
    order: list[str] | None = None,
) -> Instantiation:
    """Bind every target; leftover variables become ``undefined`` or wildcards."""
    filler: dict[str, STerm] = {}

    def fill(name: str) -> STerm:
        if name not in filler:
            filler[name] = SConst(UNDEFINED) if ctx.undefined else ctx.fresh_wildcard()
        return filler[name]

    def close(t: STerm) -> STerm:
        loose = [v for v in free_vars(t) if not is_wildcard(v)]
        return subst(t, {v: fill(v) for v in loose}) if loose else t

    out: dict[str, STerm] = {}
    for name in targets:
        out[name] = close(bindings[name]) if name in bindings else fill(f"\0{name}")
    for name, t in bindings.items():
        out.setdefault(name, close(t))
    if order is not None:
        rank = {v: i for i, v in enumerate(order)}
        out = dict(sorted(out.items(), key=lambda kv: rank.get(kv[0], len(rank))))
    return Instantiation(fact, out)


def decode_instantiation(raw: RawInstantiation, ctx: DecodeContext, order: list[str] | None = None) -> Instantiation:
    """Full pipeline for one raw instantiation; a failing binding is left out."""
    table: dict = {}
    decoded: dict[str, STerm] = {}
    errors: list[str] = []
    targets = list(raw.targets)
    for name, term in raw.bindings.items():
        try:
            s = decode_term(term, ctx)
            s = expand_combinators(s, ctx)
            s = eliminate_skolems(s, ctx, table)
        except DecodeError as exc:
            errors.append(f"{raw.fact}: cannot decode binding for {name}: {exc}")
            if name in targets:
                targets.remove(name)
            continue
        decoded[name] = s
    inst = finalize(raw.fact, decoded, tuple(targets), ctx, order)
    inst.errors = errors
    return inst
