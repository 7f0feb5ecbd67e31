"""Knuth-Bendix order with unit weights."""

from __future__ import annotations

from collections import Counter

from .terms import APP, EQ, LIFT_PREFIX, SKOLEM_PREFIX, COMBINATORS, App, Literal, Term, Var, size, variables


def _var_counts(t: Term) -> Counter:
    return Counter(variables(t))


class KBO:
    """Unit symbol weights; ``precedence`` lists symbols from greatest to least.

    Symbols missing from the list rank below every listed one, ordered by name.
    """

    def __init__(self, precedence: list[str]):
        n = len(precedence)
        self._prec = {s: n - i for i, s in enumerate(precedence)}

    def prec(self, sym: str):
        return (self._prec.get(sym, 0), sym if sym not in self._prec else "")

    def greater(self, s: Term, t: Term) -> bool:
        if s == t:
            return False
        if isinstance(t, Var):
            return isinstance(s, App) and t.name in set(variables(s))
        if isinstance(s, Var):
            return False
        vs, vt = _var_counts(s), _var_counts(t)
        for x, k in vt.items():
            if vs.get(x, 0) < k:
                return False
        ws, wt = size(s), size(t)
        if ws != wt:
            return ws > wt
        if s.sym != t.sym:
            return self.prec(s.sym) > self.prec(t.sym)
        if len(s.args) != len(t.args):
            return len(s.args) > len(t.args)
        for a, b in zip(s.args, t.args):
            if a != b:
                return self.greater(a, b)
        return False

    def lit_greater(self, l1: Literal, l2: Literal) -> bool:
        if l1.atom == l2.atom:
            return not l1.positive and l2.positive
        return self.greater(l1.atom, l2.atom)

    def maximal(self, lit: Literal, lits) -> bool:
        """No other literal is strictly greater than ``lit``."""
        return not any(other != lit and self.lit_greater(other, lit) for other in lits)


def default_precedence(symbols_in_order: list[str]) -> list[str]:
    """``app`` and encoding symbols first, then the problem's symbols in
    order of appearance, then Skolem symbols, with equality last."""
    head = [APP] + [s for s in symbols_in_order if s.startswith(LIFT_PREFIX)]
    head += [c for c in COMBINATORS if c in symbols_in_order]
    mid = [s for s in symbols_in_order if s not in head and not s.startswith(SKOLEM_PREFIX) and s != EQ]
    tail = [s for s in symbols_in_order if s.startswith(SKOLEM_PREFIX)]
    seen: dict[str, None] = {}
    for s in head + mid + tail + [EQ]:
        seen.setdefault(s, None)
    return list(seen)
