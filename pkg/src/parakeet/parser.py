"""Problem files: a line-oriented surface format and a TPTP CNF/FOF subset.

Surface format::

    # comment
    option lambda_mode = lifting
    const pow, neg
    fact F1 : less(m, n) -> less(Suc(m), Suc(n))
    goal : less(1, Suc(Suc(x)))

An entry may continue on following lines.  Identifiers that are not bound
by ``!``, ``?`` or ``\\`` are constants when they start with an uppercase
letter or digit, are declared with ``const``, occur in the goal, head an
atom, or are applied with call syntax ``f(a, b)``.  The remaining free
identifiers of a fact are its variables (the instantiation targets).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

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
    consts,
    formula_free_vars,
    formula_terms,
    map_terms,
    mk_app,
    spine,
)
from .terms import UNDEFINED, WILDCARD_PREFIX

LAMBDA_MODES = ("lifting", "combinators")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.msg, self.line, self.col = msg, line, col


@dataclass
class Options:
    lambda_mode: str = "lifting"
    ext: bool = False
    undefined: bool = True


@dataclass
class Fact:
    name: str
    formula: Formula
    free_vars: list[str]
    line: int = 0


@dataclass
class Problem:
    facts: list[Fact] = field(default_factory=list)
    goal: Formula | None = None
    options: Options = field(default_factory=Options)
    # already negated goal parts, universally closed (TPTP negated_conjecture)
    negated_goals: list[Formula] = field(default_factory=list)
    # symbols written with call syntax, used to print terms back the same way
    calls: dict[str, int] = field(default_factory=dict)
    # which options were set by the file itself
    explicit: set[str] = field(default_factory=set)
    name: str = ""

    def fact(self, name: str) -> Fact:
        for f in self.facts:
            if f.name == name:
                return f
        raise KeyError(name)


# -- tokens -----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)"
    r"|(?P<op><->|->|!=|~|&|\||=|\(|\)|,|\.|!|\?|\\|:)"
    r"|(?P<id>[A-Za-z0-9_][A-Za-z0-9_']*)"
)


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int
    spaced: bool
    first: bool


def tokenize(text: str) -> list[Tok]:
    toks: list[Tok] = []
    pos, line, line_start = 0, 1, 0
    spaced, first = True, True
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            chunk = m.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
                first = True
            spaced = True
        else:
            toks.append(Tok(kind, m.group(), line, pos - line_start + 1, spaced, first))
            spaced, first = False, False
        pos = m.end()
    return toks


# -- formula parser ---------------------------------------------------------


class _Group:
    """A parenthesized formula that is not a plain term."""

    def __init__(self, formula: Formula):
        self.formula = formula


class _FormulaParser:
    def __init__(self, toks: list[Tok], calls: dict, call_sites: dict, wild: itertools.count):
        self.toks = toks
        self.i = 0
        self.calls = calls
        self.call_sites = call_sites
        self.wild = wild
        self.bound: list[str] = []
        self.heads: set[str] = set()

    # helpers
    def peek(self, k: int = 0) -> Tok | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == "op" and t.text == text

    def error(self, msg: str, tok: Tok | None = None):
        tok = tok or self.peek() or (self.toks[-1] if self.toks else None)
        if tok is None:
            raise ParseError(msg)
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            t = self.peek()
            self.error(f"expected {text!r}, found {t.text!r}" if t else f"expected {text!r} at end of input")
        self.i += 1
        return self.toks[self.i - 1]

    def ident(self) -> Tok:
        t = self.peek()
        if t is None or t.kind != "id":
            self.error("expected an identifier")
        self.i += 1
        return t

    def binders(self) -> list[str]:
        names = [self.ident().text]
        while not self.at("."):
            names.append(self.ident().text)
        self.expect(".")
        for n in names:
            if "%" in n or n == "_":
                self.error(f"cannot bind {n!r}")
        return names

    # grammar
    def formula(self) -> Formula:
        lhs = self.imp()
        while self.at("<->"):
            self.i += 1
            lhs = FIff(lhs, self.imp())
        return lhs

    def imp(self) -> Formula:
        lhs = self.disj()
        if self.at("->"):
            self.i += 1
            return FImp(lhs, self.imp())
        return lhs

    def disj(self) -> Formula:
        lhs = self.conj()
        while self.at("|"):
            self.i += 1
            lhs = FOr(lhs, self.conj())
        return lhs

    def conj(self) -> Formula:
        lhs = self.unary()
        while self.at("&"):
            self.i += 1
            lhs = FAnd(lhs, self.unary())
        return lhs

    def unary(self) -> Formula:
        if self.at("~"):
            self.i += 1
            return FNot(self.unary())
        if self.at("!") or self.at("?"):
            q = FAll if self.peek().text == "!" else FEx
            self.i += 1
            names = self.binders()
            self.bound.extend(names)
            body = self.formula()
            del self.bound[len(self.bound) - len(names):]
            for n in reversed(names):
                body = q(n, body)
            return body
        return self.equation()

    def equation(self) -> Formula:
        start = self.peek()
        lhs = self.application()
        if self.at("=") or self.at("!="):
            negated = self.peek().text == "!="
            self.i += 1
            if isinstance(lhs, _Group):
                self.error("formula used as a term", start)
            rhs = self.application()
            if isinstance(rhs, _Group):
                self.error("formula used as a term", start)
            f = FEq(lhs, rhs)
            return FNot(f) if negated else f
        if isinstance(lhs, _Group):
            return lhs.formula
        head, _ = spine(lhs)
        if isinstance(head, SConst):
            self.heads.add(head.name)
        return FAtom(lhs)

    def starts_primary(self) -> bool:
        t = self.peek()
        if t is None:
            return False
        return t.kind == "id" or (t.kind == "op" and t.text in ("(", "\\"))

    def application(self):
        start = self.peek()
        if not self.starts_primary():
            self.error(f"unexpected {start.text!r}" if start else "unexpected end of input")
        items = [self.primary()]
        while self.starts_primary():
            items.append(self.primary())
        if len(items) == 1:
            return items[0]
        for it in items:
            if isinstance(it, _Group):
                self.error("formula used as a term", start)
        return mk_app(items[0], items[1:])

    def term(self) -> STerm:
        start = self.peek()
        t = self.application()
        if isinstance(t, _Group):
            self.error("formula used as a term", start)
        return t

    def primary(self):
        t = self.peek()
        if t.kind == "op" and t.text == "\\":
            self.i += 1
            names = self.binders()
            self.bound.extend(names)
            body = self.term()
            del self.bound[len(self.bound) - len(names):]
            for n in reversed(names):
                body = SLam(n, body)
            return body
        if t.kind == "op" and t.text == "(":
            self.i += 1
            f = self.formula()
            self.expect(")")
            if isinstance(f, FAtom):
                return f.term
            return _Group(f)
        tok = self.ident()
        if tok.text == "_":
            atom = SVar(f"{WILDCARD_PREFIX}{next(self.wild)}")
        elif "%" in tok.text:
            self.error(f"identifier {tok.text!r} uses a reserved character", tok)
        elif tok.text in self.bound:
            atom = SVar(tok.text)
        else:
            atom = SConst(tok.text)
        nxt = self.peek()
        if nxt is not None and nxt.kind == "op" and nxt.text == "(" and not nxt.spaced:
            self.i += 1
            args = [self.term()]
            while self.at(","):
                self.i += 1
                args.append(self.term())
            self.expect(")")
            if isinstance(atom, SConst):
                self.record_call(tok, len(args))
            return mk_app(atom, args)
        return atom

    def record_call(self, tok: Tok, n: int):
        old = self.calls.setdefault(tok.text, n)
        if old != n:
            first = self.call_sites[tok.text]
            raise ParseError(
                f"symbol {tok.text!r} used with {n} argument(s) here and {old} at {first[0]}:{first[1]}",
                tok.line,
                tok.col,
            )
        self.call_sites.setdefault(tok.text, (tok.line, tok.col))

    def parse_all(self) -> Formula:
        f = self.formula()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek().text!r}")
        return f


# -- problem files ----------------------------------------------------------

_KEYWORDS = ("option", "fact", "goal", "const")


def _truth(value: str, tok: Tok) -> bool:
    v = value.lower()
    if v in ("true", "on", "yes", "1"):
        return True
    if v in ("false", "off", "no", "0"):
        return False
    raise ParseError(f"expected a boolean, found {value!r}", tok.line, tok.col)


def _set_option(opts: Options, name: Tok, value: Tok) -> str:
    key = name.text
    if key in ("lambda_mode", "lambda"):
        if value.text not in LAMBDA_MODES:
            raise ParseError(f"lambda_mode must be one of {', '.join(LAMBDA_MODES)}", value.line, value.col)
        opts.lambda_mode = value.text
        return "lambda_mode"
    if key == "ext":
        opts.ext = _truth(value.text, value)
        return "ext"
    if key == "undefined":
        opts.undefined = _truth(value.text, value)
        return "undefined"
    raise ParseError(f"unknown option {key!r}", name.line, name.col)


def _entries(toks: list[Tok]):
    cur: list[Tok] = []
    for t in toks:
        if t.first and t.kind == "id" and t.text in _KEYWORDS and cur:
            yield cur
            cur = []
        cur.append(t)
    if cur:
        yield cur


def _resolve(f: Formula, constants: set[str]) -> Formula:
    def fix(t: STerm) -> STerm:
        if isinstance(t, SConst):
            return t if t.name in constants else SVar(t.name)
        if isinstance(t, SApp):
            return SApp(fix(t.fun), fix(t.arg))
        if isinstance(t, SLam):
            return SLam(t.var, fix(t.body))
        return t

    return map_terms(f, fix)


def _unbound_names(f: Formula) -> list[str]:
    out: dict[str, None] = {}
    for t in formula_terms(f):
        for c in sorted(consts(t)):
            out.setdefault(c, None)
    return list(out)


def _is_constant_name(name: str) -> bool:
    return name[0].isupper() or name[0].isdigit() or name == UNDEFINED


def parse_problem(text: str, name: str = "") -> Problem:
    if _looks_like_tptp(text):
        return parse_tptp(text, name)
    toks = tokenize(text)
    problem = Problem(name=name)
    calls: dict[str, int] = {}
    call_sites: dict = {}
    wild = itertools.count()
    declared: set[str] = set()
    heads: set[str] = set()
    raw_facts: list[tuple[Tok, Formula]] = []
    goal_seen: Tok | None = None
    for entry in _entries(toks):
        kw = entry[0]
        if kw.kind != "id" or kw.text not in _KEYWORDS:
            raise ParseError(f"expected one of {', '.join(_KEYWORDS)}", kw.line, kw.col)
        if kw.text == "option":
            if len(entry) != 4 or entry[2].text != "=":
                raise ParseError("expected: option <name> = <value>", kw.line, kw.col)
            problem.explicit.add(_set_option(problem.options, entry[1], entry[3]))
            continue
        if kw.text == "const":
            for t in entry[1:]:
                if t.kind == "id":
                    declared.add(t.text)
                elif t.text != ",":
                    raise ParseError(f"unexpected {t.text!r} in const declaration", t.line, t.col)
            continue
        if kw.text == "fact":
            if len(entry) < 3 or entry[1].kind != "id" or entry[2].text != ":":
                raise ParseError("expected: fact <Name> : <formula>", kw.line, kw.col)
            body = entry[3:]
            label = entry[1]
        else:
            if len(entry) < 2 or entry[1].text != ":":
                raise ParseError("expected: goal : <formula>", kw.line, kw.col)
            if goal_seen is not None:
                raise ParseError(f"second goal (first at line {goal_seen.line})", kw.line, kw.col)
            goal_seen = kw
            body = entry[2:]
            label = None
        if not body:
            raise ParseError("missing formula", kw.line, kw.col)
        p = _FormulaParser(body, calls, call_sites, wild)
        f = p.parse_all()
        heads |= p.heads
        if label is None:
            problem.goal = f
        else:
            if any(t.text == label.text for t, _ in raw_facts):
                raise ParseError(f"duplicate fact name {label.text!r}", label.line, label.col)
            raw_facts.append((label, f))

    constants = set(declared) | heads | set(calls)
    if problem.goal is not None:
        constants |= set(_unbound_names(problem.goal))
    for _, f in raw_facts:
        constants |= {c for c in _unbound_names(f) if _is_constant_name(c)}
    for label, f in raw_facts:
        resolved = _resolve(f, constants)
        problem.facts.append(Fact(label.text, resolved, formula_free_vars(resolved), label.line))
    problem.calls = calls
    return problem


def parse_file(path) -> Problem:
    from pathlib import Path

    p = Path(path)
    return parse_problem(p.read_text(encoding="utf-8"), p.stem)


# -- TPTP -------------------------------------------------------------------

_TPTP_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<comment>%[^\n]*|/\*.*?\*/)"
    r"|(?P<op><=>|<~>|=>|<=|~\||~&|!=|[~&|=(),.:\[\]!?])"
    r"|(?P<id>\$?[A-Za-z0-9_]+|'[^']*')",
    re.S,
)


def _looks_like_tptp(text: str) -> bool:
    return re.search(r"^\s*(cnf|fof)\s*\(", text, re.M) is not None


def _tptp_tokens(text: str) -> list[Tok]:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TPTP_TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        if m.lastgroup not in ("ws", "comment"):
            toks.append(Tok(m.lastgroup, m.group(), line, pos - line_start + 1, False, False))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return toks


class _TptpParser(_FormulaParser):
    def __init__(self, toks):
        super().__init__(toks, {}, {}, itertools.count())
        self.arities: dict[str, tuple[int, Tok]] = {}

    def name(self) -> str:
        t = self.ident()
        return t.text.strip("'")

    def annotated(self):
        kind = self.ident().text
        if kind not in ("cnf", "fof"):
            self.error(f"unsupported TPTP form {kind!r}")
        self.expect("(")
        name = self.name()
        self.expect(",")
        role = self.ident().text
        self.expect(",")
        f = self.tformula()
        while self.at(","):  # ignore annotations
            depth = 0
            self.i += 1
            while not (depth == 0 and self.at(")")):
                if self.at("(") or self.at("["):
                    depth += 1
                elif self.at(")") or self.at("]"):
                    depth -= 1
                self.i += 1
        self.expect(")")
        self.expect(".")
        return kind, name, role, f

    def tformula(self) -> Formula:
        lhs = self.tunit()
        t = self.peek()
        if t is not None and t.kind == "op" and t.text in ("<=>", "=>", "<=", "<~>", "~|", "~&"):
            self.i += 1
            rhs = self.tunit()
            return {
                "<=>": lambda: FIff(lhs, rhs),
                "=>": lambda: FImp(lhs, rhs),
                "<=": lambda: FImp(rhs, lhs),
                "<~>": lambda: FNot(FIff(lhs, rhs)),
                "~|": lambda: FNot(FOr(lhs, rhs)),
                "~&": lambda: FNot(FAnd(lhs, rhs)),
            }[t.text]()
        for op, cls in (("|", FOr), ("&", FAnd)):
            if self.at(op):
                while self.at(op):
                    self.i += 1
                    lhs = cls(lhs, self.tunit())
                return lhs
        return lhs

    def tunit(self) -> Formula:
        if self.at("~"):
            self.i += 1
            return FNot(self.tunit())
        if self.at("!") or self.at("?"):
            q = FAll if self.peek().text == "!" else FEx
            self.i += 1
            self.expect("[")
            names = [self.ident().text]
            while self.at(","):
                self.i += 1
                names.append(self.ident().text)
            self.expect("]")
            self.expect(":")
            self.bound.extend(names)
            body = self.tunit()
            del self.bound[len(self.bound) - len(names):]
            for n in reversed(names):
                body = q(n, body)
            return body
        if self.at("("):
            self.i += 1
            f = self.tformula()
            self.expect(")")
            return f
        lhs = self.tterm()
        if self.at("=") or self.at("!="):
            negated = self.peek().text == "!="
            self.i += 1
            f = FEq(lhs, self.tterm())
            return FNot(f) if negated else f
        if isinstance(lhs, SConst) and lhs.name == "$true":
            return FEq(SConst("$true"), SConst("$true"))
        if isinstance(lhs, SConst) and lhs.name == "$false":
            return FNot(FEq(SConst("$true"), SConst("$true")))
        return FAtom(lhs)

    def tterm(self) -> STerm:
        tok = self.ident()
        name = tok.text.strip("'")
        if tok.text[0].isupper() or tok.text[0] == "_":
            if self.at("("):
                self.error("variables cannot be applied in TPTP")
            return SVar(name)
        args = []
        if self.at("("):
            self.i += 1
            args.append(self.tterm())
            while self.at(","):
                self.i += 1
                args.append(self.tterm())
            self.expect(")")
        old = self.arities.setdefault(name, (len(args), tok))
        if old[0] != len(args):
            raise ParseError(f"symbol {name!r} used with {len(args)} argument(s) here and {old[0]} at {old[1].line}:{old[1].col}", tok.line, tok.col)
        if args:
            self.calls[name] = len(args)
        return mk_app(SConst(name), args)


def parse_tptp(text: str, name: str = "") -> Problem:
    p = _TptpParser(_tptp_tokens(text))
    problem = Problem(name=name)
    goals: list[Formula] = []
    while p.peek() is not None:
        tok = p.peek()
        kind, fname, role, f = p.annotated()
        if role == "negated_conjecture":
            vs = formula_free_vars(f)
            for v in reversed(vs):
                f = FAll(v, f)
            problem.negated_goals.append(f)
        elif role == "conjecture":
            if kind == "cnf":
                raise ParseError("cnf conjecture must be a negated_conjecture", tok.line, tok.col)
            goals.append(f)
        else:
            if any(x.name == fname for x in problem.facts):
                raise ParseError(f"duplicate fact name {fname!r}", tok.line, tok.col)
            problem.facts.append(Fact(fname, f, formula_free_vars(f), tok.line))
    if goals:
        g = goals[0]
        for extra in goals[1:]:
            g = FAnd(g, extra)
        problem.goal = g
    problem.calls = p.calls
    return problem
