import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import T, parse_term
from parakeet.clausify import LiftDef, combinator_lambda
from parakeet.decoder import (
    DecodeContext,
    DecodeError,
    decode_instantiation,
    decode_term,
    eliminate_skolems,
    expand_combinators,
    finalize,
)
from parakeet.instantiation import RawInstantiation
from parakeet.surface import SConst, SLam, SVar, alpha_eq, is_normal, is_wildcard, mk_app, show
from parakeet.terms import App


def ctx(**kw):
    return DecodeContext(**kw)


def test_decode_app():
    t = T("app(app(map, f), xs)", variables={"f", "xs"})
    assert show(decode_term(t, ctx())) == "map f xs"
    assert show(decode_term(T("Suc(x)"), ctx())) == "Suc x"


def test_unknown_symbol():
    with pytest.raises(DecodeError):
        decode_term(T("mystery(a)"), ctx(symbols={"a"}))


def test_skolem_becomes_a_wildcard():
    c = ctx(skolems={"sk%2": 1})
    t = decode_term(T("Suc(g(sk%2(y)))", variables={"y"}), c)
    assert show(eliminate_skolems(t, c)) == "Suc (g _)"


def test_skolem_free_term_is_unchanged():
    t = parse_term("f a (g b)")
    assert eliminate_skolems(t, ctx()) == t


def test_identical_skolem_terms_share_one_wildcard():
    c = ctx(skolems={"sk%1": 1})
    t = eliminate_skolems(decode_term(T("f(sk%1(a), sk%1(a), sk%1(b))"), c), c)
    a, b, d = t.fun.fun.arg, t.fun.arg, t.arg
    assert a == b and a != d
    assert all(isinstance(v, SVar) and is_wildcard(v.name) for v in (a, b, d))


def test_extra_arguments_of_a_skolem_are_kept():
    # a Skolem function applied beyond its arity through app
    c = ctx(skolems={"sk%0": 1})
    t = eliminate_skolems(decode_term(T("app(sk%0(a), b)"), c), c)
    assert show(t) == "_ b"


def test_k_zero_one():
    c = ctx(definitions={"K": combinator_lambda("K")})
    assert expand_combinators(decode_term(T("app(app(K, 0), 1)"), c), c) == SConst("0")


def test_supercombinator_expands_to_its_lambda():
    d = LiftDef("ll%0", ("a", "b"), mk_app(SConst("g"), [SVar("b"), SVar("a")]))
    c = ctx(definitions={"ll%0": d.as_lambda()})
    out = expand_combinators(SConst("ll%0"), c)
    assert alpha_eq(out, parse_term("\\a. \\b. g b a"))


def test_lifted_lambda_of_the_surjectivity_example():
    d = LiftDef("ll%0", ("n",), mk_app(SConst("g"), [mk_app(SConst("Suc"), [SVar("n")])]))
    c = ctx(definitions={"ll%0": d.as_lambda()})
    out = expand_combinators(SConst("ll%0"), c)
    assert show(out) == "\\a. g (Suc a)"


def test_nested_definitions_unfold():
    c = ctx(definitions={name: combinator_lambda(name) for name in "SKI"})
    # S K K behaves as the identity
    out = expand_combinators(decode_term(T("app(app(S, K), K)"), c), c)
    assert alpha_eq(out, SLam("x", SVar("x")))


def test_undefined_and_wildcard_finalization():
    on = finalize("H", {}, ("x",), ctx(undefined=True))
    assert on.bindings == {"x": SConst("undefined")}
    off = finalize("H", {}, ("x",), ctx(undefined=False))
    assert is_wildcard(off.bindings["x"].name)


def test_ground_instantiation_is_unchanged():
    inst = finalize("F", {"n": SConst("2")}, ("n",), ctx())
    assert inst.bindings == {"n": SConst("2")}


def test_loose_variables_are_closed():
    inst = finalize("F", {"n": mk_app(SConst("Suc"), [SVar("v%3")])}, ("n",), ctx())
    assert show(inst.bindings["n"]) == "Suc undefined"


def test_failing_binding_is_reported_not_fatal():
    raw = RawInstantiation("F", {"x": T("mystery"), "y": T("a")}, ("x", "y"))
    inst = decode_instantiation(raw, ctx(symbols={"a"}))
    assert inst.bindings == {"y": SConst("a")}
    assert inst.errors and "x" in inst.errors[0]


SYMS = ["S", "K", "B", "C", "I", "f", "a"]


@settings(max_examples=300, deadline=None)
@given(st.recursive(st.sampled_from(SYMS).map(App), lambda ch: st.tuples(ch, ch).map(lambda p: App("app", p)), max_leaves=8))
def test_expanded_terms_are_normal(t):
    c = ctx(definitions={n: combinator_lambda(n) for n in "SKBCI"})
    try:
        out = expand_combinators(decode_term(t, c), c)
    except DecodeError:
        return
    assert is_normal(out)


def test_wildcards_cannot_be_written_in_problems():
    from parakeet.parser import ParseError, parse_problem

    with pytest.raises(ParseError):
        parse_problem("fact F : P _w%1\ngoal : Q")


@settings(max_examples=200, deadline=None)
@given(st.permutations(["u", "v", "w"]))
def test_alpha_variants_decode_alike(names):
    c = ctx(definitions={n: combinator_lambda(n) for n in "SKBCI"}, skolems={"sk%0": 1})
    base = "app(app(S, app(K, u)), app(f(v), sk%0(w)))"
    renamed = base.replace("u", "U").replace("v", "V").replace("w", "W")
    for old, new in zip("UVW", names):
        renamed = renamed.replace(old, new)
    t1 = eliminate_skolems(expand_combinators(decode_term(T(base, {"u", "v", "w"}), c), c), c, {})
    t2 = eliminate_skolems(expand_combinators(decode_term(T(renamed, {"u", "v", "w"}), c), c), c, {})
    # same shape up to renaming of free variables
    assert show(t1).count("_") == show(t2).count("_")
    assert alpha_eq(SLam("u", SLam("v", SLam("w", t1))), SLam(names[0], SLam(names[1], SLam(names[2], t2))), wildcards_equal=True)
