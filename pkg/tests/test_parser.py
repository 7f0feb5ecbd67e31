import pytest

from helpers import CORPUS
from parakeet.parser import ParseError, parse_file, parse_problem
from parakeet.surface import FAll, FAtom, FEq, FEx, FImp, FNot, SApp, SConst, SLam, SVar, show_formula


def test_fact_free_variables():
    p = parse_problem("fact F3 : less(0, Suc(n))\ngoal : less(0, Suc(x))")
    f = p.fact("F3")
    assert f.free_vars == ["n"]
    assert f.line == 1
    assert p.calls == {"less": 2, "Suc": 1}


def test_goal_only():
    p = parse_problem("goal : P a")
    assert p.facts == []
    assert p.goal == FAtom(SApp(SConst("P"), SConst("a")))
    assert (p.options.lambda_mode, p.options.ext, p.options.undefined) == ("lifting", False, True)


def test_names_fixed_by_the_goal_are_constants_everywhere():
    p = parse_problem("fact F : P x y\ngoal : P x b")
    assert p.fact("F").formula == FAtom(SApp(SApp(SConst("P"), SConst("x")), SVar("y")))
    assert p.fact("F").free_vars == ["y"]
    assert p.goal == FAtom(SApp(SApp(SConst("P"), SConst("x")), SConst("b")))


def test_declared_constants():
    p = parse_problem("const c, d\nfact F : R c y\ngoal : R c d")
    assert p.fact("F").free_vars == ["y"]


def test_uppercase_and_numerals_are_constants():
    p = parse_problem("fact F : Suc 0 = One\ngoal : P")
    assert p.fact("F").free_vars == []


def test_quantifiers_lambdas_and_precedence():
    p = parse_problem("fact F : !x. P x -> ?y. Q (\\z. f z) y\ngoal : R")
    f = p.fact("F").formula
    assert isinstance(f, FAll) and isinstance(f.body, FImp) and isinstance(f.body.rhs, FEx)
    lam = f.body.rhs.body.term.fun.arg
    assert lam == SLam("z", SApp(SVar("f"), SVar("z")))
    assert p.fact("F").free_vars == ["f"]


def test_implication_is_right_associative_and_negated_equation():
    p = parse_problem("goal : A -> B -> C & ~(a != b)")
    g = p.goal
    assert isinstance(g, FImp) and isinstance(g.rhs, FImp)
    assert isinstance(g.rhs.rhs.rhs, FNot)
    assert parse_problem("goal : " + show_formula(g)).goal == g


def test_wildcards_are_fresh_variables():
    p = parse_problem("fact F : P _ _\ngoal : Q")
    vs = p.fact("F").free_vars
    assert len(vs) == 2 and vs[0] != vs[1]


def test_options():
    p = parse_problem("option ext = true\noption lambda = combinators\noption undefined = off\ngoal : P")
    assert p.options.ext and p.options.lambda_mode == "combinators" and not p.options.undefined
    assert p.explicit == {"ext", "lambda_mode", "undefined"}


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("fact X : f(a)\ngoal : f(a, b)", 2, 8),
        ("fact F : P (a\ngoal : Q", 1, 0),
        ("fact F : P a\nfact F : Q a\ngoal : P a", 2, 6),
        ("goal : P\ngoal : Q", 2, 1),
        ("axiom F : P\n", 1, 1),
        ("option colour = red\ngoal : P", 1, 8),
        ("option ext = maybe\ngoal : P", 1, 14),
    ],
)
def test_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert info.value.line == line
    if col:
        assert info.value.col == col


def test_arity_clash_reports_both_positions():
    with pytest.raises(ParseError) as info:
        parse_problem("fact X : f(a)\ngoal : f(a, b)")
    assert "1:10" in str(info.value)


def test_tptp_cnf():
    p = parse_file(CORPUS / "rewrite_chain.p")
    assert [f.name for f in p.facts] == ["f_to_g", "g_to_h", "p_k", "p_start"]
    assert p.fact("f_to_g").free_vars == ["X"]
    assert p.goal is None and len(p.negated_goals) == 1
    assert p.negated_goals[0] == FNot(FAtom(SApp(SConst("q"), SConst("c"))))


def test_tptp_fof_conjecture():
    text = "fof(a1, axiom, ![X]: (p(X) => q(X))).\nfof(c, conjecture, ?[Y]: q(Y)).\nfof(a2, axiom, p(a))."
    p = parse_problem(text)
    assert isinstance(p.fact("a1").formula, FAll)
    assert p.fact("a1").free_vars == []
    assert isinstance(p.goal, FEx)


def test_tptp_negated_conjecture_is_closed():
    p = parse_problem("cnf(g, negated_conjecture, ~p(X) | X = a).")
    assert isinstance(p.negated_goals[0], FAll)


def test_every_corpus_file_parses():
    for path in sorted(CORPUS.iterdir()):
        p = parse_file(path)
        assert p.goal is not None or p.negated_goals, path.name
        assert p.name == path.stem


def test_equation_sides():
    p = parse_problem("goal : f a = g b")
    assert p.goal == FEq(SApp(SConst("f"), SConst("a")), SApp(SConst("g"), SConst("b")))
