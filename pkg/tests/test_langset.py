"""Truncated languages, rational operations, parser, evaluator, dumps."""

import pytest

from hdalang import ipomset as ip
from hdalang import langset as ls
from hdalang.errors import ExprSyntaxError, TruncationMismatch
from hdalang.ipomset import IloSet
from hdalang.langset import (
    AtomExpr,
    GlueExpr,
    ParExpr,
    PlusExpr,
    Truncation,
    UnionExpr,
    eval_expr,
    format_expr,
    parse_expr,
)
from hdalang.randgen import random_interval_ipomset

T32 = Truncation.of(3, 2)
A = ip.singleton("a")
B = ip.singleton("b")
C = ip.singleton("c")


# -- parser ------------------------------------------------------------------


def test_parse_examples():
    assert parse_expr("a ; b") == GlueExpr(AtomExpr("a"), AtomExpr("b"))
    assert parse_expr("a || (b ; c) ^+") == ParExpr(
        AtomExpr("a"), PlusExpr(GlueExpr(AtomExpr("b"), AtomExpr("c"))))
    assert parse_expr(".a.") == AtomExpr("a", True, True)
    assert parse_expr("a.") == AtomExpr("a", False, True)


def test_parse_precedence():
    # ^+ > || > ; > +
    e = parse_expr("a + b ; c || d^+")
    assert e == UnionExpr(
        AtomExpr("a"),
        GlueExpr(AtomExpr("b"), ParExpr(AtomExpr("c"),
                                        PlusExpr(AtomExpr("d")))))


def test_parse_errors_carry_position():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expr("a ; ; b")
    assert err.value.position == 4
    with pytest.raises(ExprSyntaxError):
        parse_expr("(a ; b")
    with pytest.raises(ExprSyntaxError):
        parse_expr("a b")
    with pytest.raises(ExprSyntaxError):
        parse_expr("")


def test_format_round_trip():
    for text in ["a", "a + b ; c", "(a + b) ; c", "a || b^+",
                 "(a ; b)^+ || .c.", "0 + 1"]:
        e = parse_expr(text)
        assert parse_expr(format_expr(e)) == e


# -- language operations -----------------------------------------------------


def test_lang_union_unit():
    l = eval_expr(parse_expr("a"), T32)
    empty = eval_expr(parse_expr("0"), T32)
    assert ls.lang_union(l, empty).members == l.members


def test_lang_glue_examples():
    start_half = ls.language([ip.singleton("a", target=True)], T32)
    end_half = ls.language([ip.singleton("a", source=True)], T32)
    assert ls.lang_glue(start_half, end_half).members == frozenset([A])
    # mismatching interfaces contribute nothing
    bad = ls.language([ip.singleton("b", source=True)], T32)
    assert ls.lang_glue(start_half, bad).members == frozenset()


def test_lang_parallel_is_down_closed():
    got = ls.lang_parallel(ls.language([A], T32), ls.language([B], T32))
    assert got.members == ip.down_close([ip.parallel(A, B)])


def test_truncation_mismatch_raises():
    with pytest.raises(TruncationMismatch):
        ls.lang_union(ls.language([], T32), ls.language([], Truncation.of(4, 2)))


def test_lang_plus_examples():
    aa = eval_expr(parse_expr("a^+"), Truncation.of(3, 1))
    assert len(aa.members) == 3
    eps = eval_expr(parse_expr("1^+"), T32)
    assert eps.members == frozenset([ip.empty()])
    # a fully interfaced letter is an identity, so plus fixes it
    both = eval_expr(parse_expr(".a.^+"), T32)
    assert both.members == frozenset(
        [ip.singleton("a", source=True, target=True)])


def test_eval_examples():
    assert eval_expr(parse_expr("0"), T32).members == frozenset()
    assert eval_expr(parse_expr("a ; b"), T32).members == \
        frozenset([ip.glue(A, B)])
    assert len(eval_expr(parse_expr("a || b"), T32).members) == 3


def test_lang_equal_subset():
    l = eval_expr(parse_expr("a ; b"), T32)
    m = eval_expr(parse_expr("b ; a"), T32)
    assert ls.lang_equal(l, l)
    assert not ls.lang_equal(l, m)
    u = eval_expr(parse_expr("a;b + b;a"), T32)
    assert ls.lang_subset(l, u) and not ls.lang_subset(u, l)


# -- invariants ---------------------------------------------------------------


def test_results_down_closed_within_window(rng):
    texts = ["a || b", "a ; (b || c)", "(a + b)^+", "a || b || c",
             "(.a ; a.) ^+ || b"]
    for text in texts:
        lang = eval_expr(parse_expr(text), T32)
        assert ls.is_down_closed_in_window(lang), text


def test_glue_associative_within_window():
    t = Truncation.of(4, 2)
    l = eval_expr(parse_expr("a + .b"), t)
    m = eval_expr(parse_expr("b. + a"), t)
    n = eval_expr(parse_expr("c"), t)
    left = ls.lang_glue(ls.lang_glue(l, m), n)
    right = ls.lang_glue(l, ls.lang_glue(m, n))
    assert left.members == right.members


def test_eps_is_parallel_unit():
    t = T32
    l = eval_expr(parse_expr("a ; b"), t)
    eps = eval_expr(parse_expr("1"), t)
    assert ls.lang_parallel(eps, l).members == l.members
    assert ls.lang_parallel(l, eps).members == l.members


def test_identity_sublanguage_is_glue_unit():
    t = T32
    # <a|a|a> acts as unit on languages of matching interfaces
    ids = ls.language([ip.identity(IloSet(("a",)))], t)
    l = ls.language([ip.singleton("a", target=True)], t)
    assert ls.lang_glue(l, ids).members == l.members


def test_width_bound_from_parallel_nesting():
    t = Truncation.of(4, 3)
    lang = eval_expr(parse_expr("(a ; b) || a"), t)
    assert all(ip.width(p) <= 2 for p in lang.members)
    # the identity language is never fully contained
    idw3 = ip.identity(IloSet(("a", "a", "a", "a")))
    assert idw3 not in lang.members


def test_truncation_coherence_shrink_then_eval():
    big = Truncation.of(4, 3)
    small = Truncation.of(2, 2)
    for text in ["a^+", "a || b", "(a;b)^+ + c", "a || (b ; c)"]:
        wide = eval_expr(parse_expr(text), big)
        narrow = eval_expr(parse_expr(text), small)
        shrunk = frozenset(p for p in wide.members if small.admits(p))
        assert narrow.members == shrunk, text


# -- dumps -------------------------------------------------------------------


def test_dump_format_and_stability():
    lang = eval_expr(parse_expr("a^+"), Truncation.of(2, 1))
    d1 = ls.dump_language(lang)
    d2 = ls.dump_language(eval_expr(parse_expr("a + a;a"), Truncation.of(2, 1)))
    assert d1 == d2
    assert d1.splitlines()[0] == "truncation: size=2 width=1"


def test_dump_half_integer_header():
    lang = ls.language([ip.singleton("a", target=True)], Truncation.of(2.5, 2))
    assert ls.dump_language(lang).splitlines()[0] == \
        "truncation: size=2.5 width=2"


def test_random_members_parse_back(rng):
    t = Truncation.of(4, 3)
    members = [random_interval_ipomset(rng, 5, 3) for _ in range(50)]
    lang = ls.language(ip.down_close(members), t)
    for line in ls.dump_language(lang).splitlines()[1:]:
        assert ip.parse_ipomset(line) in lang.members
