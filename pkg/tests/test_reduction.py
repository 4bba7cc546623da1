from itertools import combinations

import pytest
from hypothesis import given, settings

from corpus import BACKTRACK_RUN, OMEGA
from errors import FuelExhausted, InvalidRedex
from reduction import (
    Redex, RuleName, Spine, contract, ctx_rewrite, diamond_closes, gc_normalize, head_normalize, head_step,
    lhe_normalize, lhe_redexes, lhe_step, one_step, rename_binder, spine, substitute, unfold, weak_head_normalize,
)
from syntax import (
    Abs, App, ESub, Hole, Step, Var, alpha_eq, binder_scope_occurrences, hole_path, parse, subterm_at,
)
from term_strategies import corpus_terms, lsc_terms

B, L, R, S, D = Step.ABS_BODY, Step.APP_LEFT, Step.APP_RIGHT, Step.SUB_BODY, Step.SUB_DEFINIENS


def test_linear_head_sequence():
    result = lhe_normalize(BACKTRACK_RUN, 100)
    assert result.normal
    assert result.rules == ["dB", "ls", "dB", "ls", "ls", "gc", "gc"]
    assert alpha_eq(result.term, parse(r"\z.z"))


def test_linear_head_intermediate_terms():
    steps = lhe_normalize(BACKTRACK_RUN, 100).steps
    expected = [
        r"(x x)[x<-\y.y]",
        r"((\y.y) x)[x<-\y.y]",
        r"y[y<-x][x<-\y.y]",
        r"x[y<-x][x<-\y.y]",
        r"(\y.y)[y<-x][x<-\y.y]",
        r"(\y.y)[x<-\y.y]",
        r"\y.y",
    ]
    for (_, term), text in zip(steps, expected):
        assert alpha_eq(term, parse(text))


def test_redexes():
    t = parse(r"x[x<-a][y<-b]")
    assert lhe_redexes(t) == [Redex(RuleName.GC, ()), Redex(RuleName.LS, (S,), (S, S))]
    assert lhe_redexes(t, include_gc=False) == [Redex(RuleName.LS, (S,), (S, S))]
    assert lhe_redexes(parse(r"(\x.x)[y<-b] c")) == [Redex(RuleName.DB, ()), Redex(RuleName.GC, (L,))]
    assert lhe_redexes(parse(r"x (\y.y) z")) == []


def test_distance_db_keeps_context():
    t = parse(r"(\x.x y)[y<-b] c")
    u = contract(t, Redex(RuleName.DB, ()))
    assert alpha_eq(u, parse(r"(x y)[x<-c][y<-b]"))


def test_distance_db_renames_capturing_binders():
    t = parse(r"(\x.x y)[y<-b] y")
    u = contract(t, Redex(RuleName.DB, ()))
    assert alpha_eq(u, parse(r"(x y')[x<-y][y'<-b]"))


def test_linear_substitution_replaces_one_occurrence():
    t = parse(r"(x x)[x<-a]")
    u = lhe_step(t, Redex(RuleName.LS, (), (S, L)))
    assert u == parse(r"(a x)[x<-a]")


def test_lhe_step_rejects_non_redex():
    with pytest.raises(InvalidRedex):
        lhe_step(parse(r"(x x)[x<-a]"), Redex(RuleName.LS, (), (S, R)))


def test_fuel():
    result = lhe_normalize(OMEGA, 50)
    assert not result.normal
    assert len(result.steps) == 50
    assert result.normal_form is None
    with pytest.raises(FuelExhausted):
        lhe_normalize(OMEGA, 50, strict=True)


def test_substitute_avoids_capture():
    t = substitute(parse(r"\y.x y"), "x", Var("y"))
    assert alpha_eq(t, parse(r"\z.y z"))
    assert substitute(parse(r"\x.x"), "x", Var("y")) == parse(r"\x.x")


def test_rename_binder():
    renamed = rename_binder(parse(r"\x.x y"), {"x"})
    assert renamed.var not in {"x", "y"}
    assert alpha_eq(renamed, parse(r"\x.x y"))
    with pytest.raises(ValueError):
        rename_binder(parse("x"), set())


def test_head_reduction():
    assert alpha_eq(head_normalize(parse(r"(\x.\y.x) a b"), 10).term, parse("a"))
    assert alpha_eq(unfold(parse(r"(x x)[x<-\y.y]")), parse(r"(\y.y) (\y.y)"))
    assert weak_head_normalize(parse(r"\x.(\y.y) x"), 10).normal
    assert not head_normalize(unfold(OMEGA), 20).normal


def test_gc_normalize():
    assert gc_normalize(parse(r"x[y<-a][z<-b]")) == parse("x")
    assert gc_normalize(parse(r"x[x<-a]")) == parse(r"x[x<-a]")


@pytest.mark.parametrize("text, expected", [
    (r"\x.\y.x a", Spine(("x", "y"), "x", 0, 1)),
    (r"\x.(\y.y b c)[z<-a]", Spine(("x", "y"), "y", 1, 2)),
    (r"a b", Spine((), "a", None, 1)),
    (r"\x.x[x<-a]", None),
])
def test_spine(text, expected):
    assert spine(parse(text)) == expected


@settings(max_examples=100, deadline=None)
@given(corpus_terms)
def test_diamond(t):
    for first, second in combinations(lhe_redexes(t), 2):
        assert diamond_closes(t, first, second)


def test_one_step_excludes_identity():
    assert one_step(parse(r"\x.x")) == []
    assert one_step(parse(r"(x x)[x<-a]")) == [parse(r"(a x)[x<-a]")]


def test_diamond_closing():
    # 两个 gc 的结果相同
    t = parse(r"x[y<-a][y<-a]")
    first, second = lhe_redexes(t)
    assert diamond_closes(t, first, second)
    # ls 与 gc 各走一步
    t = parse(r"x[x<-a][y<-b]")
    first, second = lhe_redexes(t)
    assert diamond_closes(t, first, second)
    # 参数中的 redex 不在头部，两侧一步内无法汇合
    t = parse(r"(\x.x) ((\y.y) z)")
    assert not diamond_closes(t, Redex(RuleName.DB, ()), Redex(RuleName.DB, (R,)))


@settings(max_examples=100, deadline=None)
@given(corpus_terms)
def test_gc_postponement(t):
    with_gc = lhe_normalize(t, 200)
    without_gc = lhe_normalize(t, 200, include_gc=False)
    if with_gc.normal and without_gc.normal:
        assert alpha_eq(unfold(with_gc.term), unfold(gc_normalize(without_gc.term)))


def test_head_step():
    assert alpha_eq(head_step(parse(r"\z.(\x.x x) z")), parse(r"\z.z z"))
    assert head_step(parse(r"x ((\y.y) z)")) is None


def test_ctx_rewrite_db_keeps_hole():
    ctx = App(Abs("x", Hole()), Var("y"))
    reducts = ctx_rewrite(RuleName.DB, ctx)
    assert len(reducts) == 1
    assert alpha_eq(reducts[0], ESub(Hole(), "x", Var("y")))
    assert ctx_rewrite(RuleName.LS, ctx) == []


def test_ctx_rewrite_gc_around_hole():
    ctx = ESub(Hole(), "x", Var("y"))
    assert ctx_rewrite(RuleName.GC, ctx) == []
    assert ctx_rewrite(RuleName.GC, ctx, Var("z")) == [Hole()]
    assert ctx_rewrite(RuleName.GC, ctx, Var("x")) == []


def test_ctx_rewrite_ls_with_hole_in_definiens():
    ctx = ESub(App(Var("x"), Var("x")), "x", Hole())
    identity = parse(r"\y.y")
    assert ctx_rewrite(RuleName.LS, ctx) == []
    copied, kept = ctx_rewrite(RuleName.LS, ctx, identity)
    # ls,t：复制的是上下文本身，替换中放入 t
    assert hole_path(copied) == (S, L)
    assert alpha_eq(copied, ESub(App(Hole(), Var("x")), "x", identity))
    # 另一个出现到达定义项：洞留在替换中
    assert hole_path(kept) == (D,)
    assert alpha_eq(kept, ESub(App(identity, Var("x")), "x", Hole()))


@settings(max_examples=200, deadline=None)
@given(lsc_terms)
def test_linear_substitution_keeps_other_occurrences(t):
    for redex in lhe_redexes(t):
        if redex.rule is not RuleName.LS:
            continue
        u = contract(t, redex)
        before = set(binder_scope_occurrences(t, redex.site))
        assert redex.occurrence in before
        assert set(binder_scope_occurrences(u, redex.site)) == before - {redex.occurrence}
        assert alpha_eq(subterm_at(u, redex.occurrence), subterm_at(t, redex.site).definiens)


def _shape(s):
    """脊的形状：绑定者个数、头变量下标、参数个数；头变量自由时带上名字"""
    return len(s.binders), s.index, s.args, s.head if s.index is None else None


@settings(max_examples=100, deadline=None)
@given(corpus_terms)
def test_normal_form_spine_matches_head_normal_form(t):
    lhe = lhe_normalize(t, 300)
    head = head_normalize(unfold(t), 300)
    if lhe.normal and head.normal:
        assert _shape(spine(lhe.term)) == _shape(spine(head.term))
