import pytest
from hypothesis import given, settings

from errors import PathError, TermSyntaxError
from syntax import (
    Abs, App, ESub, Hole, Step, Var, alpha_eq, binder_of, binder_scope_occurrences, context_of, fill,
    free_vars, fresh_name, hole_path, iter_paths, level_of, outer_path, outer_position, parse, path_from_json,
    path_text, path_to_json, plug, pretty, rename_apart, resolve, size, strip_subst, subterm_at,
)
from term_strategies import lsc_terms

B, L, R, S, D = Step.ABS_BODY, Step.APP_LEFT, Step.APP_RIGHT, Step.SUB_BODY, Step.SUB_DEFINIENS


@pytest.mark.parametrize("text, expected", [
    (r"x", Var("x")),
    (r"\x.x", Abs("x", Var("x"))),
    (r"λx.x", Abs("x", Var("x"))),
    (r"(\x.x x)(\y.y)", App(Abs("x", App(Var("x"), Var("x"))), Abs("y", Var("y")))),
    (r"f a b", App(App(Var("f"), Var("a")), Var("b"))),
    (r"x[x<-y]", ESub(Var("x"), "x", Var("y"))),
    (r"(x y)[x<-\z.z][y<-w]", ESub(ESub(App(Var("x"), Var("y")), "x", Abs("z", Var("z"))), "y", Var("w"))),
    (r"\x.x[y<-z]", Abs("x", ESub(Var("x"), "y", Var("z")))),
])
def test_parse(text, expected):
    assert parse(text) == expected


@pytest.mark.parametrize("text", [r"(\x.x", r"\.x", r"x[y<-]", r"", r"x)"])
def test_parse_error(text):
    with pytest.raises(TermSyntaxError) as info:
        parse(text)
    assert isinstance(info.value, ValueError)


def test_pretty():
    assert pretty(parse(r"(\x.x x)(\y.y)")) == r"(\x.x x) (\y.y)"
    assert pretty(parse(r"f (a b)")) == "f (a b)"
    assert pretty(parse(r"(x y)[x<-z]")) == "(x y)[x<-z]"
    assert pretty(Hole()) == "⟦·⟧"


@settings(max_examples=200, deadline=None)
@given(lsc_terms)
def test_print_parse_round_trip(t):
    assert parse(pretty(t)) == t


@settings(max_examples=100, deadline=None)
@given(lsc_terms)
def test_plug_subterm_identity(t):
    for path in iter_paths(t):
        assert plug(t, path, subterm_at(t, path)) == t
        assert fill(context_of(t, path), subterm_at(t, path)) == t
        assert hole_path(context_of(t, path)) == path


@settings(max_examples=100, deadline=None)
@given(lsc_terms)
def test_alpha_eq_reflexive(t):
    assert alpha_eq(t, t)


def test_alpha_eq():
    assert alpha_eq(parse(r"\x.x"), parse(r"\y.y"))
    assert alpha_eq(parse(r"x[x<-a]"), parse(r"z[z<-a]"))
    assert alpha_eq(parse(r"\x.\y.x y"), parse(r"\a.\b.a b"))
    assert not alpha_eq(parse(r"\x.y"), parse(r"\y.y"))
    assert not alpha_eq(parse(r"\x.\y.x"), parse(r"\x.\y.y"))
    assert not alpha_eq(parse("a"), parse("b"))


def test_levels_and_outer_paths():
    assert level_of((L, B, R)) == 1
    assert level_of((S, D, B, R)) == 2
    assert outer_path((L, R, B, D, S), 1) == (L, R)
    assert outer_path((L, R, B, D, S), 2) == (L, R, B, D)
    with pytest.raises(PathError):
        outer_path((L, B), 1)


def test_resolve_and_outer_position():
    t = parse(r"(\x.x x)(\y.y)")
    p = resolve(t, [L, B, R])
    assert p.path == (L, B, R)
    assert p.subterm == Var("x")
    assert p.level == 1
    assert hole_path(p.context) == (L, B, R)
    outer = outer_position(resolve(t, (R, B)), 1)
    assert outer.path == (R,)
    assert alpha_eq(outer.subterm, parse(r"\y.y"))
    with pytest.raises(PathError):
        resolve(t, (R, B, B))
    with pytest.raises(PathError):
        outer_position(p, 2)


def test_subterm_at_bad_path():
    with pytest.raises(PathError):
        subterm_at(parse("x"), (B,))
    with pytest.raises(KeyError):
        subterm_at(parse(r"\x.x"), (L,))


def test_free_vars_and_size():
    assert free_vars(parse(r"x[x<-y]")) == {"y"}
    assert free_vars(parse(r"\x.x y")) == {"y"}
    assert size(parse(r"(\x.x x)(\y.y)")) == 7


def test_binders():
    t = parse(r"\x.x (\x.x) x")
    assert binder_scope_occurrences(t, ()) == [(B, L, L), (B, R)]
    assert binder_of(t, (B, L, R, B)) == (B, L, R)
    assert binder_of(parse(r"x[x<-x]"), (D,)) is None
    assert binder_of(parse(r"x[x<-x]"), (S,)) == ()


def test_strip_subst():
    ctx, core = strip_subst(parse(r"x[y<-a][z<-b]"))
    assert core == Var("x")
    assert ctx.binders() == ("y", "z")
    assert ctx.plug(core) == parse(r"x[y<-a][z<-b]")


def test_paths_json():
    assert path_to_json((L, B)) == ["AppLeft", "AbsBody"]
    assert path_from_json(["SubBody", "SubDefiniens"]) == (S, D)
    assert path_text((L, B, R)) == "[L,B,R]"


def test_fresh_name():
    assert fresh_name("x", set()) == "x'"
    assert fresh_name("x", {"x'"}) == "x''"


def _levels(t, path=(), level=0):
    yield path, level
    if isinstance(t, Abs):
        yield from _levels(t.body, path + (B,), level)
    elif isinstance(t, App):
        yield from _levels(t.left, path + (L,), level)
        yield from _levels(t.right, path + (R,), level + 1)
    elif isinstance(t, ESub):
        yield from _levels(t.body, path + (S,), level)
        yield from _levels(t.definiens, path + (D,), level + 1)


@settings(max_examples=100, deadline=None)
@given(lsc_terms)
def test_level_of_counts_arguments_and_definientia(t):
    levels = dict(_levels(t))
    assert set(levels) == set(iter_paths(t))
    for path, level in levels.items():
        assert level_of(path) == level


@settings(max_examples=100, deadline=None)
@given(lsc_terms)
def test_outer_position_is_hereditary(t):
    for path in iter_paths(t):
        p = resolve(t, path)
        for m1 in range(1, p.level + 1):
            outer = outer_position(p, m1)
            assert outer.level == m1
            assert path[:len(outer.path)] == outer.path
            for m2 in range(1, m1 + 1):
                assert outer_position(outer, m2) == outer_position(p, m2)


@settings(max_examples=100, deadline=None)
@given(lsc_terms)
def test_rename_apart(t):
    renamed = rename_apart(t)
    assert alpha_eq(renamed, t)
    assert list(iter_paths(renamed)) == list(iter_paths(t))
    binders = [subterm_at(renamed, path).var for path in iter_paths(renamed)
               if isinstance(subterm_at(renamed, path), (Abs, ESub))]
    assert len(set(binders)) == len(binders)
    assert not set(binders) & free_vars(renamed)
