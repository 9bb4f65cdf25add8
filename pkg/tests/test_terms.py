import pytest
from hypothesis import given, settings, strategies as st

from lampe.errors import ParseError, UndefinedBitError
from lampe.terms import (
    App,
    CbvApp,
    Choice,
    CONST,
    Lam,
    Name,
    Nu,
    Var,
    alpha_eq,
    free_names,
    parse_term,
    print_term,
    project,
    substitute,
)

a = Name("a")
b = Name("b")


def test_parse_half_function():
    t = parse_term(r"\x.\y. x (+a.0) y")
    assert t == Lam("x", Lam("y", Choice(Var("x"), Var("y"), a, 0)))


def test_parse_const():
    assert parse_term("#c") == CONST


def test_parse_cbv_tree():
    t = parse_term(r"nu a. {(\f.f)} ((\x.x) (+a.1) ((\x.x x)(\x.x x)))")
    assert isinstance(t, Nu)
    assert isinstance(t.body, CbvApp)
    assert isinstance(t.body.arg, Choice)
    assert t.body.arg.index == 1


def test_parse_errors_have_positions():
    with pytest.raises(ParseError):
        parse_term("(\\x. x")
    with pytest.raises(ParseError):
        parse_term("{\\x.x}")  # unapplied CbV function


def test_abbreviations():
    assert print_term(parse_term("I")) == "\\x. x"
    assert alpha_eq(parse_term("2"), parse_term(r"\f.\x. f (f x)"))


def test_substitute_direct_hit():
    assert substitute(Var("x"), "x", CONST) == CONST


def test_substitute_shadowing():
    t = Lam("x", Var("x"))
    assert substitute(t, "x", CONST) == t


def test_substitute_capture_avoidance():
    t = Lam("y", App(Var("x"), Var("y")))
    out = substitute(t, "x", Var("y"))
    assert isinstance(out, Lam)
    assert out.var != "y"
    assert out.body == App(Var("y"), Var(out.var))


def test_substitute_nu_capture_avoidance():
    # a free choice name in the payload must not be captured by a nu binder
    t = Nu(a, App(Var("x"), Choice(Var("u"), Var("v"), a, 0)))
    out = substitute(t, "x", Choice(Var("p"), Var("q"), a, 1))
    assert out.name is not a
    assert Choice(Var("p"), Var("q"), a, 1) in _subterms(out)


def test_substitute_duplicated_scopes_get_variants():
    body = App(Var("x"), Var("x"))
    payload = Nu(a, Choice(Var("u"), Var("v"), a, 0))
    out = substitute(body, "x", payload)
    assert out.fun.name is a
    assert out.arg.name is Name("a~2")


def _subterms(t):
    from lampe.terms import children

    out = [t]
    for c in children(t):
        out.extend(_subterms(c))
    return out


def test_alpha_eq_lambda():
    assert alpha_eq(parse_term(r"\x.x"), parse_term(r"\y.y"))
    assert not alpha_eq(parse_term(r"\x.x"), parse_term(r"\x.\y.x"))


def test_alpha_eq_names_rigid():
    t = parse_term("nu a. x (+a.0) y")
    u = parse_term("nu b. x (+b.0) y")
    assert not alpha_eq(t, u)
    assert alpha_eq(t, parse_term("nu a. x (+a.0) y"))


def test_project_resolves_bit_one():
    t = parse_term("x (+a.0) y")
    assert project(t, {a}, {(a, 0): 1}) == Var("x")
    assert project(t, {a}, {(a, 0): 0}) == Var("y")


def test_project_leaves_other_names():
    t = parse_term("x (+a.0) y")
    assert project(t, {b}, {}) == t


def test_project_under_nu():
    t = parse_term("nu b. (x (+a.0) y) (+b.0) z")
    out = project(t, {a}, {(a, 0): 0})
    assert out == parse_term("nu b. y (+b.0) z")


def test_project_missing_bit():
    with pytest.raises(UndefinedBitError):
        project(parse_term("x (+a.0) y"), {a}, {})


def test_project_idempotent_and_name_shrinking():
    t = parse_term("nu b. (x (+a.0) y) (+b.0) (z (+a.1) w)")
    omega = {(a, 0): 1, (a, 1): 0}
    once = project(t, {a}, omega)
    assert project(once, {a}, omega) == once
    assert a not in free_names(once)


# ---------------------------------------------------------------------------
# Round-trip property


@st.composite
def terms(draw, depth=4, scope=()):
    kind = draw(
        st.sampled_from(
            ["var", "lam", "app", "choice", "nu", "const"]
            if depth > 0
            else ["var", "const"]
        )
    )
    if kind == "var":
        if scope and draw(st.booleans()):
            return Var(draw(st.sampled_from(list(scope))))
        return Var(draw(st.sampled_from(["x", "y", "z"])))
    if kind == "const":
        return CONST
    if kind == "lam":
        v = draw(st.sampled_from(["x", "y", "z"]))
        return Lam(v, draw(terms(depth=depth - 1, scope=scope + (v,))))
    if kind == "app":
        return App(
            draw(terms(depth=depth - 1, scope=scope)),
            draw(terms(depth=depth - 1, scope=scope)),
        )
    if kind == "choice":
        return Choice(
            draw(terms(depth=depth - 1, scope=scope)),
            draw(terms(depth=depth - 1, scope=scope)),
            Name(draw(st.sampled_from(["a", "b", "c"]))),
            draw(st.integers(min_value=0, max_value=2)),
        )
    return Nu(
        Name(draw(st.sampled_from(["a", "b", "c"]))),
        draw(terms(depth=depth - 1, scope=scope)),
    )


@given(terms())
@settings(max_examples=200, deadline=None)
def test_parse_print_roundtrip(t):
    assert alpha_eq(parse_term(print_term(t)), t)


@given(terms())
@settings(max_examples=100, deadline=None)
def test_substitute_respects_alpha(t):
    u = Lam("q", Var("q"))
    renamed = parse_term(print_term(t))  # alpha-equal copy
    assert alpha_eq(substitute(t, "x", u), substitute(renamed, "x", u))


def test_variant_names_reparse():
    body = App(Var("x"), Var("x"))
    payload = parse_term("nu a. u (+a.0) v")
    out = substitute(body, "x", payload)
    assert alpha_eq(parse_term(print_term(out)), out)
