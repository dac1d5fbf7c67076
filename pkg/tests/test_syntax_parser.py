"""Parser, printer and erasure."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import names, pure_terms

from cedille_kernel.parser import ParseError, parse_expr, parse_module
from cedille_kernel.pure import IDENTITY, PApp, PLam, PVar
from cedille_kernel.pure import alpha_eq as pure_alpha_eq
from cedille_kernel.runner import load_manifest
from cedille_kernel.syntax import (
    All,
    App,
    Beta,
    Delta,
    EApp,
    ELam,
    Eq,
    IPair,
    Iota,
    Lam,
    Let,
    Phi,
    Pi,
    Proj,
    Rho,
    Star,
    TApp,
    Var,
    alpha_eq,
    erase,
    module_alpha_eq,
    pretty,
)


def p(src):
    return parse_expr(src)


def e(src):
    return erase(parse_expr(src))


# -- parsing ---------------------------------------------------------------


def test_smallest_definition():
    unit = parse_module("Unit : ★ = ∀ X: ★. X ➔ X.")
    (d,) = unit.defs
    assert d.name == "Unit"
    assert isinstance(d.classifier, Star)
    assert alpha_eq(d.body, All("X", Star(), Pi("_", Var("X"), Var("X"))))


def test_module_header_and_params():
    src = """
    module nu (I: ★) (F: (I ➔ ★) ➔ I ➔ ★) {cm: Mono ·I ·F}.
    import utils.
    CoAlgM : (I ➔ ★) ➔ ★ ➔ ★ = λ C: I ➔ ★. λ X: ★. ∀ R: I ➔ ★. X ➔ X.
    NuF : (I ➔ ★) ➔ I ➔ ★ = λ C: I ➔ ★. λ i: I. ∀ Y: ★. Y ➔ Y.
    Nu : I ➔ ★ = λ i: I. ∀ Y: ★. Y.
    """
    unit = parse_module(src)
    assert unit.name == "nu"
    assert [(q.name, q.erased) for q in unit.params] == [("I", False), ("F", False), ("cm", True)]
    assert alpha_eq(unit.params[2].classifier, TApp(TApp(Var("Mono"), Var("I")), Var("F")))
    assert [i.path for i in unit.imports] == ["utils"]
    assert [d.name for d in unit.defs] == ["CoAlgM", "NuF", "Nu"]


def test_import_arguments_and_modes():
    unit = parse_module("import nu/nu ·Unit ·StreamF -monoStreamF.\nimport bad/self-import.")
    first, second = unit.imports
    assert first.path == "nu/nu"
    assert [a.mode for a in first.args] == ["type", "type", "erased"]
    assert second.path == "bad/self-import" and second.args == ()


def test_imports_may_follow_definitions():
    unit = parse_module("a : ★ ➔ ★ = λ X: ★. X.\nimport utils.\nb : ★ ➔ ★ = a.")
    assert [type(i).__name__ for i in unit.items] == ["Definition", "Import", "Definition"]


@pytest.mark.parametrize(
    "src, line, col",
    [
        ("x : = .", 1, 5),
        ("x : ★ = .", 1, 9),
        ("x : ★ = λ y y.", 1, 13),
        ("a : ★ = X.\nb : ★ = (X.", 2, 11),
        ("a : ★ = X ≈ Y.", 1, 11),
    ],
)
def test_syntax_errors_carry_positions(src, line, col):
    with pytest.raises(ParseError) as info:
        parse_module(src)
    assert (info.value.line, info.value.col) == (line, col)


def test_hyphen_disambiguation():
    assert isinstance(p("f -x"), EApp)
    assert isinstance(p("ρ q - b"), Rho)
    assert isinstance(p("[x = a] - x"), Let)
    assert alpha_eq(p("f -x y"), App(EApp(Var("f"), Var("x")), Var("y")))


def test_comments_are_skipped():
    unit = parse_module("-- a comment\nA : ★ = ∀ X: ★. X. -- trailing\n")
    assert [d.name for d in unit.defs] == ["A"]


def test_projections_and_pairs():
    assert alpha_eq(p("c.2"), Proj(Var("c"), 2))
    assert alpha_eq(p("[a, b].1"), Proj(IPair(Var("a"), Var("b")), 1))
    assert alpha_eq(p("f c.1 x"), App(App(Var("f"), Proj(Var("c"), 1)), Var("x")))


def test_equation_sides_are_erased_at_parse_time():
    t = p("{Λ X. λ x. f -x ·X ≃ λ y. y}")
    assert isinstance(t, Eq)
    assert pure_alpha_eq(t.lhs, PLam("x", PVar("f")))
    assert pure_alpha_eq(t.rhs, IDENTITY)


def test_equation_rejects_types():
    with pytest.raises(ParseError):
        p("{∀ X: ★. X ≃ λ x. x}")


def test_underscore_is_not_a_variable():
    with pytest.raises(ParseError):
        p("λ x. _")


# -- printing --------------------------------------------------------------


def test_pretty_examples():
    assert pretty(PLam("x", PLam("y", PVar("x")))) == "λ x. λ y. x"
    assert pretty(Beta(None)) == "β"
    assert pretty(p("∀ X: ★. X ➔ X")) == "∀ X: ★. X ➔ X"
    assert pretty(p("f -x ·T (g y)")) == "f -x ·T (g y)"
    assert pretty(p("ρ q - β")) == "ρ q - β"
    assert pretty(e("intrCast -f -p")) == "intrCast"


def test_pretty_parenthesizes_equation_arguments():
    for arg in (Eq(IDENTITY, IDENTITY), Proj(Eq(IDENTITY, IDENTITY), 1)):
        t = App(Var("f"), arg)
        assert alpha_eq(p(pretty(t)), t)


# -- erasure ---------------------------------------------------------------

ERASURES = [
    ("β", "λ x. x"),
    ("β{f a}", "f a"),
    ("ρ q - f a", "f a"),
    ("δ T - q", "λ x. x"),
    ("Λ X. λ x. x", "λ x. x"),
    ("f -x", "f"),
    ("f ·T", "f"),
    ("[λ x. x, β]", "λ x. x"),
    ("c.1", "c"),
    ("c.2", "c"),
    ("φ q - a {b}", "b"),
    ("[x : T = a] - f x x", "f a a"),
    ("Λ i. λ xs. β", "λ xs. λ x. x"),
    ("Λ A. Λ B. Λ c. φ c.2 - c.1 {λ x. x}", "λ x. x"),
]


@pytest.mark.parametrize("src, expected", ERASURES)
def test_erasure_table(src, expected):
    assert pure_alpha_eq(e(src), e(expected))


def test_erasure_has_only_pure_constructors():
    t = e("Λ X. λ f: X ➔ X. [x = f -x ·X] - ρ q - φ r - x {λ y. β{y}}")
    stack = [t]
    while stack:
        u = stack.pop()
        assert isinstance(u, (PVar, PLam, PApp))
        if isinstance(u, PLam):
            stack.append(u.body)
        elif isinstance(u, PApp):
            stack += [u.fun, u.arg]


# -- round trips -----------------------------------------------------------


def _corpus_sources():
    files, _ = load_manifest()
    return [(cf.path.as_posix(), cf.source) for cf in files]


@pytest.mark.parametrize("path, source", _corpus_sources())
def test_corpus_round_trip(path, source):
    unit = parse_module(source)
    again = parse_module(pretty(unit))
    assert module_alpha_eq(unit, again)


BINDER_NAMES = st.sampled_from(["x", "y", "X", "Y"])


def annotated(max_leaves: int = 10):
    leaves = st.one_of(
        names.map(Var),
        st.just(Star()),
        st.just(Beta(None)),
        st.builds(Eq, pure_terms(4), pure_terms(4)),
    )

    def grow(sub):
        return st.one_of(
            st.builds(Pi, BINDER_NAMES, sub, sub),
            st.builds(Pi, st.just("_"), sub, sub),
            st.builds(All, BINDER_NAMES, sub, sub),
            st.builds(Iota, BINDER_NAMES, sub, sub),
            st.builds(Lam, BINDER_NAMES, st.none() | sub, sub),
            st.builds(ELam, BINDER_NAMES, st.none() | sub, sub),
            st.builds(App, sub, sub),
            st.builds(EApp, sub, sub),
            st.builds(TApp, sub, sub),
            st.builds(Beta, sub),
            st.builds(Rho, sub, sub),
            st.builds(Delta, sub, sub),
            st.builds(Phi, sub, sub, sub),
            st.builds(IPair, sub, sub),
            st.builds(Proj, sub, st.sampled_from([1, 2])),
            st.builds(Let, BINDER_NAMES, st.none() | sub, sub, sub),
        )

    return st.recursive(leaves, grow, max_leaves=max_leaves)


@settings(max_examples=300, deadline=None)
@given(annotated())
def test_random_round_trip(t):
    assert alpha_eq(parse_expr(pretty(t)), t)


@settings(max_examples=300, deadline=None)
@given(pure_terms())
def test_pure_round_trip_and_erasure_idempotent(t):
    again = erase(parse_expr(pretty(t)))
    assert pure_alpha_eq(again, t)
