from hypothesis import given

from conftest import closed_terms, judgements
from ipcf import alpha_eq, bfv, fv, parse, print_term, subst, ufv
from ipcf.corpus import all_entries, omega_term, source
from ipcf.parser import ParseError, parse_type, print_type
from ipcf.syntax import (
    BOOL,
    NAT,
    TRUE,
    App,
    Arrow,
    Box,
    BoxTy,
    Lam,
    LetBox,
    ModVar,
    OrdVar,
    Prod,
    canon,
    fresh_name,
    replace_at,
    subterm_at,
    subterms,
)

import pytest


def test_alpha_renaming_of_binders():
    assert alpha_eq(parse(r"\x:Nat. x"), parse(r"\y:Nat. y"))
    ev = r"(\x:[]Nat. let box y = x in y)"
    assert alpha_eq(parse(f"fix z. {ev} z"), parse(f"fix w. {ev} w"))
    assert not alpha_eq(parse(r"\x:Nat. x"), parse(r"\x:Nat. succ x"))


def test_alpha_respects_annotations_and_namespaces():
    assert not alpha_eq(parse(r"\x:Nat. x"), parse(r"\x:Bool. x"))
    assert not alpha_eq(OrdVar("a"), ModVar("a"))


def test_subst_avoids_capture():
    m = Lam("y", NAT, OrdVar("x"))
    out = subst(m, OrdVar("y"), OrdVar("x"))
    assert isinstance(out, Lam) and out.var != "y"
    assert out.body == OrdVar("y")
    assert print_term(out) == r"\y':Nat. y"


def test_subst_stops_at_binder():
    m = parse("let box u = box true in u")
    assert subst(m, parse("false"), ModVar("u")) == m


def test_subst_unfolds_omega():
    ev = r"(\x:[]Nat. let box y = x in y)"
    om = omega_term()
    assert alpha_eq(subst(parse(f"{ev} z"), Box(om), OrdVar("z")), App(parse(ev), Box(om)))


def test_free_variable_sets():
    m = parse("box (u v)", modal=frozenset({"u", "v"}))
    assert bfv(m) == {ModVar("u"), ModVar("v")}
    assert ufv(m) == frozenset()
    assert fv(parse(r"\x:Nat. x y")) == {OrdVar("y")}


def test_fix_binder_is_not_free_under_box():
    m = parse(r"fix z. (\x:[]Nat. let box y = x in y) z")
    assert fv(m) == bfv(m) == ufv(m) == frozenset()


def test_parse_examples():
    assert parse(r"\x:Bool. x") == Lam("x", BOOL, OrdVar("x"))
    assert parse("let box u = box true in u") == LetBox("u", Box(TRUE), ModVar("u"))


def test_parse_types():
    assert parse_type("Nat -> Nat -> Bool") == Arrow(NAT, Arrow(NAT, BOOL))
    assert parse_type("[]Nat -> Nat") == Arrow(BoxTy(NAT), NAT)
    assert parse_type("□(Nat → Bool)") == BoxTy(Arrow(NAT, BOOL))
    assert parse_type("Nat * Bool -> Nat") == Arrow(Prod(NAT, BOOL), NAT)
    for src in ("[]([]Nat -> Nat) -> []Nat", "(Nat -> Nat) -> Nat", "[][]Bool"):
        assert print_type(parse_type(src)) == src


def test_parse_errors_carry_offsets():
    with pytest.raises(ParseError) as err:
        parse(r"\x:Nat. x $")
    assert err.value.pos == 10
    assert err.value.to_json()["kind"] == "parse-error"
    with pytest.raises(ParseError):
        parse("let box = x in x")


def test_pragmas_set_schematic_types():
    m = parse(source("eval"))
    assert m.ann == BoxTy(NAT)
    m = parse(source("eval"), {"A": BOOL})
    assert m.ann == BoxTy(BOOL)


@pytest.mark.parametrize("entry", all_entries(), ids=lambda e: e.name)
def test_corpus_round_trips(entry):
    m = entry.term
    assert alpha_eq(parse(print_term(m)), m)


def test_printer_separates_namespaces():
    # an ordinary binder named like a free modal variable must be renamed
    m = Lam("u", NAT, App(App(OrdVar("f"), OrdVar("u")), ModVar("u")))
    back = parse(print_term(m), {}, modal=frozenset({"u"}))
    assert alpha_eq(back, m)


def test_paths():
    m = parse(r"(\x:Nat. succ x) 3")
    paths = dict(subterms(m))
    assert paths[("fun", "body", "arg")] == OrdVar("x")
    assert subterm_at(m, ("arg",)) == parse("3")
    assert replace_at(m, ("arg",), parse("4")) == parse(r"(\x:Nat. succ x) 4")


def test_fresh_name():
    assert fresh_name("x", {"x", "x'"}) == "x''"
    assert fresh_name("y", {"x"}) not in {"x"}


@given(judgements())
def test_fv_splits_into_ufv_and_bfv(j):
    _, _, m = j
    assert fv(m) == ufv(m) | bfv(m)


@given(judgements(), judgements(max_size=6), judgements(max_size=6))
def test_substitution_lemma(j, jn, jp):
    _, _, m = j
    n, p = jn[2], jp[2]
    x, y = OrdVar("x%"), OrdVar("y%")
    # plant both variables so the substitutions do something
    m = App(App(Lam("k", NAT, m), x), y)
    if y in fv(n) or x in fv(p):
        return
    lhs = subst(subst(m, n, x), p, y)
    rhs = subst(subst(m, p, y), subst(n, p, y), x)
    assert alpha_eq(lhs, rhs)


@given(judgements(), judgements(max_size=8))
def test_substitution_lemma_modal(j, jn):
    _, _, m = j
    n = jn[2]
    u, v = ModVar("u%"), ModVar("v%")
    m = LetBox("w", Box(u), App(Lam("k", NAT, m), v))
    p = Box(TRUE)
    lhs = subst(subst(m, n, u), p, v)
    rhs = subst(subst(m, p, v), subst(n, p, v), u)
    assert alpha_eq(lhs, rhs)


@given(closed_terms(), judgements(max_size=8))
def test_subst_leaves_closed_terms_alone(c, jn):
    _, m = c
    assert not fv(m)
    for var in (OrdVar("x1"), ModVar("u1")):
        assert alpha_eq(subst(m, jn[2], var), m)


@given(judgements())
def test_print_parse_round_trip(j):
    _, _, m = j
    modal = frozenset(v.name for v in fv(m) if isinstance(v, ModVar))
    assert alpha_eq(parse(print_term(m), modal=modal), m)


@given(judgements())
def test_canon_is_idempotent(j):
    _, _, m = j
    assert canon(canon(m)) == canon(m)
