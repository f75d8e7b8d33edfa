import pytest
from hypothesis import given

from conftest import seeds
from ipcf import pca
from ipcf.pca import (
    FALSE,
    FST,
    IF,
    ISZERO,
    K,
    MULT,
    ADD,
    PAIR,
    PRED,
    SND,
    SUCC,
    S,
    TRUE,
    ZERO,
    Ap,
    Diverged,
    I,
    Opaque,
    PVar,
    Value,
    ap,
    decode_num,
    encode_num,
    frt,
    kleene_fixed_point,
    lambda_star,
    lambda_stars,
    nf,
    parse_pca,
    pca_apply,
    pca_eval,
    print_pca,
    rogers_fixed_point,
    smn,
    srt_check,
)

import pca_gen

A, B, C = Opaque("a"), Opaque("b"), Opaque("c")


def value(t, fuel=pca.DEFAULT_FUEL):
    r = pca_eval(t, fuel)
    assert isinstance(r, Value), r
    return r.term


def test_combinator_rules():
    assert value(ap(K, A, B)) == A
    assert value(ap(S, K, K, A)) == A
    assert value(ap(S, A, B, C)) == ap(A, C, Ap(B, C))


def test_partial_applications_are_values():
    for t in (S, K, Ap(K, A), Ap(S, A), ap(S, A, B), ap(A, ap(K, B, C))):
        assert pca.is_normal(t) or t == ap(A, ap(K, B, C))
    assert value(ap(A, ap(K, B, C))) == ap(A, B)


def test_lambda_stars_takes_names():
    assert lambda_stars("x y", PVar("x")) == lambda_stars(["x", "y"], PVar("x")) == TRUE


def test_lambda_star_clauses():
    assert lambda_star("x", PVar("x")) == ap(S, K, K)
    assert lambda_star("x", K) == Ap(K, K)
    assert lambda_star("x", ap(PVar("y"), PVar("x"))) == ap(S, Ap(K, PVar("y")), I)


def test_lambda_star_self_application():
    sa = lambda_star("x", ap(PVar("x"), PVar("x")))
    for w in (A, Ap(A, B), Ap(K, A)):
        assert value(Ap(sa, w)) == value(Ap(w, w))


def test_encodings():
    assert value(ap(FST, ap(PAIR, A, B))) == A
    assert value(ap(SND, ap(PAIR, A, B))) == B
    assert value(ap(IF, TRUE, A, B)) == A
    assert value(ap(IF, FALSE, A, B)) == B
    assert value(ap(ISZERO, ZERO)) == TRUE
    assert value(ap(ISZERO, encode_num(2))) == FALSE
    assert value(ap(PRED, ap(SUCC, encode_num(3)))) == encode_num(3)
    assert value(ap(PRED, ZERO)) == ZERO
    assert value(ap(SUCC, encode_num(4))) == encode_num(5)
    assert ZERO == I


def test_numerals_round_trip():
    for n in range(12):
        assert decode_num(encode_num(n)) == n
    assert decode_num(K) is None
    assert decode_num(value(ap(PAIR, TRUE, ZERO))) is None


def test_arithmetic_library():
    assert decode_num(value(ap(ADD, encode_num(3), encode_num(4)))) == 7
    assert decode_num(value(ap(MULT, encode_num(4), encode_num(6)))) == 24
    assert decode_num(value(ap(MULT, ZERO, encode_num(6)))) == 0


def test_smn():
    assert pca.is_normal(smn(A, B))
    assert value(Ap(smn(K, A), B)) == A
    assert value(Ap(smn(PAIR, A), B)) == value(ap(PAIR, A, B))
    assert value(ap(pca.SMN, A, B)) == smn(A, B)


@pytest.mark.parametrize("name", sorted(pca.SRT_DEMOS))
@pytest.mark.parametrize("n", [0, 1, 3])
def test_kleene_fixed_points(name, n):
    _, f = pca.SRT_DEMOS[name]
    out = srt_check(f, encode_num(n))
    assert out.holds
    assert isinstance(out.lhs, Value)


def test_kleene_demos_by_value():
    ignore = kleene_fixed_point(pca.SRT_DEMOS["ignore"][1])
    assert value(Ap(ignore, A)) == A
    me = kleene_fixed_point(pca.SRT_DEMOS["self"][1])
    assert value(ap(me, A, B)) == value(Ap(me, A))
    count = kleene_fixed_point(pca.SRT_DEMOS["countdown"][1])
    assert value(Ap(count, encode_num(3))) == ZERO


def test_rogers_fixed_points():
    e = rogers_fixed_point(ap(K, Ap(K, ZERO)))
    assert value(Ap(e, A)) == ZERO
    e = rogers_fixed_point(I)
    assert isinstance(pca_apply(e, A, 20_000), Diverged)
    grow = lambda_stars("c x", ap(SUCC, ap(PVar("c"), PVar("x"))))
    e = rogers_fixed_point(grow)
    assert isinstance(pca_apply(e, ZERO, 20_000), Diverged)


def test_value_is_stable():
    r = pca_eval(ap(MULT, encode_num(2), encode_num(3)))
    assert isinstance(r, Value)
    assert pca_eval(r.term) == Value(r.term, 0)


def test_divergence_is_reported():
    r = pca_eval(pca.OMEGA, 1000)
    assert r == Diverged(1000)
    with pytest.raises(RuntimeError):
        nf(pca.OMEGA, 10)


def test_simulation_is_resumable():
    sim = pca.Simulation(ap(MULT, encode_num(2), encode_num(2)))
    while sim.advance(7) is None:
        pass
    assert decode_num(sim.result) == 4
    assert sim.steps == pca_eval(ap(MULT, encode_num(2), encode_num(2))).steps


# -- first recursion theorem ----------------------------------------------


def test_frt_factorial():
    res = frt(pca.factorial_transformer, encode_num(4), 64)
    assert isinstance(res.outcome, Value)
    assert decode_num(res.outcome.term) == 24


def test_frt_chain_is_stable():
    res = frt(pca.factorial_transformer, encode_num(3), 64)
    assert decode_num(res.outcome.term) == 6
    again = frt(pca.factorial_transformer, encode_num(3), 128, fuel=2 * pca.DEFAULT_SLICE)
    assert again.outcome.term == res.outcome.term
    # later approximations agree wherever they are defined
    code = pca.OMEGA
    for _ in range(res.index):
        code = pca.factorial_transformer(code)
    for _ in range(3):
        code = pca.factorial_transformer(code)
        assert value(Ap(code, encode_num(3))) == res.outcome.term


def test_frt_identity_diverges():
    res = frt(lambda p: p, encode_num(2), 8, fuel=1000)
    assert isinstance(res.outcome, Diverged)
    assert res.rounds == 8


def test_frt_constant():
    res = frt(pca.FRT_DEMOS["constant"], A, 8)
    assert decode_num(res.outcome.term) == 5
    assert res.index == 1


# -- mini syntax -----------------------------------------------------------


def test_parse_pca():
    assert parse_pca("S K K") == ap(S, K, K)
    assert parse_pca("S (K K)") == ap(S, Ap(K, K))
    assert parse_pca("#3") == encode_num(3)
    assert parse_pca("@a") == A
    assert parse_pca(r"\*x. x") == I
    assert parse_pca("fst (pair @a @b)") == ap(FST, ap(PAIR, A, B))
    assert decode_num(value(parse_pca("mult #2 #3"))) == 6
    with pytest.raises(pca.PcaParseError):
        parse_pca("S $")


def test_print_pca():
    assert print_pca(ap(S, Ap(K, A), B)) == "S (K @a) @b"
    assert pca.describe(encode_num(2)) == "#2"
    assert pca.describe(TRUE) == "true"


# -- properties ------------------------------------------------------------


@given(seeds)
def test_combinatory_completeness(seed):
    assert pca_gen.completeness_instance(seed) is None
