import json

import pytest
from hypothesis import given

from conftest import judgements
from ipcf import alpha_eq, parse, print_term
from ipcf.corpus import ENTRIES, claims, eval_term, omega_term
from ipcf.registry import (
    DONE,
    IntensionalOp,
    RegistryError,
    default_registry,
    register_op,
)
from ipcf.reduction import (
    FuelExhausted,
    evaluate,
    is_normal,
    normal_order_step,
    por_demo,
    reaches,
    reduce,
    step_all,
    strategy_step,
)
from ipcf.syntax import (
    BOOL,
    FALSE,
    TRUE,
    App,
    Arrow,
    Box,
    BoxTy,
    Fix,
    Num,
    Op,
    OrdVar,
    bfv,
    canon,
    subterms,
)
from ipcf.typecheck import EMPTY, check_v1


def reducts(m, reg=None):
    return {(print_term(s.term), s.rule) for s in step_all(m, reg)}


def test_box_beta():
    assert reducts(parse("let box u = box true in u")) == {("true", "box-beta")}


def test_fix_unfolds_into_a_boxed_copy():
    om = omega_term()
    [s] = step_all(om)
    assert s.rule == "box-fix"
    assert alpha_eq(s.term, App(eval_term(), Box(om)))


def test_nothing_happens_under_box():
    m = parse(r"box ((\x:Nat. x) y)", modal=frozenset({"y"}))
    assert step_all(m) == []
    assert step_all(parse(r"box ((\x:Nat. x) 1)")) == []


def test_nothing_happens_inside_fix_body():
    m = parse(r"fix z. (\x:Nat. x) 1")
    assert [s.rule for s in step_all(m)] == ["box-fix"]


def test_tick_runs_one_step_of_closed_code():
    om = omega_term("Bool")
    m = App(Op("tick"), Box(om))
    [s] = step_all(m)
    assert s.rule == "box-int:tick"
    assert alpha_eq(s.term, Box(normal_order_step(om)))


def test_tick_is_identity_on_normal_forms():
    assert reducts(parse("~tick (box true)")) == {("box true", "box-int:tick")}


def test_done():
    assert evaluate(parse("~done? (box true)")) == TRUE
    assert evaluate(parse(r"~done? (box ((\x:Bool. x) true))")) == FALSE


@pytest.mark.parametrize(
    "src, out, rule",
    [
        ("pred 0", "0", "delta-pred"),
        ("pred 4", "3", "delta-pred"),
        ("succ 4", "5", "delta-succ"),
        ("zero? 0", "true", "delta-zero?"),
        ("zero? 2", "false", "delta-zero?"),
        ("if true then 1 else 2", "1", "cond-true"),
        ("if false then 1 else 2", "2", "cond-false"),
        ("fst (1, true)", "1", "fst"),
        ("snd (1, true)", "true", "snd"),
        (r"(\x:Nat. succ x) 1", "succ 1", "beta"),
        ("#out (#in 2)", "2", "retract"),
    ],
)
def test_root_rules(src, out, rule):
    assert (out, rule) in reducts(parse(src))


def test_congruence_positions():
    m = parse(r"((\x:Nat. x) 1, if true then (\y:Nat. y) 2 else 3)")
    paths = sorted("/".join(s.path) for s in step_all(m))
    assert paths == ["left", "right", "right/then"]


def test_scrutinee_only_congruence():
    m = parse(r"if (\b:Bool. b) true then (\y:Nat. y) 2 else 3")
    reg = default_registry(cond_congruence="scrutinee-only")
    assert [s.path for s in step_all(m, reg)] == [("if",)]
    assert len(step_all(m)) == 2


def test_safe_ops_need_closed_code():
    m = parse("let box u = box ((\\x:Nat. x) 0) in ~is-app (box u)")
    reg = default_registry(is_app=True)
    stuck = parse("~is-app (box u)", modal=frozenset({"u"}))
    assert step_all(stuck, reg) == []
    assert [s.rule for s in step_all(m, reg)] == ["box-beta"]


def test_unsafe_ops_split_the_counterexample():
    m = parse("let box u = box ((\\x:Nat. x) 0) in ~is-app (box u)")
    reg = default_registry(unsafe=True)
    rules = sorted(s.rule for s in step_all(m, reg))
    assert rules == ["box-beta", "box-int:is-app"]
    ends = {print_term(evaluate(s.term, registry=reg)) for s in step_all(m, reg)}
    assert ends == {"true", "false"}


def test_infect_demo_is_opt_in():
    m = App(App(parse("#infect"), Box(parse("#in 0"))), parse("#in 1"))
    assert step_all(m) == []
    [s] = step_all(m, default_registry(infect_demo=True))
    assert s.rule == "infect"


def test_register_op_rejects_duplicates():
    reg = default_registry()
    with pytest.raises(RegistryError) as err:
        register_op(DONE, reg)
    assert err.value.kind == "duplicate-name"


def test_register_custom_op():
    neg = IntensionalOp("not-code", Arrow(BoxTy(BOOL), BOOL), lambda m, reg: FALSE if m == TRUE else TRUE)
    reg = register_op(neg, default_registry())
    m = parse("~not-code (box true)")
    assert check_v1(EMPTY, m, reg) == BOOL
    assert evaluate(m, registry=reg) == FALSE
    assert "not-code" not in default_registry().ops


# -- strategies and traces -------------------------------------------------


def test_omega_trace_cycles():
    tr = reduce(omega_term("Bool"), "normal-order", 100)
    assert tr.verdict == "cycle-detected" and tr.period <= 4
    for a, s in zip(tr.terms(), tr.steps):
        assert any(alpha_eq(t.term, s.term) for t in step_all(a))


def test_trace_format():
    tr = reduce(parse(r"(\x:Nat. succ x) 1"), fuel=10)
    assert tr.lines() == [
        r"start @ ε  ⊢  (\x:Nat. succ x) 1",
        "beta @ ε  ⊢  succ 1",
        "delta-succ @ ε  ⊢  2",
        "normal-form",
    ]
    data = json.loads(tr.to_json())
    assert data["version"] == 1 and data["verdict"] == "normal-form"
    assert [s["rule"] for s in data["steps"]] == ["beta", "delta-succ"]


def test_fuel_exhaustion():
    m = parse(r"fix z. succ ((\x:[]Nat. let box y = x in y) z)")
    tr = reduce(m, fuel=5)
    assert tr.verdict == "fuel-exhausted" and len(tr.steps) == 5
    with pytest.raises(FuelExhausted):
        evaluate(m, fuel=5)


def test_weak_head_leaves_lazy_arguments():
    m = parse(r"(\x:Nat. \y:Nat. x) 1 ((\z:Nat. z) 2)")
    assert print_term(evaluate(m, "weak-head")) == "1"
    lam = parse(r"\y:Nat. (\z:Nat. z) y")
    assert strategy_step(lam, "weak-head", default_registry()) is None
    assert is_normal(parse("succ 1")) is False


def test_weak_head_forces_strict_primitives():
    assert evaluate(parse(r"succ ((\z:Nat. z) 2)"), "weak-head") == Num(3)


# -- corpus claims ----------------------------------------------------------


@pytest.mark.parametrize("name", list(ENTRIES))
def test_corpus_claims(name):
    for c in claims(name):
        assert c.passed, (c.name, c.detail)


def test_virus_unfolds_to_infect_its_own_code():
    m = parse("fix z. #infect z")
    tr = reduce(m, fuel=10)
    assert tr.lines()[1].startswith("box-fix @ ε  ⊢  #infect (box (fix z. #infect z))")
    assert reaches(m, App(parse("#infect"), Box(m)), fuel=10)


def test_ylob_on_code():
    ylob = parse(r"\x:[]([]Nat -> Nat). let box f = x in box (fix z. f z)")
    code = eval_term()
    assert reaches(App(ylob, Box(code)), Box(Fix("z", App(code, OrdVar("z")))), fuel=50)


def test_por():
    om = omega_term("Bool")
    assert por_demo(TRUE, om) == TRUE
    assert por_demo(om, TRUE) == TRUE
    assert por_demo(FALSE, FALSE) == FALSE


# -- properties ------------------------------------------------------------


def _box_skeletons(m):
    return {canon(s) for _, s in subterms(m) if isinstance(s, (Box, Fix))}


@given(judgements())
def test_strategy_pick_is_among_all_steps(j):
    _, _, m = j
    everything = {canon(s.term) for s in step_all(m)}
    for strategy in ("normal-order", "weak-head"):
        s = strategy_step(m, strategy, default_registry())
        if s is not None:
            assert canon(s.term) in everything
            assert strategy_step(m, strategy, default_registry()) == s


@given(judgements())
def test_normal_order_picks_leftmost_outermost(j):
    _, _, m = j
    steps = step_all(m)
    if steps:
        assert steps[0].term == normal_order_step(m)
        first = steps[0].path
        # no other redex encloses the chosen one
        assert not any(s.path == first[: len(s.path)] and len(s.path) < len(first) for s in steps)


@given(judgements())
def test_steps_never_shrink_bfv(j):
    _, _, m = j
    for s in step_all(m):
        assert bfv(s.term) <= bfv(m)


@given(judgements())
def test_code_is_never_rewritten_in_place(j):
    _, _, m = j
    for s in step_all(m):
        for path, sub in subterms(m):
            if isinstance(sub, (Box, Fix)) and path[: len(s.path)] != s.path and s.path[: len(path)] != path:
                # a box disjoint from the redex survives verbatim
                assert canon(sub) in _box_skeletons(s.term)


@given(judgements())
def test_subject_reduction(j):
    ctx, ty, m = j
    for s in step_all(m):
        assert check_v1(ctx, s.term) == ty, (print_term(m), s.rule, print_term(s.term))
