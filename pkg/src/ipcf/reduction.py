"""One-step reduction, evaluation strategies and traces.

Reduction never enters the body of a box or of a fixpoint: code is inert
until it is unboxed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .parser import print_term
from .registry import Registry, default_registry
from .syntax import (
    FALSE,
    TRUE,
    App,
    Box,
    Cond,
    Const,
    Fix,
    Fst,
    Lam,
    LetBox,
    ModVar,
    Num,
    Op,
    OrdVar,
    Pair,
    Snd,
    Term,
    canon,
    format_path,
    is_closed,
    subst,
)

STRATEGIES = ("normal-order", "weak-head")


class FuelExhausted(Exception):
    def __init__(self, fuel: int, last: Term):
        super().__init__(f"fuel exhausted after {fuel} steps")
        self.fuel = fuel
        self.last = last


@dataclass(frozen=True)
class Step:
    term: Term
    rule: str
    path: tuple[str, ...]


def op_fires(code: Term, registry: Registry) -> bool:
    return registry.unsafe or is_closed(code)


def root_reducts(m: Term, registry: Registry) -> Iterator[tuple[Term, str]]:
    """Contractions of a redex at the root of ``m``."""
    match m:
        case App(Lam(x, _, body), arg):
            yield subst(body, arg, OrdVar(x)), "beta"
        case LetBox(u, Box(code), body):
            yield subst(body, code, ModVar(u)), "box-beta"
        case Fix(z, body, _):
            yield subst(body, Box(m), OrdVar(z)), "box-fix"
        case App(Op(name), Box(code)) if name in registry.ops and op_fires(code, registry):
            assert registry.unsafe or is_closed(code)
            yield registry.ops[name].fn(code, registry), f"box-int:{name}"
        case Cond(Const("true"), then, _, _):
            yield then, "cond-true"
        case Cond(Const("false"), _, else_, _):
            yield else_, "cond-false"
        case App(Const("succ"), Num(n)):
            yield Num(n + 1), "delta-succ"
        case App(Const("pred"), Num(n)):
            yield Num(max(n - 1, 0)), "delta-pred"
        case App(Const("zero?"), Num(n)):
            yield (TRUE if n == 0 else FALSE), "delta-zero?"
        case App(Const("out"), App(Const("in"), inner)):
            yield inner, "retract"
        case Fst(Pair(left, _)):
            yield left, "fst"
        case Snd(Pair(_, right)):
            yield right, "snd"
        case App(App(Const("infect"), Box(code)), _) if registry.infect_demo:
            yield App(Const("in"), Box(code)), "infect"


def _steps(m: Term, registry: Registry, path: tuple[str, ...]) -> Iterator[Step]:
    """All one-step reducts, leftmost-outermost first."""
    for t, rule in root_reducts(m, registry):
        yield Step(t, rule, path)
    match m:
        case Lam(x, a, body):
            for s in _steps(body, registry, path + ("body",)):
                yield Step(Lam(x, a, s.term), s.rule, s.path)
        case App(f, a):
            for s in _steps(f, registry, path + ("fun",)):
                yield Step(App(s.term, a), s.rule, s.path)
            for s in _steps(a, registry, path + ("arg",)):
                yield Step(App(f, s.term), s.rule, s.path)
        case LetBox(u, sc, body):
            for s in _steps(sc, registry, path + ("scrutinee",)):
                yield Step(LetBox(u, s.term, body), s.rule, s.path)
            for s in _steps(body, registry, path + ("body",)):
                yield Step(LetBox(u, sc, s.term), s.rule, s.path)
        case Cond(c, t, e, g):
            for s in _steps(c, registry, path + ("if",)):
                yield Step(Cond(s.term, t, e, g), s.rule, s.path)
            if registry.cond_congruence == "all":
                for s in _steps(t, registry, path + ("then",)):
                    yield Step(Cond(c, s.term, e, g), s.rule, s.path)
                for s in _steps(e, registry, path + ("else",)):
                    yield Step(Cond(c, t, s.term, g), s.rule, s.path)
        case Pair(l, r):
            for s in _steps(l, registry, path + ("left",)):
                yield Step(Pair(s.term, r), s.rule, s.path)
            for s in _steps(r, registry, path + ("right",)):
                yield Step(Pair(l, s.term), s.rule, s.path)
        case Fst(a):
            for s in _steps(a, registry, path + ("arg",)):
                yield Step(Fst(s.term), s.rule, s.path)
        case Snd(a):
            for s in _steps(a, registry, path + ("arg",)):
                yield Step(Snd(s.term), s.rule, s.path)


def step_all(m: Term, registry: Optional[Registry] = None) -> list[Step]:
    """Every one-step reduct of ``m`` with its rule and redex path."""
    return list(_steps(m, registry or default_registry(), ()))


def normal_order_step(m: Term, registry: Optional[Registry] = None) -> Optional[Term]:
    s = next(_steps(m, registry or default_registry(), ()), None)
    return None if s is None else s.term


def is_normal(m: Term, registry: Optional[Registry] = None) -> bool:
    return normal_order_step(m, registry) is None


_STRICT_HEADS = ("succ", "pred", "zero?", "out")


def _weak_head_step(m: Term, registry: Registry, path: tuple[str, ...]) -> Optional[Step]:
    """Head reduction that never goes under λ and only evaluates arguments
    of strict primitives (and the code argument of an operation)."""
    for t, rule in root_reducts(m, registry):
        return Step(t, rule, path)
    match m:
        case App(f, a):
            s = _weak_head_step(f, registry, path + ("fun",))
            if s is not None:
                return Step(App(s.term, a), s.rule, s.path)
            if isinstance(f, Op) or (isinstance(f, Const) and f.name in _STRICT_HEADS):
                s = _weak_head_step(a, registry, path + ("arg",))
                if s is not None:
                    return Step(App(f, s.term), s.rule, s.path)
        case LetBox(u, sc, body):
            s = _weak_head_step(sc, registry, path + ("scrutinee",))
            if s is not None:
                return Step(LetBox(u, s.term, body), s.rule, s.path)
        case Cond(c, t, e, g):
            s = _weak_head_step(c, registry, path + ("if",))
            if s is not None:
                return Step(Cond(s.term, t, e, g), s.rule, s.path)
        case Fst(a) | Snd(a):
            s = _weak_head_step(a, registry, path + ("arg",))
            if s is not None:
                return Step(type(m)(s.term), s.rule, s.path)
    return None


def strategy_step(m: Term, strategy: str, registry: Registry) -> Optional[Step]:
    match strategy:
        case "normal-order":
            return next(_steps(m, registry, ()), None)
        case "weak-head":
            return _weak_head_step(m, registry, ())
    raise ValueError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# Traces


@dataclass
class Trace:
    start: Term
    steps: list[Step] = field(default_factory=list)
    verdict: str = "fuel-exhausted"  # or "normal-form", "cycle-detected"
    period: Optional[int] = None

    @property
    def final(self) -> Term:
        return self.steps[-1].term if self.steps else self.start

    def terms(self) -> list[Term]:
        return [self.start] + [s.term for s in self.steps]

    def lines(self) -> list[str]:
        out = [f"start @ ε  ⊢  {print_term(self.start)}"]
        for s in self.steps:
            out.append(f"{s.rule} @ {format_path(s.path)}  ⊢  {print_term(s.term)}")
        if self.verdict == "cycle-detected":
            out.append(f"cycle-detected (period {self.period})")
        else:
            out.append(self.verdict)
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "version": 1,
                "start": print_term(self.start),
                "steps": [
                    {"rule": s.rule, "path": format_path(s.path), "term": print_term(s.term)}
                    for s in self.steps
                ],
                "verdict": self.verdict,
                "period": self.period,
            },
            ensure_ascii=False,
        )


def reduce(
    m: Term,
    strategy: str = "normal-order",
    fuel: int = 1000,
    registry: Optional[Registry] = None,
) -> Trace:
    """Run ``strategy`` from ``m`` for at most ``fuel`` steps.

    Stops early at a normal form or when a term repeats up to α, in which
    case the verdict is ``cycle-detected`` and ``period`` is the cycle length.
    """
    registry = registry or default_registry()
    trace = Trace(m)
    seen = {canon(m): 0}
    cur = m
    for i in range(1, fuel + 1):
        s = strategy_step(cur, strategy, registry)
        if s is None:
            trace.verdict = "normal-form"
            return trace
        trace.steps.append(s)
        cur = s.term
        key = canon(cur)
        if key in seen:
            trace.verdict = "cycle-detected"
            trace.period = i - seen[key]
            return trace
        seen[key] = i
    if strategy_step(cur, strategy, registry) is None:
        trace.verdict = "normal-form"
    return trace


def evaluate(
    m: Term,
    strategy: str = "normal-order",
    fuel: int = 1000,
    registry: Optional[Registry] = None,
) -> Term:
    """Normal form of ``m`` under ``strategy``, or raise FuelExhausted."""
    trace = reduce(m, strategy, fuel, registry)
    if trace.verdict != "normal-form":
        raise FuelExhausted(len(trace.steps), trace.final)
    return trace.final


def reaches(
    m: Term,
    target: Term,
    strategy: str = "normal-order",
    fuel: int = 100,
    registry: Optional[Registry] = None,
) -> bool:
    """Whether the strategy passes through a term α-equal to ``target``."""
    key = canon(target)
    return any(canon(t) == key for t in reduce(m, strategy, fuel, registry).terms())


def por_demo(x: Term, y: Term, fuel: int = 10_000, registry: Optional[Registry] = None) -> Term:
    """Evaluate ``por (box x) (box y)`` for closed Bool terms x and y."""
    from .corpus import por_term

    return evaluate(App(App(por_term(), Box(x)), Box(y)), "normal-order", fuel, registry)
