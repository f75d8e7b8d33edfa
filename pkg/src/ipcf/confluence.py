"""Parallel reduction, complete development and executable confluence checks.

Parallel reduction ⟹ contracts any set of redexes present in a term at
once. The complete development M⋆ contracts all of them. The triangle
property says M ⟹ M⋆ and P ⟹ M⋆ for every P with M ⟹ P; together with
⟶ ⊆ ⟹ ⊆ ⟶* it gives confluence.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .reduction import op_fires, step_all
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
    subst,
)


def _dedupe(terms) -> tuple[Term, ...]:
    seen: dict[Term, Term] = {}
    for t in terms:
        seen.setdefault(canon(t), t)
    return tuple(seen.values())


def _delta(m: Term) -> Optional[Term]:
    match m:
        case App(Const("succ"), Num(n)):
            return Num(n + 1)
        case App(Const("pred"), Num(n)):
            return Num(max(n - 1, 0))
        case App(Const("zero?"), Num(n)):
            return TRUE if n == 0 else FALSE
    return None


@lru_cache(maxsize=100_000)
def _par(m: Term, reg: Registry) -> tuple[Term, ...]:
    out: list[Term] = [m]
    prod = itertools.product
    match m:
        case Lam(x, a, body):
            out += [Lam(x, a, b) for b in _par(body, reg)]
        case App(f, a):
            args = _par(a, reg)
            out += [App(f2, a2) for f2, a2 in prod(_par(f, reg), args)]
            match f:
                case Lam(x, _, body):
                    out += [subst(b, a2, OrdVar(x)) for b, a2 in prod(_par(body, reg), args)]
                case Op(name) if isinstance(a, Box) and name in reg.ops and op_fires(a.body, reg):
                    out.append(reg.ops[name].fn(a.body, reg))
                case Const("out") if isinstance(a, App) and a.fun == Const("in"):
                    out += _par(a.arg, reg)
                case App(Const("infect"), Box(code)) if reg.infect_demo:
                    out.append(App(Const("in"), Box(code)))
            d = _delta(m)
            if d is not None:
                out.append(d)
        case LetBox(u, s, body):
            bodies = _par(body, reg)
            out += [LetBox(u, s2, b) for s2, b in prod(_par(s, reg), bodies)]
            if isinstance(s, Box):
                out += [subst(b, s.body, ModVar(u)) for b in bodies]
        case Fix(z, body, _):
            out += [subst(b, Box(m), OrdVar(z)) for b in _par(body, reg)]
        case Cond(c, t, e, g):
            thens, elses = _par(t, reg), _par(e, reg)
            if reg.cond_congruence == "all":
                out += [Cond(*x, g) for x in prod(_par(c, reg), thens, elses)]
            else:
                out += [Cond(c2, t, e, g) for c2 in _par(c, reg)]
            if c == TRUE:
                out += thens
            elif c == FALSE:
                out += elses
        case Pair(l, r):
            out += [Pair(a, b) for a, b in prod(_par(l, reg), _par(r, reg))]
        case Fst(a) | Snd(a):
            out += [type(m)(a2) for a2 in _par(a, reg)]
            if isinstance(a, Pair):
                out += _par(a.left if isinstance(m, Fst) else a.right, reg)
    return _dedupe(out)


def par_reducts(m: Term, registry: Optional[Registry] = None) -> tuple[Term, ...]:
    """Every P with m ⟹ P, one representative per α-class."""
    return _par(m, registry or default_registry())


def par_step(m: Term, p: Term, registry: Optional[Registry] = None) -> bool:
    """Decide m ⟹ p (up to α)."""
    key = canon(p)
    return any(canon(q) == key for q in par_reducts(m, registry))


@lru_cache(maxsize=100_000)
def _star(m: Term, reg: Registry) -> Term:
    match m:
        case Lam(x, a, body):
            return Lam(x, a, _star(body, reg))
        case App(Op(name), Box(code)) if name in reg.ops and op_fires(code, reg):
            return reg.ops[name].fn(code, reg)
        case App(Lam(x, _, body), a):
            return subst(_star(body, reg), _star(a, reg), OrdVar(x))
        case App(Const("out"), App(Const("in"), inner)):
            return _star(inner, reg)
        case App(App(Const("infect"), Box(code)), _) if reg.infect_demo:
            return App(Const("in"), Box(code))
        case App(f, a):
            d = _delta(m)
            return d if d is not None else App(_star(f, reg), _star(a, reg))
        case LetBox(u, Box(code), body):
            return subst(_star(body, reg), code, ModVar(u))
        case LetBox(u, s, body):
            return LetBox(u, _star(s, reg), _star(body, reg))
        case Fix(z, body, _):
            return subst(_star(body, reg), Box(m), OrdVar(z))
        case Cond(Const("true"), t, _, _):
            return _star(t, reg)
        case Cond(Const("false"), _, e, _):
            return _star(e, reg)
        case Cond(c, t, e, g):
            if reg.cond_congruence == "all":
                return Cond(_star(c, reg), _star(t, reg), _star(e, reg), g)
            return Cond(_star(c, reg), t, e, g)
        case Pair(l, r):
            return Pair(_star(l, reg), _star(r, reg))
        case Fst(Pair(l, _)):
            return _star(l, reg)
        case Snd(Pair(_, r)):
            return _star(r, reg)
        case Fst(a) | Snd(a):
            return type(m)(_star(a, reg))
    return m


def complete_development(m: Term, registry: Optional[Registry] = None) -> Term:
    """M⋆: contract every redex of M simultaneously."""
    return _star(m, registry or default_registry())


@dataclass
class TriangleReport:
    term: Term
    star: Term
    passed: bool = True
    violations: list[tuple[Term, str]] = field(default_factory=list)


def triangle_check(m: Term, registry: Optional[Registry] = None) -> TriangleReport:
    reg = registry or default_registry()
    star = complete_development(m, reg)
    report = TriangleReport(m, star)
    if not par_step(m, star, reg):
        report.violations.append((m, "M does not parallel-reduce to its complete development"))
    for p in par_reducts(m, reg):
        if not par_step(p, star, reg):
            report.violations.append((p, "reduct does not parallel-reduce to the complete development"))
    report.passed = not report.violations
    return report


def reachable(m: Term, depth: int, registry: Optional[Registry] = None) -> dict[Term, tuple[Term, int]]:
    """Terms reachable in at most ``depth`` steps, keyed by α-class, with distances."""
    reg = registry or default_registry()
    seen = {canon(m): (m, 0)}
    queue = deque([(m, 0)])
    while queue:
        t, d = queue.popleft()
        if d == depth:
            continue
        for s in step_all(t, reg):
            k = canon(s.term)
            if k not in seen:
                seen[k] = (s.term, d + 1)
                queue.append((s.term, d + 1))
    return seen


def joinable(p: Term, q: Term, depth: int, registry: Optional[Registry] = None) -> Optional[Term]:
    """A common reduct of p and q within ``depth`` steps of each, or None."""
    rp = reachable(p, depth, registry)
    rq = reachable(q, depth, registry)
    common = [(rp[k][1] + rq[k][1], i, rp[k][0]) for i, k in enumerate(rp) if k in rq]
    if not common:
        return None
    return min(common)[2]


def normal_forms(m: Term, registry: Optional[Registry] = None, depth: int = 20) -> list[Term]:
    """Normal forms reachable from m within ``depth`` steps along any path."""
    reg = registry or default_registry()
    return [t for t, _ in reachable(m, depth, reg).values() if not step_all(t, reg)]


@dataclass
class PeakReport:
    term: Term
    peaks: int = 0
    failures: list[tuple[Term, Term]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def local_confluence(m: Term, depth: int = 2, registry: Optional[Registry] = None) -> PeakReport:
    """Check that every pair of one-step reducts of m is joinable within ``depth``."""
    reg = registry or default_registry()
    reducts = _dedupe(s.term for s in step_all(m, reg))
    report = PeakReport(m)
    for a, b in itertools.combinations(reducts, 2):
        report.peaks += 1
        if joinable(a, b, depth, reg) is None:
            report.failures.append((a, b))
    return report
