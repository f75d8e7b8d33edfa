"""Executable admissibility checks for the structural and cut rules.

Each rule is tested by drawing derivable premises from the term generator
and asking the checker whether the conclusion is derivable too.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .gen import TermGen
from .parser import print_term, print_type
from .syntax import ModVar, OrdVar, Term, Ty, fv, replace_at, size, subst, subterms
from .typecheck import Ctx, IpcfTypeError, check_v1, check_v2

V1_RULES = (
    "weakening",
    "exchange",
    "contraction",
    "cut",
    "modal-weakening",
    "modal-exchange",
    "modal-contraction",
    "modal-cut",
)
V2_RULES = ("weakening", "exchange", "contraction", "cut-ext", "cut-int", "modal-cut")


@dataclass(frozen=True)
class Judgement:
    ctx: Ctx
    term: Term
    ty: Ty
    judgement: str = "ext"

    def show(self) -> str:
        modal = ", ".join(f"{n}::{print_type(t)}" for n, t in self.ctx.modal)
        ordinary = ", ".join(f"{n}:{print_type(t)}" for n, t in self.ctx.ord)
        return f"{modal}; {ordinary} ⊢{self.judgement} {print_term(self.term)} : {print_type(self.ty)}"


@dataclass(frozen=True)
class Failure:
    rule: str
    conclusion: Judgement
    detail: str


@dataclass
class AdmissibilityReport:
    version: int
    instances: dict[str, int] = field(default_factory=dict)
    failures: list[Failure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def derivable(version: int, j: Judgement) -> Optional[str]:
    """None if the judgement is derivable, otherwise the error kind."""
    try:
        if version == 1:
            check_v1(j.ctx, j.term, expected=j.ty)
        else:
            check_v2(j.ctx, j.term, j.judgement, expected=j.ty)
    except IpcfTypeError as err:
        return err.kind
    return None


def shrink(m: Term, still_fails: Callable[[Term], bool], rounds: int = 50) -> Term:
    """Greedily replace subterms by their own subterms while the failure persists."""
    for _ in range(rounds):
        best = None
        for path, sub in subterms(m):
            for _, inner in subterms(sub):
                if inner is sub:
                    continue
                cand = replace_at(m, path, inner)
                if size(cand) < size(m) and still_fails(cand):
                    if best is None or size(cand) < size(best):
                        best = cand
        if best is None:
            return m
        m = best
    return m


class _Bench:
    def __init__(self, version: int, seed: int):
        self.version = version
        self.seed = seed

    def rng_for(self, rule: str, i: int) -> TermGen:
        return TermGen(random.Random(f"{self.seed}/{self.version}/{rule}/{i}"))

    def judgement(self, g: TermGen) -> str:
        return "ext" if self.version == 1 else g.rng.choice(("int", "ext"))

    def premise(
        self, g: TermGen, ctx: Ctx, ty: Ty, j: str, budget: int = 14, uses=None
    ) -> Optional[Judgement]:
        """A derivable judgement in ``ctx`` at ``ty``, if one turns up quickly.

        Terms mentioning ``uses`` are preferred, since they are the ones
        that exercise the rule.
        """
        fallback = None
        for _ in range(30):
            m = g.term(ty, ctx, g.rng.randint(2, budget))
            jd = Judgement(ctx, m, ty, j)
            if derivable(self.version, jd) is None:
                if uses is None or uses in fv(m):
                    return jd
                fallback = fallback or jd
        return fallback

    def instance(self, rule: str, g: TermGen) -> Optional[tuple[Judgement, Callable[[Term], Judgement]]]:
        """A premise and a map from its term to the conclusion."""
        ty = g.type_()
        j = self.judgement(g)
        match rule:
            case "weakening" | "modal-weakening":
                ctx = g.ctx()
                prem = self.premise(g, ctx, ty, j)
                new = (g.name("w"), g.type_(1))
                if rule == "weakening":
                    wider = Ctx(ctx.modal, ctx.ord + (new,))
                else:
                    wider = Ctx(ctx.modal + (new,), ctx.ord)
                return prem and (prem, lambda m: Judgement(wider, m, ty, j))
            case "exchange" | "modal-exchange":
                modal = rule == "modal-exchange"
                entries = tuple((g.name("u" if modal else "x"), g.type_(1)) for _ in range(g.rng.randint(2, 4)))
                base = g.ctx()
                ctx = Ctx(entries, base.ord) if modal else Ctx(base.modal, entries)
                prem = self.premise(g, ctx, ty, j)
                k = g.rng.randrange(len(entries) - 1)
                swapped = entries[:k] + (entries[k + 1], entries[k]) + entries[k + 2 :]
                out = Ctx(swapped, ctx.ord) if modal else Ctx(ctx.modal, swapped)
                return prem and (prem, lambda m: Judgement(out, m, ty, j))
            case "contraction" | "modal-contraction":
                modal = rule == "modal-contraction"
                b = g.type_(1)
                x, y = g.name("u" if modal else "x"), g.name("u" if modal else "x")
                base = g.ctx()
                if modal:
                    ctx = Ctx(base.modal + ((x, b), (y, b)), base.ord)
                    out = Ctx(base.modal + ((x, b),), base.ord)
                    var, new = ModVar(y), ModVar(x)
                else:
                    ctx = Ctx(base.modal, base.ord + ((x, b), (y, b)))
                    out = Ctx(base.modal, base.ord + ((x, b),))
                    var, new = OrdVar(y), OrdVar(x)
                prem = self.premise(g, ctx, ty, j, uses=var)
                return prem and (prem, lambda m: Judgement(out, subst(m, new, var), ty, j))
            case "cut" | "cut-ext" | "cut-int":
                base = g.ctx()
                b = g.type_(1)
                nj = {"cut": "ext", "cut-ext": "ext", "cut-int": "int"}[rule]
                n = self.premise(g, base, b, nj, budget=8)
                x = g.name("x")
                prem = self.premise(g, Ctx(base.modal, base.ord + ((x, b),)), ty, j, uses=OrdVar(x))
                if n is None or prem is None:
                    return None
                out_j = "ext" if rule == "cut-ext" else j
                return prem, lambda m: Judgement(base, subst(m, n.term, OrdVar(x)), ty, out_j)
            case "modal-cut":
                base = g.ctx()
                b = g.type_(1)
                n = self.premise(g, Ctx(base.modal, ()), b, "int", budget=8)
                u = g.name("u")
                prem = self.premise(g, Ctx(base.modal + ((u, b),), base.ord), ty, j, uses=ModVar(u))
                if n is None or prem is None:
                    return None
                return prem, lambda m: Judgement(base, subst(m, n.term, ModVar(u)), ty, j)
        raise ValueError(f"unknown rule {rule!r}")

    def run(self, rule: str, count: int, report: AdmissibilityReport) -> None:
        done = attempts = 0
        while done < count and attempts < count * 20:
            g = self.rng_for(rule, attempts)
            attempts += 1
            inst = self.instance(rule, g)
            if inst is None:
                continue
            prem, conclude = inst
            done += 1
            concl = conclude(prem.term)
            kind = derivable(self.version, concl)
            if kind is None:
                continue

            def still_fails(m: Term) -> bool:
                p = Judgement(prem.ctx, m, prem.ty, prem.judgement)
                return derivable(self.version, p) is None and derivable(self.version, conclude(m)) is not None

            small = conclude(shrink(prem.term, still_fails))
            report.failures.append(Failure(rule, small, kind))
        report.instances[rule] = done


def admissibility_suite(
    seed: int = 0, n: int = 200, version: int = 1, rules: Optional[tuple[str, ...]] = None
) -> AdmissibilityReport:
    """Test each rule on ``n`` generated instances."""
    bench = _Bench(version, seed)
    report = AdmissibilityReport(version)
    for rule in rules or (V1_RULES if version == 1 else V2_RULES):
        bench.run(rule, n, report)
    return report
