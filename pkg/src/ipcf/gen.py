"""Seeded generator of well-typed terms, used by the property suites."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .syntax import (
    BOOL,
    FALSE,
    NAT,
    PRED,
    SUCC,
    TRUE,
    ZERO_TEST,
    App,
    Arrow,
    Box,
    BoxTy,
    Cond,
    Fix,
    Fst,
    Lam,
    LetBox,
    ModVar,
    Num,
    Op,
    OrdVar,
    Pair,
    Prod,
    Snd,
    Term,
    Ty,
    is_ground,
    size,
)
from .typecheck import Ctx


@dataclass
class TermGen:
    """Builds terms by following the typing rules backwards.

    Every generated term is well typed at the requested type in the given
    context. Variable names are globally fresh, so no spelling is shared
    between the two namespaces.
    """

    rng: random.Random
    products: bool = True
    ops: bool = True
    fix: bool = True
    counter: int = 0

    @classmethod
    def seeded(cls, seed: int, **kw) -> "TermGen":
        return cls(random.Random(seed), **kw)

    def name(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    # types ----------------------------------------------------------------
    def type_(self, depth: int = 2) -> Ty:
        r = self.rng.random()
        if depth <= 0 or r < 0.45:
            return self.rng.choice((NAT, NAT, BOOL))
        if r < 0.65:
            return BoxTy(self.type_(depth - 1))
        if r < 0.9 or not self.products:
            return Arrow(self.type_(depth - 1), self.type_(depth - 1))
        return Prod(self.type_(depth - 1), self.type_(depth - 1))

    def ctx(self, max_modal: int = 2, max_ord: int = 3) -> Ctx:
        modal = tuple((self.name("u"), self.type_(1)) for _ in range(self.rng.randint(0, max_modal)))
        ordinary = tuple((self.name("x"), self.type_(1)) for _ in range(self.rng.randint(0, max_ord)))
        return Ctx(modal, ordinary)

    # terms ----------------------------------------------------------------
    def term(self, ty: Ty, ctx: Ctx = Ctx(), budget: int = 12) -> Term:
        return self._gen(ty, list(ctx.modal), list(ctx.ord), budget)

    def _split(self, n: int, parts: int) -> list[int]:
        n = max(n, parts)
        cuts = sorted(self.rng.randint(0, n - parts) for _ in range(parts - 1))
        sizes, prev = [], 0
        for c in cuts + [n - parts]:
            sizes.append(c - prev + 1)
            prev = c
        return sizes

    def _leaf(self, ty: Ty, delta, gamma, n: int) -> Term:
        vars_ = [ModVar(x) for x, t in delta if t == ty] + [OrdVar(x) for x, t in gamma if t == ty]
        if vars_ and self.rng.random() < 0.6:
            return self.rng.choice(vars_)
        match ty:
            case Arrow(a, b):
                if ty == Arrow(NAT, NAT) and self.rng.random() < 0.3:
                    return self.rng.choice((SUCC, PRED))
                if ty == Arrow(NAT, BOOL) and self.rng.random() < 0.3:
                    return ZERO_TEST
                x = self.name("x")
                return Lam(x, a, self._gen(b, delta, gamma + [(x, a)], n - 1))
            case BoxTy(a):
                return Box(self._gen(a, delta, [], n - 1))
            case Prod(a, b):
                l, r = self._split(n - 1, 2)
                return Pair(self._gen(a, delta, gamma, l), self._gen(b, delta, gamma, r))
            case _ if ty == BOOL:
                return self.rng.choice((TRUE, FALSE))
            case _:
                return Num(self.rng.randint(0, 3))

    def _gen(self, ty: Ty, delta, gamma, n: int) -> Term:
        if n <= 2:
            return self._leaf(ty, delta, gamma, n)
        options = ["leaf", "app", "beta", "letbox", "boxbeta"]
        if self.fix:
            options.append("fix")
        if is_ground(ty):
            options += ["cond", "cond"]
        if ty == NAT:
            options.append("succ")
        if ty == BOOL:
            options.append("zero")
            if self.ops:
                options.append("done")
        if ty == BoxTy(BOOL) and self.ops:
            options.append("tick")
        if self.products:
            options.append("proj")
        match self.rng.choice(options):
            case "leaf":
                return self._leaf(ty, delta, gamma, n)
            case "app":
                s = self.type_(1)
                a, b = self._split(n - 1, 2)
                return App(self._gen(Arrow(s, ty), delta, gamma, a), self._gen(s, delta, gamma, b))
            case "beta":
                s = self.type_(1)
                a, b = self._split(n - 2, 2)
                x = self.name("x")
                body = self._gen(ty, delta, gamma + [(x, s)], a)
                return App(Lam(x, s, body), self._gen(s, delta, gamma, b))
            case "letbox" | "boxbeta" as kind:
                s = self.type_(1)
                a, b = self._split(n - 1, 2)
                u = self.name("u")
                if kind == "boxbeta":
                    scrut = Box(self._gen(s, delta, [], a - 1))
                else:
                    scrut = self._gen(BoxTy(s), delta, gamma, a)
                return LetBox(u, scrut, self._gen(ty, delta + [(u, s)], gamma, b))
            case "fix":
                z = self.name("z")
                return Fix(z, self._gen(ty, delta, [(z, BoxTy(ty))], n - 1))
            case "cond":
                a, b, c = self._split(n - 1, 3)
                return Cond(
                    self._gen(BOOL, delta, gamma, a),
                    self._gen(ty, delta, gamma, b),
                    self._gen(ty, delta, gamma, c),
                )
            case "succ":
                return App(self.rng.choice((SUCC, PRED)), self._gen(NAT, delta, gamma, n - 1))
            case "zero":
                return App(ZERO_TEST, self._gen(NAT, delta, gamma, n - 1))
            case "done":
                return App(Op("done?"), Box(self._gen(BOOL, delta, [], n - 2)))
            case "tick":
                return App(Op("tick"), Box(self._gen(BOOL, delta, [], n - 2)))
            case "proj":
                s = self.type_(1)
                if self.rng.random() < 0.5:
                    return Fst(self._gen(Prod(ty, s), delta, gamma, n - 1))
                return Snd(self._gen(Prod(s, ty), delta, gamma, n - 1))
        raise AssertionError  # pragma: no cover


def sample(
    seed: int,
    max_size: int = 25,
    ctx: Optional[Ctx] = None,
    ty: Optional[Ty] = None,
    **kw,
) -> tuple[Ctx, Ty, Term]:
    """A single well-typed judgement ``ctx ⊢ term : ty`` of size at most ``max_size``."""
    g = TermGen.seeded(seed, **kw)
    while True:
        c = ctx if ctx is not None else g.ctx()
        t = ty if ty is not None else g.type_()
        m = g.term(t, c, g.rng.randint(3, max_size))
        if size(m) <= max_size:
            return c, t, m


def closed_samples(count: int, seed: int = 0, max_size: int = 25, **kw) -> list[tuple[Ty, Term]]:
    out = []
    for i in range(count):
        _, t, m = sample(seed * 1_000_003 + i, max_size, ctx=Ctx(), **kw)
        out.append((t, m))
    return out
