"""Type checking for the dual-context calculus and its int/ext refinement.

Binders carry annotations except ``fix``, whose type is found by
unification. Types left undetermined at the end default to Nat.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Mapping, Optional

from .parser import print_type
from .syntax import (
    BOOL,
    CONSTANTS,
    NAT,
    App,
    Arrow,
    Base,
    Box,
    BoxTy,
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
    Prod,
    Snd,
    Term,
    TVar,
    Ty,
    bfv,
    format_path,
    fv,
    is_ground,
)

ERROR_KINDS = (
    "unbound-variable",
    "namespace-violation",
    "mismatch",
    "non-empty-ordinary-context-under-box",
    "lambda-in-int-with-context",
    "fix-type-not-allowed",
    "fix-context-violation",
)

CHECK_INVARIANTS = bool(os.environ.get("IPCF_CHECK_INVARIANTS"))


class IpcfTypeError(Exception):
    def __init__(self, kind: str, path: tuple[str, ...], detail: str):
        super().__init__(f"{kind} at {format_path(path)}: {detail}")
        self.kind = kind
        self.path = path
        self.detail = detail

    def to_json(self) -> dict:
        return {"kind": self.kind, "path": format_path(self.path), "detail": self.detail}


@dataclass(frozen=True)
class Ctx:
    """A dual context: modal assumptions Δ and ordinary assumptions Γ."""

    modal: tuple[tuple[str, Ty], ...] = ()
    ord: tuple[tuple[str, Ty], ...] = ()

    def with_ord(self, name: str, ty: Ty) -> "Ctx":
        return Ctx(self.modal, self.ord + ((name, ty),))

    def with_modal(self, name: str, ty: Ty) -> "Ctx":
        return Ctx(self.modal + ((name, ty),), self.ord)


EMPTY = Ctx()


def is_afix(ty: Ty) -> bool:
    """A_fix ::= Nat | Bool | □A → A_fix."""
    match ty:
        case Base("Nat") | Base("Bool"):
            return True
        case Arrow(BoxTy(), cod):
            return is_afix(cod)
    return False


@dataclass
class _Scope:
    modal: dict
    ord: dict
    hidden: dict  # name -> (kind, detail) for variables a rule has dropped


class _Checker:
    def __init__(self, version: int, ops: Mapping[str, Ty], no_afix: bool, products: bool):
        self.version = version
        self.ops = ops
        self.no_afix = no_afix
        self.products = products
        self.sol: dict[str, Ty] = {}
        self.counter = itertools.count()
        self.ground_goals: list[tuple[Ty, tuple[str, ...]]] = []
        self.fix_goals: list[tuple[Ty, tuple[str, ...]]] = []

    # unification ----------------------------------------------------------
    def fresh(self) -> Ty:
        return TVar(f"?{next(self.counter)}")

    def walk(self, ty: Ty) -> Ty:
        while isinstance(ty, TVar) and ty.name in self.sol:
            ty = self.sol[ty.name]
        return ty

    def zonk(self, ty: Ty, default: bool = False) -> Ty:
        ty = self.walk(ty)
        match ty:
            case Arrow(d, c):
                return Arrow(self.zonk(d, default), self.zonk(c, default))
            case Prod(l, r):
                return Prod(self.zonk(l, default), self.zonk(r, default))
            case BoxTy(b):
                return BoxTy(self.zonk(b, default))
            case TVar(n) if default and n.startswith("?"):
                self.sol[n] = NAT
                return NAT
        return ty

    def occurs(self, name: str, ty: Ty) -> bool:
        ty = self.walk(ty)
        match ty:
            case TVar(n):
                return n == name
            case Arrow(a, b) | Prod(a, b):
                return self.occurs(name, a) or self.occurs(name, b)
            case BoxTy(b):
                return self.occurs(name, b)
        return False

    def unify(self, a: Ty, b: Ty, path: tuple[str, ...]) -> None:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if isinstance(a, TVar) and a.name.startswith("?"):
            if self.occurs(a.name, b):
                self.mismatch(a, b, path)
            self.sol[a.name] = b
            return
        if isinstance(b, TVar) and b.name.startswith("?"):
            self.unify(b, a, path)
            return
        match a, b:
            case Arrow(d1, c1), Arrow(d2, c2):
                self.unify(d1, d2, path)
                self.unify(c1, c2, path)
                return
            case Prod(l1, r1), Prod(l2, r2):
                self.unify(l1, l2, path)
                self.unify(r1, r2, path)
                return
            case BoxTy(x), BoxTy(y):
                self.unify(x, y, path)
                return
        self.mismatch(a, b, path)

    def mismatch(self, a: Ty, b: Ty, path) -> None:
        raise IpcfTypeError(
            "mismatch", path, f"cannot match {self.show(a)} with {self.show(b)}"
        )

    def show(self, ty: Ty) -> str:
        return print_type(self.zonk(ty))

    def instantiate(self, ty: Ty, env: dict) -> Ty:
        match ty:
            case TVar(n):
                if n not in env:
                    env[n] = self.fresh()
                return env[n]
            case Arrow(d, c):
                return Arrow(self.instantiate(d, env), self.instantiate(c, env))
            case Prod(l, r):
                return Prod(self.instantiate(l, env), self.instantiate(r, env))
            case BoxTy(b):
                return BoxTy(self.instantiate(b, env))
        return ty

    # scopes ---------------------------------------------------------------
    @staticmethod
    def bind(sc: _Scope, name: str, ty: Ty, modal: bool, path) -> _Scope:
        other = sc.ord if modal else sc.modal
        if name in other:
            raise IpcfTypeError(
                "namespace-violation",
                path,
                f"{name} is already bound as {'an ordinary' if modal else 'a modal'} variable",
            )
        hidden = {k: v for k, v in sc.hidden.items() if k != name}
        if modal:
            return _Scope({**sc.modal, name: ty}, sc.ord, hidden)
        return _Scope(sc.modal, {**sc.ord, name: ty}, hidden)

    @staticmethod
    def drop(sc: _Scope, modal: bool, ordinary: bool, kind: str, why: str, keep=()) -> _Scope:
        hidden = dict(sc.hidden)
        new_modal, new_ord = sc.modal, sc.ord
        if ordinary:
            for n in sc.ord:
                if n not in keep:
                    hidden[n] = (kind, why)
            new_ord = {}
        if modal:
            for n in sc.modal:
                hidden[n] = (kind, why)
            new_modal = {}
        return _Scope(new_modal, new_ord, hidden)

    def lookup(self, sc: _Scope, var, path) -> Ty:
        modal = isinstance(var, ModVar)
        own, other = (sc.modal, sc.ord) if modal else (sc.ord, sc.modal)
        if var.name in own:
            return own[var.name]
        if var.name in sc.hidden:
            kind, why = sc.hidden[var.name]
            raise IpcfTypeError(kind, path, f"{var.name} is not available {why}")
        if var.name in other:
            raise IpcfTypeError(
                "namespace-violation",
                path,
                f"{var.name} is bound as {'an ordinary' if modal else 'a modal'} variable",
            )
        raise IpcfTypeError("unbound-variable", path, f"{var.name} is not bound")

    # inference ------------------------------------------------------------
    def infer(self, sc: _Scope, m: Term, path: tuple[str, ...], j: str) -> Ty:
        match m:
            case OrdVar() | ModVar():
                return self.lookup(sc, m, path)
            case Num():
                return NAT
            case Const(name):
                if name not in CONSTANTS:
                    raise IpcfTypeError("unbound-variable", path, f"unknown constant {name}")
                return CONSTANTS[name]
            case Op(name):
                if name not in self.ops:
                    raise IpcfTypeError("unbound-variable", path, f"no operation ~{name} is registered")
                return self.instantiate(self.ops[name], {})
            case Lam(x, ann, body):
                p = path + ("body",)
                if self.version == 2 and j == "int":
                    why = "inside a λ at the intensional judgement"
                    sc = self.drop(sc, True, True, "lambda-in-int-with-context", why)
                return Arrow(ann, self.infer(self.bind(sc, x, ann, False, path), body, p, "ext"))
            case App(f, a):
                tf = self.walk(self.infer(sc, f, path + ("fun",), j))
                ta = self.infer(sc, a, path + ("arg",), j)
                if isinstance(tf, Arrow):
                    self.unify(tf.dom, ta, path + ("arg",))
                    return tf.cod
                res = self.fresh()
                self.unify(tf, Arrow(ta, res), path + ("fun",))
                return res
            case Box(body):
                why = "under a box"
                inner = self.drop(sc, False, True, "non-empty-ordinary-context-under-box", why)
                return BoxTy(self.infer(inner, body, path + ("box",), "int"))
            case LetBox(u, s, body):
                ts = self.infer(sc, s, path + ("scrutinee",), j)
                a = self.fresh()
                self.unify(ts, BoxTy(a), path + ("scrutinee",))
                return self.infer(self.bind(sc, u, a, True, path), body, path + ("body",), j)
            case Fix(z, body, ann):
                a = ann if ann is not None else self.fresh()
                why = "inside a fixpoint body"
                if self.version == 2:
                    extra = sorted(v.name for v in fv(m))
                    if extra:
                        raise IpcfTypeError(
                            "fix-context-violation",
                            path,
                            f"fixpoint body mentions {', '.join(extra)} besides {z}",
                        )
                    inner = self.drop(sc, True, True, "fix-context-violation", why)
                    body_j = "int"
                else:
                    inner = self.drop(sc, False, True, "fix-context-violation", why)
                    body_j = j
                inner = self.bind(inner, z, BoxTy(a), False, path)
                tb = self.infer(inner, body, path + ("body",), body_j)
                self.unify(tb, a, path + ("body",))
                if self.version == 2 and not self.no_afix:
                    self.fix_goals.append((a, path))
                return a
            case Cond(c, t, e, ground):
                self.unify(self.infer(sc, c, path + ("if",), j), BOOL, path + ("if",))
                tt = self.infer(sc, t, path + ("then",), j)
                te = self.infer(sc, e, path + ("else",), j)
                self.unify(tt, te, path + ("else",))
                if ground is not None:
                    self.unify(tt, ground, path)
                self.require_ground(tt, path)
                return tt
            case Pair(l, r):
                self.require_products(path)
                return Prod(
                    self.infer(sc, l, path + ("left",), j), self.infer(sc, r, path + ("right",), j)
                )
            case Fst(a) | Snd(a):
                self.require_products(path)
                left, right = self.fresh(), self.fresh()
                self.unify(self.infer(sc, a, path + ("arg",), j), Prod(left, right), path + ("arg",))
                return left if isinstance(m, Fst) else right
        raise IpcfTypeError("mismatch", path, f"not a term: {m!r}")

    def require_ground(self, ty: Ty, path) -> None:
        ty = self.walk(ty)
        if isinstance(ty, TVar) and ty.name.startswith("?"):
            self.ground_goals.append((ty, path))
        elif not is_ground(ty):
            raise IpcfTypeError(
                "mismatch", path, f"conditional at {self.show(ty)}, expected Nat, Bool or File"
            )

    def require_products(self, path) -> None:
        if not self.products:
            raise IpcfTypeError("mismatch", path, "products are disabled")

    def finish(self, ty: Ty) -> Ty:
        for name in list(self.sol):
            self.zonk(self.sol[name], default=True)
        ty = self.zonk(ty, default=True)
        for g, path in self.ground_goals:
            g = self.zonk(g, default=True)
            if not is_ground(g):
                raise IpcfTypeError(
                    "mismatch", path, f"conditional at {print_type(g)}, expected Nat, Bool or File"
                )
        for a, path in self.fix_goals:
            a = self.zonk(a, default=True)
            if not is_afix(a):
                raise IpcfTypeError(
                    "fix-type-not-allowed",
                    path,
                    f"fixpoint at {print_type(a)}; allowed are Nat, Bool and []A -> ... ending in those",
                )
        return ty


def _scope(ctx: Ctx) -> _Scope:
    modal = dict(ctx.modal)
    ord_ = dict(ctx.ord)
    clash = sorted(set(modal) & set(ord_))
    if clash:
        raise IpcfTypeError(
            "namespace-violation", (), f"{', '.join(clash)} bound in both contexts"
        )
    return _Scope(modal, ord_, {})


def _ops(registry) -> Mapping[str, Ty]:
    if registry is None:
        from .registry import BUILTIN_OPS

        return {n: op.sig for n, op in BUILTIN_OPS.items()}
    return registry.signatures()


def _run(checker: _Checker, ctx: Ctx, m: Term, j: str, expected: Optional[Ty]) -> Ty:
    ty = checker.infer(_scope(ctx), m, (), j)
    if expected is not None:
        checker.unify(ty, expected, ())
    ty = checker.finish(ty)
    if CHECK_INVARIANTS:
        _free_variable_theorem(ctx, m)
    return ty


def _free_variable_theorem(ctx: Ctx, m: Term) -> None:
    modal = {ModVar(n) for n, _ in ctx.modal}
    ordinary = {OrdVar(n) for n, _ in ctx.ord}
    assert fv(m) <= modal | ordinary, (m, ctx)
    assert bfv(m) <= modal, (m, ctx)


def check_v1(
    ctx: Ctx,
    m: Term,
    registry=None,
    expected: Optional[Ty] = None,
    products: bool = True,
) -> Ty:
    """Type of ``m`` in ``ctx``, or raise IpcfTypeError."""
    return _run(_Checker(1, _ops(registry), True, products), ctx, m, "ext", expected)


def check_v2(
    ctx: Ctx,
    m: Term,
    judgement: str = "ext",
    no_afix: bool = False,
    products: bool = True,
    registry=None,
    expected: Optional[Ty] = None,
) -> Ty:
    if judgement not in ("int", "ext"):
        raise ValueError(f"judgement must be 'int' or 'ext', not {judgement!r}")
    return _run(_Checker(2, _ops(registry), no_afix, products), ctx, m, judgement, expected)


def type_of(m: Term, registry=None) -> Ty:
    return check_v1(EMPTY, m, registry)
