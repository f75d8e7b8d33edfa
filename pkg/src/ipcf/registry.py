"""Registry of intensional operations.

An intensional operation ``~f : □A → □B`` inspects the code of its boxed
argument. In safe mode it only fires on closed arguments, which keeps
reduction stable under substitution. Unsafe mode lets every operation fire
on open arguments too, and is only meant for exhibiting what goes wrong.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Mapping

from .syntax import BOOL, FALSE, TRUE, App, Arrow, Box, BoxTy, Term, TVar, Ty


class RegistryError(Exception):
    def __init__(self, kind: str, detail: str):
        super().__init__(detail)
        self.kind = kind
        self.detail = detail


@dataclass(frozen=True)
class IntensionalOp:
    """``fn(code, registry)`` returns the whole reduct of ``~name (box code)``."""

    name: str
    sig: Ty
    fn: Callable[[Term, "Registry"], Term] = field(compare=False)

    @staticmethod
    def boxed(name: str, sig: Ty, transform: Callable[[Term, "Registry"], Term]) -> "IntensionalOp":
        """Operation of type □A → □B that rewrites the code and re-boxes it."""
        return IntensionalOp(name, sig, lambda m, reg: Box(transform(m, reg)))


@dataclass(frozen=True, eq=False)
class Registry:
    ops: Mapping[str, IntensionalOp] = field(default_factory=dict)
    unsafe: bool = False
    infect_demo: bool = False
    cond_congruence: str = "all"  # or "scrutinee-only"

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", MappingProxyType(dict(self.ops)))
        if self.cond_congruence not in ("all", "scrutinee-only"):
            raise RegistryError("bad-option", f"unknown cond congruence {self.cond_congruence!r}")

    def signatures(self) -> dict[str, Ty]:
        return {name: op.sig for name, op in self.ops.items()}

    def with_options(self, **kw) -> "Registry":
        return replace(self, ops=dict(self.ops), **kw)


def register_op(op: IntensionalOp, registry: Registry) -> Registry:
    if op.name in registry.ops:
        raise RegistryError("duplicate-name", f"operation ~{op.name} is already registered")
    return replace(registry, ops={**registry.ops, op.name: op})


# ---------------------------------------------------------------------------
# Built-in operations


def _tick(m: Term, reg: Registry) -> Term:
    from .reduction import normal_order_step

    nxt = normal_order_step(m, reg)
    return m if nxt is None else nxt


def _done(m: Term, reg: Registry) -> Term:
    from .reduction import normal_order_step

    return TRUE if normal_order_step(m, reg) is None else FALSE


def _is_app(m: Term, reg: Registry) -> Term:
    return TRUE if isinstance(m, App) else FALSE


TICK = IntensionalOp.boxed("tick", Arrow(BoxTy(BOOL), BoxTy(BOOL)), _tick)
DONE = IntensionalOp("done?", Arrow(BoxTy(BOOL), BOOL), _done)
IS_APP = IntensionalOp("is-app", Arrow(BoxTy(TVar("a")), BOOL), _is_app)

BUILTIN_OPS = {op.name: op for op in (TICK, DONE, IS_APP)}


def default_registry(
    unsafe: bool = False,
    is_app: bool | None = None,
    infect_demo: bool = False,
    cond_congruence: str = "all",
) -> Registry:
    """tick and done? always; is-app when asked for, and by default in unsafe mode."""
    if is_app is None:
        is_app = unsafe
    ops = {"tick": TICK, "done?": DONE}
    if is_app:
        ops["is-app"] = IS_APP
    return Registry(ops, unsafe=unsafe, infect_demo=infect_demo, cond_congruence=cond_congruence)


def registry_from_names(names, **options) -> Registry:
    ops = {}
    for n in names:
        if n not in BUILTIN_OPS:
            raise RegistryError("unknown-op", f"no built-in operation ~{n}")
        if n in ops:
            raise RegistryError("duplicate-name", f"operation ~{n} listed twice")
        ops[n] = BUILTIN_OPS[n]
    return Registry(ops, **options)
