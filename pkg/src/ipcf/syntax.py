"""Types and terms of the modal calculus, with α-equivalence and substitution.

Terms live in two variable namespaces. Ordinary variables are bound by
``\\x:A. M`` and by the fixpoint binder ``fix z. M`` (whose variable stands
for a boxed copy of the fixpoint). Modal variables are bound by
``let box u = M in N``. Both kinds of variable carry their namespace, so
``OrdVar("u")`` and ``ModVar("u")`` are different variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union

# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Base:
    name: str  # "Nat" | "Bool" | "File"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Arrow:
    dom: "Ty"
    cod: "Ty"

    def __str__(self) -> str:
        from .parser import print_type

        return print_type(self)


@dataclass(frozen=True)
class Prod:
    left: "Ty"
    right: "Ty"

    def __str__(self) -> str:
        from .parser import print_type

        return print_type(self)


@dataclass(frozen=True)
class BoxTy:
    body: "Ty"

    def __str__(self) -> str:
        from .parser import print_type

        return print_type(self)


@dataclass(frozen=True)
class TVar:
    """Schematic type variable. Only appears in operation signatures."""

    name: str

    def __str__(self) -> str:
        return self.name


Ty = Union[Base, Arrow, Prod, BoxTy, TVar]

NAT = Base("Nat")
BOOL = Base("Bool")
FILE = Base("File")
GROUND = (NAT, BOOL, FILE)


def is_ground(ty: Ty) -> bool:
    return ty in GROUND


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class OrdVar:
    name: str


@dataclass(frozen=True)
class ModVar:
    name: str


@dataclass(frozen=True)
class Lam:
    var: str
    ann: Ty
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Fst:
    arg: "Term"


@dataclass(frozen=True)
class Snd:
    arg: "Term"


@dataclass(frozen=True)
class Box:
    body: "Term"


@dataclass(frozen=True)
class LetBox:
    var: str
    scrutinee: "Term"
    body: "Term"


@dataclass(frozen=True)
class Fix:
    """``fix z. M`` where ``z`` is an ordinary variable of type □A.

    ``ann`` optionally records A, the type of the fixpoint itself.
    """

    var: str
    body: "Term"
    ann: Optional[Ty] = None


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Const:
    """Built-in constants: true, false, succ, pred, zero?, in, out, infect."""

    name: str


@dataclass(frozen=True)
class Cond:
    """``if c then t else e`` at a ground type.

    ``ground`` is an optional annotation filled in by callers that know the
    branch type; it takes no part in α-equivalence.
    """

    scrutinee: "Term"
    then: "Term"
    else_: "Term"
    ground: Optional[Ty] = None


@dataclass(frozen=True)
class Op:
    """Reference to a registered intensional operation, written ``~name``."""

    name: str


Term = Union[
    OrdVar, ModVar, Lam, App, Pair, Fst, Snd, Box, LetBox, Fix, Num, Const, Cond, Op
]
Var = Union[OrdVar, ModVar]

TRUE = Const("true")
FALSE = Const("false")
SUCC = Const("succ")
PRED = Const("pred")
ZERO_TEST = Const("zero?")
FILE_IN = Const("in")
FILE_OUT = Const("out")
INFECT = Const("infect")

CONSTANTS = {
    "true": BOOL,
    "false": BOOL,
    "succ": Arrow(NAT, NAT),
    "pred": Arrow(NAT, NAT),
    "zero?": Arrow(NAT, BOOL),
}
# File constants: in : □(File → File) → File, out : File → □(File → File),
# infect : □(File → File) → File → File.
_FF = Arrow(FILE, FILE)
CONSTANTS.update(
    {
        "in": Arrow(BoxTy(_FF), FILE),
        "out": Arrow(FILE, BoxTy(_FF)),
        "infect": Arrow(BoxTy(_FF), _FF),
    }
)


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


# ---------------------------------------------------------------------------
# Traversal helpers


def children(m: Term) -> tuple[tuple[str, Term], ...]:
    """Immediate subterms with their path labels."""
    match m:
        case Lam(body=b):
            return (("body", b),)
        case App(f, a):
            return (("fun", f), ("arg", a))
        case Pair(l, r):
            return (("left", l), ("right", r))
        case Fst(a) | Snd(a):
            return (("arg", a),)
        case Box(b):
            return (("box", b),)
        case LetBox(_, s, b):
            return (("scrutinee", s), ("body", b))
        case Fix(_, b, _):
            return (("body", b),)
        case Cond(c, t, e, _):
            return (("if", c), ("then", t), ("else", e))
        case _:
            return ()


def subterms(m: Term) -> Iterator[tuple[tuple[str, ...], Term]]:
    """All subterms in pre-order, paired with their paths."""
    stack: list[tuple[tuple[str, ...], Term]] = [((), m)]
    while stack:
        path, t = stack.pop()
        yield path, t
        for label, c in reversed(children(t)):
            stack.append((path + (label,), c))


def size(m: Term) -> int:
    return 1 + sum(size(c) for _, c in children(m))


# ---------------------------------------------------------------------------
# Free variables


@lru_cache(maxsize=65536)
def fv(m: Term) -> frozenset:
    """Free variables, each tagged with its namespace."""
    match m:
        case OrdVar() | ModVar():
            return frozenset((m,))
        case Lam(x, _, b):
            return fv(b) - {OrdVar(x)}
        case Fix(z, b, _):
            return fv(b) - {OrdVar(z)}
        case LetBox(u, s, b):
            return fv(s) | (fv(b) - {ModVar(u)})
        case _:
            out: frozenset = frozenset()
            for _, c in children(m):
                out |= fv(c)
            return out


@lru_cache(maxsize=65536)
def bfv(m: Term) -> frozenset:
    """Variables occurring free under a box (or inside a fixpoint body)."""
    match m:
        case OrdVar() | ModVar():
            return frozenset()
        case Box(b):
            return fv(b)
        case Fix(z, b, _):
            return fv(b) - {OrdVar(z)}
        case Lam(x, _, b):
            return bfv(b) - {OrdVar(x)}
        case LetBox(u, s, b):
            return bfv(s) | (bfv(b) - {ModVar(u)})
        case _:
            out: frozenset = frozenset()
            for _, c in children(m):
                out |= bfv(c)
            return out


@lru_cache(maxsize=65536)
def ufv(m: Term) -> frozenset:
    """Variables with at least one free occurrence outside every box."""
    match m:
        case OrdVar() | ModVar():
            return frozenset((m,))
        case Box() | Fix():
            return frozenset()
        case Lam(x, _, b):
            return ufv(b) - {OrdVar(x)}
        case LetBox(u, s, b):
            return ufv(s) | (ufv(b) - {ModVar(u)})
        case _:
            out: frozenset = frozenset()
            for _, c in children(m):
                out |= ufv(c)
            return out


def is_closed(m: Term) -> bool:
    return not fv(m)


def names(vs) -> frozenset[str]:
    return frozenset(v.name for v in vs)


@lru_cache(maxsize=65536)
def all_names(m: Term) -> frozenset[str]:
    """Every variable name occurring in ``m``, bound or free."""
    match m:
        case OrdVar(n) | ModVar(n):
            return frozenset((n,))
        case Lam(x, _, b) | Fix(x, b, _):
            return all_names(b) | {x}
        case LetBox(u, s, b):
            return all_names(s) | all_names(b) | {u}
        case _:
            out: frozenset = frozenset()
            for _, c in children(m):
                out |= all_names(c)
            return out


# ---------------------------------------------------------------------------
# α-equivalence


@lru_cache(maxsize=65536)
def canon(m: Term) -> Term:
    """Canonical representative of the α-class of ``m``.

    Binders are renamed to ``%k`` where k is the binding depth. ``%`` is not
    an identifier character, so canonical names never collide with free ones.
    Cond annotations are dropped.
    """
    return _canon(m, {}, 0)


def _canon(m: Term, env: dict, depth: int) -> Term:
    match m:
        case OrdVar(n):
            return OrdVar(env.get(("o", n), n))
        case ModVar(n):
            return ModVar(env.get(("m", n), n))
        case Lam(x, a, b):
            k = f"%{depth}"
            return Lam(k, a, _canon(b, {**env, ("o", x): k}, depth + 1))
        case Fix(z, b, _):
            k = f"%{depth}"
            return Fix(k, _canon(b, {**env, ("o", z): k}, depth + 1))
        case LetBox(u, s, b):
            k = f"%{depth}"
            return LetBox(k, _canon(s, env, depth), _canon(b, {**env, ("m", u): k}, depth + 1))
        case App(f, a):
            return App(_canon(f, env, depth), _canon(a, env, depth))
        case Pair(l, r):
            return Pair(_canon(l, env, depth), _canon(r, env, depth))
        case Fst(a):
            return Fst(_canon(a, env, depth))
        case Snd(a):
            return Snd(_canon(a, env, depth))
        case Box(b):
            return Box(_canon(b, env, depth))
        case Cond(c, t, e, _):
            return Cond(_canon(c, env, depth), _canon(t, env, depth), _canon(e, env, depth))
        case _:
            return m


def alpha_eq(m: Term, n: Term) -> bool:
    return m == n or canon(m) == canon(n)


# ---------------------------------------------------------------------------
# Substitution


def fresh_name(base: str, avoid) -> str:
    base = base.rstrip("'") or "x"
    cand = base + "'"
    while cand in avoid:
        cand += "'"
    return cand


def subst(m: Term, n: Term, var: Var) -> Term:
    """Capture-avoiding ``m[n/var]``.

    A binder is renamed whenever its name occurs free in ``n``, whichever
    namespace that occurrence belongs to, so substitution never creates a
    spelling shared between the two contexts.
    """
    if var not in fv(m):
        return m
    return _subst(m, n, var, names(fv(n)))


def _rename(body: Term, old: Var, new: Var) -> Term:
    return _subst(body, new, old, frozenset((new.name,)))


def _subst(m: Term, n: Term, var: Var, n_names: frozenset) -> Term:
    if var not in fv(m):
        return m
    match m:
        case OrdVar() | ModVar():
            return n if m == var else m
        case Lam(x, a, b):
            if x in n_names:
                x2 = fresh_name(x, n_names | all_names(b) | {var.name})
                b = _rename(b, OrdVar(x), OrdVar(x2))
                x = x2
            return Lam(x, a, _subst(b, n, var, n_names))
        case Fix(z, b, ann):
            if z in n_names:
                z2 = fresh_name(z, n_names | all_names(b) | {var.name})
                b = _rename(b, OrdVar(z), OrdVar(z2))
                z = z2
            return Fix(z, _subst(b, n, var, n_names), ann)
        case LetBox(u, s, b):
            s2 = _subst(s, n, var, n_names)
            if var == ModVar(u):
                return LetBox(u, s2, b)
            if u in n_names and var in fv(b):
                u2 = fresh_name(u, n_names | all_names(b) | {var.name})
                b = _rename(b, ModVar(u), ModVar(u2))
                u = u2
            return LetBox(u, s2, _subst(b, n, var, n_names))
        case App(f, a):
            return App(_subst(f, n, var, n_names), _subst(a, n, var, n_names))
        case Pair(l, r):
            return Pair(_subst(l, n, var, n_names), _subst(r, n, var, n_names))
        case Fst(a):
            return Fst(_subst(a, n, var, n_names))
        case Snd(a):
            return Snd(_subst(a, n, var, n_names))
        case Box(b):
            return Box(_subst(b, n, var, n_names))
        case Cond(c, t, e, g):
            return Cond(
                _subst(c, n, var, n_names),
                _subst(t, n, var, n_names),
                _subst(e, n, var, n_names),
                g,
            )
    raise AssertionError(m)  # pragma: no cover


def replace_at(m: Term, path: tuple[str, ...], new: Term) -> Term:
    """Replace the subterm at ``path`` (no capture checks)."""
    if not path:
        return new
    head, rest = path[0], path[1:]
    match m, head:
        case Lam(x, a, b), "body":
            return Lam(x, a, replace_at(b, rest, new))
        case Fix(z, b, ann), "body":
            return Fix(z, replace_at(b, rest, new), ann)
        case App(f, a), "fun":
            return App(replace_at(f, rest, new), a)
        case App(f, a), "arg":
            return App(f, replace_at(a, rest, new))
        case Pair(l, r), "left":
            return Pair(replace_at(l, rest, new), r)
        case Pair(l, r), "right":
            return Pair(l, replace_at(r, rest, new))
        case Fst(a), "arg":
            return Fst(replace_at(a, rest, new))
        case Snd(a), "arg":
            return Snd(replace_at(a, rest, new))
        case Box(b), "box":
            return Box(replace_at(b, rest, new))
        case LetBox(u, s, b), "scrutinee":
            return LetBox(u, replace_at(s, rest, new), b)
        case LetBox(u, s, b), "body":
            return LetBox(u, s, replace_at(b, rest, new))
        case Cond(c, t, e, g), "if":
            return Cond(replace_at(c, rest, new), t, e, g)
        case Cond(c, t, e, g), "then":
            return Cond(c, replace_at(t, rest, new), e, g)
        case Cond(c, t, e, g), "else":
            return Cond(c, t, replace_at(e, rest, new), g)
    raise KeyError(f"no subterm at {'/'.join(path)}")


def subterm_at(m: Term, path: tuple[str, ...]) -> Term:
    for label in path:
        m = dict(children(m))[label]
    return m


def format_path(path: tuple[str, ...]) -> str:
    return "/".join(path) if path else "ε"
