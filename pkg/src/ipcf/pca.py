"""The closed-term model of S/K combinatory logic as a partial combinatory algebra.

Application ``a · b`` is the weak normal form of the term ``a b``, when one
exists within the fuel budget. Evaluation is leftmost-outermost and
resumable, which the dovetailing fixpoint search relies on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Generator, Optional, Union

DEFAULT_FUEL = 100_000
DEFAULT_SLICE = 10_000


@dataclass(frozen=True, slots=True)
class Comb:
    name: str  # "S" | "K"


@dataclass(frozen=True, slots=True)
class PVar:
    name: str


@dataclass(frozen=True, slots=True)
class Opaque:
    """An inert constant, only ever compared for identity."""

    tag: str


@dataclass(frozen=True, slots=True)
class Ap:
    fun: "PcaTerm"
    arg: "PcaTerm"


PcaTerm = Union[Comb, PVar, Opaque, Ap]

S = Comb("S")
K = Comb("K")


@dataclass(frozen=True)
class Value:
    term: PcaTerm
    steps: int


@dataclass(frozen=True)
class Diverged:
    fuel: int


Result = Union[Value, Diverged]


def ap(f: PcaTerm, *args: PcaTerm) -> PcaTerm:
    for a in args:
        f = Ap(f, a)
    return f


def _unwind(t: PcaTerm) -> tuple[PcaTerm, list[PcaTerm]]:
    args = []
    while isinstance(t, Ap):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def _is_k(t) -> bool:
    return isinstance(t, Comb) and t.name == "K"


def _is_s(t) -> bool:
    return isinstance(t, Comb) and t.name == "S"


# Graph nodes. Evaluation rewrites application nodes in place, so a
# subterm duplicated by S is evaluated at most once.
_AP, _S, _K, _ATOM, _IND = range(5)


class _Node:
    __slots__ = ("kind", "left", "right", "normal")

    def __init__(self, kind: int, left=None, right=None):
        self.kind = kind
        self.left = left
        self.right = right
        self.normal = False


def _build(t: PcaTerm) -> _Node:
    memo: dict[int, _Node] = {}

    def go(u: PcaTerm) -> _Node:
        node = memo.get(id(u))
        if node is None:
            match u:
                case Ap(f, a):
                    node = _Node(_AP, go(f), go(a))
                case Comb("S"):
                    node = _Node(_S)
                case Comb("K"):
                    node = _Node(_K)
                case _:
                    node = _Node(_ATOM, u)
            memo[id(u)] = node
        return node

    return go(t)


def _deref(n: _Node) -> _Node:
    if n.kind != _IND:
        return n
    target = n.left
    while target.kind == _IND:
        target = target.left
    while n.kind == _IND and n.left is not target:
        n.left, n = target, n.left
    return target


def _read_back(n: _Node) -> PcaTerm:
    memo: dict[int, PcaTerm] = {}

    def go(n: _Node) -> PcaTerm:
        n = _deref(n)
        t = memo.get(id(n))
        if t is None:
            match n.kind:
                case 0:
                    t = Ap(go(n.left), go(n.right))
                case 1:
                    t = S
                case 2:
                    t = K
                case _:
                    t = n.left
            memo[id(n)] = t
        return t

    return go(n)


def _reduce(node: _Node) -> Generator[None, None, None]:
    """Normalize the graph under ``node``, yielding once per contraction."""
    while True:
        n = _deref(node)
        spine = []
        while n.kind == _AP:
            spine.append(n)
            n.left = _deref(n.left)
            n = n.left
        if n.kind == _K and len(spine) >= 2:
            redex = spine[-2]
            redex.kind, redex.left, redex.right = _IND, spine[-1].right, None
        elif n.kind == _S and len(spine) >= 3:
            x, y, z = spine[-1].right, spine[-2].right, spine[-3].right
            redex = spine[-3]
            redex.left, redex.right = _Node(_AP, x, z), _Node(_AP, y, z)
        else:
            break
        yield
    for app in reversed(spine):
        arg = app.right = _deref(app.right)
        if not arg.normal:
            yield from _reduce(arg)
    for app in spine:
        app.normal = True
    n.normal = True


def _normalize(t: PcaTerm) -> Generator[None, None, PcaTerm]:
    """Yields once per contraction; returns the weak normal form."""
    root = _build(t)
    yield from _reduce(root)
    return _read_back(root)


class Simulation:
    """A paused evaluation that can be advanced a slice at a time."""

    def __init__(self, term: PcaTerm):
        self.term = term
        self.steps = 0
        self.result: Optional[PcaTerm] = None
        self._gen = _normalize(term)

    @property
    def done(self) -> bool:
        return self.result is not None

    def advance(self, fuel: int) -> Optional[PcaTerm]:
        """Run at most ``fuel`` more contractions; the normal form once reached."""
        if self.result is None:
            for _ in range(fuel):
                try:
                    next(self._gen)
                except StopIteration as stop:
                    self.result = stop.value
                    break
                self.steps += 1
        return self.result


def pca_eval(t: PcaTerm, fuel: int = DEFAULT_FUEL) -> Result:
    """Normal form of ``t`` within ``fuel`` contractions, else Diverged."""
    gen = _normalize(t)
    steps = 0
    while True:
        try:
            next(gen)
        except StopIteration as stop:
            return Value(stop.value, steps)
        steps += 1
        if steps > fuel:
            return Diverged(fuel)


def pca_apply(a: PcaTerm, b: PcaTerm, fuel: int = DEFAULT_FUEL) -> Result:
    """``a · b``: the normal form of ``a b`` or Diverged."""
    return pca_eval(Ap(a, b), fuel)


def nf(t: PcaTerm, fuel: int = DEFAULT_FUEL) -> PcaTerm:
    """Normal form, raising if the budget runs out."""
    r = pca_eval(t, fuel)
    if isinstance(r, Diverged):
        raise RuntimeError(f"no normal form within {fuel} steps")
    return r.term


def is_normal(t: PcaTerm) -> bool:
    head, args = _unwind(t)
    if (_is_k(head) and len(args) >= 2) or (_is_s(head) and len(args) >= 3):
        return False
    return all(is_normal(a) for a in args)


def free_vars(t: PcaTerm) -> frozenset[str]:
    match t:
        case PVar(n):
            return frozenset((n,))
        case Ap(f, a):
            return free_vars(f) | free_vars(a)
    return frozenset()


def pca_subst(t: PcaTerm, x: str, a: PcaTerm) -> PcaTerm:
    match t:
        case PVar(n) if n == x:
            return a
        case Ap(f, b):
            return Ap(pca_subst(f, x, a), pca_subst(b, x, a))
    return t


def pca_size(t: PcaTerm) -> int:
    size, stack = 0, [t]
    while stack:
        u = stack.pop()
        size += 1
        if isinstance(u, Ap):
            stack.extend((u.fun, u.arg))
    return size


# ---------------------------------------------------------------------------
# Bracket abstraction

I = ap(S, K, K)


def lambda_star(x: str, t: PcaTerm) -> PcaTerm:
    """λ*x.t, so that (λ*x.t)·a ≃ t[a/x].

    Closed normal forms are elements of the algebra and are abstracted with
    K as a whole; other applications are split with S.
    """
    match t:
        case PVar(n) if n == x:
            return I
        case Comb() | PVar() | Opaque():
            return Ap(K, t)
        case Ap(f, a):
            if not free_vars(t) and is_normal(t):
                return Ap(K, t)
            return ap(S, lambda_star(x, f), lambda_star(x, a))
    raise TypeError(t)


def lambda_stars(xs: list[str] | str, t: PcaTerm) -> PcaTerm:
    """λ*x1.…λ*xn.t; a string of names is split on whitespace."""
    if isinstance(xs, str):
        xs = xs.split()
    for x in reversed(xs):
        t = lambda_star(x, t)
    return t


# ---------------------------------------------------------------------------
# Encodings

V = PVar


def _lib(xs: str, body: PcaTerm) -> PcaTerm:
    return lambda_stars(xs, body)


TRUE = _lib("x y", V("x"))
FALSE = _lib("x y", V("y"))
IF = _lib("b x y", ap(V("b"), V("x"), V("y")))
PAIR = _lib("x y f", ap(V("f"), V("x"), V("y")))
FST = _lib("p", ap(V("p"), TRUE))
SND = _lib("p", ap(V("p"), FALSE))
ZERO = I
SUCC = _lib("n", ap(PAIR, FALSE, V("n")))
ISZERO = FST
PRED = _lib("n", ap(IF, ap(ISZERO, V("n")), ZERO, ap(SND, V("n"))))


def smn(p: PcaTerm, a: PcaTerm) -> PcaTerm:
    """Code for ``x ↦ p·a·x``: S(S(K p)(K a)) I."""
    return ap(S, ap(S, Ap(K, p), Ap(K, a)), I)


SMN = _lib("p a", ap(S, ap(S, Ap(K, V("p")), Ap(K, V("a"))), I))


def kleene_fixed_point(f: PcaTerm) -> PcaTerm:
    """e with e·a ≃ f·e·a for every a.

    w = λ*y.λ*x. f·(smn y y)·x and e = smn w w, so e·a reduces to
    f·(smn w' w')·a' with w' and a' reducing to w and a.
    """
    y, x = V("%y"), V("%x")
    w = lambda_star("%y", lambda_star("%x", ap(f, smn(y, y), x)))
    return smn(w, w)


def rogers_fixed_point(g: PcaTerm) -> PcaTerm:
    """e with e·a ≃ (g·e)·a for every a."""
    return kleene_fixed_point(_lib("%c %x", ap(g, V("%c"), V("%x"))))


@lru_cache(maxsize=None)
def encode_num(n: int) -> PcaTerm:
    """Curry numeral: 0 is I, n+1 is ⟨false, n⟩, in normal form."""
    t = ZERO
    for _ in range(n):
        t = nf(ap(PAIR, FALSE, t))
    return t


_HOLE = Opaque("%hole")
_SUCC_TEMPLATE = nf(ap(PAIR, FALSE, _HOLE))


def _match(template: PcaTerm, t: PcaTerm, found: list) -> bool:
    stack = [(template, t)]
    while stack:
        a, b = stack.pop()
        if a == _HOLE:
            found.append(b)
        elif isinstance(a, Ap):
            if not isinstance(b, Ap):
                return False
            stack.append((a.fun, b.fun))
            stack.append((a.arg, b.arg))
        elif a != b:
            return False
    return len(found) == 1


def decode_num(t: PcaTerm) -> Optional[int]:
    """The n with ``t`` equal to the normal form of n̄, if any."""
    n = 0
    while True:
        if t == ZERO:
            return n
        found: list = []
        if not _match(_SUCC_TEMPLATE, t, found):
            return None
        t = found[0]
        n += 1


def decode_bool(t: PcaTerm) -> Optional[bool]:
    if t == TRUE:
        return True
    if t == FALSE:
        return False
    return None


def _rec(xs: str, body: PcaTerm) -> PcaTerm:
    """Recursive definition: ``r`` in ``body`` refers to the function itself."""
    return kleene_fixed_point(_lib("r " + xs, body))


def _pred_of(v: str) -> PcaTerm:
    return ap(PRED, V(v))


ADD = _rec(
    "x y",
    ap(IF, ap(ISZERO, V("x")), V("y"), ap(SUCC, ap(V("r"), _pred_of("x"), V("y")))),
)
MULT = _rec(
    "x y",
    ap(IF, ap(ISZERO, V("x")), ZERO, ap(ADD, V("y"), ap(V("r"), _pred_of("x"), V("y")))),
)

LIBRARY: dict[str, PcaTerm] = {
    "I": I,
    "true": TRUE,
    "false": FALSE,
    "if": IF,
    "pair": PAIR,
    "fst": FST,
    "snd": SND,
    "zero": ZERO,
    "succ": SUCC,
    "pred": PRED,
    "iszero": ISZERO,
    "add": ADD,
    "mult": MULT,
    "smn": SMN,
}


# ---------------------------------------------------------------------------
# Fixpoint theorems: demos


def _blueprint(xs: str, body: PcaTerm) -> PcaTerm:
    return _lib(xs, body)


SRT_DEMOS: dict[str, tuple[str, PcaTerm]] = {
    "ignore": ("e·a = a", _blueprint("e x", V("x"))),
    "self": ("e·a = e: a program that prints its own code", _blueprint("e x", V("e"))),
    "countdown": (
        "e·n = 0 by recursion on its own code",
        _blueprint("e x", ap(IF, ap(ISZERO, V("x")), ZERO, ap(V("e"), _pred_of("x")))),
    ),
}


@dataclass(frozen=True)
class SrtOutcome:
    name: str
    code: PcaTerm
    arg: PcaTerm
    lhs: Result
    rhs: Result

    @property
    def holds(self) -> bool:
        match self.lhs, self.rhs:
            case Value(a, _), Value(b, _):
                return a == b
            case Diverged(), Diverged():
                return True
        return False


def srt_check(f: PcaTerm, arg: PcaTerm, fuel: int = DEFAULT_FUEL, name: str = "") -> SrtOutcome:
    """Compare e·a with f·e·a for the Kleene fixed point e of f."""
    e = kleene_fixed_point(f)
    return SrtOutcome(name, e, arg, pca_eval(Ap(e, arg), fuel), pca_eval(ap(f, e, arg), fuel))


# ---------------------------------------------------------------------------
# Dovetailed fixpoint search


OMEGA = Ap(ap(S, I, I), ap(S, I, I))


@dataclass(frozen=True)
class FrtResult:
    outcome: Result
    rounds: int
    index: Optional[int] = None  # which approximation produced the value


def frt(
    t: Callable[[PcaTerm], PcaTerm],
    input: PcaTerm,
    rounds: int = 64,
    fuel: int = DEFAULT_SLICE,
    p0: PcaTerm = OMEGA,
) -> FrtResult:
    """Search for the least fixed point of the program transformer ``t`` at ``input``.

    Round i starts a simulation of t^i(p0)·input and then gives every running
    simulation ``fuel`` more steps; the first value found wins. A code equal
    to one already running is not simulated twice.
    """
    codes: list[PcaTerm] = []
    sims: list[tuple[int, Simulation]] = []
    code = p0
    spent = 0
    for r in range(rounds):
        if code not in codes:
            sims.append((r, Simulation(Ap(code, input))))
        codes.append(code)
        for idx, sim in sims:
            before = sim.steps
            out = sim.advance(fuel)
            spent += sim.steps - before
            if out is not None:
                return FrtResult(Value(out, spent), r + 1, idx)
        code = t(code)
    return FrtResult(Diverged(spent), rounds)


def factorial_transformer(p: PcaTerm) -> PcaTerm:
    """p ↦ λ*x. if (iszero x) 1 (mult x (p (pred x)))."""
    body = ap(IF, ap(ISZERO, V("x")), encode_num(1), ap(MULT, V("x"), Ap(p, _pred_of("x"))))
    return lambda_star("x", body)


FRT_DEMOS: dict[str, Callable[[PcaTerm], PcaTerm]] = {
    "factorial": factorial_transformer,
    "identity": lambda p: p,
    "constant": lambda p: Ap(K, encode_num(5)),
}


# ---------------------------------------------------------------------------
# Mini syntax: S, K, juxtaposition, (e), \*x. e, #n, @tag, library names


class PcaParseError(Exception):
    kind = "parse-error"


_PCA_TOKEN = re.compile(r"\s*(?:(\\\*)|(#\d+)|(@[A-Za-z0-9_]+)|([A-Za-z_][A-Za-z0-9_']*)|([().]))")


def parse_pca(src: str) -> PcaTerm:
    toks: list[str] = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _PCA_TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise PcaParseError(f"unexpected character at offset {pos}: {src[pos:pos + 10]!r}")
        toks.append(next(g for g in m.groups() if g))
        pos = m.end()
    i = 0

    def peek() -> Optional[str]:
        return toks[i] if i < len(toks) else None

    def expr(bound: frozenset) -> PcaTerm:
        nonlocal i
        items: list[PcaTerm] = []
        while (tok := peek()) is not None and tok not in (")", "."):
            if tok == "\\*":
                i += 1
                name = peek()
                if name is None or not re.match(r"[A-Za-z_]", name):
                    raise PcaParseError("expected a variable after \\*")
                i += 1
                if peek() != ".":
                    raise PcaParseError("expected '.' after the bound variable")
                i += 1
                items.append(lambda_star(name, expr(bound | {name})))
                break
            items.append(atom(bound))
        if not items:
            raise PcaParseError("expected an expression")
        return ap(*items)

    def atom(bound: frozenset) -> PcaTerm:
        nonlocal i
        tok = toks[i]
        i += 1
        if tok == "(":
            e = expr(bound)
            if peek() != ")":
                raise PcaParseError("expected ')'")
            i += 1
            return e
        if tok.startswith("#"):
            return encode_num(int(tok[1:]))
        if tok.startswith("@"):
            return Opaque(tok[1:])
        if tok in bound:
            return PVar(tok)
        if tok in ("S", "K"):
            return Comb(tok)
        if tok in LIBRARY:
            return LIBRARY[tok]
        return PVar(tok)

    t = expr(frozenset())
    if i != len(toks):
        raise PcaParseError(f"unexpected {toks[i]!r}")
    return t


def print_pca(t: PcaTerm) -> str:
    match t:
        case Comb(n):
            return n
        case PVar(n):
            return n
        case Opaque(tag):
            return f"@{tag}"
        case Ap(f, a):
            right = print_pca(a)
            if isinstance(a, Ap):
                right = f"({right})"
            return f"{print_pca(f)} {right}"
    raise TypeError(t)


def describe(t: PcaTerm) -> str:
    """Printed term, plus its reading as a numeral or boolean when it has one."""
    n = decode_num(t)
    if n is not None:
        return f"#{n}"
    b = decode_bool(t)
    if b is not None:
        return "true" if b else "false"
    return print_pca(t)
