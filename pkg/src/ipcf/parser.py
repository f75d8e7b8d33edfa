"""Concrete syntax: tokenizer, parser and printer for types and terms.

Terms::

    M ::= \\x:A. M | box M | let box u = M in M | fix z. M | fix z:[]A. M
        | if M then M else M | M M | fst M | snd M | (M, M) | (M)
        | x | n | true | false | succ | pred | zero? | #in | #out | #infect
        | ~op

Types::

    A ::= Nat | Bool | File | []A | A * A | A -> A | (A) | X

``[]`` and ``*`` bind tighter than ``->``, which associates to the right.
Uppercase names other than the base types are schematic and resolve
through a type environment, defaulting to Nat. A line comment starts with
``--``; ``-- type A = Bool`` is a pragma that binds a schematic type.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional

from .syntax import (
    BOOL,
    FILE,
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
    fresh_name,
    all_names,
    fv,
)


class ParseError(Exception):
    def __init__(self, detail: str, pos: int = 0):
        super().__init__(detail)
        self.kind = "parse-error"
        self.detail = detail
        self.pos = pos
        self.path: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"kind": self.kind, "path": f"offset {self.pos}", "detail": self.detail}


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<arrow>->|→)
  | (?P<boxty>\[\]|□)
  | (?P<op>~[A-Za-z_][A-Za-z0-9_'?\-]*)
  | (?P<file>\#(?:infect|in|out)\b)
  | (?P<num>[0-9]+)
  | (?P<ident>zero\?|[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[\\λ:.(),=*])
    """,
    re.VERBOSE,
)

KEYWORDS = {"box", "let", "in", "fix", "if", "then", "else", "fst", "snd"}
CONST_WORDS = {"true", "false", "succ", "pred", "zero?"}
BASE_TYPES = {"Nat": NAT, "Bool": BOOL, "File": FILE}
_PRAGMA = re.compile(r"^\s*--\s*type\s+([A-Za-z_][A-Za-z0-9_']*)\s*=\s*(.+?)\s*$")


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[Tok]:
    out: list[Tok] = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        assert kind is not None
        if kind != "ws":
            text = m.group()
            if kind == "punct" and text == "λ":
                text = "\\"
            out.append(Tok(kind, text, pos))
        pos = m.end()
    out.append(Tok("eof", "", len(src)))
    return out


def read_pragmas(src: str) -> dict[str, Ty]:
    """Schematic type bindings declared with ``-- type X = T`` lines."""
    env: dict[str, Ty] = {}
    for line in src.splitlines():
        m = _PRAGMA.match(line)
        if m:
            env[m.group(1)] = parse_type(m.group(2), env)
    return env


class _Parser:
    def __init__(self, src: str, type_env: Mapping[str, Ty], modal: frozenset[str]):
        self.toks = tokenize(src)
        self.i = 0
        self.type_env = type_env
        self.modal = modal
        self.scope: list[tuple[str, str]] = []

    # token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("punct", "ident", "arrow", "boxty")

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS or t.text in CONST_WORDS:
            raise ParseError(f"expected identifier, found {t.text or 'end of input'!r}", t.pos)
        self.i += 1
        return t.text

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)

    # types
    def type_(self) -> Ty:
        left = self.prod_type()
        if self.tok.kind == "arrow":
            self.i += 1
            return Arrow(left, self.type_())
        return left

    def prod_type(self) -> Ty:
        ty = self.unary_type()
        while self.at("*"):
            self.i += 1
            ty = Prod(ty, self.unary_type())
        return ty

    def unary_type(self) -> Ty:
        t = self.tok
        if t.kind == "boxty":
            self.i += 1
            return BoxTy(self.unary_type())
        if self.at("("):
            self.i += 1
            ty = self.type_()
            self.expect(")")
            return ty
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if t.text in BASE_TYPES:
                return BASE_TYPES[t.text]
            if t.text in self.type_env:
                return self.type_env[t.text]
            if t.text[0].isupper():
                return NAT
            return TVar(t.text)
        raise ParseError(f"expected a type, found {t.text or 'end of input'!r}", t.pos)

    # terms
    def starts_binder_form(self) -> bool:
        t = self.tok
        return (t.kind == "punct" and t.text == "\\") or (
            t.kind == "ident" and t.text in ("box", "let", "fix", "if")
        )

    def term(self) -> Term:
        t = self.tok
        if t.kind == "punct" and t.text == "\\":
            self.i += 1
            x = self.ident()
            self.expect(":")
            ann = self.type_()
            self.expect(".")
            return Lam(x, ann, self.bound(x, "o", self.term))
        if t.kind == "ident":
            match t.text:
                case "box":
                    self.i += 1
                    return Box(self.term())
                case "let":
                    self.i += 1
                    self.expect("box")
                    u = self.ident()
                    self.expect("=")
                    s = self.term()
                    self.expect("in")
                    return LetBox(u, s, self.bound(u, "m", self.term))
                case "fix":
                    self.i += 1
                    z = self.ident()
                    ann = None
                    if self.at(":"):
                        self.i += 1
                        pos = self.tok.pos
                        zty = self.type_()
                        if not isinstance(zty, BoxTy):
                            raise ParseError("fix variable must have a boxed type", pos)
                        ann = zty.body
                    self.expect(".")
                    return Fix(z, self.bound(z, "o", self.term), ann)
                case "if":
                    self.i += 1
                    c = self.term()
                    self.expect("then")
                    a = self.term()
                    self.expect("else")
                    return Cond(c, a, self.term())
        return self.application()

    def bound(self, name: str, kind: str, k):
        self.scope.append((name, kind))
        try:
            return k()
        finally:
            self.scope.pop()

    def application(self) -> Term:
        fun = self.prefix()
        while True:
            if self.starts_atom():
                fun = App(fun, self.prefix())
            elif self.starts_binder_form():
                return App(fun, self.term())
            else:
                return fun

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("num", "op", "file"):
            return True
        if t.kind == "punct":
            return t.text == "("
        if t.kind == "ident":
            return t.text not in KEYWORDS or t.text in ("fst", "snd")
        return False

    def prefix(self) -> Term:
        t = self.tok
        if t.kind == "ident" and t.text in ("fst", "snd"):
            self.i += 1
            arg = self.prefix()
            return Fst(arg) if t.text == "fst" else Snd(arg)
        return self.atom()

    def atom(self) -> Term:
        t = self.tok
        self.i += 1
        match t.kind:
            case "num":
                return Num(int(t.text))
            case "op":
                return Op(t.text[1:])
            case "file":
                return Const(t.text[1:])
            case "ident" if t.text in CONST_WORDS:
                return Const(t.text)
            case "ident" if t.text not in KEYWORDS:
                return self.resolve(t.text)
            case "punct" if t.text == "(":
                first = self.term()
                if self.at(","):
                    self.i += 1
                    second = self.term()
                    self.expect(")")
                    return Pair(first, second)
                self.expect(")")
                return first
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)

    def resolve(self, name: str) -> Term:
        for n, kind in reversed(self.scope):
            if n == name:
                return OrdVar(name) if kind == "o" else ModVar(name)
        return ModVar(name) if name in self.modal else OrdVar(name)


def parse(
    src: str,
    type_env: Optional[Mapping[str, Ty]] = None,
    modal: frozenset[str] | set[str] = frozenset(),
) -> Term:
    """Parse a term. Free identifiers are ordinary unless listed in ``modal``.

    Pragmas in ``src`` extend ``type_env``.
    """
    env = {**read_pragmas(src), **(type_env or {})}
    p = _Parser(src, env, frozenset(modal))
    m = p.term()
    p.done()
    return m


def parse_type(src: str, type_env: Optional[Mapping[str, Ty]] = None) -> Ty:
    p = _Parser(src, type_env or {}, frozenset())
    ty = p.type_()
    p.done()
    return ty


# ---------------------------------------------------------------------------
# Printing


def print_type(ty: Ty) -> str:
    match ty:
        case Arrow(d, c):
            return f"{_type_prod(d)} -> {print_type(c)}"
        case _:
            return _type_prod(ty)


def _type_prod(ty: Ty) -> str:
    match ty:
        case Prod(l, r):
            return f"{_type_prod(l)} * {_type_unary(r)}"
        case _:
            return _type_unary(ty)


def _type_unary(ty: Ty) -> str:
    match ty:
        case Base(n) | TVar(n):
            return n
        case BoxTy(b):
            return f"[]{_type_unary(b)}"
        case _:
            return f"({print_type(ty)})"


def print_term(m: Term) -> str:
    return _term(m)


def _clash_free(name: str, body: Term, other) -> tuple[str, Term, bool]:
    """Rename a binder whose name is used free in ``body`` in the other namespace."""
    if other(name) not in fv(body):
        return name, body, False
    return fresh_name(name, all_names(body)), body, True


def _term(m: Term) -> str:
    match m:
        case Lam(x, a, b):
            x2, b, clash = _clash_free(x, b, ModVar)
            if clash:
                from .syntax import subst

                b = subst(b, OrdVar(x2), OrdVar(x))
            return f"\\{x2}:{print_type(a)}. {_term(b)}"
        case Fix(z, b, ann):
            z2, b, clash = _clash_free(z, b, ModVar)
            if clash:
                from .syntax import subst

                b = subst(b, OrdVar(z2), OrdVar(z))
            head = f"fix {z2}" if ann is None else f"fix {z2}:{_type_unary(BoxTy(ann))}"
            return f"{head}. {_term(b)}"
        case LetBox(u, s, b):
            u2, b, clash = _clash_free(u, b, OrdVar)
            if clash:
                from .syntax import subst

                b = subst(b, ModVar(u2), ModVar(u))
            return f"let box {u2} = {_term(s)} in {_term(b)}"
        case Box(Lam() | Fix() | LetBox() | Cond() as b):
            return f"box ({_term(b)})"
        case Box(b):
            return f"box {_term(b)}"
        case Cond(c, t, e, _):
            return f"if {_term(c)} then {_term(t)} else {_term(e)}"
        case _:
            return _app(m)


def _app(m: Term) -> str:
    match m:
        case App(f, a):
            return f"{_app(f)} {_atom(a)}"
        case Fst(a):
            return f"fst {_atom(a)}"
        case Snd(a):
            return f"snd {_atom(a)}"
        case _:
            return _atom(m)


def _atom(m: Term) -> str:
    match m:
        case OrdVar(n) | ModVar(n):
            return n
        case Num(n):
            return str(n)
        case Const(n) if n in CONST_WORDS:
            return n
        case Const(n):
            return f"#{n}"
        case Op(n):
            return f"~{n}"
        case Pair(l, r):
            return f"({_term(l)}, {_term(r)})"
        case _:
            return f"({_term(m)})"
