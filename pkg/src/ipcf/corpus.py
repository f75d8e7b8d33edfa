"""The bundled example programs and the claims each of them should satisfy.

Claims are recomputed every time they are asked for; nothing is stored
besides the source text and the expected outcome.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .parser import parse, parse_type, print_term, print_type, read_pragmas
from .registry import default_registry
from .syntax import FALSE, INFECT, TRUE, App, Arrow, Box, Fix, Lam, OrdVar, Term, Ty, alpha_eq


@dataclass(frozen=True)
class Claim:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class Entry:
    name: str
    source: str
    expected_type: str
    v2_verdict: str  # "ok" or the error kind expected from check_v2 at ext
    summary: str

    @property
    def type_env(self) -> dict[str, Ty]:
        return read_pragmas(self.source)

    @property
    def term(self) -> Term:
        return parse(self.source)

    def expected(self) -> Ty:
        return parse_type(self.expected_type, self.type_env)


ENTRIES = {
    "ax_K": ("[](A -> B) -> []A -> []B", "ok", "box distributes over implication"),
    "eval": ("[]A -> A", "ok", "evaluation of code"),
    "quote": ("[]A -> [][]A", "ok", "code of code"),
    "omega": ("A", "ok", "a cycling fixpoint"),
    "ylob": ("[]([]A -> A) -> []A", "fix-context-violation", "recursion on code"),
    "ypcf": ("(A -> A) -> A", "lambda-in-int-with-context", "the ordinary fixpoint combinator"),
    "por": ("[]Bool -> []Bool -> Bool", "lambda-in-int-with-context", "parallel or by dovetailing"),
    "virus": ("File -> File", "fix-type-not-allowed", "a self-replicating program"),
    "isapp": ("Bool", "ok", "inspecting open code (needs ~is-app)"),
}


@lru_cache(maxsize=None)
def source(name: str) -> str:
    if name not in ENTRIES:
        raise KeyError(f"no example named {name!r}; try one of {', '.join(ENTRIES)}")
    return resources.files("ipcf").joinpath("corpus").joinpath(f"{name}.ipcf").read_text(encoding="utf-8")


def load(name: str) -> Entry:
    ty, v2, summary = ENTRIES[name]
    return Entry(name, source(name), ty, v2, summary)


def all_entries() -> list[Entry]:
    return [load(n) for n in ENTRIES]


def export(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for e in all_entries():
        p = directory / f"{e.name}.ipcf"
        p.write_text(e.source, encoding="utf-8")
        out.append(p)
    return out


def por_term() -> Term:
    return load("por").term


def omega_term(type_name: str = "Nat") -> Term:
    return parse(source("omega"), {"A": parse_type(type_name)})


def eval_term(type_name: str = "Nat") -> Term:
    return parse(source("eval"), {"A": parse_type(type_name)})


# ---------------------------------------------------------------------------
# Claims


def _registry_for(name: str, unsafe: bool = False):
    return default_registry(unsafe=unsafe, is_app=True) if name == "isapp" else default_registry()


def typing_claims(e: Entry) -> list[Claim]:
    from .typecheck import EMPTY, IpcfTypeError, check_v1, check_v2

    reg = _registry_for(e.name)
    out = []
    try:
        got = check_v1(EMPTY, e.term, reg)
        ok = got == e.expected()
        out.append(Claim(f"{e.name} : {e.expected_type}", ok, f"inferred {print_type(got)}"))
    except IpcfTypeError as err:
        out.append(Claim(f"{e.name} : {e.expected_type}", False, str(err)))
    for j in ("ext", "int") if e.v2_verdict != "ok" else ("ext",):
        try:
            check_v2(EMPTY, e.term, j, registry=reg)
            verdict = "ok"
        except IpcfTypeError as err:
            verdict = err.kind
        out.append(
            Claim(f"{e.name} at {j}: {e.v2_verdict}", verdict == e.v2_verdict, f"got {verdict}")
        )
    return out


def _reduction_claims(e: Entry) -> list[Claim]:
    from .reduction import reaches, reduce

    m = e.term
    env = e.type_env
    match e.name:
        case "omega":
            tr = reduce(m, "normal-order", 100)
            ok = tr.verdict == "cycle-detected" and tr.period is not None and tr.period <= 4
            return [Claim("omega cycles with period <= 4", ok, f"{tr.verdict}, period {tr.period}")]
        case "ylob":
            code = eval_term(print_type(env.get("A", parse_type("Nat"))))
            target = Box(Fix("z", App(code, OrdVar("z"))))
            ok = reaches(App(m, Box(code)), target, fuel=100)
            return [Claim("ylob (box M) reduces to box (fix z. M z)", ok)]
        case "ypcf":
            a = env["A"]
            evl = parse(source("eval"), {"A": Arrow(Arrow(a, a), a)})
            target = Lam("f", Arrow(a, a), App(OrdVar("f"), App(App(evl, Box(m)), OrdVar("f"))))
            ok = reaches(m, target, fuel=100)
            return [Claim("ypcf reduces to \\f. f (eval (box ypcf) f)", ok)]
        case "virus":
            ok = reaches(m, App(INFECT, Box(m)), fuel=100)
            return [Claim("virus reduces to infect (box virus)", ok)]
        case "por":
            from .reduction import FuelExhausted, por_demo

            omega_b = omega_term("Bool")
            cases = [(TRUE, omega_b, TRUE), (omega_b, TRUE, TRUE), (FALSE, FALSE, FALSE)]
            labels = ["por true omega", "por omega true", "por false false"]
            out = []
            for label, (x, y, want) in zip(labels, cases):
                try:
                    got = por_demo(x, y, 10_000)
                    out.append(Claim(f"{label} = {print_term(want)}", got == want, print_term(got)))
                except FuelExhausted as err:
                    out.append(Claim(f"{label} = {print_term(want)}", False, str(err)))
            return out
        case "isapp":
            from .confluence import joinable, normal_forms, triangle_check

            safe = _registry_for("isapp")
            unsafe = _registry_for("isapp", unsafe=True)
            nfs_unsafe = normal_forms(m, unsafe, depth=10)
            both = any(alpha_eq(t, TRUE) for t in nfs_unsafe) and any(
                alpha_eq(t, FALSE) for t in nfs_unsafe
            )
            split = joinable(TRUE, FALSE, 4, unsafe) is None
            nfs_safe = normal_forms(m, safe, depth=10)
            report = triangle_check(m, safe)
            return [
                Claim("unsafe: reaches both true and false", both),
                Claim("unsafe: true and false are not joinable", split),
                Claim("safe: unique normal form", len(nfs_safe) == 1, f"{len(nfs_safe)} normal forms"),
                Claim("safe: triangle property holds", report.passed),
            ]
    return []


def claims(name: str) -> list[Claim]:
    e = load(name)
    return typing_claims(e) + _reduction_claims(e)

