"""Command-line interface.

Exit codes: 0 success, 1 type or parse error, 2 fuel exhausted or no
normal form, 3 confluence violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import corpus, pca
from .confluence import local_confluence, triangle_check
from .parser import ParseError, parse, print_term, print_type
from .reduction import STRATEGIES, reduce
from .registry import Registry, RegistryError, registry_from_names
from .typecheck import EMPTY, IpcfTypeError, check_v1, check_v2

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_ERROR, EXIT_FUEL, EXIT_CONFLUENCE = 0, 1, 2, 3
DEFAULT_FUEL = 1000
CONFIG_NAMES = ("ipcf.toml", "ipcf.json")


def load_config(path: Optional[str]) -> dict:
    """Read a TOML or JSON config; without a path, look for one in the cwd."""
    candidates = [Path(path)] if path else [Path(n) for n in CONFIG_NAMES]
    for p in candidates:
        if p.is_file():
            text = p.read_text(encoding="utf-8")
            return json.loads(text) if p.suffix == ".json" else tomllib.loads(text)
        if path:
            raise FileNotFoundError(path)
    return {}


def build_registry(cfg: dict, unsafe_flag: bool) -> Registry:
    unsafe = bool(cfg.get("unsafe", False)) or unsafe_flag
    names = cfg.get("ops", ["tick", "done?"] + (["is-app"] if unsafe else []))
    return registry_from_names(
        names,
        unsafe=unsafe,
        infect_demo=bool(cfg.get("infect_demo", False)),
        cond_congruence=cfg.get("cond_congruence", "all"),
    )


def resolve_fuel(flag: Optional[int], cfg: dict, default: int) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("IPCF_FUEL")
    if env:
        return int(env)
    return int(cfg.get("fuel", default))


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")


def _error(err) -> int:
    print(json.dumps(err.to_json(), ensure_ascii=False), file=sys.stderr)
    return EXIT_ERROR


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args, reg: Registry, cfg: dict) -> int:
    m = parse(_read(args.file))
    if args.v2:
        ty = check_v2(
            EMPTY, m, args.judgement, no_afix=args.no_afix, products=not args.no_products, registry=reg
        )
    else:
        ty = check_v1(EMPTY, m, reg, products=not args.no_products)
    print(print_type(ty))
    return EXIT_OK


def cmd_eval(args, reg: Registry, cfg: dict) -> int:
    m = parse(_read(args.file))
    check_v1(EMPTY, m, reg)
    trace = reduce(m, args.strategy, resolve_fuel(args.fuel, cfg, DEFAULT_FUEL), reg)
    if trace.verdict == "normal-form":
        print(print_term(trace.final))
        return EXIT_OK
    if trace.verdict == "cycle-detected":
        print(f"no normal form: cycle of period {trace.period} after {len(trace.steps)} steps")
    else:
        print(f"fuel exhausted after {len(trace.steps)} steps; last term: {print_term(trace.final)}")
    return EXIT_FUEL


def cmd_trace(args, reg: Registry, cfg: dict) -> int:
    m = parse(_read(args.file))
    trace = reduce(m, args.strategy, resolve_fuel(args.fuel, cfg, DEFAULT_FUEL), reg)
    if args.json:
        print(trace.to_json())
    else:
        print("\n".join(trace.lines()))
    return EXIT_FUEL if trace.verdict == "fuel-exhausted" else EXIT_OK


def cmd_confluence(args, reg: Registry, cfg: dict) -> int:
    m = parse(_read(args.file))
    tri = triangle_check(m, reg)
    peaks = local_confluence(m, args.depth, reg)
    if tri.passed and peaks.passed:
        print(f"ok: {peaks.peaks} peaks joinable within {args.depth} steps; triangle property holds")
        return EXIT_OK
    print(f"peak: {print_term(m)}")
    for a, b in peaks.failures:
        print(f"  not joinable within {args.depth} steps:")
        print(f"    {print_term(a)}")
        print(f"    {print_term(b)}")
    for p, why in tri.violations:
        print(f"  triangle: {why}: {print_term(p)}")
    return EXIT_CONFLUENCE


def cmd_pca_eval(args, reg: Registry, cfg: dict) -> int:
    try:
        t = pca.parse_pca(args.expr)
    except pca.PcaParseError as err:
        print(json.dumps({"kind": "parse-error", "path": "", "detail": str(err)}), file=sys.stderr)
        return EXIT_ERROR
    r = pca.pca_eval(t, resolve_fuel(args.fuel, cfg, pca.DEFAULT_FUEL))
    if isinstance(r, pca.Diverged):
        print(f"diverged: no normal form within {r.fuel} steps")
        return EXIT_FUEL
    print(pca.describe(r.term))
    return EXIT_OK


def cmd_pca_srt(args, reg: Registry, cfg: dict) -> int:
    about, f = pca.SRT_DEMOS[args.demo]
    out = pca.srt_check(f, pca.encode_num(args.arg), resolve_fuel(args.fuel, cfg, pca.DEFAULT_FUEL), args.demo)

    def show(r: pca.Result) -> str:
        return pca.describe(r.term) if isinstance(r, pca.Value) else "diverged"

    print(f"{args.demo}: {about}")
    print(f"  e has {pca.pca_size(out.code)} nodes")
    print(f"  e·#{args.arg}   = {show(out.lhs)}")
    print(f"  f·e·#{args.arg} = {show(out.rhs)}")
    print(f"  fixed-point equation {'holds' if out.holds else 'FAILS'}")
    return EXIT_OK if out.holds else EXIT_ERROR


def cmd_pca_frt(args, reg: Registry, cfg: dict) -> int:
    t = pca.FRT_DEMOS[args.demo]
    res = pca.frt(t, pca.encode_num(args.input), args.rounds, resolve_fuel(args.fuel, cfg, pca.DEFAULT_SLICE))
    if isinstance(res.outcome, pca.Diverged):
        print(f"diverged: no value after {res.rounds} rounds ({res.outcome.fuel} steps)")
        return EXIT_FUEL
    print(f"{pca.describe(res.outcome.term)}  (approximation {res.index}, round {res.rounds}, {res.outcome.steps} steps)")
    return EXIT_OK


def cmd_examples_list(args, reg: Registry, cfg: dict) -> int:
    for e in corpus.all_entries():
        print(f"{e.name:8} {e.expected_type:28} {e.summary}")
    if args.export:
        for p in corpus.export(Path(args.export)):
            print(f"wrote {p}")
    return EXIT_OK


def cmd_examples_run(args, reg: Registry, cfg: dict) -> int:
    results = corpus.claims(args.name)
    for c in results:
        detail = f"  ({c.detail})" if c.detail else ""
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}{detail}")
    return EXIT_OK if all(c.passed for c in results) else EXIT_ERROR


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ipcf", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="TOML or JSON config (default: ./ipcf.toml or ./ipcf.json)")
    ap.add_argument("--unsafe", action="store_true", help="let operations fire on open code")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type-check a program")
    p.add_argument("file")
    p.add_argument("--v2", action="store_true", help="use the int/ext judgements")
    p.add_argument("--judgement", choices=("int", "ext"), default="ext")
    p.add_argument("--no-afix", action="store_true", help="allow fixpoints at any type")
    p.add_argument("--no-products", action="store_true")
    p.set_defaults(func=cmd_check)

    for name, func, help_ in (("eval", cmd_eval, "evaluate a program"), ("trace", cmd_trace, "print a reduction trace")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file")
        p.add_argument("--strategy", choices=STRATEGIES, default="normal-order")
        p.add_argument("--fuel", type=int)
        if name == "trace":
            p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("confluence", help="check the peaks and the triangle property of a term")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=2)
    p.set_defaults(func=cmd_confluence)

    p = sub.add_parser("pca", help="combinatory algebra tools")
    psub = p.add_subparsers(dest="pca_command", required=True)
    q = psub.add_parser("eval", help="normalize an expression")
    q.add_argument("expr")
    q.add_argument("--fuel", type=int)
    q.set_defaults(func=cmd_pca_eval)
    q = psub.add_parser("srt", help="check a fixed-point equation")
    q.add_argument("--demo", choices=sorted(pca.SRT_DEMOS), required=True)
    q.add_argument("--arg", type=int, default=3)
    q.add_argument("--fuel", type=int)
    q.set_defaults(func=cmd_pca_srt)
    q = psub.add_parser("frt", help="dovetailed least fixed point search")
    q.add_argument("--demo", choices=sorted(pca.FRT_DEMOS), required=True)
    q.add_argument("--input", type=int, default=4)
    q.add_argument("--rounds", type=int, default=64)
    q.add_argument("--fuel", type=int, help="steps per simulation per round")
    q.set_defaults(func=cmd_pca_frt)

    p = sub.add_parser("examples", help="the bundled example programs")
    esub = p.add_subparsers(dest="examples_command", required=True)
    q = esub.add_parser("list")
    q.add_argument("--export", metavar="DIR")
    q.set_defaults(func=cmd_examples_list)
    q = esub.add_parser("run")
    q.add_argument("name", choices=list(corpus.ENTRIES))
    q.set_defaults(func=cmd_examples_run)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        reg = build_registry(cfg, args.unsafe)
        return args.func(args, reg, cfg)
    except (ParseError, IpcfTypeError, RegistryError) as err:
        if isinstance(err, RegistryError):
            print(json.dumps({"kind": err.kind, "path": "", "detail": err.detail}), file=sys.stderr)
            return EXIT_ERROR
        return _error(err)
    except (OSError, ValueError) as err:
        print(json.dumps({"kind": "io-error", "path": "", "detail": str(err)}), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
