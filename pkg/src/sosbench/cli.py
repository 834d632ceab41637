"""Command-line entry point: ``sosbench <command> ...``.

Exit codes: 0 success, 1 verdict false, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import fixtures
from .decompose import (derive_ruloids, fuzz_precongruence, inverse, plus_of, random_process)
from .formats import (FORMATS, LAMBDA_FREE, Lambda, check_conservative_syntactic, check_format,
                      minimal_lambdas)
from .observe import (FormulaSyntaxError, formula_depth, parse_formula, preorder_holds,
                      preorder_modal, print_formula, satisfies)
from .semantics import build_lts, check_conservative_semantic
from .syntax import ParseError, parse_term, parse_tss, print_rule, print_term, print_tss
from .terms import Tss, term_key
from .transform import STAGES, PreconditionError, PickExplosion, pipeline_stages

OK, FALSE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def load_tss(arg: str) -> Tss:
    """A path to a .tss file, or the name of a bundled fixture."""
    p = Path(arg)
    if p.is_file():
        return parse_tss(p.read_text())
    if p.stem in fixtures.names():
        return fixtures.load(p.stem)
    raise UsageError(f"no such file or fixture: {arg}")


def _emit(args, data: dict, text: str) -> None:
    if args.out == "json":
        print(json.dumps(data, indent=2, sort_keys=True, default=str))
    else:
        print(text)


def _term(P: Tss, s: str):
    return parse_term(s, P.signature)


# ---- commands ------------------------------------------------------------

def cmd_check(args) -> int:
    P = load_tss(args.file)
    L = None
    if args.format in LAMBDA_FREE:
        pass
    elif args.lambda_mode == "declared":
        L = Lambda.declared(P.signature)
    elif args.lambda_mode == "exhaustive":
        cands = minimal_lambdas(P, args.format)
        L = cands[0] if cands else Lambda.universal(P.signature)
    rep = check_format(P, args.format, L)
    lines = [f"{args.format}: {'yes' if rep.verdict else 'no'}"]
    if rep.lambda_used is not None:
        lines.append(f"liquid: {rep.lambda_used}")
    for v in rep.violations:
        lines.append(f"  rule {v.rule}: {v.clause}: {v.reason}")
    _emit(args, rep.as_dict(), "\n".join(lines))
    return OK if rep.verdict else FALSE


def cmd_transform(args) -> int:
    P = load_tss(args.file)
    universe = [_term(P, u) for u in args.universe] if args.universe else None
    try:
        outs, trace = pipeline_stages(P, universe, args.fuel)
    except (PreconditionError, PickExplosion) as e:
        data = {"ok": False, "error": str(e)}
        if isinstance(e, PreconditionError):
            data.update(stage=e.stage, clause=e.clause)
        _emit(args, data, f"rejected: {e}")
        return FALSE
    out = outs[STAGES.index(args.stage)]
    notes = [f"# stage {s.name}: {s.rules_in} -> {s.rules_out} rules" + (f" ({s.note})" if s.note else "")
             for s in trace.stages[:STAGES.index(args.stage) + 1]]
    _emit(args, {"ok": True, "stage": args.stage, "tss": print_tss(out), "trace": trace.as_dict()},
          "\n".join(notes) + "\n" + print_tss(out))
    return OK


def cmd_lts(args) -> int:
    P = load_tss(args.file)
    roots = [_term(P, r) for r in args.root]
    L = build_lts(P, roots, args.depth, args.notion)
    rows = []
    for s in sorted(L.states, key=term_key):
        for a in L.actions:
            st = L.status(s, a)
            if st == "can":
                for u in L.successors(s, a):
                    rows.append((print_term(s), a, print_term(u)))
            elif st in ("unknown", "truncated") and (st != "truncated" or a == L.actions[0]):
                rows.append((print_term(s), a if st == "unknown" else "*", st))
    text = "\n".join(f"{s} -{a}-> {u}" if u not in ("unknown", "truncated") else f"{s} {a} {u}"
                     for s, a, u in rows)
    data = {"notion": args.notion, "depth": args.depth, "two_valued": L.two_valued,
            "states": [print_term(s) for s in sorted(L.states, key=term_key)],
            "transitions": [list(r) for r in rows]}
    _emit(args, data, text or "(no transitions)")
    return OK


def cmd_compare(args) -> int:
    P = load_tss(args.file)
    p, q = _term(P, args.left), _term(P, args.right)
    L = build_lts(P, [p, q], args.depth + 1)
    holds = preorder_holds(L, p, q, args.notion, args.depth)
    modal = preorder_modal(L, p, q, args.notion, args.depth)
    if holds != modal:
        print("internal disagreement between the relational and modal routes", file=sys.stderr)
        return USAGE
    _emit(args, {"notion": args.notion, "depth": args.depth, "holds": holds},
          f"{args.left} {'<=' if holds else 'not <='}_{args.notion} {args.right} (depth {args.depth})")
    return OK if holds else FALSE


def cmd_sat(args) -> int:
    P = load_tss(args.file)
    t = _term(P, args.term)
    f = parse_formula(args.formula)
    depth = args.depth if args.depth is not None else formula_depth(f) + 1
    L = build_lts(P, [t], depth)
    v = satisfies(L, t, f)
    word = {True: "yes", False: "no", None: "unknown"}[v]
    _emit(args, {"term": args.term, "formula": print_formula(f), "satisfied": v}, word)
    return OK if v is True else FALSE


def cmd_ruloids(args) -> int:
    P = load_tss(args.file)
    t = _term(P, args.term)
    rs = derive_ruloids(plus_of(P), t, args.action, positive=not args.neg)
    _emit(args, {"ruloids": [print_rule(r.rule) for r in rs]},
          "\n".join(print_rule(r.rule) for r in rs) or "(none)")
    return OK


def cmd_decompose(args) -> int:
    P = load_tss(args.file)
    t = _term(P, args.term)
    f = parse_formula(args.formula)
    psis = inverse(P, t, f)
    blocks = []
    for psi in psis:
        blocks.append("\n".join(f"{x} := {print_formula(g)}" for x, g in psi.assignments))
    _emit(args, {"decompositions": [{x: print_formula(g) for x, g in psi.assignments}
                                    for psi in psis]},
          "\n\n".join(blocks) or "(none)")
    return OK


def cmd_conservative(args) -> int:
    P1, P2 = load_tss(args.base), load_tss(args.extension)
    if args.semantic:
        rng = random.Random(args.seed)
        roots = [_term(P1, r) for r in args.root] if args.root else \
            [random_process(rng, P1, 2) for _ in range(12)]
        ok, lit = check_conservative_semantic(P1, P2, roots, args.depth)
        _emit(args, {"mode": "semantic", "verdict": ok, "witness": None if lit is None else str(lit)},
              "conservative" if ok else f"not conservative: {lit}")
        return OK if ok else FALSE
    rep = check_conservative_syntactic(P1, P2)
    _emit(args, {"mode": "syntactic", "verdict": rep.verdict, "reasons": list(rep.reasons)},
          "conservative" if rep.verdict else "not shown conservative:\n  " + "\n  ".join(rep.reasons))
    return OK if rep.verdict else FALSE


def cmd_fuzz(args) -> int:
    P = load_tss(args.file)
    r = fuzz_precongruence(P, args.notion, depth=args.depth, seed=args.seed)
    data = {"notion": args.notion, "ok": r.ok, "checked": r.checked, "skipped": r.skipped,
            "counterexample": None if r.counterexample is None else
            {"context": print_term(r.counterexample[0]),
             "left": {k: print_term(v) for k, v in r.counterexample[1].items()},
             "right": {k: print_term(v) for k, v in r.counterexample[2].items()}}}
    text = f"{'ok' if r.ok else 'FAILED'}: {r.checked} cases checked, {r.skipped} skipped"
    if r.counterexample is not None:
        c = data["counterexample"]
        text += f"\ncontext {c['context']} with {c['left']} vs {c['right']}"
    _emit(args, data, text)
    return OK if r.ok else FALSE


def cmd_fixtures(args) -> int:
    if args.action == "list":
        names = fixtures.names()
        _emit(args, {"fixtures": names}, "\n".join(names))
        return OK
    if args.action == "show":
        if args.name not in fixtures.names():
            raise UsageError(f"unknown fixture {args.name}")
        _emit(args, {"name": args.name, "text": fixtures.text(args.name)}, fixtures.text(args.name))
        return OK
    from .acceptance import CRITERIA, run_criterion
    nums = args.criterion or [n for n, _, _ in CRITERIA]
    results = []
    for n in nums:
        if not 1 <= n <= len(CRITERIA):
            raise UsageError(f"no criterion {n}")
        r = run_criterion(n)
        results.append(r)
        if args.out == "text":
            print(r.line(), flush=True)
    if args.out == "json":
        print(json.dumps([r.as_dict() for r in results], indent=2, sort_keys=True))
    return OK if all(r.ok for r in results) else FALSE


# ---- parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sosbench", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", choices=("text", "json"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="decide format membership")
    p.add_argument("file")
    p.add_argument("--format", required=True, choices=FORMATS)
    p.add_argument("--lambda", dest="lambda_mode", default="auto",
                   choices=("auto", "exhaustive", "declared"))
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("transform", parents=[common], help="run the negative closure pipeline")
    p.add_argument("file")
    p.add_argument("--stage", choices=STAGES, default=STAGES[-1])
    p.add_argument("--universe", action="append", metavar="TERM",
                   help="closed term for grounding free variables (repeatable)")
    p.add_argument("--fuel", type=int, default=8)
    p.set_defaults(run=cmd_transform)

    p = sub.add_parser("lts", parents=[common], help="print the transition relation")
    p.add_argument("file")
    p.add_argument("--root", action="append", required=True, metavar="TERM")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--notion", choices=("ws", "s", "standard"), default="ws")
    p.set_defaults(run=cmd_lts)

    p = sub.add_parser("compare", parents=[common], help="decide a behavioural preorder")
    p.add_argument("file")
    p.add_argument("--notion", required=True)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(run=cmd_compare)

    p = sub.add_parser("sat", parents=[common], help="check a modal formula")
    p.add_argument("file")
    p.add_argument("--term", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--depth", type=int)
    p.set_defaults(run=cmd_sat)

    p = sub.add_parser("ruloids", parents=[common], help="derive ruloids for an open term")
    p.add_argument("file")
    p.add_argument("--term", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--neg", action="store_true", help="negative conclusions")
    p.set_defaults(run=cmd_ruloids)

    p = sub.add_parser("decompose", parents=[common], help="decompose a formula over an open term")
    p.add_argument("file")
    p.add_argument("--term", required=True)
    p.add_argument("--formula", required=True)
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("conservative", parents=[common], help="conservative extension check")
    p.add_argument("base")
    p.add_argument("extension")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--syntactic", action="store_true")
    mode.add_argument("--semantic", action="store_true")
    p.add_argument("--root", action="append", metavar="TERM")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_conservative)

    p = sub.add_parser("fuzz-precongruence", parents=[common], help="random precongruence test")
    p.add_argument("file")
    p.add_argument("--notion", required=True)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_fuzz)

    p = sub.add_parser("fixtures", parents=[common], help="bundled fixtures and acceptance suite")
    p.add_argument("action", choices=("list", "show", "run"))
    p.add_argument("name", nargs="?")
    p.add_argument("--criterion", type=int, action="append")
    p.set_defaults(run=cmd_fixtures)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.run(args)
    except (UsageError, ParseError, FormulaSyntaxError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
