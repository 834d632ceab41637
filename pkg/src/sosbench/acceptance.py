"""Executable acceptance criteria, shared by the test suite and ``sosbench fixtures run``."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from . import fixtures
from .decompose import check_inverse_lemma, fuzz_precongruence, inverse, random_process
from .formats import FORMATS, check_conservative_syntactic, check_format
from .generate import SIG, random_closed, random_open, random_rs_formula, random_tss
from .observe import (decorated_traces, equivalent, normalize, preorder_holds, preorder_modal,
                      print_formula, random_acyclic_lts, parse_formula)
from .semantics import (build_lts, check_conservative_semantic, ground_program, standard_provable,
                        supported_provable, ws_provable)
from .syntax import parse_term, parse_tss
from .terms import App, Literal, Tss, alpha_key, subterms, term_key
from .transform import PreconditionError, pipeline_stages, plus_pipeline, rplus

SUITE_CASES = 200


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool = True
    checks: list[tuple[str, bool]] = field(default_factory=list)
    seconds: float = 0.0

    def check(self, label: str, ok: bool) -> bool:
        self.checks.append((label, bool(ok)))
        self.ok = self.ok and bool(ok)
        return bool(ok)

    @property
    def failures(self) -> list[str]:
        return [label for label, ok in self.checks if not ok]

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = "" if self.ok else " | failed: " + "; ".join(self.failures[:5])
        return f"[{status}] criterion {self.number}: {self.name} ({len(self.checks)} checks, {self.seconds:.1f}s){extra}"

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "ok": self.ok,
                "checks": [{"label": l, "ok": o} for l, o in self.checks],
                "seconds": round(self.seconds, 3)}


def _terms(P: Tss, *texts: str):
    return [parse_term(t, P.signature) for t in texts]


# ---- 1: format verdicts --------------------------------------------------

def criterion_1(res: CriterionResult) -> None:
    def verdict(name: str, fmt: str):
        return check_format(fixtures.load(name), fmt)

    r = verdict("bpa", "failure-trace")
    res.check("bpa failure-trace", r.verdict)
    res.check("bpa (.,1) liquid", (".", 1) in r.lambda_used)
    r = verdict("priority", "ready-trace")
    res.check("priority ready-trace", r.verdict)
    r = verdict("priority", "readiness")
    res.check("priority not readiness", not r.verdict)
    res.check("priority propagated and polled",
              any(v.clause == "propagated-and-polled" for v in r.violations))
    r = verdict("initial-priority", "failure-trace")
    theta = [f.name for f in fixtures.load("initial-priority").signature.functions
             if f.name not in fixtures.load("bpa").signature]
    res.check("initial-priority failure-trace", r.verdict)
    res.check("initial-priority operator argument frozen",
              bool(theta) and all((t, 1) not in r.lambda_used for t in theta))
    r = verdict("kleene", "failure-trace")
    res.check("kleene failure-trace", r.verdict)
    res.check("kleene (*,1) frozen", ("*", 1) not in r.lambda_used)
    res.check("bpa0-seq readiness", verdict("bpa0-seq", "readiness").verdict)
    r = verdict("bpa0-seq", "failure-trace")
    res.check("bpa0-seq not failure-trace", not r.verdict)
    res.check("bpa0-seq polled in negative premises",
              any(v.clause == "polled-in-negative-premise" for v in r.violations))
    res.check("refinement readiness", verdict("refinement", "readiness").verdict)
    r = verdict("ex7", "partial-trace")
    res.check("ex7 not partial-trace", not r.verdict)
    res.check("ex7 negative premise", any(v.clause == "negative-premise" for v in r.violations))


# ---- 2: negative closure -------------------------------------------------

CLOSURE_EXTRA = """
rule n1: |- c -/b->
rule n2: |- f(x1, x2) -/a->
rule n3: x1 -/a->, x2 -/a-> |- f(x1, x2) -/b->
rule n4: x1 -/a->, x1 -b-> z |- f(x1, x2) -/b->
"""


def expected_closure() -> Tss:
    return parse_tss(fixtures.text("closure") + CLOSURE_EXTRA)


def criterion_2(res: CriterionResult) -> None:
    got = {alpha_key(r) for r in rplus(fixtures.load("closure")).rules}
    want = {alpha_key(r) for r in expected_closure().rules}
    res.check("closure equals R plus four rules", got == want)
    piped, _ = plus_pipeline(fixtures.load("closure"))
    res.check("pipeline agrees on closure", {alpha_key(r) for r in piped.rules} == want)


# ---- 3: decomposition ----------------------------------------------------

def criterion_3(res: CriterionResult) -> None:
    P = fixtures.load("inverse")
    (t,) = _terms(P, "f(f(x))")
    psis = inverse(P, t, parse_formula("<b><a>tt"))
    res.check("exactly one decomposition", len(psis) == 1)
    res.check("x := <b><b>tt",
              len(psis) == 1 and normalize(psis[0]("x")) == normalize(parse_formula("<b><b>tt")))


# ---- 4: proof-notion divergences -----------------------------------------

def _ws_s(name: str, root: str, action: str, depth: int = 3):
    P = fixtures.load(name)
    (t,) = _terms(P, root)
    G = ground_program(P, [t], depth)
    return (t, action) in ws_provable(G).negative, (t, action) in supported_provable(G).negative


def _rejected_at(P: Tss, stage: str, clause: str) -> bool:
    try:
        plus_pipeline(P)
    except PreconditionError as e:
        return e.stage == stage and e.clause == clause
    return False


def criterion_4(res: CriterionResult) -> None:
    for name, root in (("no-free-variables", "c"), ("no-free-variables-ntyft", "c"),
                       ("no-free-variables-free", "c"), ("no-free-variables-lookahead", "f(c)")):
        ws, s = _ws_s(name, root, "a")
        res.check(f"{name}: ws proves {root} refuses a", ws)
        res.check(f"{name}: s does not", not s)
    P = fixtures.load("decency-needed")
    c, eps = App("c"), App("eps")
    G = ground_program(P, [c], 3)
    res.check("decency-needed: c -a-> eps standard-provable",
              Literal(c, "a", eps) in standard_provable(G))
    naive = rplus(P, check=False)
    lits = standard_provable(ground_program(naive, [c], 3))
    res.check("naive closure proves c -a-> eps and c -/a->",
              Literal(c, "a", eps) in lits and Literal(c, "a") in lits)
    res.check("pipeline rejects decency-needed at the free-variable stage",
              _rejected_at(P, "ground", "free-variables"))
    res.check("pipeline rejects no-lookahead at the lookahead precondition",
              _rejected_at(fixtures.load("no-lookahead"), "ntyxt", "lookahead"))


# ---- 5: counterexamples --------------------------------------------------

def _setup(name: str, depth: int, *texts: str):
    P = fixtures.load(name)
    ts = _terms(P, *texts)
    return build_lts(P, ts, depth), ts


def _traces(L, p, depth: int, kind: str = "trace") -> set:
    return decorated_traces(L, p, kind, depth)


def criterion_5(res: CriterionResult) -> None:
    L, (p, q, fp, fq) = _setup("lookahead", 5, "b.d", "b.c+b.d", "f(b.d)", "f(b.c+b.d)")
    res.check("lookahead: f(bd) not below f(bc+bd) for CT", not preorder_holds(L, fp, fq, "CT", 4))
    res.check("lookahead: modal route agrees", not preorder_modal(L, fp, fq, "CT", 4))
    res.check("lookahead: bd below bc+bd for RS", preorder_holds(L, p, q, "RS", 4))
    for name, sep in (("ex2", ("a", "b", "d")), ("non-liquid-a", ("a", "b", "d")),
                      ("non-liquid-b", ("a", "a", "b", "d"))):
        L, (p, q, fp, fq) = _setup(name, 6, "a.(b.c+b.d)", "a.b.c+a.b.d",
                                   "f(a.(b.c+b.d))", "f(a.b.c+a.b.d)")
        diff = _traces(L, fp, 4) - _traces(L, fq, 4)
        res.check(f"{name}: {''.join(sep)} separates", sep in diff)
        res.check(f"{name}: RT holds for the arguments", preorder_holds(L, p, q, "RT", 5))
    L, ts = _setup("ex3", 7, "a.(b+c.d)+a.c", "a.(b+c)+a.c.d", "f(a.(b+c.d)+a.c)",
                   "f(a.(b+c)+a.c.d)", "a.(b+c)+a.b+a.c", "a.b+a.c", "f(a.(b+c)+a.b+a.c)",
                   "f(a.b+a.c)")
    p, q, fp, fq, p2, q2, fp2, fq2 = ts
    res.check("ex3 first pair R-equivalent", equivalent(L, p, q, "R", 4))
    res.check("ex3 first pair F-equivalent", equivalent(L, p, q, "F", 4))
    res.check("ex3 first images not T-equivalent", not equivalent(L, fp, fq, "T", 5))
    res.check("ex3 second pair FT-equivalent", equivalent(L, p2, q2, "FT", 4))
    res.check("ex3 second pair F-equivalent", equivalent(L, p2, q2, "F", 4))
    res.check("ex3 second images not T-equivalent", not equivalent(L, fp2, fq2, "T", 5))
    for name, kind, sep in (("ex4", "trace", ("a", "d")), ("ex5", "completed", ("a",)),
                            ("ex6", "trace", ("a", "d"))):
        L, (p, q, fp, fq) = _setup(name, 6, "a.(b+c)+a.b+a.c", "a.b+a.c",
                                   "f(a.(b+c)+a.b+a.c)", "f(a.b+a.c)")
        res.check(f"{name}: arguments FT-equivalent", equivalent(L, p, q, "FT", 4))
        diff = _traces(L, fp, 4, kind) - _traces(L, fq, 4, kind)
        res.check(f"{name}: {kind} {''.join(sep)} separates", sep in diff)
    L, (p, q, fp, fq) = _setup("ex7", 4, "a", "a+b", "f(a)", "f(a+b)")
    res.check("ex7: a below a+b for T", preorder_holds(L, p, q, "T", 3))
    res.check("ex7: c separates", ("c",) in _traces(L, fp, 2) - _traces(L, fq, 2))


# ---- 6: application separations -----------------------------------------

def criterion_6(res: CriterionResult) -> None:
    L, (p, q) = _setup("priority", 6, "Theta(a.(b+c)+a.c.d)", "Theta(a.(b+c.d)+a.c)")
    res.check("priority: acd trace of the first", ("a", "c", "d") in _traces(L, p, 4))
    res.check("priority: acd not a trace of the second", ("a", "c", "d") not in _traces(L, q, 4))
    L, (p, q) = _setup("priority", 6, "Theta(a.b+a.(c+d)+a.(b+c+d))", "Theta(a.b+a.(c+d))")
    ft = (frozenset(), "a", frozenset({"c"}), "d", frozenset())

    def has_ft(s) -> bool:
        return any(len(x) == 5 and x[1] == "a" and x[3] == "d" and ft[2] <= x[2] and x[0] >= ft[0]
                   for x in _traces(L, s, 2, "failure-trace"))

    res.check("priority: failure trace present for the first", has_ft(p))
    res.check("priority: failure trace absent for the second", not has_ft(q))
    L, (p, q) = _setup("bpa0-seq", 6, "(a;(b+c)+a;c+a);b", "(a;(b+c)+a);b")

    def has_fp(s) -> bool:
        return any(t == ("a",) and "b" in X for t, X in _traces(L, s, 3, "failure-pair"))

    res.check("sequencing: (a,{b}) failure pair of the first", has_fp(p))
    res.check("sequencing: (a,{b}) not a failure pair of the second", not has_fp(q))


# ---- 7: property suites --------------------------------------------------

INVERSE_UNIVERSE = ("c", "d", "f(c)", "f(d)", "g(c,d)", "f(f(c))", "g(f(c),c)")

# Notions certified by each format, checked by precongruence fuzzing.
CERTIFIED = {"ready-simulation": ("RS",), "ready-trace": ("RT",), "readiness": ("R",),
             "failure-trace": ("FT", "F", "=T"), "partial-trace": ("T",),
             "tyft-tyxt": ("1S", "2S")}

IMPLICATIONS = (("B", "2S"), ("2S", "RS"), ("RS", "1S"), ("RS", "RT"), ("RT", "R"), ("RT", "FT"),
                ("R", "F"), ("FT", "F"), ("F", "CT"), ("CT", "T"), ("1S", "T"))
HIERARCHY = ("T", "CT", "F", "R", "FT", "RT", "1S", "RS", "2S", "B")


def suite_inverse(seed: int = 7, cases: int = SUITE_CASES) -> tuple[int, list[str]]:
    rng = random.Random(seed)
    universe = [parse_term(s, SIG) for s in INVERSE_UNIVERSE]
    bad: list[str] = []
    for i in range(cases):
        P = random_tss(rng)
        t = random_open(rng)
        f = random_rs_formula(rng)
        r = check_inverse_lemma(P, t, f, universe)
        if not r.ok:
            bad.append(f"case {i}: {t} {print_formula(f)}")
    return cases, bad


def suite_hierarchy(seed: int = 11, cases: int = SUITE_CASES, n: int = 5, depth: int = 3
                    ) -> tuple[int, list[str]]:
    rng = random.Random(seed)
    bad: list[str] = []
    for i in range(cases):
        L = random_acyclic_lts(rng, n)
        sts = sorted(L.states, key=term_key)
        p, q = rng.choice(sts), rng.choice(sts)
        holds = {N: preorder_holds(L, p, q, N, depth) for N in HIERARCHY}
        for a, b in IMPLICATIONS:
            if holds[a] and not holds[b]:
                bad.append(f"case {i}: {a} without {b}")
        for N in HIERARCHY:
            if preorder_modal(L, p, q, N, depth) != holds[N]:
                bad.append(f"case {i}: modal route disagrees on {N}")
    return cases, bad


def _roots(rng: random.Random, k: int = 3) -> list:
    return [random_closed(rng, 2) for _ in range(k)]


def suite_supported_ws(seed: int = 13, cases: int = SUITE_CASES) -> tuple[int, list[str]]:
    rng = random.Random(seed)
    bad: list[str] = []
    for i in range(cases):
        P = random_tss(rng)
        G = ground_program(P, _roots(rng), 3)
        if supported_provable(G) != ws_provable(G):
            bad.append(f"case {i}")
    return cases, bad


def _pairs_on(rel, states) -> tuple[set, set]:
    return ({x for x in rel.positive if x[0] in states}, {x for x in rel.negative if x[0] in states})


def suite_standard_plus(seed: int = 17, cases: int = SUITE_CASES) -> tuple[int, list[str]]:
    rng = random.Random(seed)
    bad: list[str] = []
    for i in range(cases):
        P = random_tss(rng)
        roots = _roots(rng)
        states = {s for r in roots for s in subterms(r)}
        Pp, _ = plus_pipeline(P)
        lits = standard_provable(ground_program(Pp, roots, 3))
        std = ({(l.lhs, l.action, l.rhs) for l in lits if l.positive and l.lhs in states},
               {(l.lhs, l.action) for l in lits if not l.positive and l.lhs in states})
        sup = _pairs_on(supported_provable(ground_program(P, roots, 3)), states)
        if std != sup:
            bad.append(f"case {i}")
    return cases, bad


# Formats admitting negative conclusions; the closure stage adds such rules.
PRESERVED_FORMATS = tuple(f for f in FORMATS if f not in ("tyft-tyxt", "de-simone", "gsos"))


def suite_preservation(seed: int = 19, cases: int = SUITE_CASES) -> tuple[int, list[str]]:
    """Every stage output stays in each format its input satisfies, under the input's liquid predicate."""
    rng = random.Random(seed)
    inputs = [fixtures.load(n) for n in fixtures.names()]
    bad: list[str] = []
    done = 0
    attempts = 0
    while done < cases and attempts < 20 * cases:
        P = inputs[attempts] if attempts < len(inputs) else random_tss(rng)
        attempts += 1
        held = [(fmt, check_format(P, fmt)) for fmt in PRESERVED_FORMATS]
        held = [(fmt, r) for fmt, r in held if r.verdict]
        if not held:
            continue
        try:
            outs, _ = pipeline_stages(P)
        except PreconditionError:
            continue
        for fmt, r in held:
            for stage, Q in zip(("ntyxt", "ground", "xynft", "uniform", "rplus"), outs):
                if not check_format(Q, fmt, r.lambda_used).verdict:
                    bad.append(f"input {attempts}: {fmt} lost at {stage}")
        done += 1
    if done < cases:
        bad.append(f"only {done} applicable inputs")
    return done, bad


def suite_ws_consistency(seed: int = 23, cases: int = SUITE_CASES) -> tuple[int, list[str]]:
    rng = random.Random(seed)
    bad: list[str] = []
    names = fixtures.names()
    for i in range(cases):
        if i < len(names):
            P = fixtures.load(names[i])
            roots = sorted(P.signature.constants())
            roots = [App(c) for c in roots]
        else:
            P = random_tss(rng)
            roots = _roots(rng)
        try:
            rel = ws_provable(ground_program(P, roots, 3))
        except AssertionError as e:
            bad.append(f"case {i}: {e}")
            continue
        if {(s, a) for (s, a, _) in rel.positive} & rel.negative:
            bad.append(f"case {i}: denying pair")
    return cases, bad


def certified_notions(name: str) -> list[str]:
    P = fixtures.load(name)
    out: list[str] = []
    for fmt, notions in CERTIFIED.items():
        if check_format(P, fmt).verdict:
            out.extend(N for N in notions if N not in out)
    return out


FUZZ_FIXTURES = ("bpa", "priority", "initial-priority", "kleene", "bpa0-seq", "refinement")


def suite_precongruence(seeds: tuple[int, ...] = (29,), depth: int = 4, names=FUZZ_FIXTURES,
                        notions: Callable[[str], list[str]] | None = None
                        ) -> tuple[int, list[str]]:
    notions = notions or certified_notions
    bad: list[str] = []
    checked = 0
    for name in names:
        P = fixtures.load(name)
        for N in notions(name):
            for seed in seeds:
                r = fuzz_precongruence(P, N, depth=depth, seed=seed, n_terms=8, n_pairs=4)
                checked += r.checked
                if not r.ok:
                    bad.append(f"{name} {N} seed {seed}: {r.counterexample}")
    return checked, bad


def partial_trace_fixtures() -> list[str]:
    return [n for n in fixtures.names() if check_format(fixtures.load(n), "partial-trace").verdict]


def failure_trace_fixtures() -> list[str]:
    return [n for n in fixtures.names() if check_format(fixtures.load(n), "failure-trace").verdict]


def criterion_7(res: CriterionResult) -> None:
    suites = (("decomposition agrees with brute force", suite_inverse),
              ("hierarchy implications and modal route", suite_hierarchy),
              ("supported equals well-supported on decent xynft", suite_supported_ws),
              ("standard on closure equals supported", suite_standard_plus),
              ("formats preserved by every stage", suite_preservation),
              ("well-supported relations are consistent", suite_ws_consistency),
              ("certified precongruences", suite_precongruence),
              ("partial-trace fixtures preserve T",
               lambda: suite_precongruence(seeds=(31, 32), names=partial_trace_fixtures(),
                                           notions=lambda n: ["T"])),
              ("failure-trace fixtures preserve =T",
               lambda: suite_precongruence(seeds=(37, 38), names=failure_trace_fixtures(),
                                           notions=lambda n: ["=T"])))
    for label, run in suites:
        n, bad = run()
        res.check(f"{label}: {n} cases", n >= SUITE_CASES)
        res.check(f"{label}: {len(bad)} failures {bad[:3]}", not bad)
    # The fuzzer must be able to refute: priority does not preserve T.
    r = fuzz_precongruence(fixtures.load("priority"), "T", depth=4, seed=29, n_terms=8, n_pairs=4)
    res.check("fuzzer refutes T for priority", not r.ok)


# ---- 8: conservativity ---------------------------------------------------

TAMPER = "\nrule tamper: x1 -a-> y |- x1 + x2 -b-> y\n"


def bpa_extensions() -> list[str]:
    base = fixtures.load("bpa")
    keys = {alpha_key(r) for r in base.rules}
    out = []
    for n in fixtures.names():
        P = fixtures.load(n)
        if n != "bpa" and all(f.name in P.signature for f in base.signature.functions) \
                and keys <= {alpha_key(r) for r in P.rules}:
            out.append(n)
    return out


def criterion_8(res: CriterionResult) -> None:
    bpa = fixtures.load("bpa")
    pri = fixtures.load("priority")
    tampered = parse_tss(fixtures.text("priority") + TAMPER)
    res.check("syntactic: bpa into itself", check_conservative_syntactic(bpa, bpa).verdict)
    res.check("syntactic: bpa into bpa with priority", check_conservative_syntactic(bpa, pri).verdict)
    res.check("syntactic: tampered rejected", not check_conservative_syntactic(bpa, tampered).verdict)
    rng = random.Random(41)
    roots = sorted({term_key(t): t for t in (random_process(rng, bpa, 2) for _ in range(12))}.items())
    roots = [t for _, t in roots]
    for n in bpa_extensions():
        ok, lit = check_conservative_semantic(bpa, fixtures.load(n), roots, 4)
        res.check(f"semantic: {n} agrees with bpa on bpa terms ({lit})", ok)
    ok, lit = check_conservative_semantic(bpa, tampered, roots, 4)
    res.check(f"semantic: tampered disagrees ({lit})", not ok)


CRITERIA: tuple[tuple[int, str, Callable[[CriterionResult], None]], ...] = (
    (1, "format verdicts", criterion_1),
    (2, "negative closure of the closure example", criterion_2),
    (3, "decomposition of <b><a>tt", criterion_3),
    (4, "proof-notion divergences and pipeline preconditions", criterion_4),
    (5, "counterexample regressions", criterion_5),
    (6, "application separations", criterion_6),
    (7, "randomized property suites", criterion_7),
    (8, "conservative extension", criterion_8),
)


def run_criterion(number: int) -> CriterionResult:
    num, name, fn = CRITERIA[number - 1]
    res = CriterionResult(num, name)
    t0 = time.perf_counter()
    try:
        fn(res)
    except Exception as e:  # a crash is reported as a failed check
        res.check(f"raised {type(e).__name__}: {e}", False)
    res.seconds = time.perf_counter() - t0
    return res


def run_all() -> list[CriterionResult]:
    return [run_criterion(n) for n, _, _ in CRITERIA]
