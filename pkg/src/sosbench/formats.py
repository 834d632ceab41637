"""Rule shapes, occurrence analysis, liquid predicates and format membership."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .terms import (App, Rule, Signature, Term, Tss, Var, alpha_key, lhs_vars, literal_key,
                    rhs_vars, rule_vars, source_vars, subterm_at, var_positions)


@dataclass(frozen=True)
class Lambda:
    liquid: frozenset[tuple[str, int]] = frozenset()

    def __contains__(self, pos: tuple[str, int]) -> bool:
        return pos in self.liquid

    def __le__(self, other: "Lambda") -> bool:
        return self.liquid <= other.liquid

    def __str__(self) -> str:
        return "{" + ", ".join(f"({f},{i})" for f, i in sorted(self.liquid)) + "}"

    @staticmethod
    def universal(sig: Signature) -> "Lambda":
        return Lambda(frozenset(sig.positions()))

    @staticmethod
    def declared(sig: Signature) -> "Lambda":
        return Lambda(frozenset((f.name, i + 1) for f in sig.functions
                                if f.lambda_hint for i, h in enumerate(f.lambda_hint) if h))


@dataclass(frozen=True)
class RuleClassification:
    ntytt: bool
    ntyxt: bool
    ntyft: bool
    nxytt: bool
    nxyft: bool
    xyntt: bool
    xynft: bool
    no_lookahead: bool
    no_free_vars: bool
    decent: bool
    standard_conclusion: bool


def classify_rule(r: Rule) -> RuleClassification:
    pos_rhs = [p.rhs for p in r.premises if p.rhs is not None]
    src = r.source
    src_vars = source_vars(r)
    rhs_ok = (all(isinstance(t, Var) for t in pos_rhs)
              and len({t.name for t in pos_rhs}) == len(pos_rhs)
              and not any(t.name in src_vars for t in pos_rhs))
    ntytt = rhs_ok
    ntyxt = ntytt and isinstance(src, Var)
    ntyft = (ntytt and isinstance(src, App)
             and all(isinstance(a, Var) for a in src.args)
             and len({a.name for a in src.args}) == len(src.args))
    all_lhs_var = all(isinstance(p.lhs, Var) for p in r.premises)
    pos_lhs_var = all(isinstance(p.lhs, Var) for p in r.premises if p.positive)
    nxytt = ntytt and all_lhs_var
    xyntt = ntytt and pos_lhs_var
    rv = rhs_vars(r)
    no_lookahead = not (rv & lhs_vars(r))
    no_free = rule_vars(r) <= (src_vars | rv)
    return RuleClassification(
        ntytt=ntytt, ntyxt=ntyxt, ntyft=ntyft,
        nxytt=nxytt, nxyft=nxytt and ntyft,
        xyntt=xyntt, xynft=xyntt and ntyft,
        no_lookahead=no_lookahead, no_free_vars=no_free,
        decent=no_lookahead and no_free,
        standard_conclusion=r.conclusion.positive)


def free_vars(r: Rule) -> frozenset[str]:
    return rule_vars(r) - source_vars(r) - rhs_vars(r)


def liquid_occurrence(t: Term, path: tuple[int, ...], L: Lambda) -> bool:
    """True iff every step of path descends through a liquid argument."""
    if not isinstance(subterm_at(t, path), Var):
        raise ValueError(f"path {path} does not address a variable")
    node = t
    for i in path:
        assert isinstance(node, App)
        if (node.head, i) not in L:
            return False
        node = node.args[i - 1]
    return True


def path_positions(t: Term, path: tuple[int, ...]) -> list[tuple[str, int]]:
    out = []
    node = t
    for i in path:
        assert isinstance(node, App)
        out.append((node.head, i))
        node = node.args[i - 1]
    return out


@dataclass(frozen=True)
class Occurrence:
    where: str                 # "source", "target" or "premise"
    path: tuple[int, ...]
    liquid: bool
    premise: int | None = None  # index into the rule's sorted premises
    premise_positive: bool | None = None
    rhs_in_target: bool | None = None

    @property
    def propagated(self) -> bool:
        return self.where == "target" or (self.where == "premise" and bool(self.rhs_in_target))

    @property
    def polled(self) -> bool:
        return self.where == "premise" and not self.rhs_in_target


@dataclass(frozen=True)
class VarReport:
    var: str
    occurrences: tuple[Occurrence, ...]
    floating: bool

    @property
    def propagated(self) -> list[Occurrence]:
        return [o for o in self.occurrences if o.propagated]

    @property
    def polled(self) -> list[Occurrence]:
        return [o for o in self.occurrences if o.polled]


@dataclass(frozen=True)
class OccurrenceReport:
    rule: Rule
    lam: Lambda
    vars: dict[str, VarReport]

    def __getitem__(self, v: str) -> VarReport:
        return self.vars[v]


def occurrence_report(r: Rule, L: Lambda) -> OccurrenceReport:
    if not classify_rule(r).ntytt:
        raise ValueError(f"rule {r.name} is not ntytt")
    target = r.target
    target_vars = set() if target is None else {v for v, _ in var_positions(target)}
    occ: dict[str, list[Occurrence]] = {v: [] for v in sorted(rule_vars(r))}
    for v, path in var_positions(r.source):
        occ[v].append(Occurrence("source", path, liquid_occurrence(r.source, path, L)))
    if target is not None:
        for v, path in var_positions(target):
            occ[v].append(Occurrence("target", path, liquid_occurrence(target, path, L)))
    for k, p in enumerate(r.sorted_premises()):
        in_target = p.rhs is not None and isinstance(p.rhs, Var) and p.rhs.name in target_vars
        for v, path in var_positions(p.lhs):
            occ[v].append(Occurrence("premise", path, liquid_occurrence(p.lhs, path, L), k,
                                     p.positive, in_target))
    rv = rhs_vars(r)
    out = {}
    for v, os in occ.items():
        src = [o for o in os if o.where == "source"]
        floating = v in rv or (len(src) == 1 and src[0].liquid)
        out[v] = VarReport(v, tuple(os), floating)
    return OccurrenceReport(r, L, out)


# ---- safety predicates ---------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    var: str | None
    clause: str
    reason: str
    positions: tuple[tuple[int, ...], ...] = ()

    def as_dict(self) -> dict:
        return {"rule": self.rule, "variable": self.var, "clause": self.clause,
                "reason": self.reason, "positions": [list(p) for p in self.positions]}


LEVELS = ("ready-trace", "readiness", "failure-trace")
LAMBDA_FREE = ("ntyft-ntyxt", "tyft-tyxt", "ready-simulation", "gsos")


def rule_violations(r: Rule, L: Lambda, level: str) -> list[Violation]:
    """Violations of Λ-safety at the given level for an ntytt rule."""
    n = LEVELS.index(level)
    out: list[Violation] = []
    cls = classify_rule(r)
    if not cls.no_lookahead:
        bad = sorted(rhs_vars(r) & lhs_vars(r))
        out.append(Violation(r.name, bad[0], "lookahead",
                             f"{', '.join(bad)} occurs in a premise after being a premise target"))
    rep = occurrence_report(r, L)
    for v, vr in rep.vars.items():
        if not vr.floating:
            continue
        prop, poll = vr.propagated, vr.polled
        if r.conclusion.positive:
            if len(prop) > 1:
                out.append(Violation(r.name, v, "multiple-propagation",
                                     f"{v} is propagated {len(prop)} times",
                                     tuple(o.path for o in prop)))
            for o in prop:
                if not o.liquid:
                    out.append(Violation(r.name, v, "non-liquid-propagation",
                                         f"{v} is propagated at a frozen position", (o.path,)))
            if n >= 1 and prop and poll:
                out.append(Violation(r.name, v, "propagated-and-polled",
                                     f"{v} is both propagated and polled"))
            if n >= 2:
                if len(poll) > 1:
                    out.append(Violation(r.name, v, "multiple-polling",
                                         f"{v} is polled {len(poll)} times",
                                         tuple(o.path for o in poll)))
                for o in poll:
                    if not o.liquid:
                        out.append(Violation(r.name, v, "non-liquid-polling",
                                             f"{v} is polled at a frozen position", (o.path,)))
                    if not o.premise_positive:
                        out.append(Violation(r.name, v, "polled-in-negative-premise",
                                             f"{v} is polled in negative premises", (o.path,)))
        elif n >= 2:
            for o in poll:
                if not o.liquid:
                    out.append(Violation(r.name, v, "non-liquid-polling",
                                         f"{v} is polled at a frozen position", (o.path,)))
                if o.premise_positive:
                    out.append(Violation(r.name, v, "polled-in-positive-premise",
                                         f"{v} is polled in a positive premise", (o.path,)))
    return out


def is_safe(r: Rule, L: Lambda, level: str) -> bool:
    return not rule_violations(r, L, level)


def partial_trace_safe(r: Rule, L: Lambda) -> bool:
    pol = {p.positive for p in r.premises} | {r.conclusion.positive}
    return len(pol) == 1 and is_safe(r, L, "failure-trace")


# ---- Λ inference ---------------------------------------------------------

def lambda_demands(P: Tss, L: Lambda) -> set[tuple[str, int]]:
    """Positions on the paths of propagated occurrences of floating variables."""
    need: set[tuple[str, int]] = set()
    for r in P.rules:
        if not classify_rule(r).ntytt:
            continue
        rep = occurrence_report(r, L)
        target = r.target
        prem = r.sorted_premises()
        for vr in rep.vars.values():
            if not vr.floating:
                continue
            for o in vr.propagated:
                term = target if o.where == "target" else prem[o.premise].lhs
                need.update(path_positions(term, o.path))
    return need


def demand_fixpoint(P: Tss) -> Lambda:
    L = Lambda()
    while True:
        need = lambda_demands(P, L) | L.liquid
        if need == L.liquid:
            return L
        L = Lambda(frozenset(need))


EXHAUSTIVE_LIMIT = 20


def _rule_positions(r: Rule) -> frozenset[tuple[str, int]]:
    out: set[tuple[str, int]] = set()
    terms = [r.source, r.target] + [p.lhs for p in r.premises]
    for t in terms:
        if t is None:
            continue
        for _, path in var_positions(t):
            out.update(path_positions(t, path))
    return frozenset(out)


def minimal_lambdas(P: Tss, fmt: str) -> list[Lambda]:
    """All subset-minimal Λ under which the rules pass the given level."""
    if fmt in LAMBDA_FREE:
        raise ValueError(f"format {fmt} does not depend on liquid positions")
    positions = sorted(P.signature.positions())
    if len(positions) > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive search refused: {len(positions)} argument positions "
                         f"(limit {EXHAUSTIVE_LIMIT})")
    level = "failure-trace" if fmt in ("partial-trace", "de-simone") else fmt
    rules = [(r, _rule_positions(r)) for r in P.rules
             if classify_rule(r).ntyft or classify_rule(r).ntyxt]
    memo: dict[tuple[int, frozenset], bool] = {}

    def passes(s: frozenset) -> bool:
        for k, (r, rel) in enumerate(rules):
            key = (k, s & rel)
            if key not in memo:
                memo[key] = not rule_violations(r, Lambda(key[1]), level)
            if not memo[key]:
                return False
        return True

    found: list[frozenset] = []
    for k in range(len(positions) + 1):
        for combo in itertools.combinations(positions, k):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if passes(s):
                found.append(s)
    return [Lambda(s) for s in found]


def infer_lambda0(P: Tss, mode: str = "demand-fixpoint", fmt: str = "ready-trace") -> Lambda | None:
    if mode == "demand-fixpoint":
        return demand_fixpoint(P)
    if mode == "exhaustive":
        lams = minimal_lambdas(P, fmt)
        return lams[0] if lams else None
    raise ValueError(f"unknown mode {mode}")


def hint_conflicts(P: Tss) -> list[tuple[str, int]]:
    """Positions demanded liquid but declared frozen."""
    need = demand_fixpoint(P).liquid
    out = []
    for f in P.signature.functions:
        if f.lambda_hint is None:
            continue
        for i, h in enumerate(f.lambda_hint, 1):
            if not h and (f.name, i) in need:
                out.append((f.name, i))
    return out


# ---- format checks -------------------------------------------------------

FORMATS = ("ntyft-ntyxt", "tyft-tyxt", "ready-simulation", "ready-trace", "readiness",
           "failure-trace", "partial-trace", "de-simone", "gsos")


@dataclass(frozen=True)
class FormatReport:
    format: str
    verdict: bool
    lambda_used: Lambda | None
    violations: tuple[Violation, ...] = ()
    minimal: tuple[Lambda, ...] = field(default=())

    def as_dict(self) -> dict:
        return {"format": self.format, "verdict": self.verdict,
                "lambda": None if self.lambda_used is None else sorted(map(list, self.lambda_used.liquid)),
                "violations": [v.as_dict() for v in self.violations]}


def _shape_violations(P: Tss, fmt: str) -> list[Violation]:
    out: list[Violation] = []
    for r in P.rules:
        c = classify_rule(r)
        if not (c.ntyft or c.ntyxt):
            out.append(Violation(r.name, None, "not-ntyft-ntyxt", "rule is neither ntyft nor ntyxt"))
        if fmt in ("tyft-tyxt", "de-simone") and not (c.standard_conclusion and
                                                        all(p.positive for p in r.premises)):
            out.append(Violation(r.name, None, "not-positive", "rule has a negative literal"))
        if fmt == "ready-simulation" and not c.no_lookahead:
            out.append(Violation(r.name, None, "lookahead", "rule has lookahead"))
        if fmt in ("de-simone", "gsos"):
            if not c.nxyft:
                out.append(Violation(r.name, None, "not-nxyft", "rule is not nxyft"))
            if not c.decent:
                out.append(Violation(r.name, None, "not-decent", "rule is not decent"))
        if fmt == "gsos" and not c.standard_conclusion:
            out.append(Violation(r.name, None, "not-standard", "rule has a negative conclusion"))
        if fmt == "partial-trace":
            pol = {p.positive for p in r.premises} | {r.conclusion.positive}
            if len(pol) > 1 and r.conclusion.positive:
                out.append(Violation(r.name, None, "negative-premise",
                                     "positive conclusion with a negative premise"))
            elif len(pol) > 1:
                out.append(Violation(r.name, None, "mixed-polarity",
                                     "negative conclusion with a positive premise"))
    return out


def _lambda_violations(P: Tss, L: Lambda, fmt: str) -> list[Violation]:
    level = "failure-trace" if fmt in ("partial-trace", "de-simone") else fmt
    out: list[Violation] = []
    for r in P.rules:
        c = classify_rule(r)
        if c.ntyft or c.ntyxt:
            out.extend(rule_violations(r, L, level))
    return out


def check_format(P: Tss, fmt: str, L: Lambda | None = None) -> FormatReport:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt}")
    shape = _shape_violations(P, fmt)
    if fmt in LAMBDA_FREE:
        return FormatReport(fmt, not shape, None, tuple(shape))
    if fmt == "de-simone":
        L = Lambda.universal(P.signature)
    minimal: tuple[Lambda, ...] = ()
    if L is None:
        L = demand_fixpoint(P)
        viol = _lambda_violations(P, L, fmt)
        if (viol and len(P.signature.positions()) <= EXHAUSTIVE_LIMIT
                and not any(v.clause == "lookahead" for v in viol)):
            minimal = tuple(minimal_lambdas(P, fmt))
            if minimal:
                L, viol = minimal[0], []
    else:
        viol = _lambda_violations(P, L, fmt)
    allv = tuple(shape + viol)
    return FormatReport(fmt, not allv, L, allv, minimal)


# ---- conservative extension ----------------------------------------------

@dataclass(frozen=True)
class ConservativeReport:
    verdict: bool
    reasons: tuple[str, ...]


def check_conservative_syntactic(P1: Tss, P2: Tss) -> ConservativeReport:
    reasons: list[str] = []
    for name, P in (("P1", P1), ("P2", P2)):
        if not P.standard:
            reasons.append(f"{name} is not standard")
        for r in P.rules:
            c = classify_rule(r)
            if not (c.ntyft and c.decent):
                reasons.append(f"{name} rule {r.name} is not decent ntyft")
    sig1 = {f.name: f.arity for f in P1.signature.functions}
    sig2 = {f.name: f.arity for f in P2.signature.functions}
    for f, n in sig1.items():
        if sig2.get(f) != n:
            reasons.append(f"symbol {f}/{n} of P1 is missing from P2")
    keys1 = {alpha_key(r) for r in P1.rules}
    keys2 = {alpha_key(r) for r in P2.rules}
    for r in P1.rules:
        if alpha_key(r) not in keys2:
            reasons.append(f"rule {r.name} of P1 is missing from P2")
    for r in P2.rules:
        if alpha_key(r) in keys1:
            continue
        src = r.source
        if not (isinstance(src, App) and src.head not in sig1):
            reasons.append(f"new rule {r.name} has no new function symbol in its source")
    return ConservativeReport(not reasons, tuple(reasons))


def sorted_rules(rules) -> list[Rule]:
    return sorted(rules, key=lambda r: (literal_key(r.conclusion), r.name))
