"""Rule transformations: ntyxt removal, grounding, xynft reduction, uniformization, R⁺."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .formats import classify_rule, free_vars
from .syntax import print_term
from .terms import (App, Fresh, Literal, Rule, Term, Tss, Var, alpha_key, dedup_alpha,
                    match, rule_vars, source_vars, subst_literal, subst_rule, subst_term,
                    term_vars)

DEFAULT_FUEL = 8
DEFAULT_PICK_CAP = 10_000


class PreconditionError(ValueError):
    def __init__(self, stage: str, clause: str, detail: str) -> None:
        super().__init__(f"{stage}: {clause}: {detail}")
        self.stage = stage
        self.clause = clause
        self.detail = detail


class PickExplosion(ValueError):
    pass


def _all_vars(P: Tss) -> set[str]:
    out: set[str] = set()
    for r in P.rules:
        out |= rule_vars(r)
    return out


def _require(P: Tss, stage: str, standard: bool = True, **flags: bool) -> None:
    if standard and not P.standard:
        bad = next(r for r in P.rules if not r.conclusion.positive)
        raise PreconditionError(stage, "not-standard", f"rule {bad.name} has a negative conclusion")
    for r in P.rules:
        c = classify_rule(r)
        for flag, want in flags.items():
            if want and not getattr(c, flag):
                raise PreconditionError(stage, flag.replace("_", "-"), f"rule {r.name} fails {flag}")


# ---- stage 1 -------------------------------------------------------------

def remove_ntyxt(P: Tss, provenance: dict | None = None) -> Tss:
    """Replace each rule with a variable source by one instance per function symbol."""
    for r in P.rules:
        c = classify_rule(r)
        if not (c.ntyft or c.ntyxt):
            raise PreconditionError("ntyxt", "not-ntyft-ntyxt", f"rule {r.name} is neither ntyft nor ntyxt")
        if not c.no_lookahead:
            raise PreconditionError("ntyxt", "lookahead", f"rule {r.name} has lookahead")
    fresh = Fresh(_all_vars(P))
    out: list[Rule] = []
    for r in P.rules:
        if not isinstance(r.source, Var):
            out.append(r)
            continue
        for f in P.signature.functions:
            src = App(f.name, tuple(fresh.var() for _ in range(f.arity)))
            new = subst_rule({r.source.name: src}, r)
            new = Rule(f"{r.name}@{f.name}", new.premises, new.conclusion)
            if provenance is not None:
                provenance[new.name] = ((r.name,), "instantiate")
            out.append(new)
    return P.with_rules(out)


# ---- stage 2 -------------------------------------------------------------

def ground_free_vars(P: Tss, universe: Iterable[Term] | None,
                     provenance: dict | None = None) -> Tss:
    """Instantiate free variables over a finite universe of closed terms."""
    universe = list(universe or [])
    out: list[Rule] = []
    grounded = False
    for r in P.rules:
        c = classify_rule(r)
        if not c.no_lookahead:
            raise PreconditionError("ground", "lookahead", f"rule {r.name} has lookahead")
        fv = sorted(free_vars(r))
        if not fv:
            out.append(r)
            continue
        if not universe:
            raise PreconditionError("ground", "free-variables",
                                    f"rule {r.name} has free variables {', '.join(fv)} and no universe was given")
        grounded = True
        for combo in itertools.product(universe, repeat=len(fv)):
            label = ",".join(f"{v}={print_term(t)}" for v, t in zip(fv, combo))
            new = subst_rule(dict(zip(fv, combo)), r)
            new = Rule(f"{r.name}{{{label}}}", new.premises, new.conclusion)
            if provenance is not None:
                provenance[new.name] = ((r.name,), "instantiate")
            out.append(new)
    return P.with_rules(out, universe_relative=P.universe_relative or grounded)


# ---- stage 3 -------------------------------------------------------------

@dataclass
class _Composer:
    P: Tss
    fuel: int
    fresh: Fresh
    hit: bool = False
    memo: dict = field(default_factory=dict)

    def derive(self, t: Term, a: str, fuel: int) -> list[tuple[frozenset[Literal], Term, tuple[str, ...]]]:
        """xyntt rules H / t -a-> u as (H, u, origin names), with fresh premise targets."""
        if isinstance(t, Var):
            y = self.fresh.var()
            return [(frozenset([Literal(t, a, y)]), y, ())]
        vs = sorted(term_vars(t))
        canon = {v: Var(f"_t{i}") for i, v in enumerate(vs)}
        key = (subst_term(canon, t), a, fuel)
        if key not in self.memo:
            self.memo[key] = self._derive_app(key[0], a, fuel)
        back = {f"_t{i}": Var(v) for i, v in enumerate(vs)}
        out = []
        for H, u, orig in self.memo[key]:
            inner = set()
            for l in H:
                if l.rhs is not None:
                    inner |= term_vars(l.rhs)
            ren = dict(back)
            ren.update({v: self.fresh.var() for v in sorted(inner)})
            out.append((frozenset(subst_literal(ren, l) for l in H), subst_term(ren, u), orig))
        return out

    def _derive_app(self, t: App, a: str, fuel: int):
        out = []
        for r in self.P.rules:
            if not (r.conclusion.positive and r.conclusion.action == a
                    and isinstance(r.source, App) and r.source.head == t.head):
                continue
            out.extend(self.compose(r, t, fuel))
        return out

    def compose(self, r: Rule, t: Term, fuel: int):
        keep = source_vars(r)
        ren = {v: self.fresh.var() for v in sorted(rule_vars(r) - keep)}
        r = subst_rule(ren, r)
        rho0 = match(r.source, t)
        assert rho0 is not None
        options = []
        negs = []
        for p in r.sorted_premises():
            lhs = subst_term(rho0, p.lhs)
            if not p.positive:
                negs.append(Literal(lhs, p.action))
                continue
            assert isinstance(p.rhs, Var)
            if isinstance(lhs, Var):
                options.append([(frozenset([Literal(lhs, p.action, p.rhs)]), p.rhs, (), p.rhs.name)])
                continue
            if fuel <= 0:
                self.hit = True
                return []
            subs = self.derive(lhs, p.action, fuel - 1)
            options.append([(H, u, orig, p.rhs.name) for H, u, orig in subs])
        out = []
        for choice in itertools.product(*options):
            H = set(negs)
            rho1 = dict(rho0)
            origins = [r.name]
            for Hk, uk, orig, y in choice:
                H |= Hk
                rho1[y] = uk
                origins.extend(orig)
            target = subst_term(rho1, r.conclusion.rhs)
            out.append((frozenset(H), target, tuple(origins)))
        return out


def _xynft(P: Tss, fuel: int, provenance: dict | None) -> tuple[Tss, bool]:
    _require(P, "xynft", ntyft=True, decent=True)
    comp = _Composer(P, fuel, Fresh(_all_vars(P)))
    out: list[Rule] = []
    for r in P.rules:
        if classify_rule(r).xynft:
            out.append(r)
            continue
        for k, (H, u, orig) in enumerate(comp.compose(r, r.source, fuel)):
            new = Rule(f"{r.name}/{k}", H, Literal(r.source, r.conclusion.action, u))
            if provenance is not None:
                provenance[new.name] = (tuple(dict.fromkeys(orig)), "compose")
            out.append(new)
    return P.with_rules(dedup_alpha(out)), comp.hit


def to_decent_xynft(P: Tss, fuel: int = DEFAULT_FUEL) -> Tss:
    """Decent xynft rules derivable by composing rules on non-variable premise sources."""
    return _xynft(P, fuel, None)[0]


# ---- stage 4 -------------------------------------------------------------

def uniformize(P: Tss) -> Tss:
    """Rename variables so that every f-rule has source f(x1, ..., xn)."""
    out: list[Rule] = []
    for r in P.rules:
        src = r.source
        if not classify_rule(r).ntyft or not isinstance(src, App):
            raise PreconditionError("uniform", "ntyft", f"rule {r.name} is not ntyft")
        vec = [f"x{i}" for i in range(1, len(src.args) + 1)]
        if [a.name for a in src.args] == vec:  # type: ignore[union-attr]
            out.append(r)
            continue
        fresh = Fresh(rule_vars(r) | set(vec))
        ren: dict[str, Term] = {}
        for v in sorted(rule_vars(r) - source_vars(r)):
            ren[v] = fresh.var() if v in vec else Var(v)
        for a, x in zip(src.args, vec):
            ren[a.name] = Var(x)  # type: ignore[union-attr]
        out.append(subst_rule(ren, r))
    return P.with_rules(out)


def is_uniform(P: Tss) -> bool:
    vecs: dict[str, tuple] = {}
    for r in P.rules:
        src = r.source
        if not isinstance(src, App):
            return False
        if vecs.setdefault(src.head, src.args) != src.args:
            return False
    return True


# ---- stage 5 -------------------------------------------------------------

def deny_premise(l: Literal, fresh: Fresh) -> Literal:
    if l.positive:
        return Literal(l.lhs, l.action)
    return Literal(l.lhs, l.action, fresh.var())


def rplus(P: Tss, cap: int = DEFAULT_PICK_CAP, check: bool = True,
          provenance: dict | None = None) -> Tss:
    """R together with every rule deny(pick(R, f(x) -/a->))."""
    if check:
        _require(P, "rplus", xynft=True, decent=True)
        if not is_uniform(P):
            raise PreconditionError("rplus", "uniform", "rule sources are not uniform")
    fresh = Fresh(_all_vars(P))
    vectors: dict[str, Term] = {}
    for r in P.rules:
        if isinstance(r.source, App):
            vectors.setdefault(r.source.head, r.source)
    added: list[Rule] = []
    for f in P.signature.functions:
        src = vectors.get(f.name) or App(f.name, tuple(Var(f"x{i}") for i in range(1, f.arity + 1)))
        for a in P.actions:
            matching = [r for r in P.rules if r.conclusion.positive and r.conclusion.action == a
                        and isinstance(r.source, App) and r.source.head == f.name]
            size = 1
            for r in matching:
                size *= len(r.premises)
            if size > cap:
                raise PickExplosion(f"pick for {f.name} -/{a}-> has {size} choices (cap {cap})")
            seen: set[tuple] = set()
            for choice in itertools.product(*(r.sorted_premises() for r in matching)):
                H = frozenset(deny_premise(l, fresh) for l in frozenset(choice))
                new = Rule(f"neg_{f.name}_{a}_{len(seen)}", H, Literal(src, a))
                k = alpha_key(new)
                if k in seen:
                    continue
                seen.add(k)
                if provenance is not None:
                    provenance[new.name] = (tuple(r.name for r in matching), "pick+deny")
                added.append(new)
    return P.with_rules(dedup_alpha(list(P.rules) + added))


# ---- pipeline ------------------------------------------------------------

@dataclass(frozen=True)
class StageRecord:
    name: str
    input_digest: str
    output_digest: str
    rules_in: int
    rules_out: int
    note: str = ""


@dataclass
class PipelineTrace:
    stages: list[StageRecord] = field(default_factory=list)
    provenance: dict[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)
    fuel_hit: bool = False
    universe_relative: bool = False

    def as_dict(self) -> dict:
        return {"stages": [s.__dict__ for s in self.stages],
                "provenance": {k: {"origins": list(v[0]), "constructor": v[1]}
                               for k, v in sorted(self.provenance.items())},
                "fuel_hit": self.fuel_hit, "universe_relative": self.universe_relative}


STAGES = ("ntyxt", "ground", "xynft", "uniform", "rplus")


def pipeline_stages(P: Tss, universe: Iterable[Term] | None = None, fuel: int = DEFAULT_FUEL,
                    cap: int = DEFAULT_PICK_CAP) -> tuple[list[Tss], PipelineTrace]:
    """Run every stage and return each intermediate TSS."""
    trace = PipelineTrace()
    if not P.standard:
        raise PreconditionError("ntyxt", "not-standard", "pipeline input must be standard")
    outs: list[Tss] = []
    cur = P

    def record(name: str, new: Tss, note: str = "") -> None:
        trace.stages.append(StageRecord(name, cur.digest(), new.digest(), len(cur.rules),
                                        len(new.rules), note))
        outs.append(new)

    new = remove_ntyxt(cur, trace.provenance)
    record("ntyxt", new)
    cur = new
    new = ground_free_vars(cur, universe, trace.provenance)
    trace.universe_relative = new.universe_relative
    record("ground", new, "universe-relative" if new.universe_relative else "")
    cur = new
    new, hit = _xynft(cur, fuel, trace.provenance)
    trace.fuel_hit = hit
    record("xynft", new, "fuel exhausted" if hit else "")
    cur = new
    new = uniformize(cur)
    record("uniform", new)
    cur = new
    new = rplus(cur, cap, provenance=trace.provenance)
    record("rplus", new)
    return outs, trace


def plus_pipeline(P: Tss, universe: Iterable[Term] | None = None, fuel: int = DEFAULT_FUEL,
                  cap: int = DEFAULT_PICK_CAP) -> tuple[Tss, PipelineTrace]:
    outs, trace = pipeline_stages(P, universe, fuel, cap)
    return outs[-1], trace
