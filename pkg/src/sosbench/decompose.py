"""Ruloids, modal decomposition of observations, and precongruence harnesses."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable

from .formats import Lambda, check_format, classify_rule, liquid_occurrence
from .observe import (TOP, Cannot, Conj, Formula, Prefix, Top, conj, decorated_traces,
                      formula_depth, formula_key, in_sublanguage, normalize, preorder_holds,
                      satisfies)
from .semantics import build_lts
from .syntax import INFIX
from .terms import (App, Fresh, Literal, Rule, Term, Tss, Var, alpha_key, match, rule_vars,
                    source_vars, subst_literal, subst_rule, subst_term, term_key, term_vars,
                    var_positions)
from .transform import plus_pipeline

DEFAULT_RULOID_FUEL = 64


@dataclass(frozen=True)
class Ruloid:
    rule: Rule
    source_term: Term
    positive: bool
    provenance: tuple = ()

    @property
    def premises(self) -> frozenset[Literal]:
        return self.rule.premises

    @property
    def target(self) -> Term | None:
        return self.rule.conclusion.rhs


_PLUS_CACHE: dict[str, Tss] = {}


def plus_of(P: Tss) -> Tss:
    """P⁺, cached on the TSS digest."""
    key = P.digest()
    if key not in _PLUS_CACHE:
        if any(not r.conclusion.positive for r in P.rules):
            raise ValueError("plus_of needs a standard TSS")
        _PLUS_CACHE[key] = plus_pipeline(P)[0]
    return _PLUS_CACHE[key]


@dataclass
class _RuloidDeriver:
    Pp: Tss
    fresh: Fresh
    fuel: int = DEFAULT_RULOID_FUEL
    memo: dict = field(default_factory=dict)

    def derive(self, t: Term, a: str, positive: bool, fuel: int | None = None
               ) -> list[tuple[frozenset[Literal], Term | None, tuple]]:
        fuel = self.fuel if fuel is None else fuel
        if isinstance(t, Var):
            if positive:
                y = self.fresh.var()
                return [(frozenset([Literal(t, a, y)]), y, ("default",))]
            return [(frozenset([Literal(t, a)]), None, ("default",))]
        if fuel <= 0:
            raise ValueError(f"ruloid derivation for {t} does not terminate within the fuel bound")
        vs = sorted(term_vars(t))
        canon = {v: Var(f"_t{i}") for i, v in enumerate(vs)}
        key = (subst_term(canon, t), a, positive)
        if key not in self.memo:
            self.memo[key] = self._derive_app(key[0], a, positive, fuel)
        back: dict[str, Term] = {f"_t{i}": Var(v) for i, v in enumerate(vs)}
        out = []
        for H, u, prov in self.memo[key]:
            inner = set()
            for l in H:
                if l.rhs is not None:
                    inner |= term_vars(l.rhs)
            ren = dict(back)
            ren.update({v: self.fresh.var() for v in sorted(inner)})
            out.append((frozenset(subst_literal(ren, l) for l in H),
                        None if u is None else subst_term(ren, u), prov))
        return out

    def _derive_app(self, t: App, a: str, positive: bool, fuel: int):
        out = []
        seen = set()
        for r in self.Pp.rules:
            c = r.conclusion
            if c.positive != positive or c.action != a:
                continue
            if not isinstance(r.source, App) or r.source.head != t.head:
                continue
            ren = {v: self.fresh.var() for v in sorted(rule_vars(r) - source_vars(r))}
            r2 = subst_rule(ren, r)
            rho0 = match(r2.source, t)
            if rho0 is None:
                continue
            options = []
            for p in r2.sorted_premises():
                lhs = subst_term(rho0, p.lhs)
                subs = self.derive(lhs, p.action, p.positive, fuel - 1)
                options.append([(H, u, prov, p.rhs) for H, u, prov in subs])
            for choice in itertools.product(*options):
                H: set[Literal] = set()
                rho1 = dict(rho0)
                kids = []
                for Hk, uk, prov, y in choice:
                    H |= Hk
                    kids.append(prov)
                    if y is not None:
                        m = match(y, uk, rho1) if uk is not None else None
                        if m is None:
                            break
                        rho1 = m
                else:
                    u = subst_term(rho1, r2.conclusion.rhs) if c.rhs is not None else None
                    item = (frozenset(H), u, (r.name, tuple(kids)))
                    k = _ruloid_key(t, item[0], u, positive, a)
                    if k not in seen:
                        seen.add(k)
                        out.append(item)
        return out


def _ruloid_key(t: Term, H: frozenset[Literal], u: Term | None, positive: bool, a: str) -> tuple:
    concl = Literal(t, a, u) if positive else Literal(t, a)
    return alpha_key(Rule("", H, concl))


def _fresh_for(Pp: Tss, *terms: Term) -> Fresh:
    avoid: set[str] = set()
    for r in Pp.rules:
        avoid |= rule_vars(r)
    for t in terms:
        avoid |= term_vars(t)
    return Fresh(avoid)


def derive_ruloids(Pplus: Tss, t: Term, a: str, positive: bool = True,
                   fuel: int = DEFAULT_RULOID_FUEL) -> list[Ruloid]:
    """Decent nxytt rules with source t derivable from P⁺ by structural recursion on t."""
    for r in Pplus.rules:
        if r.conclusion.positive:
            if not classify_rule(r).decent:
                raise ValueError(f"rule {r.name} is not decent")
    d = _RuloidDeriver(Pplus, _fresh_for(Pplus, t), fuel)
    return _as_ruloids(d.derive(t, a, positive), t, a, positive)


def _as_ruloids(items, t: Term, a: str, positive: bool) -> list[Ruloid]:
    out = []
    seen = set()
    for i, (H, u, prov) in enumerate(items):
        concl = Literal(t, a, u) if positive else Literal(t, a)
        rule = Rule(f"ruloid{i}", H, concl)
        k = _ruloid_key(t, H, u, positive, a)
        if k in seen:
            continue
        seen.add(k)
        out.append(Ruloid(rule, t, positive, prov))
    return out


# ---- decomposition -------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    assignments: tuple[tuple[str, Formula], ...]

    def __call__(self, x: str) -> Formula:
        for v, f in self.assignments:
            if v == x:
                return f
        return TOP

    @staticmethod
    def of(mapping: dict[str, Formula]) -> "Decomposition":
        return Decomposition(tuple((v, normalize(mapping[v])) for v in sorted(mapping)))

    def key(self) -> tuple:
        return tuple((v, formula_key(f)) for v, f in self.assignments if not isinstance(f, Top))

    def as_dict(self) -> dict[str, Formula]:
        return dict(self.assignments)


def _contradictory(f: Formula) -> bool:
    """A manifest b̃ ∧ b… clash somewhere under prefixes."""
    if isinstance(f, Prefix):
        return _contradictory(f.body)
    if isinstance(f, Conj):
        cannot = {p.action for p in f.parts if isinstance(p, Cannot)}
        if any(isinstance(p, Prefix) and p.action in cannot for p in f.parts):
            return True
        return any(_contradictory(p) for p in f.parts)
    return False


@dataclass
class _Inverter:
    deriver: _RuloidDeriver
    memo: dict = field(default_factory=dict)

    def inv(self, t: Term, f: Formula) -> list[Decomposition]:
        V = sorted(term_vars(t))
        if isinstance(f, Top):
            return [Decomposition.of({x: TOP for x in V})]
        out: dict[tuple, Decomposition] = {}

        def add(psi: dict[str, Formula]) -> None:
            d = Decomposition.of({x: psi.get(x, TOP) for x in V})
            if any(_contradictory(g) for _, g in d.assignments):
                return
            out.setdefault(d.key(), d)

        if isinstance(f, Cannot):
            for H, _, _ in self.deriver.derive(t, f.action, False):
                add({x: _premise_formula(H, x, None) for x in V})
        elif isinstance(f, Prefix):
            for H, u, _ in self.deriver.derive(t, f.action, True):
                for chi in self.inv(u, f.body):
                    add({x: conj(chi(x), _premise_formula(H, x, chi)) for x in V})
        elif isinstance(f, Conj):
            for combo in itertools.product(*(self.inv(t, g) for g in f.parts)):
                add({x: conj(*(psi(x) for psi in combo)) for x in V})
        else:
            raise ValueError("negation is outside the decomposable fragment")
        return list(out.values())


def _premise_formula(H: Iterable[Literal], x: str, chi: Decomposition | None) -> Formula:
    parts: list[Formula] = []
    for l in H:
        if not (isinstance(l.lhs, Var) and l.lhs.name == x):
            continue
        if not l.positive:
            parts.append(Cannot(l.action))
        else:
            body = chi(l.rhs.name) if chi is not None and isinstance(l.rhs, Var) else TOP
            parts.append(Prefix(l.action, body))
    return conj(*parts)


def inverse(P: Tss, t: Term, f: Formula, fuel: int = DEFAULT_RULOID_FUEL) -> list[Decomposition]:
    """Decompositions ψ such that σ(t) ⊨ f iff σ(x) ⊨ ψ(x) for all x, for some ψ."""
    f = normalize(f)
    if not in_sublanguage(f, "RS"):
        raise ValueError("only ready simulation observations can be decomposed")
    Pp = plus_of(P)
    inv = _Inverter(_RuloidDeriver(Pp, _fresh_for(Pp, t), fuel))
    res = inv.inv(t, f)
    return sorted(res, key=lambda d: d.key())


@dataclass(frozen=True)
class InverseCheck:
    ok: bool
    checked: int
    mismatches: tuple[tuple[dict, bool, bool], ...] = ()
    inconclusive: tuple[dict, ...] = ()


def check_inverse_lemma(P: Tss, t: Term, f: Formula, universe: Iterable[Term],
                        depth: int | None = None) -> InverseCheck:
    """Compare both sides of the decomposition equivalence for every σ over the universe."""
    f = normalize(f)
    psis = inverse(P, t, f)
    universe = sorted(set(universe), key=term_key)
    V = sorted(term_vars(t))
    sigmas = [dict(zip(V, combo)) for combo in itertools.product(universe, repeat=len(V))]
    roots = set(universe) | {subst_term(s, t) for s in sigmas}
    d = depth if depth is not None else formula_depth(f) + 1
    L = build_lts(P, sorted(roots, key=term_key), d)
    mism, inc = [], []
    for s in sigmas:
        lhs = satisfies(L, subst_term(s, t), f)
        rhs: bool | None = False
        for psi in psis:
            vals = [satisfies(L, s[x], psi(x)) for x in V]
            if all(v is True for v in vals):
                rhs = True
                break
            if any(v is None for v in vals) and all(v is not False for v in vals):
                rhs = None
        if lhs is None or rhs is None:
            inc.append(s)
        elif lhs != rhs:
            mism.append((s, lhs, rhs))
    return InverseCheck(not mism, len(sigmas), tuple(mism), tuple(inc))


# ---- preservation --------------------------------------------------------

FORMAT_TAG = {"ready-simulation": "RS", "ready-trace": "RT", "readiness": "R",
              "failure-trace": "FT", "partial-trace": "T"}


@dataclass(frozen=True)
class PreservationEntry:
    var: str
    formula: Formula
    conjunctive_ok: bool
    liquid_single: bool
    plain_ok: bool | None


@dataclass(frozen=True)
class PreservationReport:
    format: str
    tag: str
    format_holds: bool
    entries: tuple[PreservationEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.conjunctive_ok and e.plain_ok is not False for e in self.entries)


def preservation_report(P: Tss, fmt: str, t: Term, f: Formula, tag: str | None = None
                        ) -> PreservationReport:
    """Sublanguage verdicts for every ψ(x) of every decomposition of f at t."""
    rep = check_format(P, fmt)
    tag = tag or FORMAT_TAG[fmt]
    lam: Lambda = rep.lambda_used
    occ = list(var_positions(t))
    entries = []
    for psi in inverse(P, t, f):
        for x in sorted(term_vars(t)):
            g = psi(x)
            paths = [path for v, path in occ if v == x]
            single = len(paths) == 1 and liquid_occurrence(t, paths[0], lam)
            conj_ok = in_sublanguage(g, f"{tag}^", P.actions)
            plain = in_sublanguage(g, tag, P.actions) if single else None
            entries.append(PreservationEntry(x, g, conj_ok, single, plain))
    return PreservationReport(fmt, tag, rep.verdict, tuple(entries))


# ---- precongruence -------------------------------------------------------

@dataclass(frozen=True)
class PrecongruenceResult:
    ok: bool
    checked: int
    skipped: int
    counterexample: tuple | None = None


def _related(L, p: Term, q: Term, N: str, depth: int) -> bool:
    if N == "=T":
        return preorder_holds(L, p, q, "T", depth) and preorder_holds(L, q, p, "T", depth)
    return preorder_holds(L, p, q, N, depth)


def precongruence_test(P: Tss, N: str, contexts: Iterable[Term],
                       pairs: Iterable[tuple[Term, Term]], depth: int,
                       max_per_context: int = 64) -> PrecongruenceResult:
    """For related pairs, check that every context preserves the relation.

    ``N`` may be ``"=T"`` for trace equivalence.
    """
    contexts = list(contexts)
    pairs = list(pairs)
    cases: list[tuple[Term, tuple[int, ...], dict, dict]] = []
    for t in contexts:
        V = sorted(term_vars(t))
        for combo in itertools.islice(itertools.product(range(len(pairs)), repeat=len(V)),
                                      max_per_context):
            s1 = {x: pairs[i][0] for x, i in zip(V, combo)}
            s2 = {x: pairs[i][1] for x, i in zip(V, combo)}
            cases.append((t, combo, s1, s2))
    roots = {p for pq in pairs for p in pq}
    for t, _, s1, s2 in cases:
        roots.add(subst_term(s1, t))
        roots.add(subst_term(s2, t))
    L = build_lts(P, sorted(roots, key=term_key), depth)
    good = {i for i, (p, q) in enumerate(pairs) if _related(L, p, q, N, depth)}
    checked = skipped = 0
    for t, combo, s1, s2 in cases:
        if not all(i in good for i in combo):
            skipped += 1
            continue
        checked += 1
        a, b = subst_term(s1, t), subst_term(s2, t)
        if not _related(L, a, b, N, depth):
            return PrecongruenceResult(False, checked, skipped, (t, s1, s2))
    return PrecongruenceResult(True, checked, skipped)


def process_symbols(P: Tss) -> tuple[list[str], list[str]]:
    """Constants and infix operators used to build random closed process terms."""
    consts = [c for c in P.signature.constants()]
    ops = [f.name for f in P.signature.functions if f.name in INFIX and f.name != "*"]
    return consts, ops


def random_process(rng: random.Random, P: Tss, height: int, actions_only: bool = True) -> Term:
    consts, ops = process_symbols(P)
    leaves = [c for c in consts if c in P.actions] if actions_only else consts
    leaves = leaves or consts
    if height <= 0 or not ops or rng.random() < 0.3:
        return App(rng.choice(leaves))
    op = rng.choice(ops)
    return App(op, (random_process(rng, P, height - 1, actions_only),
                    random_process(rng, P, height - 1, actions_only)))


def default_contexts(P: Tss, rng: random.Random, nested: int = 6) -> list[Term]:
    """Contexts built from every function symbol, with variables and closed arguments."""
    out: dict[tuple, Term] = {}
    fns = [f for f in P.signature.functions if f.arity > 0]
    x, y = Var("x"), Var("y")

    def args(f, first: Term) -> tuple[Term, ...]:
        return tuple(first if i == 0 else random_process(rng, P, 1) for i in range(f.arity))

    for f in fns:
        if f.arity == 1:
            cands = [App(f.name, (x,))]
        else:
            cands = [App(f.name, (x, y)), App(f.name, (x, x)), App(f.name, args(f, x)),
                     App(f.name, tuple(reversed(args(f, x))))]
        for c in cands:
            out.setdefault(term_key(c), c)
    for _ in range(nested if fns else 0):
        f, g = rng.choice(fns), rng.choice(fns)
        c = App(f.name, args(f, App(g.name, args(g, x))))
        out.setdefault(term_key(c), c)
    return [out[k] for k in sorted(out)]


def fuzz_precongruence(P: Tss, N: str, depth: int = 4, seed: int = 0, n_terms: int = 10,
                       n_pairs: int = 8, height: int = 2) -> PrecongruenceResult:
    """Random related pairs and contexts, fixed by the seed."""
    rng = random.Random(seed)
    terms: dict[tuple, Term] = {}
    # Small signatures may have fewer distinct terms than requested.
    for _ in range(50 * n_terms):
        if len(terms) >= n_terms:
            break
        t = random_process(rng, P, height)
        terms.setdefault(term_key(t), t)
    base = [terms[k] for k in sorted(terms)]
    plus = "+" if "+" in P.signature else None
    if plus:
        for _ in range(n_terms // 2):
            p, q = rng.choice(base), rng.choice(base)
            s = App(plus, (p, q))
            terms.setdefault(term_key(s), s)
        # Distributed variants give pairs that are trace equivalent but differ in branching.
        _, ops = process_symbols(P)
        for op in [o for o in ops if o != plus]:
            for _ in range(n_terms // 2):
                x, y, z = (random_process(rng, P, 0) for _ in range(3))
                for s in (App(op, (x, App(plus, (y, z)))),
                          App(plus, (App(op, (x, y)), App(op, (x, z))))):
                    terms.setdefault(term_key(s), s)
    cands = [terms[k] for k in sorted(terms)]
    L = build_lts(P, cands, depth + 1)
    exact = [t for t in cands if max((len(s) for s in decorated_traces(L, t, "trace", depth)),
                                     default=0) < depth]
    related = [(p, q) for p in exact for q in exact if p != q and _related(L, p, q, N, depth)]
    rng.shuffle(related)
    pairs = related[:n_pairs]
    if not pairs:
        return PrecongruenceResult(True, 0, 0)
    return precongruence_test(P, N, default_contexts(P, rng), pairs, depth)
