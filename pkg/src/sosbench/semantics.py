"""Ground instantiation and the standard, supported and well-supported provability notions."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .terms import (App, Literal, Rule, Term, Tss, Var, is_closed, match, subst_literal,
                    subst_term, subterms, term_key, term_vars)

# Stands for "any successor we do not know about"; literals mentioning it are never derivable.
WILDCARD = App("?")

DEFAULT_MAX_INSTANCES = 200_000
DEFAULT_MAX_TERMS = 20_000

Triple = tuple[Term, str, Term]
Pair = tuple[Term, str]


class GroundingExplosion(ValueError):
    pass


@dataclass(frozen=True)
class GroundProgram:
    instances: frozenset[Rule]
    universe: frozenset[Term]
    expanded: frozenset[Term]
    frontier: frozenset[Term]
    roots: frozenset[Term]
    actions: tuple[str, ...]
    closure_note: str = ""

    def pairs(self) -> list[Pair]:
        return [(t, a) for t in sorted(self.expanded, key=term_key) for a in self.actions]


def _lhs_vars_of(premises: Iterable[Literal]) -> set[str]:
    out: set[str] = set()
    for p in premises:
        out |= term_vars(p.lhs)
    return out


@dataclass
class _Grounder:
    P: Tss
    base: list[Term]
    max_instances: int
    max_terms: int
    poss: dict[Pair, set[Term]] = field(default_factory=lambda: defaultdict(set))
    expanded: set[Term] = field(default_factory=set)
    aux: list[Term] = field(default_factory=list)
    deps: set[Pair] = field(default_factory=set)

    def instances_at(self, t: Term) -> Iterator[Rule]:
        for r in self.P.rules:
            sigma = match(r.source, t)
            if sigma is None:
                continue
            prems = r.sorted_premises()
            yield from self._bind(r, prems, sigma)

    def _bind(self, r: Rule, todo: list[Literal], sigma: dict[str, Term]) -> Iterator[Rule]:
        if not todo:
            rest = sorted((term_vars(r.conclusion.lhs) | (term_vars(r.conclusion.rhs)
                           if r.conclusion.rhs is not None else frozenset())) - set(sigma))
            yield from self._bind_free(r, rest, sigma)
            return
        ready = next((p for p in todo if term_vars(p.lhs) <= set(sigma)), None)
        if ready is None:
            rhs_later = set()
            for p in todo:
                if p.positive and p.rhs is not None:
                    rhs_later |= term_vars(p.rhs)
            cands = sorted(_lhs_vars_of(todo) - set(sigma))
            free = [v for v in cands if v not in rhs_later] or cands
            v = free[0]
            for u in self.base:
                yield from self._bind(r, todo, {**sigma, v: u})
            return
        rest = [p for p in todo if p is not ready]
        lhs = subst_term(sigma, ready.lhs)
        self._need(lhs)
        if not ready.positive:
            yield from self._bind(r, rest, sigma)
            return
        pat = subst_term(sigma, ready.rhs)
        if is_closed(pat):
            yield from self._bind(r, rest, sigma)
            return
        self.deps.add((lhs, ready.action))
        cands = sorted(self.poss.get((lhs, ready.action), ()), key=term_key)
        if isinstance(pat, Var):
            if pat.name in _lhs_vars_of(rest):
                cands = sorted(set(cands) | set(self.base), key=term_key)
            else:
                cands = cands + [WILDCARD]
        for u in cands:
            m = match(pat, u, dict(sigma)) if u != WILDCARD else {**sigma, pat.name: u}
            if m is not None:
                yield from self._bind(r, rest, m)

    def _bind_free(self, r: Rule, rest: list[str], sigma: dict[str, Term]) -> Iterator[Rule]:
        if not rest:
            yield Rule(r.name, frozenset(subst_literal(sigma, p) for p in r.premises),
                       subst_literal(sigma, r.conclusion))
            return
        for u in self.base:
            yield from self._bind_free(r, rest[1:], {**sigma, rest[0]: u})

    def _need(self, t: Term) -> None:
        if t not in self.expanded:
            self.expanded.add(t)
            self.aux.append(t)
            if len(self.expanded) > self.max_terms:
                raise GroundingExplosion(f"more than {self.max_terms} expanded terms")


def _base_universe(P: Tss, roots: Iterable[Term]) -> list[Term]:
    out: set[Term] = {App(c) for c in P.signature.constants()}
    for r in roots:
        out |= set(subterms(r))
    return sorted(out, key=term_key)


def ground_program(P: Tss, roots: Iterable[Term], depth: int,
                   max_instances: int = DEFAULT_MAX_INSTANCES,
                   max_terms: int = DEFAULT_MAX_TERMS) -> GroundProgram:
    """Closed rule instances for all states within ``depth`` steps of the roots.

    Terms occurring as premise left-hand sides are expanded as well, without counting
    towards the depth. Positive-premise right-hand sides range over an over-approximation
    of the derivable successors, plus a wildcard standing for every other term.
    """
    roots = [r for r in roots]
    for r in roots:
        if not is_closed(r):
            raise ValueError(f"root {r} is not closed")
    g = _Grounder(P, _base_universe(P, roots), max_instances, max_terms)
    dist: dict[Term, int] = {}
    for r in roots:
        dist.setdefault(r, 0)
    # Instances of a term are recomputed only when a successor set they consulted grew.
    by_term: dict[Term, frozenset[Rule]] = {}
    deps: dict[Term, set[Pair]] = {}
    grown: set[Pair] = set()
    while True:
        states = [t for t, d in dist.items() if d < depth]
        g.expanded |= set(states)
        queue = sorted((t for t in g.expanded if t not in by_term or deps[t] & grown),
                       key=term_key)
        g.aux = []
        while queue:
            t = queue.pop()
            g.deps = set()
            by_term[t] = frozenset(g.instances_at(t))
            deps[t] = g.deps
            queue.extend(x for x in g.aux if x not in by_term)
            g.aux = []
        instances: set[Rule] = set().union(*by_term.values())
        if len(instances) > max_instances:
            raise GroundingExplosion(f"more than {max_instances} ground instances")
        changed = False
        grown = set()
        for (s, a, u) in _positive_lfp(instances):
            if u not in g.poss[(s, a)]:
                g.poss[(s, a)].add(u)
                grown.add((s, a))
                changed = True
        for s in list(dist):
            if dist[s] >= depth:
                continue
            for a in P.actions:
                for u in g.poss.get((s, a), ()):
                    if u not in dist:
                        dist[u] = dist[s] + 1
                        changed = True
        if not changed:
            break
    expanded = frozenset(g.expanded)
    frontier = frozenset(t for t in dist if t not in expanded)
    universe: set[Term] = set(g.base) | set(dist) | expanded
    for inst in instances:
        for l in list(inst.premises) + [inst.conclusion]:
            universe.add(l.lhs)
            if l.rhs is not None and l.rhs != WILDCARD:
                universe.add(l.rhs)
    note = (f"subterms of roots and constants; states within {depth} steps; "
            "premise left-hand sides closed under expansion")
    return GroundProgram(frozenset(instances), frozenset(universe), expanded, frontier,
                         frozenset(roots), tuple(P.actions), note)


def _positive_lfp(instances: Iterable[Rule]) -> set[Triple]:
    """Positive triples derivable when negative premises are ignored."""
    lits = _lfp([r for r in instances if r.conclusion.positive], lambda p: True)
    return {(l.lhs, l.action, l.rhs) for l in lits}  # type: ignore[misc]


def _lfp(instances: Iterable[Rule], neg_ok=None) -> set[Literal]:
    """Least set of literals closed under the instances.

    With ``neg_ok`` given, negative premises are decided by it instead of being atoms.
    """
    waiting: dict[Literal, list[int]] = defaultdict(list)
    missing: list[int] = []
    concl: list[Literal] = []
    queue: deque[Literal] = deque()
    derived: set[Literal] = set()
    for r in instances:
        need = set()
        dead = False
        for p in r.premises:
            if p.rhs == WILDCARD:
                dead = True
                break
            if p.positive or neg_ok is None:
                need.add(p)
            elif not neg_ok(p):
                dead = True
                break
        if dead or r.conclusion.rhs == WILDCARD:
            continue
        i = len(concl)
        concl.append(r.conclusion)
        missing.append(len(need))
        for p in need:
            waiting[p].append(i)
        if not need:
            queue.append(r.conclusion)
    while queue:
        l = queue.popleft()
        if l in derived:
            continue
        derived.add(l)
        for i in waiting.get(l, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(concl[i])
    return derived


def standard_provable(G: GroundProgram) -> frozenset[Literal]:
    """Literals provable without hypotheses, negative literals being ordinary atoms."""
    return frozenset(_lfp(G.instances))


@dataclass(frozen=True)
class TransitionRelation3:
    positive: frozenset[Triple]
    negative: frozenset[Pair]
    unknown: frozenset[Pair]

    def __post_init__(self) -> None:
        clash = {(s, a) for (s, a, _) in self.positive} & self.negative
        if clash:
            s, a = sorted(clash, key=lambda p: (term_key(p[0]), p[1]))[0]
            raise AssertionError(f"inconsistent relation: {s} both does and refuses {a}")

    @property
    def two_valued(self) -> bool:
        return not self.unknown

    @cached_property
    def _index(self) -> dict[Pair, list[Term]]:
        out: dict[Pair, list[Term]] = defaultdict(list)
        for (s, a, u) in self.positive:
            out[(s, a)].append(u)
        return {k: sorted(v, key=term_key) for k, v in out.items()}

    @cached_property
    def has_positive(self) -> frozenset[Pair]:
        return frozenset(self._index)

    def holds(self, l: Literal) -> bool:
        if l.positive:
            return (l.lhs, l.action, l.rhs) in self.positive
        return (l.lhs, l.action) in self.negative

    def successors(self, t: Term, a: str) -> list[Term]:
        return list(self._index.get((t, a), ()))


def _relation(G: GroundProgram, pos: set[Triple], negs: set[Pair]) -> TransitionRelation3:
    has_pos = {(s, a) for (s, a, _) in pos}
    unknown = {p for p in G.pairs() if p not in negs and p not in has_pos}
    return TransitionRelation3(frozenset(pos), frozenset(negs), frozenset(unknown))


def supported_provable(G: GroundProgram) -> TransitionRelation3:
    """Stage iteration: positives by rule application, negatives when every rule is blocked."""
    by_pair: dict[Pair, list[Rule]] = defaultdict(list)
    for r in G.instances:
        if r.conclusion.positive:
            by_pair[(r.conclusion.lhs, r.conclusion.action)].append(r)
    pos: set[Triple] = set()
    negs: set[Pair] = set()
    while True:
        lits = _lfp([r for r in G.instances if r.conclusion.positive],
                    lambda p: (p.lhs, p.action) in negs)
        new_pos = {(l.lhs, l.action, l.rhs) for l in lits}  # type: ignore[misc]
        has_pos = {(s, a) for (s, a, _) in new_pos}

        def denied(p: Literal) -> bool:
            if p.positive:
                return (p.lhs, p.action) in negs
            return (p.lhs, p.action) in has_pos

        new_negs = set(negs)
        for pair in G.pairs():
            if pair in negs:
                continue
            if all(any(denied(p) for p in r.premises) for r in by_pair.get(pair, ())):
                new_negs.add(pair)
        if new_pos == pos and new_negs == negs:
            break
        pos, negs = new_pos, new_negs
    return _relation(G, pos, negs)


def ws_provable(G: GroundProgram) -> TransitionRelation3:
    """Well-founded model of the ground program by the alternating fixpoint."""
    rules = [r for r in G.instances if r.conclusion.positive]

    def run(against: set[Pair] | None) -> set[Triple]:
        ok = (lambda p: True) if against is None else (lambda p: (p.lhs, p.action) not in against)
        return {(l.lhs, l.action, l.rhs) for l in _lfp(rules, ok)}  # type: ignore[misc]

    upper = run(None)
    while True:
        lower = run({(s, a) for (s, a, _) in upper})
        new_upper = run({(s, a) for (s, a, _) in lower})
        if new_upper == upper:
            break
        upper = new_upper
    upper_pairs = {(s, a) for (s, a, _) in upper}
    negs = {p for p in G.pairs() if p not in upper_pairs}
    return _relation(G, lower, negs)


NOTIONS = {"ws": ws_provable, "s": supported_provable}


def relation_for(G: GroundProgram, notion: str) -> TransitionRelation3:
    if notion == "standard":
        lits = standard_provable(G)
        pos = {(l.lhs, l.action, l.rhs) for l in lits if l.positive}
        negs = {(l.lhs, l.action) for l in lits if not l.positive and l.lhs in G.expanded}
        return _relation(G, pos, negs)  # type: ignore[arg-type]
    return NOTIONS[notion](G)


def check_complete(G: GroundProgram) -> tuple[bool, list[Pair]]:
    rel = ws_provable(G)
    witness = sorted(rel.unknown, key=lambda p: (term_key(p[0]), p[1]))
    return not witness, witness


@dataclass(frozen=True)
class LtsFragment:
    states: frozenset[Term]
    relation: TransitionRelation3
    frontier: frozenset[Term]
    actions: tuple[str, ...]

    def successors(self, t: Term, a: str) -> list[Term]:
        return self.relation.successors(t, a)

    def initials(self, t: Term) -> frozenset[str]:
        return frozenset(a for a in self.actions if (t, a) in self._has_pos)

    @property
    def _has_pos(self) -> frozenset[Pair]:
        return self.relation.has_positive

    def status(self, t: Term, a: str) -> str:
        """One of "can", "cannot", "unknown" or "truncated"."""
        if t in self.frontier:
            return "truncated"
        if (t, a) in self.relation.negative:
            return "cannot"
        if (t, a) in self._has_pos:
            return "can"
        return "unknown"

    @property
    def two_valued(self) -> bool:
        return not self.relation.unknown

    def reachable(self, t: Term) -> list[Term]:
        seen = {t}
        todo = [t]
        while todo:
            s = todo.pop()
            if s in self.frontier:
                continue
            for a in self.actions:
                for u in self.successors(s, a):
                    if u not in seen:
                        seen.add(u)
                        todo.append(u)
        return sorted(seen, key=term_key)


def build_lts(P: Tss, roots: Iterable[Term], depth: int, notion: str = "ws",
              **limits: int) -> LtsFragment:
    """The 3-valued LTS fragment reachable from the roots."""
    if not P.standard:
        raise ValueError("build_lts needs a standard TSS")
    roots = list(roots)
    G = ground_program(P, roots, depth, **limits)
    rel = relation_for(G, notion)
    states: set[Term] = set()
    todo = list(roots)
    while todo:
        s = todo.pop()
        if s in states:
            continue
        states.add(s)
        if s in G.frontier:
            continue
        for a in P.actions:
            todo.extend(rel.successors(s, a))
    frontier = frozenset(s for s in states if s not in G.expanded)
    live = states - frontier
    restricted = TransitionRelation3(
        frozenset(x for x in rel.positive if x[0] in live),
        frozenset(x for x in rel.negative if x[0] in live),
        frozenset(x for x in rel.unknown if x[0] in live))
    return LtsFragment(frozenset(states), restricted, frontier, tuple(P.actions))


def _over(t: Term, names: set[str]) -> bool:
    return all(isinstance(s, Var) or s.head in names for s in subterms(t))


def check_conservative_semantic(P1: Tss, P2: Tss, roots: Iterable[Term], depth: int
                                ) -> tuple[bool, Literal | None]:
    """Compare ws verdicts of both TSSs on literals whose source is a term over the smaller signature."""
    sig1 = {f.name for f in P1.signature.functions}
    if not sig1 <= {f.name for f in P2.signature.functions}:
        raise ValueError("the first signature must be contained in the second")
    roots = list(roots)
    G1 = ground_program(P1, roots, depth)
    G2 = ground_program(P2, roots, depth)
    r1, r2 = ws_provable(G1), ws_provable(G2)
    common = {t for t in G1.expanded & G2.expanded if _over(t, sig1)}
    acts = sorted(set(P1.actions) | set(P2.actions))
    for t in sorted(common, key=term_key):
        for a in acts:
            p1 = {u for (s, b, u) in r1.positive if s == t and b == a}
            p2 = {u for (s, b, u) in r2.positive if s == t and b == a}
            if p1 != p2:
                u = sorted(p1 ^ p2, key=term_key)[0]
                return False, Literal(t, a, u)
            if ((t, a) in r1.negative) != ((t, a) in r2.negative):
                return False, Literal(t, a)
    return True, None
