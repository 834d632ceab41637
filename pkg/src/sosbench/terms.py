"""Terms, literals, rules and transition system specifications."""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class App:
    head: str
    args: tuple["Term", ...] = ()

    # Terms are hashed constantly by the grounder; cache the structural hash.
    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.head, self.args))
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, App):
            return NotImplemented
        return hash(self) == hash(other) and self.head == other.head and self.args == other.args

    def __str__(self) -> str:
        if not self.args:
            return self.head
        return f"{self.head}({', '.join(map(str, self.args))})"


Term = Union[Var, App]


def is_closed(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_closed(a) for a in t.args)


def term_vars(t: Term) -> frozenset[str]:
    return frozenset(_iter_vars(t))


def _iter_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    else:
        for a in t.args:
            yield from _iter_vars(a)


def var_positions(t: Term, path: tuple[int, ...] = ()) -> Iterator[tuple[str, tuple[int, ...]]]:
    """Yield (variable, path) for each variable occurrence; paths are 1-based argument indices."""
    if isinstance(t, Var):
        yield t.name, path
    else:
        for i, a in enumerate(t.args, 1):
            yield from var_positions(a, path + (i,))


def subterm_at(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise ValueError(f"invalid path {path}")
        t = t.args[i - 1]
    return t


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def term_height(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_height(a) for a in t.args)


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def term_key(t: Term) -> tuple:
    """Total order on terms, used wherever deterministic output matters."""
    if isinstance(t, Var):
        return (0, t.name)
    return (1, t.head, len(t.args), tuple(term_key(a) for a in t.args))


@dataclass(frozen=True)
class Literal:
    lhs: Term
    action: str
    rhs: Term | None = None

    @property
    def positive(self) -> bool:
        return self.rhs is not None

    def __str__(self) -> str:
        if self.rhs is None:
            return f"{self.lhs} -/{self.action}->"
        return f"{self.lhs} -{self.action}-> {self.rhs}"


def pos(lhs: Term, action: str, rhs: Term) -> Literal:
    return Literal(lhs, action, rhs)


def neg(lhs: Term, action: str) -> Literal:
    return Literal(lhs, action, None)


def denies(l1: Literal, l2: Literal) -> bool:
    return l1.lhs == l2.lhs and l1.action == l2.action and l1.positive != l2.positive


def literal_key(l: Literal) -> tuple:
    return (term_key(l.lhs), l.action, 0 if l.rhs is None else 1,
            () if l.rhs is None else term_key(l.rhs))


def literal_vars(l: Literal) -> frozenset[str]:
    vs = term_vars(l.lhs)
    if l.rhs is not None:
        vs |= term_vars(l.rhs)
    return vs


@dataclass(frozen=True)
class SideCondition:
    op: str  # "!=" or "<"
    left: str
    right: str


@dataclass(frozen=True)
class Rule:
    name: str
    premises: frozenset[Literal]
    conclusion: Literal
    side_conditions: tuple[SideCondition, ...] = ()
    template: str | None = None
    binding: tuple[tuple[str, str], ...] = ()

    @property
    def source(self) -> Term:
        return self.conclusion.lhs

    @property
    def target(self) -> Term | None:
        return self.conclusion.rhs

    @property
    def positive_premises(self) -> list[Literal]:
        return sorted((p for p in self.premises if p.positive), key=literal_key)

    @property
    def negative_premises(self) -> list[Literal]:
        return sorted((p for p in self.premises if not p.positive), key=literal_key)

    def sorted_premises(self) -> list[Literal]:
        return sorted(self.premises, key=literal_key)

    def shape(self) -> tuple:
        """Name-free identity: equal shapes mean the same rule syntactically."""
        return (literal_key(self.conclusion),
                tuple(sorted(literal_key(p) for p in self.premises)))

    def __str__(self) -> str:
        prem = ", ".join(map(str, self.sorted_premises()))
        return f"{prem} |- {self.conclusion}" if prem else f"|- {self.conclusion}"


def make_rule(name: str, premises: Iterable[Literal], conclusion: Literal, **kw) -> Rule:
    return Rule(name, frozenset(premises), conclusion, **kw)


# ---- variable partitions -------------------------------------------------

def rule_vars(r: Rule) -> frozenset[str]:
    vs = literal_vars(r.conclusion)
    for p in r.premises:
        vs |= literal_vars(p)
    return vs


def source_vars(r: Rule) -> frozenset[str]:
    return term_vars(r.source)


def rhs_vars(r: Rule) -> frozenset[str]:
    """rhs(H): variables in right-hand sides of positive premises."""
    out: set[str] = set()
    for p in r.premises:
        if p.rhs is not None:
            out |= term_vars(p.rhs)
    return frozenset(out)


def lhs_vars(r: Rule) -> frozenset[str]:
    """lvar(H): variables in left-hand sides of premises."""
    out: set[str] = set()
    for p in r.premises:
        out |= term_vars(p.lhs)
    return frozenset(out)


def vars_of(x: Union[Term, Literal, Rule]) -> frozenset[str]:
    if isinstance(x, Rule):
        return rule_vars(x)
    if isinstance(x, Literal):
        return literal_vars(x)
    return term_vars(x)


# ---- substitution --------------------------------------------------------

@dataclass(frozen=True)
class Substitution:
    mapping: Mapping[str, Term] = field(default_factory=dict)

    def __call__(self, x):
        return apply_subst(self, x)

    def compose(self, first: "Substitution") -> "Substitution":
        """self after first: v maps to self(first(v))."""
        out = {v: apply_subst(self, t) for v, t in first.mapping.items()}
        for v, t in self.mapping.items():
            out.setdefault(v, t)
        return Substitution(out)

    def closed_for(self, x) -> bool:
        return all(v in self.mapping and is_closed(self.mapping[v]) for v in vars_of(x))


def subst_term(m: Mapping[str, Term], t: Term) -> Term:
    if isinstance(t, Var):
        return m.get(t.name, t)
    if not t.args:
        return t
    return App(t.head, tuple(subst_term(m, a) for a in t.args))


def subst_literal(m: Mapping[str, Term], l: Literal) -> Literal:
    return Literal(subst_term(m, l.lhs), l.action,
                   None if l.rhs is None else subst_term(m, l.rhs))


def subst_rule(m: Mapping[str, Term], r: Rule) -> Rule:
    return Rule(r.name, frozenset(subst_literal(m, p) for p in r.premises),
                subst_literal(m, r.conclusion), r.side_conditions, r.template, r.binding)


def apply_subst(s: Substitution | Mapping[str, Term], x):
    m = s.mapping if isinstance(s, Substitution) else s
    if isinstance(x, Rule):
        return subst_rule(m, x)
    if isinstance(x, Literal):
        return subst_literal(m, x)
    return subst_term(m, x)


def match(pattern: Term, t: Term, m: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """One-way matching of pattern against t; returns an extension of m or None."""
    m = {} if m is None else dict(m)
    stack = [(pattern, t)]
    while stack:
        p, u = stack.pop()
        if isinstance(p, Var):
            bound = m.get(p.name)
            if bound is None:
                m[p.name] = u
            elif bound != u:
                return None
        elif isinstance(u, App) and u.head == p.head and len(u.args) == len(p.args):
            stack.extend(zip(p.args, u.args))
        else:
            return None
    return m


# ---- fresh names ---------------------------------------------------------

class Fresh:
    """Generator of variables _g0, _g1, ... avoiding a given set of names."""

    def __init__(self, avoid: Iterable[str] = (), prefix: str = "_g") -> None:
        self.avoid = set(avoid)
        self.prefix = prefix
        self.counter = itertools.count()

    def __call__(self) -> str:
        while True:
            name = f"{self.prefix}{next(self.counter)}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name

    def var(self) -> Var:
        return Var(self())


# ---- alpha equivalence ---------------------------------------------------

def _render(t: Term, names: Mapping[str, str]) -> tuple:
    if isinstance(t, Var):
        return (0, names.get(t.name, "?"))
    return (1, t.head, tuple(_render(a, names) for a in t.args))


def _render_lit(l: Literal, names: Mapping[str, str]) -> tuple:
    return (_render(l.lhs, names), l.action,
            () if l.rhs is None else (_render(l.rhs, names),))


def _assign(t: Term | None, names: dict[str, str]) -> None:
    if t is None:
        return
    for v, _ in var_positions(t):
        if v not in names:
            names[v] = f"v{len(names)}"


def _canonical_names(r: Rule) -> dict[str, str]:
    names: dict[str, str] = {}
    _assign(r.conclusion.lhs, names)
    _assign(r.conclusion.rhs, names)
    best: tuple | None = None
    best_names: dict[str, str] = names

    def search(remaining: list[Literal], names: dict[str, str], acc: tuple) -> None:
        nonlocal best, best_names
        if not remaining:
            if best is None or acc < best:
                best, best_names = acc, names
            return
        keyed = [(_render_lit(p, names), p) for p in remaining]
        low = min(k for k, _ in keyed)
        tied = [p for k, p in keyed if k == low]
        fully_named = all(v in names for v in literal_vars(tied[0]))
        for p in tied[:1] if fully_named else tied:
            n2 = dict(names)
            _assign(p.lhs, n2)
            _assign(p.rhs, n2)
            rest = list(remaining)
            rest.remove(p)
            search(rest, n2, acc + (_render_lit(p, n2),))

    search(sorted(r.premises, key=literal_key), names, ())
    return best_names


def alpha_canonical(r: Rule) -> Rule:
    """Rename variables to v0, v1, ... in a name-independent traversal order."""
    names = _canonical_names(r)
    return subst_rule({v: Var(n) for v, n in names.items()}, r)


def alpha_key(r: Rule) -> tuple:
    return alpha_canonical(r).shape()


def alpha_equal(r1: Rule, r2: Rule) -> bool:
    return alpha_key(r1) == alpha_key(r2)


def dedup_alpha(rules: Iterable[Rule]) -> list[Rule]:
    seen: set[tuple] = set()
    out: list[Rule] = []
    for r in rules:
        k = alpha_key(r)
        if k not in seen:
            seen.add(k)
            out.append(r)
    return out


def rename_apart(r: Rule, fresh: Fresh, keep: Iterable[str] = ()) -> Rule:
    keep = set(keep)
    m = {v: fresh.var() for v in sorted(rule_vars(r)) if v not in keep}
    return subst_rule(m, r)


# ---- signatures and TSSs -------------------------------------------------

@dataclass(frozen=True)
class FuncDecl:
    name: str
    arity: int
    lambda_hint: tuple[bool, ...] | None = None  # True = liquid


@dataclass(frozen=True)
class Signature:
    functions: tuple[FuncDecl, ...] = ()

    def __post_init__(self) -> None:
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names):
            raise ValueError("duplicate function symbol")
        for f in self.functions:
            if f.lambda_hint is not None and len(f.lambda_hint) != f.arity:
                raise ValueError(f"lambda hint of {f.name} must have {f.arity} entries")

    @property
    def arities(self) -> dict[str, int]:
        return {f.name: f.arity for f in self.functions}

    def decl(self, name: str) -> FuncDecl:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(f.name == name for f in self.functions)

    def positions(self) -> list[tuple[str, int]]:
        return [(f.name, i) for f in self.functions for i in range(1, f.arity + 1)]

    def constants(self) -> list[str]:
        return [f.name for f in self.functions if f.arity == 0]


@dataclass(frozen=True)
class Tss:
    signature: Signature
    actions: tuple[str, ...]
    rules: tuple[Rule, ...] = ()
    ordering: frozenset[tuple[str, str]] = frozenset()  # (lo, hi) means lo < hi
    universe_relative: bool = False

    @property
    def standard(self) -> bool:
        return all(r.conclusion.positive for r in self.rules)

    @property
    def positive(self) -> bool:
        return self.standard and all(p.positive for r in self.rules for p in r.premises)

    def with_rules(self, rules: Iterable[Rule], **kw) -> "Tss":
        return Tss(self.signature, self.actions, tuple(rules), self.ordering,
                   kw.get("universe_relative", self.universe_relative))

    def rules_for(self, head: str) -> list[Rule]:
        return [r for r in self.rules if isinstance(r.source, App) and r.source.head == head]

    def digest(self) -> str:
        from .syntax import print_tss
        return hashlib.sha256(print_tss(self).encode()).hexdigest()[:16]


def check_term(sig: Signature, t: Term) -> None:
    ar = sig.arities
    for s in subterms(t):
        if isinstance(s, App):
            if s.head not in ar:
                raise ValueError(f"undeclared symbol {s.head}")
            if ar[s.head] != len(s.args):
                raise ValueError(f"arity mismatch for {s.head}: expected {ar[s.head]}, got {len(s.args)}")


def closed_terms(sig: Signature, height: int, limit: int | None = None) -> list[Term]:
    """All closed terms up to the given height, in increasing order of height."""
    levels: list[list[Term]] = [[App(c) for c in sig.constants()]]
    out = list(levels[0])
    for _ in range(height):
        prev = out
        new = []
        for f in sig.functions:
            if f.arity == 0:
                continue
            for args in itertools.product(prev, repeat=f.arity):
                t = App(f.name, args)
                if term_height(t) == len(levels):
                    new.append(t)
                    if limit is not None and len(out) + len(new) >= limit:
                        return out + new
        levels.append(new)
        out = out + new
    return out
