"""Modal observations, sublanguages, decorated traces and behavioural preorders."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Union

from .semantics import LtsFragment, TransitionRelation3
from .terms import App, Term, term_key


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Prefix:
    action: str
    body: "Formula"


@dataclass(frozen=True)
class Cannot:
    action: str


@dataclass(frozen=True)
class Conj:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Neg:
    body: "Formula"


Formula = Union[Top, Prefix, Cannot, Conj, Neg]
TOP = Top()


def conj(*parts: Formula) -> Formula:
    return normalize(Conj(tuple(parts)))


def prefix(trace: Iterable[str], body: Formula = TOP) -> Formula:
    for a in reversed(list(trace)):
        body = Prefix(a, body)
    return body


def formula_key(f: Formula) -> tuple:
    if isinstance(f, Top):
        return (0,)
    if isinstance(f, Cannot):
        return (1, f.action)
    if isinstance(f, Prefix):
        return (2, f.action, formula_key(f.body))
    if isinstance(f, Neg):
        return (3, formula_key(f.body))
    return (4, tuple(formula_key(p) for p in f.parts))


def normalize(f: Formula) -> Formula:
    """Flatten conjunctions, drop ⊤ conjuncts, remove duplicates and sort."""
    if isinstance(f, Prefix):
        return Prefix(f.action, normalize(f.body))
    if isinstance(f, Neg):
        return Neg(normalize(f.body))
    if not isinstance(f, Conj):
        return f
    flat: dict[tuple, Formula] = {}
    for p in f.parts:
        p = normalize(p)
        for q in (p.parts if isinstance(p, Conj) else (p,)):
            if not isinstance(q, Top):
                flat[formula_key(q)] = q
    if not flat:
        return TOP
    if len(flat) == 1:
        return next(iter(flat.values()))
    return Conj(tuple(flat[k] for k in sorted(flat)))


def formula_depth(f: Formula) -> int:
    if isinstance(f, Top):
        return 0
    if isinstance(f, Cannot):
        return 1
    if isinstance(f, Prefix):
        return 1 + formula_depth(f.body)
    if isinstance(f, Neg):
        return formula_depth(f.body)
    return max((formula_depth(p) for p in f.parts), default=0)


# ---- concrete syntax -----------------------------------------------------

_FTOK = re.compile(r"\s*(?:(<)\s*([\w']+)\s*>|(tt)\b|(no)\s+([\w']+)|(not)\b|([&()]))")


class FormulaSyntaxError(ValueError):
    pass


def parse_formula(text: str) -> Formula:
    """Parse ``tt``, ``<a> phi``, ``no a``, ``phi & phi``, ``not phi`` and parentheses."""
    toks: list[tuple[str, str]] = []
    i = 0
    text = text.rstrip()
    while i < len(text):
        m = _FTOK.match(text, i)
        if not m:
            raise FormulaSyntaxError(f"unexpected input at column {i + 1}: {text[i:i + 10]!r}")
        if m.group(1):
            toks.append(("pre", m.group(2)))
        elif m.group(3):
            toks.append(("tt", ""))
        elif m.group(4):
            toks.append(("no", m.group(5)))
        elif m.group(6):
            toks.append(("not", ""))
        else:
            toks.append((m.group(7), ""))
        i = m.end()
    pos = 0

    def peek() -> str:
        return toks[pos][0] if pos < len(toks) else "eof"

    def unary() -> Formula:
        nonlocal pos
        kind = peek()
        if kind == "eof":
            raise FormulaSyntaxError("unexpected end of formula")
        val = toks[pos][1]
        pos += 1
        if kind == "tt":
            return TOP
        if kind == "no":
            return Cannot(val)
        if kind == "pre":
            return Prefix(val, unary())
        if kind == "not":
            return Neg(unary())
        if kind == "(":
            f = conjunction()
            if peek() != ")":
                raise FormulaSyntaxError("expected )")
            pos += 1
            return f
        raise FormulaSyntaxError(f"unexpected {kind!r}")

    def conjunction() -> Formula:
        nonlocal pos
        parts = [unary()]
        while peek() == "&":
            pos += 1
            parts.append(unary())
        return parts[0] if len(parts) == 1 else Conj(tuple(parts))

    f = conjunction()
    if peek() != "eof":
        raise FormulaSyntaxError(f"trailing input near token {pos + 1}")
    return f


def print_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "tt"
    if isinstance(f, Cannot):
        return f"no {f.action}"
    if isinstance(f, Prefix):
        return f"<{f.action}>{_atom(f.body)}"
    if isinstance(f, Neg):
        return f"not {_atom(f.body)}"
    if not f.parts:
        return "tt"
    return " & ".join(_atom(p) for p in f.parts)


def _atom(f: Formula) -> str:
    s = print_formula(f)
    return f"({s})" if isinstance(f, Conj) and len(f.parts) > 1 else s


# ---- sublanguages --------------------------------------------------------

BASE_TAGS = ("T", "CT", "F", "R", "FT", "RT", "1S", "RS", "B")


def _parts(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Top):
        return ()
    return f.parts if isinstance(f, Conj) else (f,)


def _is_ready_atom(f: Formula) -> bool:
    return isinstance(f, Cannot) or (isinstance(f, Prefix) and isinstance(f.body, Top))


def _member(f: Formula, tag: str, actions: frozenset[str] | None) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Prefix):
        return _member(f.body, tag, actions)
    if isinstance(f, Neg) and tag != "B" and not re.fullmatch(r"\d+S", tag):
        return False
    parts = _parts(f)
    if tag == "T":
        return False
    if tag == "CT":
        if actions is None:
            raise ValueError("membership in CT needs the action set")
        return all(isinstance(p, Cannot) for p in parts) and {p.action for p in parts} == actions  # type: ignore[union-attr]
    if tag == "F":
        return all(isinstance(p, Cannot) for p in parts)
    if tag == "R":
        return all(_is_ready_atom(p) for p in parts)
    if tag in ("FT", "RT"):
        atom = (lambda p: isinstance(p, Cannot)) if tag == "FT" else _is_ready_atom
        rest = [p for p in parts if not atom(p)]
        if len(rest) > 1:
            return False
        return all(_member(p, tag, actions) for p in rest) and all(not isinstance(p, Conj) for p in rest)
    if tag == "1S":
        return all(isinstance(p, (Prefix, Conj, Top)) and _member(p, tag, actions) for p in parts) \
            and not isinstance(f, (Cannot, Neg))
    if tag == "RS":
        if isinstance(f, Neg):
            return False
        return isinstance(f, Cannot) or all(_member(p, tag, actions) for p in parts)
    if tag == "B":
        if isinstance(f, Cannot):
            return False
        if isinstance(f, Neg):
            return _member(f.body, tag, actions)
        return all(_member(p, tag, actions) for p in parts)
    m = re.fullmatch(r"(\d+)S", tag)
    if m:
        n = int(m.group(1))
        if isinstance(f, Cannot):
            return False
        if isinstance(f, Neg):
            return n >= 2 and _member(f.body, f"{n - 1}S", actions)
        return all(_member(p, tag, actions) for p in parts)
    raise ValueError(f"unknown sublanguage {tag}")


def in_sublanguage(f: Formula, tag: str, actions: Iterable[str] | None = None) -> bool:
    """Grammar membership; ``N^`` is the conjunctive closure and ``T^~`` adds refusals."""
    acts = frozenset(actions) if actions is not None else None
    f = normalize(f)
    if tag == "T^~":
        return all(isinstance(p, Cannot) or _member(p, "T", acts) for p in _parts(f))
    if tag.endswith("^"):
        base = tag[:-1]
        if base == "CT":
            parts = _parts(f)
            refusals = {p.action for p in parts if isinstance(p, Cannot)}
            if refusals and acts is not None and refusals != acts:
                return False
            if refusals and acts is None:
                raise ValueError("membership in CT needs the action set")
            return all(isinstance(p, Cannot) or _member(p, "CT", acts) for p in parts)
        return all(_member(p, base, acts) for p in _parts(f))
    return _member(f, tag, acts)


# ---- satisfaction --------------------------------------------------------

class DepthError(ValueError):
    """The fragment is truncated inside the region a query needs."""


def _has_neg(f: Formula) -> bool:
    if isinstance(f, Neg):
        return True
    if isinstance(f, Prefix):
        return _has_neg(f.body)
    if isinstance(f, Conj):
        return any(_has_neg(p) for p in f.parts)
    return False


def _two_valued_from(L: LtsFragment, p: Term) -> bool:
    return all(L.status(s, a) != "unknown" for s in L.reachable(p) for a in L.actions)


def satisfies(L: LtsFragment, p: Term, f: Formula) -> bool | None:
    """True, False, or None when the answer depends on truncated states."""
    if p not in L.states:
        raise ValueError(f"{p} is not a state of the fragment")
    if _has_neg(f) and not _two_valued_from(L, p):
        raise ValueError("negation needs a 2-valued fragment")
    memo: dict[tuple[Term, Formula], bool | None] = {}
    return _sat(L, p, f, memo)


def _sat(L: LtsFragment, p: Term, f: Formula, memo: dict) -> bool | None:
    if isinstance(f, Top):
        return True
    key = (p, f)
    if key in memo:
        return memo[key]
    if isinstance(f, Cannot):
        st = L.status(p, f.action)
        out: bool | None = None if st == "truncated" else st == "cannot"
    elif isinstance(f, Prefix):
        if L.status(p, f.action) == "truncated":
            out = None
        else:
            out = False
            for q in L.successors(p, f.action):
                r = _sat(L, q, f.body, memo)
                if r:
                    out = True
                    break
                if r is None:
                    out = None
    elif isinstance(f, Neg):
        r = _sat(L, p, f.body, memo)
        out = None if r is None else not r
    else:
        out = True
        for part in f.parts:
            r = _sat(L, p, part, memo)
            if r is False:
                out = False
                break
            if r is None:
                out = None
    memo[key] = out
    return out


# ---- decorated traces ----------------------------------------------------

TRACE_KINDS = ("trace", "completed", "ready-pair", "failure-pair", "ready-trace", "failure-trace")


def _initials(L: LtsFragment, s: Term) -> frozenset[str]:
    out = set()
    for a in L.actions:
        st = L.status(s, a)
        if st == "truncated":
            raise DepthError(f"state {s} is truncated")
        if st == "unknown":
            raise ValueError(f"transition {s} -{a}-> is unknown; the fragment is not 2-valued")
        if st == "can":
            out.add(a)
    return frozenset(out)


def _paths(L: LtsFragment, p: Term, depth: int) -> list[list[tuple[str | None, Term]]]:
    """All action paths of length at most ``depth`` as lists of (action, state)."""
    out = []

    def walk(path: list[tuple[str | None, Term]]) -> None:
        out.append(list(path))
        if len(path) - 1 == depth:
            return
        s = path[-1][1]
        for a in sorted(_initials(L, s)):
            for q in L.successors(s, a):
                path.append((a, q))
                walk(path)
                path.pop()

    walk([(None, p)])
    return out


def _decorated(L: LtsFragment, p: Term, depth: int, ready: bool, undecorated_tail: bool) -> set[tuple]:
    acts = frozenset(L.actions)
    out = set()
    for path in _paths(L, p, depth):
        items: list = []
        for i, (a, s) in enumerate(path):
            if a is not None:
                items.append(a)
            last = i == len(path) - 1
            if last and undecorated_tail and len(path) - 1 == depth:
                items.append(None)
            else:
                init = _initials(L, s)
                items.append(init if ready else acts - init)
        out.add(tuple(items))
    return out


def decorated_traces(L: LtsFragment, p: Term, kind: str, depth: int) -> set:
    """Decorated traces whose action part has length at most ``depth``.

    Failure pairs and failure traces carry maximal refusal sets.
    """
    acts = frozenset(L.actions)
    if kind == "trace":
        return {tuple(a for a, _ in path[1:]) for path in _paths(L, p, depth)}
    if kind in ("completed", "ready-pair", "failure-pair"):
        out = set()
        for path in _paths(L, p, depth):
            sigma = tuple(a for a, _ in path[1:])
            init = _initials(L, path[-1][1])
            if kind == "completed":
                if not init:
                    out.add(sigma)
            else:
                out.add((sigma, init if kind == "ready-pair" else acts - init))
        return out
    if kind in ("ready-trace", "failure-trace"):
        return _decorated(L, p, depth, kind == "ready-trace", False)
    raise ValueError(f"unknown trace kind {kind}")


def _dominated(x: tuple, ys: Iterable[tuple]) -> bool:
    """x is a failure trace and some y has the same actions with larger refusals."""
    for y in ys:
        if len(y) != len(x):
            continue
        ok = True
        for i in range(len(x)):
            if i % 2 == 0:
                if x[i] is None or y[i] is None:
                    ok = x[i] is None and y[i] is None
                elif not x[i] <= y[i]:
                    ok = False
            elif x[i] != y[i]:
                ok = False
            if not ok:
                break
        if ok:
            return True
    return False


TRACE_NOTIONS = ("T", "CT", "F", "R", "FT", "RT")


def notion_kind(N: str) -> str:
    if N in TRACE_NOTIONS:
        return "trace"
    if N in ("1S", "RS", "B") or re.fullmatch(r"\d+S", N):
        return "simulation"
    raise ValueError(f"unknown notion {N}")


def _require_2valued(L: LtsFragment, *states: Term) -> None:
    for s in states:
        if not _two_valued_from(L, s):
            raise ValueError("decorated-trace and simulation preorders need a 2-valued fragment")


def _trace_holds(L: LtsFragment, p: Term, q: Term, N: str, depth: int) -> bool:
    if depth <= 0:
        return True
    if decorated_traces(L, p, "trace", depth) - decorated_traces(L, q, "trace", depth):
        return False
    d = depth - 1
    if N == "T":
        return True
    if N == "CT":
        return decorated_traces(L, p, "completed", d) <= decorated_traces(L, q, "completed", d)
    if N == "R":
        return decorated_traces(L, p, "ready-pair", d) <= decorated_traces(L, q, "ready-pair", d)
    if N == "F":
        qs: dict[tuple, list] = {}
        for sigma, X in decorated_traces(L, q, "failure-pair", d):
            qs.setdefault(sigma, []).append(X)
        return all(any(X <= Y for Y in qs.get(sigma, ()))
                   for sigma, X in decorated_traces(L, p, "failure-pair", d))
    ready = N == "RT"
    ps = _decorated(L, p, depth, ready, True)
    qs2 = _decorated(L, q, depth, ready, True)
    if ready:
        return ps <= qs2
    return all(_dominated(x, qs2) for x in ps)


# ---- simulations ---------------------------------------------------------

def _sim_states(L: LtsFragment) -> list[Term]:
    return sorted((s for s in L.states if s not in L.frontier), key=term_key)


def simulation_preorder(L: LtsFragment, kind: str, depth: int | None = None,
                        states: Iterable[Term] | None = None) -> frozenset[tuple[Term, Term]]:
    """The simulation-style preorder as a set of pairs.

    With ``depth`` None this is the greatest fixpoint over a fragment without truncated
    states; otherwise the depth-bounded approximant, which needs the states within
    ``depth - 1`` steps to be expanded.
    """
    if kind not in ("1S", "RS", "B") and not re.fullmatch(r"\d+S", kind):
        raise ValueError(f"unknown simulation notion {kind}")
    sts = sorted(set(states), key=term_key) if states is not None else None
    if depth is None:
        if L.frontier:
            reach = set()
            for s in (sts or L.states):
                reach |= set(L.reachable(s))
            if reach & L.frontier:
                raise DepthError("greatest fixpoint needs a fragment without truncated states")
        return _gfp(L, kind, sts)
    univ: set[Term] = set()
    for s in (sts or _sim_states(L)):
        univ |= set(_within(L, s, depth))
    rel = _approx(L, kind, depth, tuple(sorted(univ, key=term_key)))
    if sts is None:
        return rel
    return frozenset((p, q) for (p, q) in rel if p in sts and q in sts)


def _within(L: LtsFragment, p: Term, depth: int) -> list[Term]:
    out = {p}
    layer = [p]
    for _ in range(depth):
        nxt = []
        for s in layer:
            _initials(L, s)
            for a in L.actions:
                for q in L.successors(s, a):
                    if q not in out:
                        out.add(q)
                        nxt.append(q)
        layer = nxt
    return sorted(out, key=term_key)


def _succ(L: LtsFragment, s: Term) -> list[tuple[str, Term]]:
    return [(a, q) for a in L.actions for q in L.successors(s, a)]


def _forth(L: LtsFragment, p: Term, q: Term, R) -> bool:
    for a, p1 in _succ(L, p):
        if not any((p1, q1) in R for q1 in L.successors(q, a)):
            return False
    return True


def _approx(L: LtsFragment, kind: str, k: int, univ: tuple[Term, ...]) -> frozenset:
    """Pairs related by the level-k approximant."""
    all_pairs = frozenset((p, q) for p in univ for q in univ)
    if k == 0:
        return all_pairs
    prev = _approx(L, kind, k - 1, univ)
    init = {s: _initials(L, s) for s in univ if _reach_ok(L, s)}
    out = set()
    nested = None
    m = re.fullmatch(r"(\d+)S", kind)
    if m and int(m.group(1)) >= 2:
        nested = _approx(L, f"{int(m.group(1)) - 1}S", k, univ)
    for p, q in all_pairs:
        if p not in init or q not in init:
            continue
        if not _forth(L, p, q, prev):
            continue
        if kind == "RS" and not init[q] <= init[p]:
            continue
        if kind == "B" and not _forth(L, q, p, {(y, x) for (x, y) in prev}):
            continue
        if nested is not None and (q, p) not in nested:
            continue
        out.add((p, q))
    return frozenset(out)


def _reach_ok(L: LtsFragment, s: Term) -> bool:
    return s not in L.frontier


def _gfp(L: LtsFragment, kind: str, sts: list[Term] | None) -> frozenset:
    univ = set()
    for s in (sts or _sim_states(L)):
        univ |= set(L.reachable(s))
    univ_l = sorted(univ, key=term_key)
    init = {s: _initials(L, s) for s in univ_l}
    m = re.fullmatch(r"(\d+)S", kind)
    nested = _gfp(L, f"{int(m.group(1)) - 1}S", univ_l) if m and int(m.group(1)) >= 2 else None
    R = set()
    for p in univ_l:
        for q in univ_l:
            if kind == "RS" and not init[q] <= init[p]:
                continue
            if nested is not None and (q, p) not in nested:
                continue
            R.add((p, q))
    changed = True
    while changed:
        changed = False
        for p, q in list(R):
            ok = _forth(L, p, q, R)
            if ok and kind == "B":
                ok = _forth(L, q, p, {(y, x) for (x, y) in R})
            if not ok:
                R.discard((p, q))
                changed = True
    out = frozenset(R)
    if sts is not None:
        keep = set(sts)
        out = frozenset((p, q) for (p, q) in out if p in keep and q in keep)
    return out


def preorder_holds(L: LtsFragment, p: Term, q: Term, N: str, depth: int | None) -> bool:
    """p is below q for notion N, comparing observations of depth at most ``depth``."""
    _require_2valued(L, p, q)
    if notion_kind(N) == "trace":
        if depth is None:
            raise ValueError("decorated-trace notions need a depth")
        return _trace_holds(L, p, q, N, depth)
    return (p, q) in simulation_preorder(L, N, depth, [p, q])


def equivalent(L: LtsFragment, p: Term, q: Term, N: str, depth: int | None) -> bool:
    return preorder_holds(L, p, q, N, depth) and preorder_holds(L, q, p, N, depth)


# ---- modal route ---------------------------------------------------------

def _check(L: LtsFragment, q: Term, f: Formula) -> bool:
    r = satisfies(L, q, f)
    if r is None:
        raise DepthError("observation reaches truncated states")
    return r


def _refusals(L: LtsFragment, s: Term) -> list[str]:
    return [a for a in L.actions if _check(L, s, Cannot(a))]


def _readies(L: LtsFragment, s: Term) -> list[str]:
    return [a for a in L.actions if _check(L, s, Prefix(a, TOP))]


def observations(L: LtsFragment, p: Term, N: str, depth: int) -> list[Formula]:
    """Formulas of the trace-like sublanguage N with depth at most ``depth`` satisfied by p.

    Only the strongest decorations are produced; every other satisfied formula of N is
    implied by one of them.
    """
    out: dict[tuple, Formula] = {}

    def add(f: Formula) -> None:
        f = normalize(f)
        out[formula_key(f)] = f

    def deco(s: Term) -> Formula:
        if N in ("F", "FT"):
            return conj(*(Cannot(a) for a in _refusals(L, s)))
        return conj(*(Cannot(a) for a in _refusals(L, s)), *(Prefix(b, TOP) for b in _readies(L, s)))

    def walk(s: Term, trace: list[str]) -> None:
        add(prefix(trace))
        n = len(trace)
        if n < depth:
            if N == "CT" and len(_refusals(L, s)) == len(L.actions):
                add(prefix(trace, conj(*(Cannot(a) for a in L.actions))))
            if N in ("F", "R"):
                add(prefix(trace, deco(s)))
        if n == depth:
            return
        for a in L.actions:
            if not _check(L, s, Prefix(a, TOP)):
                continue
            for s2 in L.successors(s, a):
                walk(s2, trace + [a])

    def walk_deco(s: Term, n: int) -> list[Formula]:
        """Decorated chains from s using at most ``depth - n`` further levels."""
        here = deco(s) if n < depth else TOP
        res = [here]
        if n == depth:
            return res
        for a in L.actions:
            if not _check(L, s, Prefix(a, TOP)):
                continue
            for s2 in L.successors(s, a):
                for tail in walk_deco(s2, n + 1):
                    res.append(conj(deco(s), Prefix(a, tail)))
        return res

    if depth <= 0:
        return [TOP]
    if N in ("FT", "RT"):
        for f in walk_deco(p, 0):
            add(f)
    else:
        walk(p, [])
    return [out[k] for k in sorted(out)]


def characteristic(L: LtsFragment, p: Term, N: str, depth: int, memo: dict | None = None) -> Formula:
    """A formula of the simulation sublanguage N satisfied by q iff q is above p at ``depth``."""
    memo = {} if memo is None else memo
    key = (p, N, depth)
    if key in memo:
        return memo[key]
    if depth == 0:
        return TOP
    parts: list[Formula] = []
    for a in L.actions:
        succ = L.successors(p, a)
        for p1 in succ:
            parts.append(Prefix(a, characteristic(L, p1, N, depth - 1, memo)))
        if N == "RS" and not succ:
            parts.append(Cannot(a))
        if N == "B":
            parts.append(Neg(Prefix(a, conj(*(Neg(characteristic(L, p1, N, depth - 1, memo))
                                               for p1 in succ)))))
    m = re.fullmatch(r"(\d+)S", N)
    if m and int(m.group(1)) >= 2:
        lower = f"{int(m.group(1)) - 1}S"
        for r in _nested_candidates(L, depth):
            chi = characteristic(L, r, lower, depth, memo)
            if not _check(L, p, chi):
                parts.append(Neg(chi))
    f = conj(*parts)
    memo[key] = f
    return f


def _nested_candidates(L: LtsFragment, depth: int) -> list[Term]:
    out = []
    for s in _sim_states(L):
        try:
            _within(L, s, depth)
        except DepthError:
            continue
        out.append(s)
    return out


def preorder_modal(L: LtsFragment, p: Term, q: Term, N: str, depth: int) -> bool:
    """Decide the preorder by checking q against the observations of p."""
    _require_2valued(L, p, q)
    if depth <= 0:
        return True
    if notion_kind(N) == "trace":
        return all(_check(L, q, f) for f in observations(L, p, N, depth))
    return _check(L, q, characteristic(L, p, N, depth))


# ---- random fragments ----------------------------------------------------

def lts_from_edges(n: int, edges: Iterable[tuple[int, str, int]], actions: Iterable[str]) -> LtsFragment:
    """A 2-valued fragment with states s0..s(n-1)."""
    acts = tuple(actions)
    st = [App(f"s{i}") for i in range(n)]
    pos = frozenset((st[i], a, st[j]) for i, a, j in edges)
    has = {(s, a) for s, a, _ in pos}
    negs = frozenset((s, a) for s in st for a in acts if (s, a) not in has)
    return LtsFragment(frozenset(st), TransitionRelation3(pos, negs, frozenset()), frozenset(), acts)


def random_acyclic_lts(rng: random.Random, n: int, actions: Iterable[str] = ("a", "b"),
                       edge_prob: float = 0.35) -> LtsFragment:
    acts = tuple(actions)
    edges = [(i, a, j) for i in range(n) for j in range(i + 1, n) for a in acts
             if rng.random() < edge_prob]
    return lts_from_edges(n, edges, acts)

