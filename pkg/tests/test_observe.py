import random

import pytest
from hypothesis import given, strategies as st

from sosbench import fixtures
from sosbench.observe import (TOP, Cannot, Conj, DepthError, FormulaSyntaxError, Neg, Prefix,
                              conj, decorated_traces, equivalent, formula_depth, in_sublanguage,
                              lts_from_edges, normalize, observations, parse_formula, prefix,
                              preorder_holds, preorder_modal, print_formula, random_acyclic_lts,
                              satisfies, simulation_preorder)
from sosbench.semantics import build_lts
from sosbench.syntax import parse_term
from sosbench.terms import App

ACTS = ("a", "b")
NOTIONS = ("T", "CT", "F", "R", "FT", "RT", "1S", "RS", "2S", "3S", "B")


def bpa_lts(*texts, depth=6):
    P = fixtures.load("bpa")
    ts = [parse_term(t, P.signature) for t in texts]
    return build_lts(P, ts, depth), ts


def formulas(depth=3):
    atoms = st.one_of(st.just(TOP), st.builds(Cannot, st.sampled_from(ACTS)))
    return st.recursive(atoms, lambda sub: st.one_of(
        st.builds(Prefix, st.sampled_from(ACTS), sub),
        st.builds(lambda ps: Conj(tuple(ps)), st.lists(sub, max_size=3)),
        st.builds(Neg, sub)), max_leaves=6)


# ---- formulas ------------------------------------------------------------

def test_normalize_examples():
    a, b = Prefix("a", TOP), Prefix("b", TOP)
    assert normalize(Conj((TOP, a))) == a
    assert conj() == TOP
    assert normalize(Conj((Conj((b, TOP)), Cannot("a")))) == Conj((Cannot("a"), b))


def test_formula_syntax():
    f = parse_formula("<b><a>tt")
    assert f == prefix("ba")
    assert print_formula(parse_formula("no a & <b>tt")) == "no a & <b>tt"
    assert parse_formula("not (<a>tt & no b)") == Neg(Conj((Prefix("a", TOP), Cannot("b"))))
    with pytest.raises(FormulaSyntaxError):
        parse_formula("<a> &")


def test_sublanguage_examples():
    bb = prefix("bb")
    assert all(in_sublanguage(bb, t) for t in ("T", "FT", "RT", "RS"))
    ready = Conj((Cannot("a"), Prefix("b", TOP)))
    assert in_sublanguage(ready, "R") and not in_sublanguage(ready, "F")
    assert in_sublanguage(Neg(Prefix("a", TOP)), "B")
    assert not in_sublanguage(Neg(Prefix("a", TOP)), "RS")


def test_sublanguage_details():
    completed = prefix("a", Conj((Cannot("a"), Cannot("b"))))
    assert in_sublanguage(completed, "CT", ACTS) and not in_sublanguage(completed, "T")
    assert not in_sublanguage(prefix("a", Cannot("a")), "CT", ACTS)
    with pytest.raises(ValueError):
        in_sublanguage(completed, "CT")
    two = Conj((prefix("ab"), prefix("b")))
    assert not in_sublanguage(two, "T") and in_sublanguage(two, "T^")
    assert in_sublanguage(Conj((Cannot("a"), prefix("b"))), "T^~")
    nested = Prefix("a", Neg(Prefix("b", TOP)))
    assert in_sublanguage(nested, "2S") and not in_sublanguage(nested, "1S")
    assert not in_sublanguage(Neg(nested), "2S") and in_sublanguage(Neg(nested), "3S")


@given(formulas())
def test_normalize_idempotent(f):
    assert normalize(normalize(f)) == normalize(f)


@given(formulas())
def test_print_parse_round_trip(f):
    assert normalize(parse_formula(print_formula(f))) == normalize(f)


SUBSET = (("T", "F"), ("F", "R"), ("F", "FT"), ("R", "RT"), ("FT", "RT"), ("RT", "RS"),
          ("1S", "RS"), ("T", "1S"), ("1S", "2S"), ("2S", "3S"), ("T", "B"))


@given(formulas())
def test_sublanguage_inclusions(f):
    for small, big in SUBSET:
        if in_sublanguage(f, small, ACTS):
            assert in_sublanguage(f, big, ACTS), (small, big)


# ---- satisfaction --------------------------------------------------------

def test_satisfaction_examples():
    L, (t,) = bpa_lts("(a+b).c")
    assert satisfies(L, t, Prefix("a", TOP)) is True
    assert satisfies(L, t, TOP) is True
    assert satisfies(L, t, Prefix("c", TOP)) is False


def test_completed_empty_trace_of_lookahead_fixture():
    P = fixtures.load("lookahead")
    p, q = (parse_term(s, P.signature) for s in ("f(b.d)", "f(b.c+b.d)"))
    L = build_lts(P, [p, q], 4)
    refuse_all = conj(*(Cannot(a) for a in P.actions))
    assert satisfies(L, p, refuse_all) is True
    assert satisfies(L, q, refuse_all) is False


def test_truncated_satisfaction_is_unknown():
    L, (t,) = bpa_lts("a.b.c", depth=1)
    assert satisfies(L, t, prefix("abc")) is None
    assert satisfies(L, t, prefix("b")) is False


# ---- decorated traces ----------------------------------------------------

def test_trace_examples():
    L, (p, q, d) = bpa_lts("a.(b.c+b.d)", "a.b+a.c", "delta")
    assert decorated_traces(L, p, "trace", 3) == {(), ("a",), ("a", "b"), ("a", "b", "c"),
                                                  ("a", "b", "d")}
    assert decorated_traces(L, q, "ready-pair", 1) == {((), frozenset("a")),
                                                       (("a",), frozenset("b")),
                                                       (("a",), frozenset("c"))}
    assert decorated_traces(L, d, "completed", 2) == {()}


def _oracle_traces(edges, s, depth):
    out = {()}
    if depth == 0:
        return out
    for i, a, j in edges:
        if i == s:
            out |= {(a,) + t for t in _oracle_traces(edges, j, depth - 1)}
    return out


def _oracle_ready_traces(edges, s, depth, acts):
    menu = frozenset(a for i, a, _ in edges if i == s)
    out = {(menu,)}
    if depth == 0:
        return out
    for i, a, j in edges:
        if i == s:
            out |= {(menu, a) + t for t in _oracle_ready_traces(edges, j, depth - 1, acts)}
    return out


@given(st.integers(0, 10_000))
def test_traces_against_oracle(seed):
    rng = random.Random(seed)
    n = 5
    edges = [(i, a, j) for i in range(n) for j in range(i + 1, n) for a in ACTS if rng.random() < 0.4]
    L = lts_from_edges(n, edges, ACTS)
    for i in range(n):
        s = App(f"s{i}")
        assert decorated_traces(L, s, "trace", 3) == _oracle_traces(edges, i, 3)
        assert decorated_traces(L, s, "ready-trace", 3) == _oracle_ready_traces(edges, i, 3, ACTS)


# ---- preorders -----------------------------------------------------------

def test_ready_simulation_example():
    P = fixtures.load("lookahead")
    p, q = (parse_term(s, P.signature) for s in ("b.d", "b.c+b.d"))
    L = build_lts(P, [p, q], 4)
    assert preorder_holds(L, p, q, "RS", 4)


def test_one_simulation_example():
    L, (p, q) = bpa_lts("a.(b+c)", "a.b+a.c")
    assert not preorder_holds(L, p, q, "1S", None)
    assert preorder_holds(L, q, p, "1S", None)
    assert (q, p) in simulation_preorder(L, "1S")


def test_reflexivity():
    L, ts = bpa_lts("a.(b+c)", "a.b+a.c", "a.b.c+a.b.d")
    for t in ts:
        for N in NOTIONS:
            assert preorder_holds(L, t, t, N, 4)


def test_equivalence_examples():
    L, (p, q, r, s) = bpa_lts("a.(b+c.d)+a.c", "a.(b+c)+a.c.d", "a.(b+c)+a.b+a.c", "a.b+a.c")
    assert equivalent(L, p, q, "R", 4) and equivalent(L, p, q, "F", 4)
    assert not equivalent(L, p, q, "RT", 4)
    assert equivalent(L, r, s, "FT", 4) and equivalent(L, r, s, "F", 4)
    assert not equivalent(L, r, s, "RT", 4)


def test_modal_examples():
    L, (p, q) = bpa_lts("a.b", "a.c")
    assert preorder_modal(L, p, q, "T", 0)
    P = fixtures.load("ex2")
    fp, fq = (parse_term(s, P.signature) for s in ("f(a.(b.c+b.d))", "f(a.b.c+a.b.d)"))
    L = build_lts(P, [fp, fq], 6)
    abd = prefix("abd")
    assert abd in observations(L, fp, "T", 4)
    assert satisfies(L, fp, abd) and not satisfies(L, fq, abd)
    assert not preorder_modal(L, fp, fq, "T", 4)


def test_simulation_needs_two_valued_fragment():
    P = fixtures.load("no-free-variables")
    L = build_lts(P, [App("c")], 2, notion="s")
    with pytest.raises(ValueError):
        preorder_holds(L, App("c"), App("c"), "T", 2)


@given(st.integers(0, 10_000))
def test_relational_and_modal_routes_agree(seed):
    rng = random.Random(seed)
    L = random_acyclic_lts(rng, 5)
    p, q = rng.sample(sorted(L.states, key=str), 2)
    for N in NOTIONS:
        assert preorder_holds(L, p, q, N, 3) == preorder_modal(L, p, q, N, 3), N


@given(st.integers(0, 10_000), formulas())
def test_preorders_preserve_observations(seed, f):
    rng = random.Random(seed)
    L = random_acyclic_lts(rng, 5)
    p, q = rng.sample(sorted(L.states, key=str), 2)
    d = formula_depth(f)
    for N in ("T", "F", "R", "FT", "RT", "RS", "1S", "2S", "B"):
        if in_sublanguage(f, N, ACTS) and preorder_holds(L, p, q, N, max(d, 1)):
            if satisfies(L, p, f):
                assert satisfies(L, q, f), N
