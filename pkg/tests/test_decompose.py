import random

import pytest
from hypothesis import given, settings, strategies as st

from sosbench import fixtures
from sosbench.decompose import (check_inverse_lemma, default_contexts, derive_ruloids,
                                fuzz_precongruence, inverse, plus_of, precongruence_test,
                                preservation_report)
from sosbench.generate import random_closed, random_open, random_rs_formula, random_tss
from sosbench.observe import TOP, in_sublanguage, normalize, parse_formula, prefix
from sosbench.syntax import parse_term
from sosbench.terms import App, Literal, Var


def term(P, s):
    return parse_term(s, P.signature)


# ---- ruloids -------------------------------------------------------------

def test_nested_ruloid():
    P = fixtures.load("inverse")
    (r,) = derive_ruloids(plus_of(P), term(P, "f(f(x))"), "b")
    (prem,) = r.premises
    assert prem.lhs == Var("x") and prem.action == "b" and prem.positive
    assert r.target == App("f", (prem.rhs,))


def test_single_step_ruloid():
    P = fixtures.load("inverse")
    (r,) = derive_ruloids(plus_of(P), term(P, "f(y)"), "a")
    (prem,) = r.premises
    assert prem.lhs == Var("y") and prem.action == "b"
    (neg,) = derive_ruloids(plus_of(P), term(P, "f(y)"), "a", positive=False)
    assert neg.premises == frozenset({Literal(Var("y"), "b")})


def test_variable_default_ruloid():
    P = fixtures.load("inverse")
    (r,) = derive_ruloids(plus_of(P), Var("x"), "a")
    (prem,) = r.premises
    assert prem.lhs == Var("x") and prem.action == "a" and r.target == prem.rhs


def test_ruloids_need_standard_tss():
    P = fixtures.load("inverse")
    with pytest.raises(ValueError):
        plus_of(plus_of(P))


# ---- inverse -------------------------------------------------------------

def test_inverse_example():
    P = fixtures.load("inverse")
    (psi,) = inverse(P, term(P, "f(f(x))"), parse_formula("<b><a>tt"))
    assert psi("x") == normalize(parse_formula("<b><b>tt"))


@pytest.mark.parametrize("t", ["x", "f(x)", "f(f(x))", "c"])
def test_inverse_of_top(t):
    P = fixtures.load("inverse")
    (psi,) = inverse(P, term(P, t), TOP)
    assert all(f == TOP for _, f in psi.assignments)


def test_inverse_of_variable():
    P = fixtures.load("inverse")
    (psi,) = inverse(P, Var("x"), prefix("a"))
    assert psi("x") == prefix("a")


def test_inverse_rejects_negation():
    P = fixtures.load("inverse")
    with pytest.raises(ValueError):
        inverse(P, Var("x"), parse_formula("not <a>tt"))


def test_inverse_check_on_example():
    P = fixtures.load("inverse")
    universe = [term(P, s) for s in ("c", "f(c)", "f(f(c))")]
    for f in ("<b><a>tt", "tt", "no a", "<a>(no b)", "<b>tt & no a"):
        r = check_inverse_lemma(P, term(P, "f(f(x))"), parse_formula(f), universe)
        assert r.ok and not r.inconclusive, f


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_inverse_check_on_random_tss(seed):
    rng = random.Random(seed)
    P = random_tss(rng)
    t = random_open(rng, ("x", "y"))
    f = random_rs_formula(rng, 2)
    universe = {random_closed(rng, 1) for _ in range(4)}
    r = check_inverse_lemma(P, t, f, universe)
    assert r.ok, r.mismatches


# ---- preservation --------------------------------------------------------

def test_preservation_priority():
    P = fixtures.load("priority")
    for f in ("<a><b>tt", "<b>(no c & <a>tt)", "no b & <c>tt"):
        r = preservation_report(P, "ready-trace", term(P, "Theta(x)"), parse_formula(f))
        assert r.format_holds and r.ok, f
        assert all(in_sublanguage(e.formula, "RT^") for e in r.entries)


def test_preservation_of_top():
    P = fixtures.load("priority")
    r = preservation_report(P, "ready-trace", term(P, "Theta(x)"), TOP)
    assert r.ok and all(e.formula == TOP for e in r.entries)


def test_preservation_counterexample():
    P = fixtures.load("ex3")
    r = preservation_report(P, "readiness", term(P, "f(x)"), prefix("abcd"))
    assert not r.format_holds and not r.ok
    (e,) = r.entries
    assert e.formula == normalize(parse_formula("<a>(<b>tt & <c><d>tt)"))
    assert not in_sublanguage(e.formula, "R^")


# ---- precongruence -------------------------------------------------------

def _ex2_pair(P):
    return [(term(P, "a.(b.c+b.d)"), term(P, "a.b.c+a.b.d"))]


def test_precongruence_counterexample():
    P = fixtures.load("ex2")
    r = precongruence_test(P, "RT", [term(P, "f(x)")], _ex2_pair(P), 5)
    assert not r.ok and r.counterexample[0] == term(P, "f(x)")


def test_identity_context_passes():
    P = fixtures.load("ex2")
    r = precongruence_test(P, "RT", [Var("x")], _ex2_pair(P), 5)
    assert r.ok and r.checked == 1


def test_unrelated_pairs_are_skipped():
    P = fixtures.load("ex2")
    r = precongruence_test(P, "T", [term(P, "f(x)")], [(term(P, "a"), term(P, "b"))], 3)
    assert r.ok and r.checked == 0 and r.skipped == 1


def test_default_contexts_cover_every_operator():
    P = fixtures.load("priority")
    ctx = default_contexts(P, random.Random(0))
    heads = {c.head for c in ctx}
    assert {"+", ".", "Theta"} <= heads


def test_fuzz_passes_on_format_and_fails_on_violator():
    assert fuzz_precongruence(fixtures.load("initial-priority"), "F", depth=4, seed=3,
                              n_terms=6, n_pairs=3).ok
    assert not fuzz_precongruence(fixtures.load("priority"), "T", depth=4, seed=31).ok


def test_fuzz_is_deterministic():
    P = fixtures.load("bpa")
    assert fuzz_precongruence(P, "RS", seed=5, n_terms=6) == fuzz_precongruence(P, "RS", seed=5, n_terms=6)
