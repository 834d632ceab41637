import random

from hypothesis import given, strategies as st

from sosbench import fixtures
from sosbench.generate import random_closed, random_tss
from sosbench.semantics import (WILDCARD, build_lts, check_complete, check_conservative_semantic,
                                ground_program, relation_for, standard_provable,
                                supported_provable, ws_provable)
from sosbench.syntax import parse_term, parse_tss
from sosbench.terms import App, Literal, subterms
from sosbench.transform import plus_pipeline, remove_ntyxt, rplus

c, eps, delta = App("c"), App("eps"), App("delta")
SELF_DENIAL = "sig c/0\nact a\nrule r: c -/a-> |- c -a-> c\n"


def term(P, s):
    return parse_term(s, P.signature)


def test_universe_follows_targets():
    P = fixtures.load("inverse")
    ffc = term(P, "f(f(c))")
    G = ground_program(P, [ffc], 3)
    assert {c, term(P, "f(c)"), ffc} <= G.universe


def test_depth_zero_universe_is_subterm_closure():
    P = fixtures.load("bpa")
    t = term(P, "(a+b).c")
    G = ground_program(P, [t], 0)
    consts = {App(k) for k in P.signature.constants()}
    assert G.universe == set(subterms(t)) | consts
    assert not G.instances and not G.expanded


def test_universe_after_one_unfolding():
    P = fixtures.load("bpa")
    G = ground_program(P, [term(P, "(a+b).c")], 1)
    assert {term(P, "eps.c"), delta} <= G.universe
    assert all(WILDCARD not in set(subterms(l.lhs)) for r in G.instances
               for l in r.premises | {r.conclusion})


def test_standard_provable_on_closure():
    Pp = rplus(fixtures.load("closure"))
    fcc = App("f", (c, c))
    lits = standard_provable(ground_program(Pp, [c, fcc], 2))
    assert {Literal(c, "a", c), Literal(c, "b"), Literal(fcc, "a"), Literal(fcc, "b", c)} <= lits
    assert Literal(fcc, "b") not in lits


def test_standard_provable_empty_program():
    P = parse_tss("sig c/0\nact a\n")
    assert standard_provable(ground_program(P, [], 2)) == frozenset()


def test_decency_needed_positive():
    P = fixtures.load("decency-needed")
    assert Literal(c, "a", eps) in standard_provable(ground_program(P, [c], 2))


def test_no_free_variables_supported_and_well_supported():
    P = fixtures.load("no-free-variables")
    G = ground_program(P, [c], 2)
    assert (c, "a") not in supported_provable(G).negative
    assert (c, "a") in supported_provable(G).unknown
    assert (c, "a") in ws_provable(G).negative
    G2 = ground_program(remove_ntyxt(P), [c], 2)
    assert (c, "a") not in supported_provable(G2).negative
    assert (c, "a") in ws_provable(G2).negative


def test_empty_program_refuses_everything():
    P = parse_tss("sig c/0\nact a\n")
    G = ground_program(P, [c], 1)
    assert supported_provable(G).negative == {(c, "a")}
    assert ws_provable(G).negative == {(c, "a")}


def test_no_lookahead_proves_transition():
    P = fixtures.load("no-lookahead")
    fa = term(P, "f(a)")
    G = ground_program(P, [fa], 2)
    for rel in (supported_provable(G), ws_provable(G)):
        assert (fa, "a", eps) in rel.positive


def test_lookahead_variant_diverges():
    P = fixtures.load("no-free-variables-lookahead")
    fc = term(P, "f(c)")
    G = ground_program(P, [fc], 3)
    assert (fc, "a") in ws_provable(G).negative
    assert (fc, "a") in supported_provable(G).unknown


def test_self_denial_is_incomplete():
    P = parse_tss(SELF_DENIAL)
    G = ground_program(P, [c], 1)
    rel = ws_provable(G)
    assert not rel.positive and not rel.negative and rel.unknown == {(c, "a")}
    assert check_complete(G) == (False, [(c, "a")])


def test_completeness():
    P = fixtures.load("bpa")
    assert check_complete(ground_program(P, [term(P, "(a+b).c")], 3))[0]
    assert check_complete(ground_program(parse_tss("sig c/0\nact a\n"), [], 1)) == (True, [])


def test_bpa_lts():
    P = fixtures.load("bpa")
    t = term(P, "(a+b).c")
    L = build_lts(P, [t], 4)
    ec = term(P, "eps.c")
    assert L.successors(t, "a") == [ec] and L.successors(t, "b") == [ec]
    assert L.successors(ec, "c") == [eps]
    assert L.two_valued and L.status(t, "c") == "cannot"


def test_deadlock_lts():
    P = fixtures.load("bpa")
    L = build_lts(P, [delta], 2)
    assert all(L.status(delta, a) == "cannot" for a in P.actions)


def test_priority_trace_chain():
    P = fixtures.load("priority")
    p = term(P, "Theta(a.(b+c)+a.c.d)")
    L = build_lts(P, [p], 5)
    q = [s for s in L.successors(p, "a") if L.successors(s, "c")]
    assert q
    r = L.successors(q[0], "c")
    assert any(L.successors(s, "d") for s in r)
    # c is pre-empted by b after the other a-branch
    first = term(P, "Theta(eps.(b+c))")
    assert first in L.successors(p, "a") and not L.successors(first, "c")


def test_truncated_frontier():
    P = fixtures.load("bpa")
    t = term(P, "a.b.c")
    L = build_lts(P, [t], 1)
    (s,) = L.successors(t, "a")
    assert L.status(s, "b") == "truncated"


def test_relation_notions_agree_on_positive_tss():
    P = fixtures.load("bpa")
    G = ground_program(P, [term(P, "a.b+c")], 3)
    ws = ws_provable(G)
    assert relation_for(G, "s") == ws
    assert relation_for(G, "standard").positive == ws.positive


def test_conservative_semantic():
    bpa, pri = fixtures.load("bpa"), fixtures.load("priority")
    roots = [term(bpa, s) for s in ("a.b+c", "(a+b).c", "eps", "delta.a")]
    assert check_conservative_semantic(bpa, pri, roots, 4) == (True, None)
    assert check_conservative_semantic(bpa, bpa, roots, 4) == (True, None)
    bad = parse_tss(fixtures.text("bpa") + "\nrule e: |- eps -a-> eps\n")
    assert check_conservative_semantic(bpa, bad, [eps], 4) == (False, Literal(eps, "a", eps))
    assert not check_conservative_semantic(bpa, bad, roots, 4)[0]


def _roots(rng):
    return [random_closed(rng, 2) for _ in range(3)]


@given(st.integers(0, 10_000))
def test_supported_below_well_supported(seed):
    rng = random.Random(seed)
    name = rng.choice(fixtures.names())
    P = fixtures.load(name)
    roots = [App(k) for k in P.signature.constants()]
    G = ground_program(P, roots, 2)
    s, ws = supported_provable(G), ws_provable(G)
    assert s.positive <= ws.positive and s.negative <= ws.negative
    assert not ({(t, a) for (t, a, _) in ws.positive} & ws.negative)


@given(st.integers(0, 10_000))
def test_standard_closure_matches_supported(seed):
    rng = random.Random(seed)
    P = random_tss(rng)
    roots = _roots(rng)
    states = {s for r in roots for s in subterms(r)}
    lits = standard_provable(ground_program(plus_pipeline(P)[0], roots, 3))
    sup = supported_provable(ground_program(P, roots, 3))
    assert {(l.lhs, l.action, l.rhs) for l in lits if l.positive and l.lhs in states} == \
        {x for x in sup.positive if x[0] in states}
    assert {(l.lhs, l.action) for l in lits if not l.positive and l.lhs in states} == \
        {x for x in sup.negative if x[0] in states}


@given(st.integers(0, 10_000))
def test_root_verdicts_stable_in_depth(seed):
    rng = random.Random(seed)
    P = random_tss(rng)
    roots = _roots(rng)
    states = {s for r in roots for s in subterms(r)}
    G2, G3 = ground_program(P, roots, 2), ground_program(P, roots, 3)
    states &= G2.expanded & G3.expanded
    a, b = ws_provable(G2), ws_provable(G3)
    assert {x for x in a.positive if x[0] in states} == {x for x in b.positive if x[0] in states}
    assert {x for x in a.negative if x[0] in states} == {x for x in b.negative if x[0] in states}
