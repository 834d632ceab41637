from hypothesis import given, strategies as st

from sosbench import fixtures
from sosbench.terms import (App, Fresh, Literal, Rule, Substitution, Var, alpha_canonical,
                            alpha_equal, alpha_key, apply_subst, closed_terms, dedup_alpha,
                            lhs_vars, match, rhs_vars, subst_term, term_vars, vars_of)
from sosbench.transform import rplus
from strategies import SIG, rules, substitutions, terms

x, y, z, u, w = (Var(n) for n in "xyzuw")
c = App("c")


def f(*a):
    return App("f", a)


def g(*a):
    return App("g", a)


def test_substitution_on_terms():
    assert apply_subst({"x": c}, g(x, x)) == g(c, c)


def test_empty_substitution_is_identity():
    r = Rule("r", frozenset({Literal(x, "a", y)}), Literal(f(x), "a", y))
    assert Substitution()(r) == r


def test_substitution_on_literal():
    lit = Literal(App("+", (x, y)), "a", z)
    s = {"x": App(".", (App("a"), App("b"))), "y": App("delta")}
    assert apply_subst(s, lit) == Literal(App("+", (App(".", (App("a"), App("b"))), App("delta"))),
                                          "a", z)


def test_vars_of_term():
    assert vars_of(App("h", (x, g(y, x)))) == {"x", "y"}


def test_premise_variable_sets_of_sequencing_rules():
    P = fixtures.load("bpa")
    seq1 = next(r for r in P.rules if r.name.startswith("seq1"))
    seq2 = next(r for r in P.rules if r.name.startswith("seq2"))
    assert rhs_vars(seq1) == {"y"}
    assert lhs_vars(seq2) == {"x1", "x2"}


def test_alpha_equal_renaming():
    r1 = Rule("r", frozenset({Literal(x, "a", y)}), Literal(f(x), "a", y))
    r2 = Rule("s", frozenset({Literal(u, "a", w)}), Literal(f(u), "a", w))
    r3 = Rule("t", frozenset({Literal(x, "a", y)}), Literal(f(x), "a", x))
    assert alpha_equal(r1, r2)
    assert not alpha_equal(r1, r3)


def test_closure_canonical_under_different_fresh_names():
    P = fixtures.load("closure")
    a = {alpha_key(r) for r in rplus(P).rules}
    renamed = P.with_rules([apply_subst({"x1": Var("p"), "x2": Var("q"), "y": Var("k")}, r)
                            for r in P.rules])
    b = {alpha_key(r) for r in rplus(renamed).rules}
    assert a == b


def test_match_binds_consistently():
    assert match(g(x, x), g(c, c)) == {"x": c}
    assert match(g(x, x), g(c, f(c))) is None
    assert match(f(x), c) is None


def test_fresh_avoids_names():
    fr = Fresh({"_g0", "_g2"})
    assert [fr(), fr()] == ["_g1", "_g3"]


def test_dedup_alpha():
    r1 = Rule("r", frozenset(), Literal(f(x), "a", x))
    r2 = Rule("s", frozenset(), Literal(f(y), "a", y))
    assert len(dedup_alpha([r1, r2])) == 1


def test_closed_terms_enumeration():
    ts = closed_terms(SIG, 1)
    assert c in ts and f(c) in ts and g(c, App("d")) in ts
    assert all(not term_vars(t) for t in ts)


def _bijection(names):
    return st.permutations(sorted(names)).map(
        lambda perm: {a: Var("r_" + b) for a, b in zip(sorted(names), perm)})


@given(rules(), st.data())
def test_alpha_key_invariant_under_renaming(r, data):
    ren = data.draw(_bijection(vars_of(r)))
    assert alpha_key(apply_subst(ren, r)) == alpha_key(r)


@given(rules())
def test_alpha_canonical_idempotent(r):
    once = alpha_canonical(r)
    assert alpha_canonical(once).shape() == once.shape()
    assert alpha_equal(once, r)


@given(terms(), substitutions(), substitutions())
def test_substitution_composition(t, s1, s2):
    composed = Substitution(s2).compose(Substitution(s1))
    assert composed(t) == subst_term(s2, subst_term(s1, t))


@given(terms(), substitutions())
def test_match_finds_instance(t, s):
    inst = subst_term(s, t)
    m = match(t, inst)
    assert m is not None and subst_term(m, t) == inst


@given(terms())
def test_structural_equality_and_hash(t):
    copy = subst_term({}, t)
    assert copy == t and hash(copy) == hash(t)
