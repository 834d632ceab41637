"""Hypothesis strategies over the small signature used by the property tests."""

from hypothesis import strategies as st

from sosbench.generate import ACTIONS, SIG
from sosbench.terms import App, Literal, Rule, Var

VARS = ("x", "y", "z", "w")


def terms(names=VARS, max_leaves: int = 8):
    leaves = st.one_of(st.sampled_from([Var(v) for v in names]) if names else st.nothing(),
                       st.sampled_from([App("c"), App("d")]))
    return st.recursive(leaves, lambda sub: st.one_of(
        st.builds(lambda a: App("f", (a,)), sub),
        st.builds(lambda a, b: App("g", (a, b)), sub, sub)), max_leaves=max_leaves)


closed_terms = terms(names=())


def literals(names=VARS):
    return st.one_of(
        st.builds(Literal, terms(names, 4), st.sampled_from(ACTIONS), terms(names, 4)),
        st.builds(Literal, terms(names, 4), st.sampled_from(ACTIONS)))


def rules(names=VARS):
    return st.builds(lambda ps, c: Rule("r", frozenset(ps), c),
                     st.lists(literals(names), max_size=3),
                     st.builds(Literal, terms(names, 4), st.sampled_from(ACTIONS), terms(names, 4)))


def substitutions(names=VARS):
    return st.dictionaries(st.sampled_from(names), terms(names, 4), max_size=len(names))


__all__ = ["SIG", "closed_terms", "literals", "rules", "substitutions", "terms"]
