import pytest
from hypothesis import given

from sosbench import fixtures
from sosbench.generate import random_tss
from sosbench.syntax import ParseError, parse_term, parse_tss, print_rule, print_term, print_tss
from sosbench.terms import App, alpha_key
from strategies import SIG, closed_terms, terms


@pytest.mark.parametrize("name", fixtures.names())
def test_fixture_round_trip(name):
    P = fixtures.load(name)
    Q = parse_tss(print_tss(P))
    assert Q.signature == P.signature
    assert Q.actions == P.actions
    assert {alpha_key(r) for r in Q.rules} == {alpha_key(r) for r in P.rules}


def test_bpa_template_expansion():
    P = fixtures.load("bpa")
    assert P.actions == ("a", "b", "c", "d", "sqrt")
    atom = [r for r in P.rules if r.name.startswith("atom")]
    # one axiom per action other than termination
    assert len(atom) == 4
    seq1 = [r for r in P.rules if r.name.startswith("seq1")]
    seq2 = [r for r in P.rules if r.name.startswith("seq2")]
    assert len(seq1) == 4 and len(seq2) == 5
    assert len([r for r in P.rules if r.name.startswith("alt")]) == 10


def test_priority_template_expansion():
    P = fixtures.load("priority")
    pri = [r for r in P.rules if r.name.startswith("pri")]
    assert len(pri) == 5
    by_name = {r.name: r for r in pri}
    neg = [p for p in by_name["pri[v=c]"].premises if not p.positive]
    assert [(str(p.lhs), p.action) for p in neg] == [("x", "b")]
    assert all(not any(not p.positive for p in r.premises)
               for n, r in by_name.items() if n != "pri[v=c]")


def test_empty_rule_section():
    P = parse_tss("sig c/0\nact a\n")
    assert P.rules == () and P.standard and P.positive


def test_infix_printing():
    P = fixtures.load("bpa")
    t = parse_term("(a+b).c", P.signature)
    assert t == App(".", (App("+", (App("a"), App("b"))), App("c")))
    assert print_term(t) == "(a+b).c"


@pytest.mark.parametrize("text", ["sig c/0\nact a\nrule r: |- c -a->", "sig c/0\nrule r c",
                                  "sig f/1\nact a\nrule r: |- f(x, x) -a-> x"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_tss(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError, match="line 3"):
        parse_tss("sig c/0\nact a\nrule r: |- c -a-> f(c)")


@given(terms())
def test_term_round_trip(t):
    assert parse_term(print_term(t), SIG) == t


def test_random_tss_round_trip():
    import random
    rng = random.Random(3)
    for _ in range(50):
        P = random_tss(rng)
        Q = parse_tss(print_tss(P))
        assert [print_rule(r) for r in Q.rules] == [print_rule(r) for r in P.rules]
