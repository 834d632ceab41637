"""Random small TSSs, terms and formulas for property checks."""

from __future__ import annotations

import random

from .observe import TOP, Cannot, Formula, Prefix, conj
from .terms import App, FuncDecl, Literal, Rule, Signature, Term, Tss, Var, term_vars

SIG = Signature((FuncDecl("c", 0), FuncDecl("d", 0), FuncDecl("f", 1), FuncDecl("g", 2)))
ACTIONS = ("a", "b")


def random_target(rng: random.Random, names: list[str], height: int = 1) -> Term:
    leaves: list[Term] = [Var(v) for v in names] + [App("c"), App("d")]
    if height <= 0 or rng.random() < 0.6:
        return rng.choice(leaves)
    f = rng.choice(["f", "g"])
    arity = 1 if f == "f" else 2
    return App(f, tuple(random_target(rng, names, height - 1) for _ in range(arity)))


def random_tss(rng: random.Random, negative: bool = True, max_rules: int = 3) -> Tss:
    """A standard TSS of decent nxyft rules over a fixed small signature."""
    rules: list[Rule] = []
    for decl in SIG.functions:
        xs = [f"x{i}" for i in range(1, decl.arity + 1)]
        src = App(decl.name, tuple(Var(x) for x in xs))
        for k in range(rng.randint(0, max_rules)):
            prems = []
            ys = []
            if xs:
                for j in range(rng.randint(0, 2)):
                    x = Var(rng.choice(xs))
                    a = rng.choice(ACTIONS)
                    if negative and rng.random() < 0.3:
                        prems.append(Literal(x, a))
                    else:
                        y = f"y{j}"
                        ys.append(y)
                        prems.append(Literal(x, a, Var(y)))
            target = random_target(rng, xs + ys)
            rules.append(Rule(f"{decl.name}{k}", frozenset(prems),
                              Literal(src, rng.choice(ACTIONS), target)))
    return Tss(SIG, ACTIONS, tuple(rules))


def random_closed(rng: random.Random, height: int = 1) -> Term:
    return random_target(rng, [], height)


def random_open(rng: random.Random, names: tuple[str, ...] = ("x",), height: int = 2) -> Term:
    """An open term mentioning at least one of the given variables."""
    while True:
        t = random_target(rng, list(names), height)
        if isinstance(t, App) and term_vars(t):
            return t


def random_rs_formula(rng: random.Random, depth: int = 2, actions: tuple[str, ...] = ACTIONS,
                      top: bool = False) -> Formula:
    """A ready simulation observation of bounded depth."""
    if depth <= 0:
        return TOP
    roll = rng.random() if top else 0.2 + 0.8 * rng.random()
    if roll < 0.2:
        return TOP
    if roll < 0.4:
        return Cannot(rng.choice(actions))
    if roll < 0.8:
        return Prefix(rng.choice(actions), random_rs_formula(rng, depth - 1, actions, True))
    return conj(random_rs_formula(rng, depth, actions, True),
                random_rs_formula(rng, depth - 1, actions, True))
