"""Reader and printer for the line-oriented TSS text format.

    sig f/2 [liquid frozen]
    act a b c sqrt
    ord c < b
    rule NAME: prem, ... |- concl [if COND, ...]

Literals are ``t -a-> u`` and ``t -/a->``. Action metavariables are written
``$v`` and may also appear inside symbol names (``ref_$v``) or stand for the
constant of the same name. A premise of the form ``{ lit : COND, ... }`` is
expanded over every instantiation of the metavariables local to it.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .terms import (App, FuncDecl, Literal, Rule, SideCondition, Signature, Term, Tss,
                    Var, literal_key)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0) -> None:
        super().__init__(f"line {line}, col {col}: {msg}" if line else msg)
        self.msg = msg
        self.line = line
        self.col = col


# Infix binary operators: (precedence, right-associative).
INFIX = {"+": (1, False), "|": (1, False), ".": (2, True), ";": (2, True), "*": (3, True)}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<neg>-/(?P<na>[\w$']+)->)
  | (?P<pos>-(?P<pa>[\w$']+)->)
  | (?P<turn>\|-)
  | (?P<ne>!=)
  | (?P<ident>[\w$']+)
  | (?P<op>[+.;*|])
  | (?P<punct>[(),{}:<])
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int = 0, col0: int = 1) -> list[Tok]:
    out: list[Tok] = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, col0 + i)
        kind = m.lastgroup
        if kind in ("na", "pa"):
            kind = "neg" if m.group("neg") else "pos"
        if kind == "neg":
            out.append(Tok("neg", m.group("na"), col0 + i))
        elif kind == "pos":
            out.append(Tok("pos", m.group("pa"), col0 + i))
        elif kind != "ws":
            out.append(Tok(kind, m.group(0), col0 + i))
        i = m.end()
    out.append(Tok("eof", "", col0 + len(text)))
    return out


# ---- template AST --------------------------------------------------------
# Names may still contain $metavariables; they are resolved on instantiation.

@dataclass(frozen=True)
class TTerm:
    name: str
    args: tuple["TTerm", ...] | None  # None: bare identifier (variable or constant)
    col: int


@dataclass(frozen=True)
class TLit:
    lhs: TTerm
    action: str
    rhs: TTerm | None
    col: int


@dataclass(frozen=True)
class TCond:
    op: str
    left: str
    right: str
    col: int


@dataclass(frozen=True)
class TGroup:
    lit: TLit
    conds: tuple[TCond, ...]
    col: int


class _Parser:
    def __init__(self, toks: list[Tok], line: int) -> None:
        self.toks = toks
        self.i = 0
        self.line = line

    @property
    def cur(self) -> Tok:
        return self.toks[self.i]

    def take(self, kind: str, text: str | None = None) -> Tok:
        t = self.cur
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            got = t.text or "end of line"
            raise ParseError(f"expected {want}, got {got!r}", self.line, t.col)
        self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    def term(self, min_prec: int = 0) -> TTerm:
        left = self.atom()
        while self.cur.kind == "op":
            op = self.cur.text
            prec, right_assoc = INFIX[op]
            if prec < min_prec:
                break
            col = self.cur.col
            self.i += 1
            right = self.term(prec if right_assoc else prec + 1)
            left = TTerm(op, (left, right), col)
        return left

    def atom(self) -> TTerm:
        if self.at("punct", "("):
            self.i += 1
            t = self.term()
            self.take("punct", ")")
            return t
        tok = self.take("ident")
        if self.at("punct", "("):
            self.i += 1
            args = [] if self.at("punct", ")") else [self.term()]
            while self.at("punct", ","):
                self.i += 1
                args.append(self.term())
            self.take("punct", ")")
            return TTerm(tok.text, tuple(args), tok.col)
        return TTerm(tok.text, None, tok.col)

    def literal(self) -> TLit:
        col = self.cur.col
        lhs = self.term()
        if self.at("neg"):
            act = self.take("neg").text
            return TLit(lhs, act, None, col)
        act = self.take("pos").text
        return TLit(lhs, act, self.term(), col)

    def premise(self) -> TLit | TGroup:
        if self.at("punct", "{"):
            col = self.take("punct", "{").col
            lit = self.literal()
            conds: list[TCond] = []
            if self.at("punct", ":"):
                self.i += 1
                conds = self.conditions("}")
            self.take("punct", "}")
            return TGroup(lit, tuple(conds), col)
        return self.literal()

    def condition(self) -> TCond:
        left = self.take("ident")
        if self.at("ne"):
            self.i += 1
            op = "!="
        else:
            self.take("punct", "<")
            op = "<"
        right = self.take("ident")
        return TCond(op, left.text, right.text, left.col)

    def conditions(self, stop: str | None) -> list[TCond]:
        out = [self.condition()]
        while self.at("punct", ","):
            self.i += 1
            out.append(self.condition())
        return out


_META = re.compile(r"\$(\w+)")


def _metas(s: str) -> set[str]:
    return set(_META.findall(s))


def _tterm_metas(t: TTerm) -> set[str]:
    out = _metas(t.name)
    for a in t.args or ():
        out |= _tterm_metas(a)
    return out


def _tlit_metas(l: TLit) -> set[str]:
    out = _tterm_metas(l.lhs) | _metas(l.action)
    if l.rhs is not None:
        out |= _tterm_metas(l.rhs)
    return out


def _cond_metas(c: TCond) -> set[str]:
    return _metas(c.left) | _metas(c.right)


class _Elaborator:
    def __init__(self, sig: Signature, actions: tuple[str, ...],
                 ordering: frozenset[tuple[str, str]], line: int) -> None:
        self.sig = sig
        self.arities = sig.arities
        self.actions = actions
        self.ordering = ordering
        self.line = line

    def subst(self, s: str, b: dict[str, str], col: int) -> str:
        def rep(m: re.Match) -> str:
            if m.group(1) not in b:
                raise ParseError(f"unbound metavariable ${m.group(1)}", self.line, col)
            return b[m.group(1)]
        return _META.sub(rep, s)

    def term(self, t: TTerm, b: dict[str, str]) -> Term:
        name = self.subst(t.name, b, t.col)
        if t.args is None:
            if name in self.arities:
                if self.arities[name] != 0:
                    raise ParseError(f"arity mismatch for {name}: expected {self.arities[name]}, got 0",
                                     self.line, t.col)
                return App(name)
            if "$" in t.name or name in INFIX:
                raise ParseError(f"undeclared symbol {name}", self.line, t.col)
            return Var(name)
        if name not in self.arities:
            raise ParseError(f"undeclared symbol {name}", self.line, t.col)
        if self.arities[name] != len(t.args):
            raise ParseError(f"arity mismatch for {name}: expected {self.arities[name]}, got {len(t.args)}",
                             self.line, t.col)
        return App(name, tuple(self.term(a, b) for a in t.args))

    def action(self, s: str, b: dict[str, str], col: int) -> str:
        a = self.subst(s, b, col)
        if a not in self.actions:
            raise ParseError(f"undeclared action {a}", self.line, col)
        return a

    def literal(self, l: TLit, b: dict[str, str]) -> Literal:
        return Literal(self.term(l.lhs, b), self.action(l.action, b, l.col),
                       None if l.rhs is None else self.term(l.rhs, b))

    def check_cond(self, c: TCond) -> None:
        for side in (c.left, c.right):
            if "$" not in side and side not in self.actions:
                raise ParseError(f"undeclared action {side}", self.line, c.col)
        if c.op == "<" and not self.ordering:
            raise ParseError("side condition uses < but no ordering is declared", self.line, c.col)

    def holds(self, c: TCond, b: dict[str, str]) -> bool:
        left = self.subst(c.left, b, c.col)
        right = self.subst(c.right, b, c.col)
        if c.op == "!=":
            return left != right
        return (left, right) in self.ordering

    def bindings(self, metas: list[str], conds: list[TCond], outer: dict[str, str]):
        for combo in itertools.product(self.actions, repeat=len(metas)):
            b = dict(outer)
            b.update(zip(metas, combo))
            if all(self.holds(c, b) for c in conds):
                yield b


def _transitive(pairs: set[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    closure = set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(closure), repeat=2):
            if b == c and (a, d) not in closure:
                closure.add((a, d))
                changed = True
    return frozenset(closure)


def _split_if(rest: str) -> tuple[str, str | None, int]:
    """Split off a trailing ``if`` clause (outside braces)."""
    depth = 0
    for m in re.finditer(r"[{}]|\bif\b", rest):
        tok = m.group(0)
        if tok == "{":
            depth += 1
        elif tok == "}":
            depth -= 1
        elif depth == 0:
            return rest[:m.start()], rest[m.end():], m.end()
    return rest, None, 0


def parse_tss(text: str) -> Tss:
    """Parse and elaborate a TSS document."""
    funcs: list[FuncDecl] = []
    actions: list[str] = []
    order: set[tuple[str, str]] = set()
    rule_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        word, _, rest = stripped.partition(" ")
        if word == "sig":
            funcs.append(_parse_sig(rest, lineno, indent + 5))
        elif word == "act":
            for a in rest.split():
                if not re.fullmatch(r"[\w']+", a):
                    raise ParseError(f"bad action name {a!r}", lineno, indent + 5)
                if a not in actions:
                    actions.append(a)
        elif word == "ord":
            parts = [p.strip() for p in rest.split("<")]
            if len(parts) < 2 or not all(parts):
                raise ParseError("expected ord a < b", lineno, indent + 5)
            for lo, hi in zip(parts, parts[1:]):
                order.add((lo, hi))
        elif word == "rule":
            rule_lines.append((lineno, line))
        else:
            raise ParseError(f"unknown declaration {word!r}", lineno, indent + 1)
    names = [f.name for f in funcs]
    for n in names:
        if names.count(n) > 1:
            raise ParseError(f"duplicate symbol {n}")
    sig = Signature(tuple(funcs))
    for lo, hi in order:
        for a in (lo, hi):
            if a not in actions:
                raise ParseError(f"undeclared action {a} in ordering")
    ordering = _transitive(order)
    if any(a == b for a, b in ordering):
        raise ParseError("ordering is cyclic")
    rules: list[Rule] = []
    for lineno, line in rule_lines:
        rules.extend(_parse_rule(line, lineno, sig, tuple(actions), ordering))
    seen: set[str] = set()
    for r in rules:
        if r.name in seen:
            raise ParseError(f"duplicate rule name {r.name}")
        seen.add(r.name)
    return Tss(sig, tuple(actions), tuple(rules), ordering)


def _parse_sig(rest: str, lineno: int, col: int) -> FuncDecl:
    m = re.fullmatch(r"\s*(\S+)/(\d+)\s*(?:\[([^\]]*)\])?\s*", rest)
    if not m:
        raise ParseError("expected sig NAME/ARITY [liquid|frozen ...]", lineno, col)
    name, arity = m.group(1), int(m.group(2))
    if not re.fullmatch(r"[\w']+|[+.;*|]", name):
        raise ParseError(f"bad symbol name {name!r}", lineno, col)
    if name in INFIX and arity != 2:
        raise ParseError(f"operator {name} must be binary", lineno, col)
    hint = None
    if m.group(3) is not None:
        marks = m.group(3).split()
        if len(marks) != arity or any(k not in ("liquid", "frozen") for k in marks):
            raise ParseError(f"lambda hint for {name} needs {arity} liquid/frozen marks", lineno, col)
        hint = tuple(k == "liquid" for k in marks)
    return FuncDecl(name, arity, hint)


def _parse_rule(line: str, lineno: int, sig: Signature, actions: tuple[str, ...],
                ordering: frozenset[tuple[str, str]]) -> list[Rule]:
    start = line.index("rule") + 4
    colon = line.find(":", start)
    if colon < 0:
        raise ParseError("expected rule NAME:", lineno, start + 1)
    name = line[start:colon].strip()
    if not name:
        raise ParseError("missing rule name", lineno, start + 1)
    body_start = colon + 1
    body, cond_text, cond_off = _split_if(line[body_start:])
    p = _Parser(tokenize(body, lineno, body_start + 1), lineno)
    premises: list[TLit | TGroup] = []
    if not p.at("turn"):
        premises.append(p.premise())
        while p.at("punct", ","):
            p.i += 1
            premises.append(p.premise())
    p.take("turn")
    concl = p.literal()
    p.take("eof")
    conds: list[TCond] = []
    if cond_text is not None:
        q = _Parser(tokenize(cond_text, lineno, body_start + cond_off + 1), lineno)
        conds = q.conditions(None)
        q.take("eof")

    el = _Elaborator(sig, actions, ordering, lineno)
    for c in conds:
        el.check_cond(c)
    outer: set[str] = _tlit_metas(concl)
    for pr in premises:
        if isinstance(pr, TLit):
            outer |= _tlit_metas(pr)
    for c in conds:
        outer |= _cond_metas(c)
    for pr in premises:
        if isinstance(pr, TGroup):
            for c in pr.conds:
                el.check_cond(c)
    metas = sorted(outer)
    out: list[Rule] = []
    for b in el.bindings(metas, conds, {}):
        lits: list[Literal] = []
        for pr in premises:
            if isinstance(pr, TLit):
                lits.append(el.literal(pr, b))
            else:
                local = sorted((_tlit_metas(pr.lit) | set().union(*map(_cond_metas, pr.conds))) - set(b))
                for b2 in el.bindings(local, list(pr.conds), b):
                    lits.append(el.literal(pr.lit, b2))
        conclusion = el.literal(concl, b)
        if metas:
            label = ",".join(f"{m}={b[m]}" for m in metas)
            out.append(Rule(f"{name}[{label}]", frozenset(lits), conclusion,
                            template=name, binding=tuple((m, b[m]) for m in metas)))
        else:
            out.append(Rule(name, frozenset(lits), conclusion))
    return out


def parse_term(text: str, sig: Signature) -> Term:
    """Parse a term; identifiers that are not declared symbols are variables."""
    p = _Parser(tokenize(text, 1), 1)
    t = p.term()
    p.take("eof")
    return _Elaborator(sig, (), frozenset(), 1).term(t, {})


# ---- printing ------------------------------------------------------------

def print_term(t: Term, prec: int = 0) -> str:
    if isinstance(t, Var):
        return t.name
    if t.head in INFIX and len(t.args) == 2:
        p, right_assoc = INFIX[t.head]
        lp, rp = (p + 1, p) if right_assoc else (p, p + 1)
        s = f"{print_term(t.args[0], lp)}{t.head}{print_term(t.args[1], rp)}"
        return f"({s})" if p < prec else s
    if not t.args:
        return t.head
    return f"{t.head}({', '.join(print_term(a) for a in t.args)})"


def print_literal(l: Literal) -> str:
    if l.rhs is None:
        return f"{print_term(l.lhs)} -/{l.action}->"
    return f"{print_term(l.lhs)} -{l.action}-> {print_term(l.rhs)}"


def print_rule(r: Rule) -> str:
    prem = ", ".join(print_literal(p) for p in sorted(r.premises, key=literal_key))
    body = f"{prem} |- {print_literal(r.conclusion)}" if prem else f"|- {print_literal(r.conclusion)}"
    return f"rule {r.name}: {body}"


def print_tss(P: Tss) -> str:
    lines = []
    for f in P.signature.functions:
        hint = ""
        if f.lambda_hint is not None and f.arity:
            hint = " [" + " ".join("liquid" if h else "frozen" for h in f.lambda_hint) + "]"
        lines.append(f"sig {f.name}/{f.arity}{hint}")
    if P.actions:
        lines.append("act " + " ".join(P.actions))
    for lo, hi in sorted(P.ordering):
        lines.append(f"ord {lo} < {hi}")
    lines.extend(print_rule(r) for r in P.rules)
    return "\n".join(lines) + "\n"
