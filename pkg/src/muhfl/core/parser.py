"""Text syntax for sorts, formulas and equation systems.

Parsing happens in two stages: a raw tree is built without knowing which
identifiers are integers, then it is elaborated against the sort
environment, which decides App vs AppInt, renames clashing binders and
reports sort errors with positions.
"""
from __future__ import annotations

import re
from typing import Optional

from .desugar import desugar
from .errors import HflTypeError, ParseError, UnboundVariable
from .names import NameSupply
from .printer import formula_text
from .sorts import INT, PROP, Arrow, IntSort, Product, Sort, sort_text, split_arrows
from .syntax import (
    FALSE, TRUE, Abs, Add, And, App, AppInt, Cmp, Exists, IVar, Le, Lit, Mu,
    Mul, Or, Tuple, Var, neg,
)
from .system import Definition, EquationSystem

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<dir>%[A-Z]+)
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_$][A-Za-z0-9_$@']*)
  | (?P<op>\\/|/\\|<=|>=|->|\[\+\]|\[\*\]|[\\<>=+\-*().,:;])
    """,
    re.VERBOSE,
)

KEYWORDS = {"mu", "exists", "true", "false", "int", "prop"}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int) -> None:
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self) -> str:
        return f"{self.text!r}@{self.line}:{self.col}"


def tokenize(text: str, keywords=KEYWORDS) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if kind == "id" and tok in keywords:
                kind = "kw"
            out.append(Token(kind, tok, line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "<end of input>", line, pos - line_start + 1))
    return out


class TokenStream:
    def __init__(self, tokens: list[Token]) -> None:
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        return self.cur.text in texts and self.cur.kind in ("op", "kw", "dir")

    def advance(self) -> Token:
        t = self.cur
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Token:
        if self.cur.kind != "id":
            self.fail("expected an identifier")
        return self.advance()

    def fail(self, msg: str):
        t = self.cur
        raise ParseError(f"{msg}, found {t.text!r}", t.line, t.col)


# raw trees: tuples (tag, pos, *fields)

def parse_sort_tokens(ts: TokenStream) -> Sort:
    lhs = _sort_atom(ts)
    if ts.at("->"):
        ts.advance()
        res = parse_sort_tokens(ts)
        if isinstance(res, IntSort):
            ts.fail("arrow result must not be int")
        return Arrow(lhs, res)
    return lhs


def _sort_atom(ts: TokenStream) -> Sort:
    t = ts.cur
    if t.kind == "kw" and t.text == "int":
        ts.advance()
        return INT
    if t.kind == "kw" and t.text == "prop":
        ts.advance()
        return PROP
    if ts.at("("):
        ts.advance()
        items = [parse_sort_tokens(ts)]
        while ts.at("*"):
            ts.advance()
            items.append(parse_sort_tokens(ts))
        ts.expect(")")
        if len(items) == 1:
            return items[0]
        try:
            return Product(tuple(items))
        except ValueError as exc:
            raise ParseError(str(exc), t.line, t.col) from None
    ts.fail("expected a sort")


class RawParser:
    """Recursive descent over the shared formula/integer grammar."""

    BINDER_WORDS = ("mu", "exists", "\\")

    def __init__(self, ts: TokenStream) -> None:
        self.ts = ts
        self.in_tuple = False

    def pos(self):
        return (self.ts.cur.line, self.ts.cur.col)

    def formula(self):
        if self.ts.at(*self.BINDER_WORDS):
            return self.binder()
        return self.disj()

    def binder(self):
        ts = self.ts
        p = self.pos()
        word = ts.advance().text
        name = ts.ident().text
        if word == "exists":
            sort = None
            if ts.at(":"):
                ts.advance()
                sort = parse_sort_tokens(ts)
                if sort != INT:
                    raise ParseError("exists binds an integer", *p)
            ts.expect(".")
            return ("exists", p, name, self.formula())
        ts.expect(":")
        sort = parse_sort_tokens(ts)
        ts.expect(".")
        return ("mu" if word == "mu" else "lam", p, name, sort, self.formula())

    def _operand(self, sub):
        if self.ts.at(*self.BINDER_WORDS):
            return self.binder()
        return sub()

    def disj(self):
        lhs = self.conj()
        while self.ts.at("\\/"):
            p = self.pos()
            self.ts.advance()
            lhs = ("or", p, lhs, self._operand(self.conj))
        return lhs

    def conj(self):
        lhs = self.cmp()
        while self.ts.at("/\\"):
            p = self.pos()
            self.ts.advance()
            lhs = ("and", p, lhs, self._operand(self.cmp))
        return lhs

    def cmp(self):
        lhs = self.arith()
        ops = ("<=", "<", "=", ">=") if self.in_tuple else ("<=", "<", "=", ">", ">=")
        if self.ts.at(*ops):
            p = self.pos()
            op = self.ts.advance().text
            return ("cmp", p, op, lhs, self.arith())
        return lhs

    def arith(self):
        lhs = self.term()
        while self.ts.at("+", "-"):
            p = self.pos()
            op = self.ts.advance().text
            lhs = ("bin", p, op, lhs, self.term())
        return lhs

    def term(self):
        lhs = self.unary()
        while self.ts.at("*"):
            p = self.pos()
            self.ts.advance()
            lhs = ("bin", p, "*", lhs, self.unary())
        return lhs

    def unary(self):
        if self.ts.at("-"):
            p = self.pos()
            self.ts.advance()
            return ("neg", p, self.unary())
        return self.app()

    def _starts_atom(self) -> bool:
        t = self.ts.cur
        if t.kind in ("id", "num"):
            return True
        if t.kind == "kw" and t.text in ("true", "false"):
            return True
        return self.ts.at("(", "<", "\\", "mu", "exists")

    def app(self):
        head = self.atom()
        while self._starts_atom():
            p = self.pos()
            if self.ts.at("<"):
                arg = self.try_tuple()
                if arg is None:
                    break
            elif self.ts.at(*self.BINDER_WORDS):
                arg = self.binder()
            else:
                arg = self.atom()
            head = ("app", p, head, arg)
        return head

    def try_tuple(self):
        save = self.ts.i
        try:
            return self.tuple_()
        except ParseError:
            self.ts.i = save
            return None

    def tuple_(self):
        # a top-level '>' inside a component closes the tuple
        p = self.pos()
        self.ts.expect("<")
        outer, self.in_tuple = self.in_tuple, True
        try:
            items = [self.formula()]
            if not self.ts.at(","):
                self.ts.fail("expected ','")
            while self.ts.at(","):
                self.ts.advance()
                items.append(self.formula())
        finally:
            self.in_tuple = outer
        self.ts.expect(">")
        return ("tuple", p, items)

    def atom(self):
        ts = self.ts
        t = ts.cur
        p = (t.line, t.col)
        if t.kind == "id":
            ts.advance()
            return ("var", p, t.text)
        if t.kind == "num":
            ts.advance()
            return ("num", p, int(t.text))
        if t.kind == "kw" and t.text in ("true", "false"):
            ts.advance()
            return (t.text, p)
        if ts.at("("):
            ts.advance()
            outer, self.in_tuple = self.in_tuple, False
            inner = self.formula()
            self.in_tuple = outer
            ts.expect(")")
            return inner
        if ts.at("<"):
            return self.tuple_()
        if ts.at(*self.BINDER_WORDS):
            return self.binder()
        ts.fail("expected a formula")


class Elaborator:
    """Turns raw trees into Formula/IntExpr using sort information."""

    def __init__(self, supply: Optional[NameSupply] = None) -> None:
        self.supply = supply or NameSupply()

    def _bind(self, name: str, env: dict) -> str:
        if name in env or self.supply.used(name):
            return self.supply.fresh(name)
        self.supply.reserve([name])
        return name

    def int_expr(self, raw, env: dict, ren: dict):
        tag, p = raw[0], raw[1]
        if tag == "num":
            return Lit(raw[2])
        if tag == "var":
            name = ren.get(raw[2], raw[2])
            s = env.get(name)
            if s is None:
                raise UnboundVariable(raw[2], location=p)
            if not isinstance(s, IntSort):
                raise HflTypeError(f"{raw[2]} used as an integer", INT, s, location=p)
            return IVar(name)
        if tag == "neg":
            return neg(self.int_expr(raw[2], env, ren))
        if tag == "bin":
            op = raw[2]
            a = self.int_expr(raw[3], env, ren)
            b = self.int_expr(raw[4], env, ren)
            if op == "+":
                return Add(a, b)
            if op == "*":
                return Mul(a, b)
            return Add(a, neg(b) if isinstance(b, Lit) else Mul(Lit(-1), b))
        raise HflTypeError("expected an integer expression", location=p)

    def formula(self, raw, env: dict, ren: dict):
        """Returns (formula, sort)."""
        tag, p = raw[0], raw[1]
        if tag == "true":
            return TRUE, PROP
        if tag == "false":
            return FALSE, PROP
        if tag == "var":
            name = ren.get(raw[2], raw[2])
            s = env.get(name)
            if s is None:
                raise UnboundVariable(raw[2], location=p)
            if isinstance(s, IntSort):
                raise HflTypeError(f"integer variable {raw[2]} used as a formula", "a predicate", INT, location=p)
            return Var(name), s
        if tag in ("num", "neg", "bin"):
            raise HflTypeError("integer expression used as a formula", "a formula", "an integer", location=p)
        if tag == "cmp":
            a = self.int_expr(raw[3], env, ren)
            b = self.int_expr(raw[4], env, ren)
            return (Le(a, b) if raw[2] == "<=" else Cmp(raw[2], a, b)), PROP
        if tag in ("or", "and"):
            lhs, ls = self.formula(raw[2], env, ren)
            rhs, rs = self.formula(raw[3], env, ren)
            for s in (ls, rs):
                if s != PROP:
                    raise HflTypeError(f"operand of {tag}", PROP, sort_text(s), location=p)
            return (Or if tag == "or" else And)(lhs, rhs), PROP
        if tag == "app":
            fun, fs = self.formula(raw[2], env, ren)
            if not isinstance(fs, Arrow):
                raise HflTypeError("applying a non-function", "an arrow sort", sort_text(fs), location=p)
            if isinstance(fs.arg, IntSort):
                return AppInt(fun, self.int_expr(raw[3], env, ren)), fs.res
            arg, s = self.formula(raw[3], env, ren)
            if s != fs.arg:
                raise HflTypeError("argument sort", sort_text(fs.arg), sort_text(s), location=p)
            return App(fun, arg), fs.res
        if tag == "tuple":
            items = [self.formula(r, env, ren) for r in raw[2]]
            for _, s in items:
                if isinstance(s, (Product, IntSort)):
                    raise HflTypeError("bad tuple component", "a predicate sort", sort_text(s), location=p)
            return Tuple(tuple(f for f, _ in items)), Product(tuple(s for _, s in items))
        if tag == "exists":
            new = self._bind(raw[2], env)
            inner = dict(env)
            inner[new] = INT
            body, s = self.formula(raw[3], inner, {**ren, raw[2]: new})
            if s != PROP:
                raise HflTypeError("body of exists", PROP, sort_text(s), location=p)
            return Exists(new, body), PROP
        if tag in ("lam", "mu"):
            sort = raw[3]
            if tag == "mu" and isinstance(sort, IntSort):
                raise HflTypeError("mu binder of sort int", "a predicate sort", INT, location=p)
            new = self._bind(raw[2], env)
            inner = dict(env)
            inner[new] = sort
            body, s = self.formula(raw[4], inner, {**ren, raw[2]: new})
            if tag == "lam":
                return Abs(new, sort, body), Arrow(sort, s)
            if s != sort:
                raise HflTypeError(f"body of mu {raw[2]}", sort_text(sort), sort_text(s), location=p)
            return Mu(new, sort, body), sort
        raise HflTypeError(f"unexpected {tag}", location=p)


def parse_sort(text: str) -> Sort:
    ts = TokenStream(tokenize(text))
    s = parse_sort_tokens(ts)
    if ts.cur.kind != "eof":
        ts.fail("trailing input")
    return s


def parse_formula_with_sort(text: str, env: Optional[dict] = None, supply: Optional[NameSupply] = None):
    env = dict(env or {})
    ts = TokenStream(tokenize(text))
    raw = RawParser(ts).formula()
    if ts.cur.kind != "eof":
        ts.fail("trailing input")
    supply = supply or NameSupply(env)
    supply.reserve(env)
    f, s = Elaborator(supply).formula(raw, env, {})
    return desugar(f), s


def parse_formula(text: str, env: Optional[dict] = None, supply: Optional[NameSupply] = None):
    return parse_formula_with_sort(text, env, supply)[0]


def parse_int_expr(text: str, env: Optional[dict] = None):
    env = dict(env or {})
    ts = TokenStream(tokenize(text))
    raw = RawParser(ts).arith()
    if ts.cur.kind != "eof":
        ts.fail("trailing input")
    return Elaborator(NameSupply(env)).int_expr(raw, env, {})


# equation systems

def parse_system(text: str) -> EquationSystem:
    ts = TokenStream(tokenize(text))
    env: dict = {}
    raw_defs = []
    raw_main = None
    maxar = None
    ts.expect("%ENV")
    while ts.cur.kind == "id":
        t = ts.advance()
        ts.expect(":")
        s = parse_sort_tokens(ts)
        ts.expect(";")
        if t.text in env:
            raise ParseError(f"duplicate declaration of {t.text}", t.line, t.col)
        env[t.text] = s
    ts.expect("%DEFS")
    while ts.cur.kind == "id":
        t = ts.advance()
        pats = []
        while not ts.at("="):
            if ts.at("<"):
                ts.advance()
                names = [ts.ident().text]
                while ts.at(","):
                    ts.advance()
                    names.append(ts.ident().text)
                ts.expect(">")
                pats.append(tuple(names))
            else:
                pats.append(ts.ident().text)
        ts.expect("=")
        if not (ts.cur.kind == "kw" and ts.cur.text == "mu"):
            ts.fail("expected '=mu'")
        ts.advance()
        body = RawParser(ts).formula()
        ts.expect(";")
        raw_defs.append((t, pats, body))
    ts.expect("%MAIN")
    mp = (ts.cur.line, ts.cur.col)
    raw_main = RawParser(ts).formula()
    ts.expect(";")
    if ts.at("%MAXAR"):
        ts.advance()
        if ts.cur.kind != "num":
            ts.fail("expected an integer")
        maxar = int(ts.advance().text)
        ts.expect(";")
    if ts.cur.kind != "eof":
        ts.fail("trailing input")

    defs = []
    seen = set()
    for t, pats, raw in raw_defs:
        loc = (t.line, t.col)
        if t.text not in env:
            raise UnboundVariable(t.text, location=loc)
        if t.text in seen:
            raise ParseError(f"duplicate definition of {t.text}", *loc)
        seen.add(t.text)
        args, res = split_arrows(env[t.text])
        if len(pats) > len(args):
            raise HflTypeError(f"too many parameters for {t.text}", location=loc)
        params = []
        local = dict(env)
        for pat, s in zip(pats, args):
            if isinstance(pat, tuple):
                if not isinstance(s, Product) or len(s.components) != len(pat):
                    raise HflTypeError(f"tuple pattern for {t.text}", sort_text(s), f"{len(pat)} components", location=loc)
                for n, c in zip(pat, s.components):
                    local[n] = c
            else:
                local[pat] = s
            params.append((pat, s))
        names = [n for pat, _ in params for n in (pat if isinstance(pat, tuple) else (pat,))]
        if len(set(names)) != len(names) or set(names) & env.keys():
            raise ParseError(f"parameter names of {t.text} clash", *loc)
        supply = NameSupply(local)
        body, s = Elaborator(supply).formula(raw, local, {})
        expected = res
        for a in reversed(args[len(pats):]):
            expected = Arrow(a, expected)
        if s != expected:
            raise HflTypeError(f"body of {t.text}", sort_text(expected), sort_text(s), location=loc)
        defs.append(Definition(t.text, tuple(params), desugar(body)))
    missing = [n for n in env if n not in seen]
    if missing:
        raise ParseError(f"declared but not defined: {', '.join(missing)}")
    main, s = Elaborator(NameSupply(env)).formula(raw_main, env, {})
    if s != PROP:
        raise HflTypeError("main formula", PROP, sort_text(s), location=mp)
    return EquationSystem(env, tuple(defs), desugar(main), maxar)


def _pattern_text(pat) -> str:
    return "<" + ", ".join(pat) + ">" if isinstance(pat, tuple) else pat


def system_text(es: EquationSystem) -> str:
    lines = ["%ENV"]
    for name, s in es.env.items():
        lines.append(f"{name} : {sort_text(s)};")
    lines.append("%DEFS")
    for d in es.defs:
        head = " ".join([d.name] + [_pattern_text(p) for p, _ in d.params])
        lines.append(f"{head} =mu {formula_text(d.body)};")
    lines.append(f"%MAIN {formula_text(es.main)};")
    if es.maxar is not None:
        lines.append(f"%MAXAR {es.maxar};")
    return "\n".join(lines) + "\n"
