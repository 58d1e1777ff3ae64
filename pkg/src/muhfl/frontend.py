"""Call-by-name game terms with angelic/demonic choice and their translation
to formulas: unit is FALSE, fail is TRUE, fix is mu, demonic choice is
conjunction, angelic choice is disjunction and assume is a guard.

Surface syntax (``.term`` files)::

    M ::= \\x : s. M | fix f : s. M | assume c; M | assert c [; M]
        | if c then M else M | M [+] M | M [*] M | M M | M e
        | () | fail | x | (M)
    s ::= int | unit | s -> s
    c ::= e <= e | e < e | e = e | e > e | e >= e

``[+]`` is angelic (the player picks), ``[*]`` demonic.  ``if`` and
``assert`` are sugar over ``assume`` and angelic choice.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .core.errors import HflTypeError, NotClosed, NotUnit, ParseError, UnboundVariable
from .core.parser import TokenStream, tokenize
from .core.printer import int_text
from .core.sorts import INT, PROP, Arrow, IntSort, Sort
from .core.syntax import (
    FALSE, TRUE, Abs, Add, And, App, AppInt, Formula, IntExpr, IVar, Le, Lit, Mu,
    Mul, Or, Var, neg, plus,
)


# sorts

@dataclass(frozen=True)
class UnitSort:
    def __str__(self) -> str:
        return "unit"


@dataclass(frozen=True)
class TArrow:
    arg: "TermSort"
    res: "TermSort"

    def __post_init__(self) -> None:
        if isinstance(self.res, IntSort):
            raise ValueError("a function type cannot return int")

    def __str__(self) -> str:
        a = f"({self.arg})" if isinstance(self.arg, TArrow) else str(self.arg)
        return f"{a} -> {self.res}"


UNIT = UnitSort()
TermSort = Union[IntSort, UnitSort, TArrow]


def term_order(s: TermSort) -> int:
    if isinstance(s, IntSort):
        return -1
    if isinstance(s, UnitSort):
        return 0
    return max(term_order(s.res), term_order(s.arg) + 1)


def to_sort(s: TermSort) -> Sort:
    if isinstance(s, IntSort):
        return INT
    if isinstance(s, UnitSort):
        return PROP
    return Arrow(to_sort(s.arg), to_sort(s.res))


# terms

class Term:
    pass


@dataclass(frozen=True)
class Unit(Term):
    pass


@dataclass(frozen=True)
class Err(Term):
    pass


@dataclass(frozen=True)
class TVar(Term):
    name: str


@dataclass(frozen=True)
class TAbs(Term):
    name: str
    sort: TermSort
    body: Term


@dataclass(frozen=True)
class TApp(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class TAppInt(Term):
    fun: Term
    arg: IntExpr


@dataclass(frozen=True)
class Fix(Term):
    name: str
    body: Term
    sort: TermSort


@dataclass(frozen=True)
class Demonic(Term):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Angelic(Term):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Assume(Term):
    guard: tuple  # (e1, e2) meaning e1 <= e2
    body: Term


def _int_vars(e: IntExpr) -> set:
    if isinstance(e, IVar):
        return {e.name}
    if isinstance(e, (Add, Mul)):
        return _int_vars(e.lhs) | _int_vars(e.rhs)
    return set()


def term_free_vars(t: Term) -> set:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, (TAbs, Fix)):
        return term_free_vars(t.body) - {t.name}
    if isinstance(t, TApp):
        return term_free_vars(t.fun) | term_free_vars(t.arg)
    if isinstance(t, TAppInt):
        return term_free_vars(t.fun) | _int_vars(t.arg)
    if isinstance(t, (Demonic, Angelic)):
        return term_free_vars(t.lhs) | term_free_vars(t.rhs)
    if isinstance(t, Assume):
        return _int_vars(t.guard[0]) | _int_vars(t.guard[1]) | term_free_vars(t.body)
    return set()


def term_fix_order(t: Term) -> int:
    """Largest order of a fix annotation (0 when there is none)."""
    best = 0
    todo = [t]
    while todo:
        n = todo.pop()
        if isinstance(n, Fix):
            best = max(best, term_order(n.sort))
        for c in ("body", "fun", "arg", "lhs", "rhs"):
            v = getattr(n, c, None)
            if isinstance(v, Term):
                todo.append(v)
    return best


def only_angelic(t: Term) -> bool:
    if isinstance(t, Demonic):
        return False
    for c in ("body", "fun", "arg", "lhs", "rhs"):
        v = getattr(t, c, None)
        if isinstance(v, Term) and not only_angelic(v):
            return False
    return True


# typing

def _check_int_expr(env: dict, e: IntExpr) -> None:
    for n in _int_vars(e):
        if n not in env:
            raise UnboundVariable(n)
        if env[n] != INT:
            raise HflTypeError(f"{n} used as an integer", INT, env[n])


def typecheck_term(env: dict, t: Term) -> TermSort:
    if isinstance(t, (Unit, Err)):
        return UNIT
    if isinstance(t, TVar):
        if t.name not in env:
            raise UnboundVariable(t.name)
        s = env[t.name]
        if isinstance(s, IntSort):
            raise HflTypeError(f"integer {t.name} used as a term", "a non-integer type", INT)
        return s
    if isinstance(t, TAbs):
        inner = dict(env)
        inner[t.name] = t.sort
        return TArrow(t.sort, typecheck_term(inner, t.body))
    if isinstance(t, Fix):
        if isinstance(t.sort, IntSort):
            raise HflTypeError("fix needs a function or unit type", "a non-integer type", INT)
        inner = dict(env)
        inner[t.name] = t.sort
        got = typecheck_term(inner, t.body)
        if got != t.sort:
            raise HflTypeError(f"body of fix {t.name}", t.sort, got)
        return t.sort
    if isinstance(t, TApp):
        fs = typecheck_term(env, t.fun)
        if not isinstance(fs, TArrow) or isinstance(fs.arg, IntSort):
            raise HflTypeError("applying a term that does not take a term", "a function", fs)
        a = typecheck_term(env, t.arg)
        if a != fs.arg:
            raise HflTypeError("argument type", fs.arg, a)
        return fs.res
    if isinstance(t, TAppInt):
        fs = typecheck_term(env, t.fun)
        if not isinstance(fs, TArrow) or not isinstance(fs.arg, IntSort):
            raise HflTypeError("applying a term to an integer", "int -> ...", fs)
        _check_int_expr(env, t.arg)
        return fs.res
    if isinstance(t, (Demonic, Angelic)):
        for side in (t.lhs, t.rhs):
            s = typecheck_term(env, side)
            if s != UNIT:
                raise HflTypeError("choice between non-unit terms", UNIT, s)
        return UNIT
    if isinstance(t, Assume):
        _check_int_expr(env, t.guard[0])
        _check_int_expr(env, t.guard[1])
        s = typecheck_term(env, t.body)
        if s != UNIT:
            raise HflTypeError("assume body", UNIT, s)
        return UNIT
    raise HflTypeError(f"not a term: {t!r}")


# translation

def _tr(t: Term) -> Formula:
    if isinstance(t, Unit):
        return FALSE
    if isinstance(t, Err):
        return TRUE
    if isinstance(t, TVar):
        return Var(t.name)
    if isinstance(t, TAbs):
        return Abs(t.name, to_sort(t.sort), _tr(t.body))
    if isinstance(t, Fix):
        return Mu(t.name, to_sort(t.sort), _tr(t.body))
    if isinstance(t, TApp):
        return App(_tr(t.fun), _tr(t.arg))
    if isinstance(t, TAppInt):
        return AppInt(_tr(t.fun), t.arg)
    if isinstance(t, Demonic):
        return And(_tr(t.lhs), _tr(t.rhs))
    if isinstance(t, Angelic):
        return Or(_tr(t.lhs), _tr(t.rhs))
    if isinstance(t, Assume):
        return And(Le(*t.guard), _tr(t.body))
    raise HflTypeError(f"not a term: {t!r}")


def to_formula(t: Term) -> Formula:
    """Closed unit term -> closed formula of sort prop; the player wins the
    reachability game exactly when the formula is valid."""
    fv = term_free_vars(t)
    if fv:
        raise NotClosed(f"free variables: {', '.join(sorted(fv))}")
    s = typecheck_term({}, t)
    if s != UNIT:
        raise NotUnit(f"term has type {s}, expected unit")
    return _tr(t)


def tidy(f: Formula) -> Formula:
    """Drop the trailing `and true` that `assume c; fail` leaves behind."""
    if isinstance(f, And):
        a, b = tidy(f.lhs), tidy(f.rhs)
        return a if b == TRUE else And(a, b)
    if isinstance(f, Or):
        return Or(tidy(f.lhs), tidy(f.rhs))
    if isinstance(f, App):
        return App(tidy(f.fun), tidy(f.arg))
    if isinstance(f, AppInt):
        return AppInt(tidy(f.fun), f.arg)
    if isinstance(f, (Abs, Mu)):
        return type(f)(f.name, f.sort, tidy(f.body))
    return f


# sugar

def assume(op: str, a: IntExpr, b: IntExpr, body: Term) -> Term:
    if op == "<=":
        return Assume((a, b), body)
    if op == ">=":
        return Assume((b, a), body)
    if op == "<":
        return Assume((plus(a, 1), b), body)
    if op == ">":
        return Assume((plus(b, 1), a), body)
    if op == "=":
        return Assume((a, b), Assume((b, a), body))
    raise ValueError(f"unknown comparison {op}")


_NEGATE = {"<=": [">"], "<": [">="], ">=": ["<"], ">": ["<="], "=": ["<", ">"]}


def if_then_else(op: str, a: IntExpr, b: IntExpr, then: Term, other: Term) -> Term:
    """(assume c; then) [+] (assume not c; other)."""
    out = assume(op, a, b, then)
    for nop in _NEGATE[op]:
        out = Angelic(out, assume(nop, a, b, other))
    return out


def assert_(op: str, a: IntExpr, b: IntExpr, rest: Optional[Term] = None) -> Term:
    """Continue with rest when the comparison holds, reach fail otherwise."""
    return if_then_else(op, a, b, rest if rest is not None else Unit(), Err())


# parsing

TERM_KEYWORDS = {"fix", "fail", "assume", "assert", "if", "then", "else", "int", "unit"}
_CMP = ("<=", "<", "=", ">", ">=")


def _parse_tsort(ts: TokenStream) -> TermSort:
    t = ts.cur
    if t.kind == "kw" and t.text == "int":
        ts.advance()
        lhs: TermSort = INT
    elif t.kind == "kw" and t.text == "unit":
        ts.advance()
        lhs = UNIT
    elif ts.at("("):
        ts.advance()
        lhs = _parse_tsort(ts)
        ts.expect(")")
    else:
        ts.fail("expected a type")
    if ts.at("->"):
        ts.advance()
        res = _parse_tsort(ts)
        if isinstance(res, IntSort):
            ts.fail("function type returning int")
        return TArrow(lhs, res)
    return lhs


class _TermParser:
    """Raw trees as tuples (tag, pos, ...), elaborated afterwards."""

    def __init__(self, ts: TokenStream) -> None:
        self.ts = ts

    def pos(self):
        return (self.ts.cur.line, self.ts.cur.col)

    def term(self):
        ts = self.ts
        p = self.pos()
        if ts.at("\\", "fix"):
            word = ts.advance().text
            name = ts.ident().text
            ts.expect(":")
            sort = _parse_tsort(ts)
            ts.expect(".")
            return ("lam" if word == "\\" else "fix", p, name, sort, self.term())
        if ts.at("assume"):
            ts.advance()
            c = self.cond()
            ts.expect(";")
            return ("assume", p, c, self.term())
        if ts.at("assert"):
            ts.advance()
            c = self.cond()
            rest = None
            if ts.at(";"):
                ts.advance()
                rest = self.term()
            return ("assert", p, c, rest)
        if ts.at("if"):
            ts.advance()
            c = self.cond()
            ts.expect("then")
            a = self.term()
            ts.expect("else")
            return ("if", p, c, a, self.term())
        return self.angelic()

    def _side(self, sub):
        if self.ts.at("\\", "fix", "assume", "assert", "if"):
            return self.term()
        return sub()

    def angelic(self):
        lhs = self.demonic()
        while self.ts.at("[+]"):
            p = self.pos()
            self.ts.advance()
            lhs = ("ang", p, lhs, self._side(self.demonic))
        return lhs

    def demonic(self):
        lhs = self.arith()
        while self.ts.at("[*]"):
            p = self.pos()
            self.ts.advance()
            lhs = ("dem", p, lhs, self._side(self.arith))
        return lhs

    def cond(self):
        ts = self.ts
        if ts.at("("):
            save = ts.i
            try:
                ts.advance()
                c = self._cmp()
                ts.expect(")")
                return c
            except ParseError:
                ts.i = save
        return self._cmp()

    def _cmp(self):
        p = self.pos()
        a = self.arith()
        if not self.ts.at(*_CMP):
            self.ts.fail("expected a comparison")
        op = self.ts.advance().text
        return ("cmp", p, op, a, self.arith())

    def arith(self):
        lhs = self.mul()
        while self.ts.at("+", "-"):
            p = self.pos()
            op = self.ts.advance().text
            lhs = ("bin", p, op, lhs, self.mul())
        return lhs

    def mul(self):
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
        return t.kind in ("id", "num") or self.ts.at("(", "fail")

    def app(self):
        head = self.atom()
        while self._starts_atom():
            p = self.pos()
            head = ("app", p, head, self.atom())
        return head

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
        if ts.at("fail"):
            ts.advance()
            return ("fail", p)
        if ts.at("("):
            ts.advance()
            if ts.at(")"):
                ts.advance()
                return ("unit", p)
            inner = self.term()
            ts.expect(")")
            return inner
        ts.fail("expected a term")


class _TermElaborator:
    def int_expr(self, raw, env: dict) -> IntExpr:
        tag, p = raw[0], raw[1]
        if tag == "num":
            return Lit(raw[2])
        if tag == "var":
            name = raw[2]
            if name not in env:
                raise UnboundVariable(name, p)
            if env[name] != INT:
                raise HflTypeError(f"{name} used as an integer", INT, env[name], p)
            return IVar(name)
        if tag == "neg":
            return neg(self.int_expr(raw[2], env))
        if tag == "bin":
            a, b = self.int_expr(raw[3], env), self.int_expr(raw[4], env)
            if raw[2] == "+":
                return Add(a, b)
            if raw[2] == "-":
                return Add(a, neg(b))
            return Mul(a, b)
        raise HflTypeError("expected an integer expression", location=p)

    def cond(self, raw, env: dict):
        _, _, op, a, b = raw
        return op, self.int_expr(a, env), self.int_expr(b, env)

    def term(self, raw, env: dict) -> tuple:
        """(term, sort)"""
        tag, p = raw[0], raw[1]
        if tag == "unit":
            return Unit(), UNIT
        if tag == "fail":
            return Err(), UNIT
        if tag == "var":
            name = raw[2]
            if name not in env:
                raise UnboundVariable(name, p)
            if env[name] == INT:
                raise HflTypeError(f"integer {name} used as a term", location=p)
            return TVar(name), env[name]
        if tag in ("lam", "fix"):
            _, _, name, sort, body = raw
            inner = dict(env)
            inner[name] = sort
            b, bs = self.term(body, inner)
            if tag == "lam":
                return TAbs(name, sort, b), TArrow(sort, bs)
            if bs != sort:
                raise HflTypeError(f"body of fix {name}", sort, bs, p)
            return Fix(name, b, sort), sort
        if tag == "app":
            f, fs = self.term(raw[2], env)
            if not isinstance(fs, TArrow):
                raise HflTypeError("applying a non-function", "a function", fs, p)
            if isinstance(fs.arg, IntSort):
                return TAppInt(f, self.int_expr(raw[3], env)), fs.res
            a, s = self.term(raw[3], env)
            if s != fs.arg:
                raise HflTypeError("argument type", fs.arg, s, p)
            return TApp(f, a), fs.res
        if tag in ("ang", "dem"):
            a = self._unit(raw[2], env, p)
            b = self._unit(raw[3], env, p)
            return (Angelic(a, b) if tag == "ang" else Demonic(a, b)), UNIT
        if tag == "assume":
            op, a, b = self.cond(raw[2], env)
            return assume(op, a, b, self._unit(raw[3], env, p)), UNIT
        if tag == "assert":
            op, a, b = self.cond(raw[2], env)
            rest = self._unit(raw[3], env, p) if raw[3] is not None else None
            return assert_(op, a, b, rest), UNIT
        if tag == "if":
            op, a, b = self.cond(raw[2], env)
            return if_then_else(op, a, b, self._unit(raw[3], env, p), self._unit(raw[4], env, p)), UNIT
        if tag in ("num", "neg", "bin"):
            raise HflTypeError("integer expression used as a term", location=p)
        raise HflTypeError(f"unexpected {tag}", location=p)

    def _unit(self, raw, env, p) -> Term:
        t, s = self.term(raw, env)
        if s != UNIT:
            raise HflTypeError("expected a unit term", UNIT, s, p)
        return t


def parse_term(text: str, env: Optional[dict] = None) -> Term:
    ts = TokenStream(tokenize(text, TERM_KEYWORDS))
    raw = _TermParser(ts).term()
    if ts.cur.kind != "eof":
        ts.fail("trailing input")
    term, _ = _TermElaborator().term(raw, dict(env or {}))
    return term


def term_text(t: Term) -> str:
    if isinstance(t, Unit):
        return "()"
    if isinstance(t, Err):
        return "fail"
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, TAbs):
        return f"(\\{t.name} : {t.sort}. {term_text(t.body)})"
    if isinstance(t, Fix):
        return f"(fix {t.name} : {t.sort}. {term_text(t.body)})"
    if isinstance(t, TApp):
        return f"({term_text(t.fun)} {term_text(t.arg)})"
    if isinstance(t, TAppInt):
        return f"({term_text(t.fun)} ({int_text(t.arg)}))"
    if isinstance(t, Angelic):
        return f"({term_text(t.lhs)} [+] {term_text(t.rhs)})"
    if isinstance(t, Demonic):
        return f"({term_text(t.lhs)} [*] {term_text(t.rhs)})"
    if isinstance(t, Assume):
        return f"(assume {int_text(t.guard[0])} <= {int_text(t.guard[1])}; {term_text(t.body)})"
    raise TypeError(t)
