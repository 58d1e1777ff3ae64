"""Simple type system: Gamma |- f : sort."""
from __future__ import annotations

from typing import Mapping

from .errors import HflTypeError, UnboundVariable
from .printer import formula_text
from .sorts import INT, PROP, Arrow, IntSort, Product, Sort, order
from .syntax import (
    Abs, And, App, AppInt, Cmp, Exists, Formula, IntExpr, IVar, Le, Lit, Mu,
    Or, Tuple, Var, walk,
)


def _short(f) -> str:
    text = formula_text(f)
    return text if len(text) <= 60 else text[:57] + "..."


def check_int(env: Mapping[str, Sort], e: IntExpr) -> None:
    if isinstance(e, Lit):
        return
    if isinstance(e, IVar):
        s = env.get(e.name)
        if s is None:
            raise UnboundVariable(e.name)
        if not isinstance(s, IntSort):
            raise HflTypeError(f"variable {e.name} used as an integer", INT, s)
        return
    check_int(env, e.lhs)
    check_int(env, e.rhs)


def typecheck(env: Mapping[str, Sort], f: Formula) -> Sort:
    """The unique sort of f under env, or HflTypeError / UnboundVariable."""
    return _tc(dict(env), f)


def _tc(env: dict, f: Formula) -> Sort:
    if isinstance(f, Var):
        s = env.get(f.name)
        if s is None:
            raise UnboundVariable(f.name)
        if isinstance(s, IntSort):
            raise HflTypeError(f"integer variable {f.name} used as a formula", "a predicate sort", s)
        return s
    if isinstance(f, (Le, Cmp)):
        check_int(env, f.lhs)
        check_int(env, f.rhs)
        return PROP
    if isinstance(f, (Or, And)):
        for side in (f.lhs, f.rhs):
            s = _tc(env, side)
            if s != PROP:
                raise HflTypeError(f"operand of {type(f).__name__} in {_short(f)}", PROP, s)
        return PROP
    if isinstance(f, Exists):
        inner = dict(env)
        inner[f.name] = INT
        s = _tc(inner, f.body)
        if s != PROP:
            raise HflTypeError(f"body of exists in {_short(f)}", PROP, s)
        return PROP
    if isinstance(f, Abs):
        inner = dict(env)
        inner[f.name] = f.sort
        s = _tc(inner, f.body)
        return Arrow(f.sort, s)
    if isinstance(f, Mu):
        if isinstance(f.sort, IntSort):
            raise HflTypeError(f"fixpoint {f.name} annotated with int", "a predicate sort", INT)
        inner = dict(env)
        inner[f.name] = f.sort
        s = _tc(inner, f.body)
        if s != f.sort:
            raise HflTypeError(f"body of mu {f.name}", f.sort, s)
        return s
    if isinstance(f, App):
        fs = _tc(env, f.fun)
        if not isinstance(fs, Arrow):
            raise HflTypeError(f"applying a non-function in {_short(f)}", "an arrow sort", fs)
        if isinstance(fs.arg, IntSort):
            raise HflTypeError(f"formula argument where an integer is expected in {_short(f)}", INT, "a formula")
        a = _tc(env, f.arg)
        if a != fs.arg:
            raise HflTypeError(f"argument in {_short(f)}", fs.arg, a)
        return fs.res
    if isinstance(f, AppInt):
        fs = _tc(env, f.fun)
        if not isinstance(fs, Arrow) or not isinstance(fs.arg, IntSort):
            raise HflTypeError(f"integer argument in {_short(f)}", "int -> ...", fs)
        check_int(env, f.arg)
        return fs.res
    if isinstance(f, Tuple):
        return Product(tuple(_tc(env, c) for c in f.items))
    raise HflTypeError(f"not a formula: {f!r}")


def order_of_formula(f: Formula) -> int:
    """max({0} u {order(tau) | mu x^tau occurs in f})."""
    best = 0
    for n in walk(f):
        if isinstance(n, Mu):
            best = max(best, order(n.sort))
    return best


def is_guard(f: Formula) -> bool:
    return isinstance(f, (Le, Cmp))


def is_disjunctive(f: Formula) -> bool:
    for n in walk(f):
        if isinstance(n, And) and not is_guard(n.lhs):
            return False
    return True
