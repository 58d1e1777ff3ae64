"""Removal of comparison sugar (`<`, `>`, `=`, `>=`)."""
from __future__ import annotations

from .syntax import (
    Abs, And, App, AppInt, Cmp, Exists, Formula, Le, Mu, Or, Tuple, plus,
)


def _atom(c: Cmp) -> Formula:
    if c.op == "<":
        return Le(plus(c.lhs, 1), c.rhs)
    if c.op == ">":
        return Le(plus(c.rhs, 1), c.lhs)
    if c.op == ">=":
        return Le(c.rhs, c.lhs)
    if c.op == "<=":
        return Le(c.lhs, c.rhs)
    # "=" standing alone
    return And(Le(c.lhs, c.rhs), Le(c.rhs, c.lhs))


def desugar(f: Formula) -> Formula:
    if isinstance(f, Cmp):
        return _atom(f)
    if isinstance(f, And):
        rhs = desugar(f.rhs)
        if isinstance(f.lhs, Cmp) and f.lhs.op == "=":
            a, b = f.lhs.lhs, f.lhs.rhs
            return And(Le(a, b), And(Le(b, a), rhs))
        return And(desugar(f.lhs), rhs)
    if isinstance(f, Or):
        return Or(desugar(f.lhs), desugar(f.rhs))
    if isinstance(f, App):
        return App(desugar(f.fun), desugar(f.arg))
    if isinstance(f, AppInt):
        return AppInt(desugar(f.fun), f.arg)
    if isinstance(f, Mu):
        return Mu(f.name, f.sort, desugar(f.body))
    if isinstance(f, Abs):
        return Abs(f.name, f.sort, desugar(f.body))
    if isinstance(f, Exists):
        return Exists(f.name, desugar(f.body))
    if isinstance(f, Tuple):
        return Tuple(tuple(desugar(c) for c in f.items))
    return f
