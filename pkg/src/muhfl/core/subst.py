"""Capture-avoiding simultaneous substitution."""
from __future__ import annotations

import itertools
from typing import Mapping

from .errors import SortMismatch
from .names import root_of
from .sorts import IntSort
from .syntax import (
    Abs, And, App, AppInt, Cmp, Exists, Formula, IntExpr, IVar, Le, Lit,
    Or, Tuple, Var, all_names, free_vars,
)

_counter = itertools.count(1)


def _rename(name: str, avoid: set) -> str:
    base = root_of(name)
    while True:
        cand = f"{base}${next(_counter)}"
        if cand not in avoid:
            return cand


def substitute(f, bindings: Mapping[str, object]):
    """[bindings]f.  Values are Formulas (for predicate variables) or
    IntExprs (for integer variables)."""
    b = dict(bindings)
    if not b:
        return f
    avoid = set()
    for v in b.values():
        avoid |= free_vars(v)
    if isinstance(f, IntExpr):
        return _sub_int(f, b)
    return _sub(f, b, avoid)


def _sub_int(e: IntExpr, b: dict) -> IntExpr:
    if isinstance(e, IVar):
        v = b.get(e.name)
        if v is None:
            return e
        if not isinstance(v, IntExpr):
            raise SortMismatch(f"formula substituted for integer variable {e.name}")
        return v
    if isinstance(e, Lit):
        return e
    if not (free_vars(e) & b.keys()):
        return e
    return type(e)(_sub_int(e.lhs, b), _sub_int(e.rhs, b))


def binder_var(f, name: str):
    if isinstance(f, Exists) or (isinstance(f, Abs) and isinstance(f.sort, IntSort)):
        return IVar(name)
    return Var(name)


def _sub(f: Formula, b: dict, avoid: set) -> Formula:
    fv = free_vars(f)
    if not any(k in fv for k in b):
        return f
    if isinstance(f, Var):
        v = b[f.name]
        if isinstance(v, IntExpr):
            raise SortMismatch(f"integer expression substituted for predicate variable {f.name}")
        return v
    if isinstance(f, (Le, Cmp)):
        lhs, rhs = _sub_int(f.lhs, b), _sub_int(f.rhs, b)
        return Le(lhs, rhs) if isinstance(f, Le) else Cmp(f.op, lhs, rhs)
    if isinstance(f, (Or, And)):
        return type(f)(_sub(f.lhs, b, avoid), _sub(f.rhs, b, avoid))
    if isinstance(f, App):
        return App(_sub(f.fun, b, avoid), _sub(f.arg, b, avoid))
    if isinstance(f, AppInt):
        return AppInt(_sub(f.fun, b, avoid), _sub_int(f.arg, b))
    if isinstance(f, Tuple):
        return Tuple(tuple(_sub(c, b, avoid) for c in f.items))
    # binders
    x = f.name
    inner = b
    if x in b:
        inner = {k: v for k, v in b.items() if k != x}
        if not inner:
            return f
    body = f.body
    if x in avoid:
        new = _rename(x, avoid | all_names(body) | inner.keys())
        inner = dict(inner)
        inner[x] = binder_var(f, new)
        x = new
        body_avoid = avoid | {new}
    else:
        body_avoid = avoid
    body = _sub(body, inner, body_avoid)
    if isinstance(f, Exists):
        return Exists(x, body)
    return type(f)(x, f.sort, body)


def rename_bound(f, avoid: set, supply=None):
    """Rename every binder of f whose name is in `avoid` (or repeated)."""
    seen = set(avoid)

    def go(g):
        if isinstance(g, (Var, Le, Cmp)) or isinstance(g, IntExpr):
            return g
        if isinstance(g, (Or, And)):
            return type(g)(go(g.lhs), go(g.rhs))
        if isinstance(g, App):
            return App(go(g.fun), go(g.arg))
        if isinstance(g, AppInt):
            return AppInt(go(g.fun), g.arg)
        if isinstance(g, Tuple):
            return Tuple(tuple(go(c) for c in g.items))
        x = g.name
        body = g.body
        if x in seen:
            new = supply.fresh(x) if supply else _rename(x, seen | all_names(body))
            body = substitute(body, {x: binder_var(g, new)})
            x = new
        seen.add(x)
        body = go(body)
        if isinstance(g, Exists):
            return Exists(x, body)
        return type(g)(x, g.sort, body)

    return go(f)
