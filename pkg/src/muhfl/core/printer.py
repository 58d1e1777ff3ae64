"""Canonical text rendering of sorts, formulas and integer expressions.

The output re-parses to the identical tree (see parser)."""
from __future__ import annotations

from .sorts import sort_text
from .syntax import (
    FALSE, TRUE, Abs, Add, And, App, AppInt, Cmp, Exists, IVar, Le, Lit, Mu,
    Mul, Or, Tuple, Var,
)

_CMP = {"<": "<", ">": ">", "=": "=", ">=": ">="}


def int_text(e, level: int = 0) -> str:
    if isinstance(e, Lit):
        s = str(e.value)
        return f"({s})" if e.value < 0 and level >= 3 else s
    if isinstance(e, IVar):
        return e.name
    if isinstance(e, Add):
        r = e.rhs
        if isinstance(r, Lit) and r.value < 0:
            s = f"{int_text(e.lhs, 0)} - {-r.value}"
        elif (isinstance(r, Mul) and isinstance(r.lhs, Lit) and r.lhs.value == -1
              and not isinstance(r.rhs, Lit)):
            s = f"{int_text(e.lhs, 0)} - {int_text(r.rhs, 1)}"
        else:
            s = f"{int_text(e.lhs, 0)} + {int_text(r, 1)}"
        return f"({s})" if level >= 1 else s
    s = f"{int_text(e.lhs, 1)} * {int_text(e.rhs, 2)}"
    return f"({s})" if level >= 2 else s


def formula_text(f, level: int = 0) -> str:
    """Levels: 0 binder, 1 or, 2 and, 3 comparison, 4 application, 5 atom."""
    if isinstance(f, Var):
        return f.name
    if f == TRUE:
        return "true"
    if f == FALSE:
        return "false"
    if isinstance(f, Tuple):
        return "<" + ", ".join(_component(c) for c in f.items) + ">"
    if isinstance(f, (Mu, Abs, Exists)):
        if isinstance(f, Mu):
            s = f"mu {f.name} : {sort_text(f.sort)} . {formula_text(f.body, 0)}"
        elif isinstance(f, Abs):
            s = f"\\{f.name} : {sort_text(f.sort)} . {formula_text(f.body, 0)}"
        else:
            s = f"exists {f.name} . {formula_text(f.body, 0)}"
        return f"({s})" if level > 0 else s
    if isinstance(f, Or):
        s = f"{formula_text(f.lhs, 1)} \\/ {formula_text(f.rhs, 2)}"
        return f"({s})" if level > 1 else s
    if isinstance(f, And):
        s = f"{formula_text(f.lhs, 2)} /\\ {formula_text(f.rhs, 3)}"
        return f"({s})" if level > 2 else s
    if isinstance(f, (Le, Cmp)):
        op = "<=" if isinstance(f, Le) else _CMP[f.op]
        s = f"{int_text(f.lhs)} {op} {int_text(f.rhs)}"
        return f"({s})" if level > 3 else s
    if isinstance(f, App):
        s = f"{formula_text(f.fun, 4)} {formula_text(f.arg, 5)}"
        return f"({s})" if level > 4 else s
    if isinstance(f, AppInt):
        s = f"{formula_text(f.fun, 4)} {int_text(f.arg, 3)}"
        return f"({s})" if level > 4 else s
    raise TypeError(f"not a formula: {f!r}")


def _component(c) -> str:
    return formula_text(c, 5)
