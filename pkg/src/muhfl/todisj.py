"""Order-raising translation into disjunctive formulas.

Every proposition becomes a Prop -> Prop function that receives the
"rest of the work" as its argument: a comparison guards it, a conjunction
composes, a disjunction forks.  Applying the result to TRUE gives a
disjunctive formula of one higher order.
"""
from __future__ import annotations

from typing import Optional

from .core.errors import NotClosed, NotProp
from .core.names import NameSupply
from .core.sorts import PROP, Arrow, IntSort, PropSort, Sort
from .core.subst import substitute
from .core.syntax import (
    FALSE, TRUE, Abs, And, App, AppInt, Cmp, Exists, Formula, Le, Mu, Or, Tuple,
    IVar, Var, all_names, children, free_vars,
)
from .core.typing import typecheck

_raise_memo: dict = {}


def raise_sort(s: Sort) -> Sort:
    """int -> int, prop -> (prop -> prop), homomorphic on arrows."""
    r = _raise_memo.get(s)
    if r is None:
        if isinstance(s, IntSort):
            r = s
        elif isinstance(s, PropSort):
            r = Arrow(PROP, PROP)
        elif isinstance(s, Arrow):
            r = Arrow(raise_sort(s.arg), raise_sort(s.res))
        else:
            raise ValueError("products are not raised")
        _raise_memo[s] = r
    return r


def raise_env(env: dict) -> dict:
    return {k: raise_sort(v) for k, v in env.items()}


def raise_body(f: Formula, supply: Optional[NameSupply] = None) -> Formula:
    if supply is None:
        supply = NameSupply(all_names(f))

    def lam(body_of):
        x = supply.fresh("x")
        return Abs(x, PROP, body_of(Var(x)))

    def go(g: Formula) -> Formula:
        if isinstance(g, Le):
            return lam(lambda x: And(g, x))
        if isinstance(g, Cmp):
            raise ValueError("desugar the formula first")
        if isinstance(g, And):
            a, b = go(g.lhs), go(g.rhs)
            return lam(lambda x: App(a, App(b, x)))
        if isinstance(g, Or):
            a, b = go(g.lhs), go(g.rhs)
            return lam(lambda x: Or(App(a, x), App(b, x)))
        if isinstance(g, Exists):
            body = go(g.body)
            return lam(lambda x: Exists(g.name, App(body, x)))
        if isinstance(g, (Mu, Abs)):
            return type(g)(g.name, raise_sort(g.sort), go(g.body))
        if isinstance(g, App):
            return App(go(g.fun), go(g.arg))
        if isinstance(g, AppInt):
            return AppInt(go(g.fun), g.arg)
        if isinstance(g, Var):
            return g
        raise ValueError(f"cannot raise {type(g).__name__}")

    return go(f)


def raise_top(f: Formula) -> Formula:
    """(f#) TRUE for a closed proposition f."""
    fv = free_vars(f)
    if fv:
        raise NotClosed(f"free variables: {', '.join(sorted(fv))}")
    s = typecheck({}, f)
    if s != PROP:
        raise NotProp(f"formula has sort {s}")
    return App(raise_body(f), TRUE)


def _admin_arg(a: Formula) -> bool:
    return isinstance(a, Var) or a == TRUE or a == FALSE


def occurrences(name: str, f) -> int:
    """Number of free occurrences of `name` in f."""
    if name not in free_vars(f):
        return 0
    if isinstance(f, (Var, IVar)):
        return 1
    return sum(occurrences(name, c) for c in children(f))


def beta_admin(f: Formula) -> Formula:
    """Contract redexes (\\x.b) a whose argument is a variable or a literal,
    or whose bound variable is used at most once, until none remain."""
    changed = True
    while changed:
        changed = False

        def go(g: Formula) -> Formula:
            nonlocal changed
            if isinstance(g, App):
                fun, arg = go(g.fun), go(g.arg)
                if isinstance(fun, Abs) and (_admin_arg(arg) or occurrences(fun.name, fun.body) <= 1):
                    changed = True
                    return go(substitute(fun.body, {fun.name: arg}))
                return App(fun, arg)
            if isinstance(g, AppInt):
                return AppInt(go(g.fun), g.arg)
            if isinstance(g, (Or, And)):
                return type(g)(go(g.lhs), go(g.rhs))
            if isinstance(g, (Mu, Abs)):
                return type(g)(g.name, g.sort, go(g.body))
            if isinstance(g, Exists):
                return Exists(g.name, go(g.body))
            if isinstance(g, Tuple):
                return Tuple(tuple(go(c) for c in g.items))
            return g

        f = go(f)
    return f
