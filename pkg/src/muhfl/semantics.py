"""Executable semantics.

`search_valid` explores the reduction graph breadth first (a closed Prop
formula is valid iff it reduces to TRUE).  `kleene_eval` computes least
fixpoints of order-0 equation systems on finite tables over a box of
integers.  Both are used as oracles for the translations.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core.errors import HflError, NotClosed, NotProp, OrderTooHigh
from .core.sorts import INT, PROP, has_product, int_pred, is_int_pred, arity
from .core.subst import substitute
from .core.syntax import (
    FALSE, TRUE, Abs, Add, And, App, AppInt, Cmp, Exists, Formula, IVar, Le, Lit,
    Mu, Or, Tuple, Var, alpha_key, children, eval_int, free_vars, is_plain, neg, plus,
    walk,
)
from .core.system import EquationSystem
from .core.typing import typecheck

FUEL_EXHAUSTED = "FuelExhausted"
BOUND_TRUNCATED = "BoundTruncated"


@dataclass(frozen=True)
class Valid:
    steps: int
    trace: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"VALID steps={self.steps}"


@dataclass(frozen=True)
class Invalid:
    exhaustive: bool = True

    def __str__(self) -> str:
        return f"INVALID exhaustive={str(self.exhaustive).lower()}"


@dataclass(frozen=True)
class Unknown:
    reason: str

    def __str__(self) -> str:
        return f"UNKNOWN reason={self.reason}"


Verdict = (Valid, Invalid, Unknown)


def is_valid(v) -> bool:
    return isinstance(v, Valid)


def is_refuted(v) -> bool:
    return isinstance(v, Invalid) and v.exhaustive


@dataclass(frozen=True)
class SearchBudget:
    max_steps: int = 100000
    exists_box: int = 64
    max_states: int = 200000

    def __post_init__(self) -> None:
        if min(self.max_steps, self.exists_box, self.max_states) <= 0:
            raise ValueError("budget fields must be positive")


DEFAULT_BUDGET = SearchBudget()


def witness_order(box: int) -> list[int]:
    """0, 1, -1, 2, -2, ... so small witnesses are tried first."""
    out = [0]
    for n in range(1, box + 1):
        out += [n, -n]
    return out


def _check_input(f: Formula) -> None:
    fv = free_vars(f)
    if fv:
        raise NotClosed(f"free variables: {', '.join(sorted(fv))}")
    if not is_plain(f):
        raise HflError("formula contains tuples or product sorts")
    s = typecheck({}, f)
    if s != PROP:
        raise NotProp(f"formula has sort {s}")


def _successors(f: Formula, box: int) -> tuple[list, bool]:
    """One-step successors of a closed formula, and whether an existential
    with a relevant witness range was cut at the box."""
    if isinstance(f, Or):
        return [f.lhs, f.rhs], False
    if isinstance(f, Le):
        if f == TRUE or f == FALSE:
            return [], False
        return [TRUE if eval_int(f.lhs) <= eval_int(f.rhs) else FALSE], False
    if isinstance(f, And):
        if f.lhs == FALSE:
            return [FALSE], False
        if f.lhs == TRUE:
            return [f.rhs], False
        inner, cut = _successors(f.lhs, box)
        return [And(g, f.rhs) for g in inner], cut
    if isinstance(f, Mu):
        return [substitute(f.body, {f.name: f})], False
    if isinstance(f, Exists):
        if f.name not in free_vars(f.body):
            return [f.body], False
        return [substitute(f.body, {f.name: Lit(n)}) for n in witness_order(box)], True
    if isinstance(f, (App, AppInt)):
        fun = f.fun
        if isinstance(fun, Abs):
            arg = f.arg
            if isinstance(f, AppInt):
                arg = Lit(eval_int(arg))
            return [substitute(fun.body, {fun.name: arg})], False
        inner, cut = _successors(fun, box)
        return [type(f)(g, f.arg) for g in inner], cut
    if isinstance(f, Cmp):
        raise HflError("comparison sugar must be removed before evaluation")
    return [], False


def step(f: Formula, budget: SearchBudget = DEFAULT_BUDGET) -> list:
    """All one-step successors of f (duplicates removed, order kept)."""
    _check_input(f)
    succ, _ = _successors(f, budget.exists_box)
    out, seen = [], set()
    for g in succ:
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def search_valid(f: Formula, budget: SearchBudget = DEFAULT_BUDGET, check: bool = True):
    """Breadth-first search for a reduction to TRUE, memoized up to
    alpha-equivalence."""
    if check:
        _check_input(f)
    if f == TRUE:
        return Valid(0, (f,))
    states = [f]
    parents = [-1]
    depth = [0]
    visited = {alpha_key(f)}
    frontier = deque([0])
    expansions = 0
    fuel_out = False
    cut = False
    while frontier:
        if expansions >= budget.max_steps:
            fuel_out = True
            break
        i = frontier.popleft()
        expansions += 1
        succ, c = _successors(states[i], budget.exists_box)
        cut = cut or c
        for g in succ:
            if g == TRUE:
                trace = [g]
                j = i
                while j >= 0:
                    trace.append(states[j])
                    j = parents[j]
                trace.reverse()
                return Valid(depth[i] + 1, tuple(trace))
            key = alpha_key(g)
            if key in visited:
                continue
            if len(visited) >= budget.max_states:
                fuel_out = True
                continue
            visited.add(key)
            states.append(g)
            parents.append(i)
            depth.append(depth[i] + 1)
            frontier.append(len(states) - 1)
    if fuel_out:
        return Unknown(FUEL_EXHAUSTED)
    if cut:
        return Unknown(BOUND_TRUNCATED)
    return Invalid(True)


def replay(trace, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    """Check that consecutive states of a trace are one reduction step apart
    and that it ends in TRUE."""
    if not trace or trace[-1] != TRUE:
        return False
    for a, b in zip(trace, trace[1:]):
        succ, _ = _successors(a, budget.exists_box)
        if b not in succ:
            return False
    return True


# existential quantifiers as fixpoints

def encode_exists(f: Formula, supply=None) -> Formula:
    """Replace every `exists z. psi` by
    (mu x. \\y. psi[y/z] \\/ psi[-y/z] \\/ x (y + 1)) 0."""
    from .core.names import NameSupply
    from .core.syntax import all_names

    if supply is None:
        supply = NameSupply(all_names(f))

    def go(g: Formula) -> Formula:
        if isinstance(g, Exists):
            body = go(g.body)
            x = supply.fresh("ex")
            y = supply.fresh("y")
            yv = IVar(y)
            step_ = AppInt(Var(x), plus(yv, 1))
            core = Or(Or(substitute(body, {g.name: yv}), substitute(body, {g.name: neg(yv)})), step_)
            return AppInt(Mu(x, int_pred(1), Abs(y, INT, core)), Lit(0))
        if isinstance(g, (Or, And)):
            return type(g)(go(g.lhs), go(g.rhs))
        if isinstance(g, App):
            return App(go(g.fun), go(g.arg))
        if isinstance(g, AppInt):
            return AppInt(go(g.fun), g.arg)
        if isinstance(g, (Mu, Abs)):
            return type(g)(g.name, g.sort, go(g.body))
        if isinstance(g, Tuple):
            return Tuple(tuple(go(c) for c in g.items))
        return g

    return go(f)


# bounded Kleene iteration for order-0 systems

_LIMIT = 2 ** 62
_CELL_LIMIT = 2 ** 24


class _IntVal:
    """An integer (scalar or array) together with a bound on its magnitude
    and the set of array axes it varies along."""
    __slots__ = ("v", "bound", "axes")

    def __init__(self, v, bound: int, axes: frozenset = frozenset()) -> None:
        self.v, self.bound, self.axes = v, bound, axes


def _exists_depth(f) -> int:
    if not isinstance(f, Formula):
        return 0
    inner = max((_exists_depth(c) for c in children(f)), default=0)
    return inner + 1 if isinstance(f, Exists) else inner


class _TableEval:
    def __init__(self, es: EquationSystem, box: int) -> None:
        self.es = es
        self.box = box
        self.width = 2 * box + 1
        self.arity = {d.name: arity(es.env[d.name]) for d in es.defs}
        self._fv: dict = {}

    def axis(self, i: int, ndim: int) -> _IntVal:
        shape = [1] * ndim
        shape[i] = self.width
        return _IntVal(np.arange(-self.box, self.box + 1, dtype=np.int64).reshape(shape), self.box,
                       frozenset([i]))

    def live_axes(self, f, env: dict) -> set:
        fv = self._fv.get(id(f))
        if fv is None:
            fv = self._fv[id(f)] = (f, free_vars(f))
        used = set()
        for n in fv[1]:
            v = env.get(n)
            if isinstance(v, _IntVal):
                used |= v.axes
        return used

    def ival(self, e, env: dict) -> _IntVal:
        if isinstance(e, Lit):
            return _IntVal(e.value, abs(e.value))
        if isinstance(e, IVar):
            return env[e.name]
        a, b = self.ival(e.lhs, env), self.ival(e.rhs, env)
        axes = a.axes | b.axes
        if isinstance(e, Add):
            bound = a.bound + b.bound
            op = np.add
        else:
            bound = a.bound * b.bound
            op = np.multiply
        av, bv = a.v, b.v
        if bound > _LIMIT:
            av = av.astype(object) if isinstance(av, np.ndarray) else av
            bv = bv.astype(object) if isinstance(bv, np.ndarray) else bv
        if isinstance(av, np.ndarray) or isinstance(bv, np.ndarray):
            return _IntVal(op(av, bv), bound, axes)
        return _IntVal(av + bv if isinstance(e, Add) else av * bv, bound, axes)

    def lookup(self, table, args: list):
        B = self.box
        if all(not isinstance(a.v, np.ndarray) for a in args):
            idx = [int(a.v) for a in args]
            if all(-B <= i <= B for i in idx):
                return bool(table[tuple(i + B for i in idx)])
            return False
        mask = True
        idx = []
        for a in args:
            v = a.v
            if isinstance(v, np.ndarray):
                inside = (v >= -B) & (v <= B)
                mask = mask & inside
                idx.append(np.where(inside, v, 0).astype(np.int64) + B)
            else:
                if not -B <= v <= B:
                    return False
                idx.append(int(v) + B)
        return np.logical_and(table[tuple(idx)], mask)

    def ev(self, f: Formula, env: dict, args: list, depth: int, ndim: int, tables: dict):
        if isinstance(f, AppInt):
            return self.ev(f.fun, env, [self.ival(f.arg, env)] + args, depth, ndim, tables)
        if isinstance(f, Abs):
            inner = dict(env)
            inner[f.name] = args[0]
            return self.ev(f.body, inner, args[1:], depth, ndim, tables)
        if isinstance(f, Var):
            if len(args) != self.arity[f.name]:
                raise OrderTooHigh(f"{f.name} is not fully applied")
            return self.lookup(tables[f.name], args)
        if isinstance(f, Le):
            a, b = self.ival(f.lhs, env), self.ival(f.rhs, env)
            r = a.v <= b.v
            return bool(r) if not isinstance(r, np.ndarray) else r
        if isinstance(f, Or):
            a = self.ev(f.lhs, env, [], depth, ndim, tables)
            if a is True:
                return True
            return np.logical_or(a, self.ev(f.rhs, env, [], depth, ndim, tables))
        if isinstance(f, And):
            a = self.ev(f.lhs, env, [], depth, ndim, tables)
            if not np.any(a):
                return False
            return np.logical_and(a, self.ev(f.rhs, env, [], depth, ndim, tables))
        if isinstance(f, Exists):
            inner = dict(env)
            # the witness gets an axis no live integer varies along
            used = self.live_axes(f.body, env)
            free = next((i for i in range(ndim) if i not in used), None)
            if free is None or self.width ** (len(used) + 1) > _CELL_LIMIT:
                acc = False
                for w in range(-self.box, self.box + 1):
                    inner[f.name] = _IntVal(w, abs(w))
                    acc = np.logical_or(acc, self.ev(f.body, inner, [], depth, ndim, tables))
                    if not isinstance(acc, np.ndarray) and acc:
                        break
                return acc
            inner[f.name] = self.axis(free, ndim)
            r = self.ev(f.body, inner, [], depth, ndim, tables)
            if isinstance(r, np.ndarray) and r.ndim > free and r.shape[free] > 1:
                return r.any(axis=free, keepdims=True)
            return r
        raise OrderTooHigh(f"unsupported node in order-0 evaluation: {type(f).__name__}")

    def eval_def(self, d, tables: dict):
        a = self.arity[d.name]
        ndim = min(a + _exists_depth(d.body), max(a, 32))
        env = {}
        names = d.param_names()
        for i, n in enumerate(names):
            env[n] = self.axis(i, ndim)
        rest = [self.axis(i, ndim) for i in range(len(names), a)]
        r = self.ev(d.body, env, rest, a, ndim, tables)
        full = np.broadcast_to(np.asarray(r, dtype=bool), (self.width,) * a + (1,) * (ndim - a))
        return np.ascontiguousarray(full.reshape((self.width,) * a))

    def eval_main(self, tables: dict) -> bool:
        f = self.es.main
        ndim = min(_exists_depth(f), 32)
        return bool(np.any(self.ev(f, {}, [], 0, ndim, tables)))


def _check_order0(es: EquationSystem) -> None:
    for name, s in es.env.items():
        if has_product(s) or not is_int_pred(s):
            raise OrderTooHigh(f"{name} : {s} is not an integer predicate")
    for d in es.defs:
        for n in walk(d.body):
            if isinstance(n, (Mu, Tuple)) or isinstance(n, App):
                raise OrderTooHigh(f"body of {d.name} is not order 0")
    for n in walk(es.main):
        if isinstance(n, (Mu, Tuple, App)):
            raise OrderTooHigh("main formula is not order 0")
    extra = free_vars(es.main) - es.env.keys()
    if extra:
        raise NotClosed(f"main has free variables {sorted(extra)}")


def kleene_eval(es: EquationSystem, box: int = 16, max_iters: int = 10000):
    """Valid(iterations) if main holds once tables are iterated from empty;
    otherwise Unknown."""
    _check_order0(es)
    ev = _TableEval(es, box)
    tables = {d.name: np.zeros((ev.width,) * ev.arity[d.name], dtype=bool) for d in es.defs}
    if ev.eval_main(tables):
        return Valid(0)
    for it in range(1, max_iters + 1):
        new = {d.name: ev.eval_def(d, tables) for d in es.defs}
        changed = any(not np.array_equal(new[n], tables[n]) for n in tables)
        tables = new
        if ev.eval_main(tables):
            return Valid(it)
        if not changed:
            return Unknown(BOUND_TRUNCATED)
    return Unknown(FUEL_EXHAUSTED)


def kleene_tables(es: EquationSystem, box: int = 16, max_iters: int = 10000) -> dict:
    """The fixpoint tables themselves (index i stands for integer i - box)."""
    _check_order0(es)
    ev = _TableEval(es, box)
    tables = {d.name: np.zeros((ev.width,) * ev.arity[d.name], dtype=bool) for d in es.defs}
    for _ in range(max_iters):
        new = {d.name: ev.eval_def(d, tables) for d in es.defs}
        if all(np.array_equal(new[n], tables[n]) for n in tables):
            break
        tables = new
    return tables
