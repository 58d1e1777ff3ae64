"""Equation systems: checking, unfolding to a single formula, finite
approximations, and normalization of a closed disjunctive formula into a
system whose bodies are lambda-free, whose integer-predicate arguments all
share one arity M, and whose main formula is S (\\z1..zM. TRUE)."""
from __future__ import annotations

from typing import Iterable, Optional

from .core.errors import (
    GrammarViolation, HflTypeError, NotClosed, NotDisjunctive, NotNormalized,
    NotProp, NotRecursionFree,
)
from .core.names import NameSupply
from .core.parser import parse_system, system_text
from .core.sorts import (
    INT, PROP, Arrow, IntSort, Product, Sort, arity, arrows, int_pred, is_int_pred, order, split_arrows,
)
from .core.subst import substitute
from .core.syntax import (
    FALSE, TRUE, Abs, And, App, AppInt, Exists, Formula, IVar, Le, Lit, Mu,
    Or, Tuple, Var, all_names, apply, children, free_vars, lams, size, spine,
    walk,
)
from .core.system import Definition, EquationSystem, residual_sort
from .core.typing import is_disjunctive, typecheck

__all__ = [
    "Definition", "EquationSystem", "parse_system", "system_text",
    "typecheck_system", "system_order", "fvf", "dep_graph", "recursion_free",
    "toform", "m_approximation", "compute_maxar", "normalize",
    "check_normalized", "body_in_grammar", "uniform_arity", "main_shape",
    "beta_normal", "inline_higher",
]


def typecheck_system(es: EquationSystem) -> None:
    """Raise HflTypeError unless every body and the main formula typecheck."""
    for d in es.defs:
        if d.name not in es.env:
            raise HflTypeError(f"definition {d.name} has no declared sort")
        args, res = split_arrows(es.env[d.name])
        if len(d.params) > len(args):
            raise HflTypeError(f"too many parameters for {d.name}")
        for (pat, s), a in zip(d.params, args):
            if s != a:
                raise HflTypeError(f"parameter {pat} of {d.name}", a, s)
            if isinstance(pat, tuple) and (not isinstance(s, Product) or len(s.components) != len(pat)):
                raise HflTypeError(f"tuple pattern of {d.name}", s, len(pat))
        local = dict(es.env)
        local.update(d.param_env())
        s = typecheck(local, d.body)
        if s != residual_sort(es, d):
            raise HflTypeError(f"body of {d.name}", residual_sort(es, d), s)
    if {d.name for d in es.defs} != set(es.env):
        raise HflTypeError("declared and defined names differ")
    s = typecheck(es.env, es.main)
    if s != PROP:
        raise HflTypeError("main formula", PROP, s)


def system_order(es: EquationSystem) -> int:
    return max([0] + [order(s) for s in es.env.values()])


# dependencies

def fvf(f: Formula, names: Iterable[str]) -> set:
    """Defined names a body depends on; a literally FALSE guard cuts off
    everything behind it."""
    names = set(names)
    out = set()

    def go(g):
        if isinstance(g, And) and g.lhs == FALSE:
            return
        if isinstance(g, Var):
            if g.name in names:
                out.add(g.name)
            return
        if isinstance(g, (Mu, Abs, Exists)):
            before = g.name in out
            go(g.body)
            if g.name in names and not before:
                out.discard(g.name)
            return
        for c in (g.lhs, g.rhs) if isinstance(g, (Or, And)) else (
                (g.fun, g.arg) if isinstance(g, App) else (
                (g.fun,) if isinstance(g, AppInt) else (
                g.items if isinstance(g, Tuple) else ()))):
            go(c)

    go(f)
    return out


def dep_graph(es: EquationSystem) -> dict:
    names = es.names()
    return {d.name: fvf(d.body, names) for d in es.defs}


def _has_cycle(graph: dict) -> bool:
    state = {}
    for root in graph:
        if root in state:
            continue
        stack = [(root, iter(graph[root]))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
                continue
            s = state.get(nxt)
            if s == 1:
                return True
            if s is None:
                state[nxt] = 1
                stack.append((nxt, iter(graph.get(nxt, ()))))
    return False


def recursion_free(es: EquationSystem) -> bool:
    return not _has_cycle(dep_graph(es))


def _closure(d: Definition) -> Formula:
    if any(isinstance(p, tuple) for p, _ in d.params):
        raise NotNormalized(f"{d.name} has tuple parameters; flatten the system first")
    return lams(list(d.params), d.body)


def toform(es: EquationSystem, allow_recursion: bool = False) -> Formula:
    """The single formula a system stands for: defined names are replaced
    one by one by their fixpoint closures.  Recursive systems are rejected
    unless allow_recursion is set (their closures then contain mu)."""
    if not allow_recursion and not recursion_free(es):
        raise NotRecursionFree("the dependency relation has a cycle")
    # bodies stay open in their own name; mu is added when a name is
    # eliminated, so substitution never has to go under a mu of that name
    remaining = {d.name: _closure(d) for d in es.defs}
    main = es.main
    while remaining:
        names = set(remaining)

        def pending(n):
            return len((free_vars(remaining[n]) & names) - {n})

        pick = min(remaining, key=lambda n: (pending(n), size(remaining[n])))
        term = remaining.pop(pick)
        if pick in free_vars(term):
            term = Mu(pick, es.env[pick], term)
        for n in remaining:
            if pick in free_vars(remaining[n]):
                remaining[n] = substitute(remaining[n], {pick: term})
        if pick in free_vars(main):
            main = substitute(main, {pick: term})
    return main


def m_approximation(es: EquationSystem, m: int) -> EquationSystem:
    """Stage-indexed copy F@0..F@m: F@i calls stage i-1, stage 0 is
    guarded by FALSE, main calls stage m."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    supply = NameSupply(set(es.env) | {n for d in es.defs for n in d.param_names()})
    stage = {(d.name, i): supply.exact(f"{d.name}@{i}") for d in es.defs for i in range(m + 1)}

    def at(i: int) -> dict:
        return {d.name: Var(stage[d.name, i]) for d in es.defs}

    env, defs = {}, []
    for i in range(m + 1):
        ren = at(max(i - 1, 0))
        for d in es.defs:
            body = substitute(d.body, ren)
            if i == 0:
                body = _guard_false(body, es, d)
            env[stage[d.name, i]] = es.env[d.name]
            defs.append(Definition(stage[d.name, i], d.params, body))
    main = substitute(es.main, at(m))
    return EquationSystem(env, tuple(defs), main, es.maxar)


def _guard_false(body: Formula, es: EquationSystem, d: Definition) -> Formula:
    """FALSE /\\ body, placed under the residual lambdas of the body."""
    binders = []
    while isinstance(body, Abs):
        binders.append((body.name, body.sort))
        body = body.body
    rest, _ = split_arrows(residual_sort(es, d))
    rest = rest[len(binders):]
    if rest:
        supply = NameSupply(all_names(body) | set(es.env) | set(d.param_names()))
        extra = [(supply.fresh("a"), s) for s in rest]
        body = apply(body, *[IVar(n) if isinstance(s, IntSort) else Var(n) for n, s in extra])
        binders += extra
    return lams(binders, And(FALSE, body))


# normalization

def compute_maxar(f: Formula) -> int:
    """Largest arity of an integer predicate in an argument position (>= 1)."""
    best = 1

    def scan(s: Sort, as_arg: bool) -> None:
        nonlocal best
        if as_arg and not isinstance(s, IntSort) and is_int_pred(s):
            best = max(best, arity(s))
        if isinstance(s, Arrow):
            scan(s.arg, True)
            scan(s.res, False)
        elif isinstance(s, Product):
            for c in s.components:
                scan(c, True)

    for n in walk(f):
        if isinstance(n, Abs):
            scan(n.sort, True)
        elif isinstance(n, Mu):
            scan(n.sort, False)
    return best


def _thread(f: Formula, t_call: Formula) -> Formula:
    """Make every success leaf call the continuation t."""
    if isinstance(f, Le):
        return t_call if f == TRUE else And(f, t_call)
    if isinstance(f, And):
        if not isinstance(f.lhs, Le):
            raise NotDisjunctive("conjunction whose left operand is not a comparison")
        return And(f.lhs, _thread(f.rhs, t_call))
    if isinstance(f, Or):
        return Or(_thread(f.lhs, t_call), _thread(f.rhs, t_call))
    if isinstance(f, (Mu, Abs)):
        return type(f)(f.name, f.sort, _thread(f.body, t_call))
    if isinstance(f, App):
        return App(_thread(f.fun, t_call), _thread(f.arg, t_call))
    if isinstance(f, AppInt):
        return AppInt(_thread(f.fun, t_call), f.arg)
    if isinstance(f, Var):
        return f
    raise NotNormalized(f"unexpected {type(f).__name__} while threading")


class _Padder:
    """Raises every integer-predicate argument to arity M."""

    def __init__(self, maxar: int, supply: NameSupply) -> None:
        self.M = maxar
        self.supply = supply

    def T(self, s: Sort) -> Sort:
        if isinstance(s, Arrow):
            return Arrow(self.A(s.arg), self.T(s.res))
        return s

    def A(self, s: Sort) -> Sort:
        if isinstance(s, IntSort):
            return s
        if is_int_pred(s):
            return int_pred(self.M)
        return self.T(s)

    def zeros(self, n: int) -> list:
        return [Lit(0)] * n

    def fresh_ints(self, n: int) -> list[str]:
        return [self.supply.fresh("z") for _ in range(n)]

    def pad(self, g: Formula, env: dict):
        """Returns (g', original sort of g); g' has sort T(original)."""
        if isinstance(g, Le):
            return g, PROP
        if isinstance(g, (Or, And)):
            a, _ = self.pad(g.lhs, env)
            b, _ = self.pad(g.rhs, env)
            return type(g)(a, b), PROP
        if isinstance(g, Abs):
            inner = dict(env)
            inner[g.name] = (g.sort, is_int_pred(g.sort) and arity(g.sort) < self.M)
            body, s = self.pad(g.body, inner)
            return Abs(g.name, self.A(g.sort), body), Arrow(g.sort, s)
        if isinstance(g, Mu):
            inner = dict(env)
            inner[g.name] = (g.sort, False)
            body, _ = self.pad(g.body, inner)
            return Mu(g.name, self.T(g.sort), body), g.sort
        if isinstance(g, (Var, App, AppInt)):
            return self.pad_spine(g, env)
        raise NotNormalized(f"unexpected {type(g).__name__} while padding")

    def pad_spine(self, g: Formula, env: dict):
        head, args = spine(g)
        if isinstance(head, Var) and env[head.name][1]:
            orig = env[head.name][0]
            ell = arity(orig)
            rest = self.fresh_ints(ell - len(args))
            body = apply(head, *args, *[IVar(z) for z in rest], *self.zeros(self.M - ell))
            return lams([(z, INT) for z in rest], body), int_pred(ell - len(args))
        if isinstance(head, Var):
            acc, s = head, env[head.name][0]
        else:
            acc, s = self.pad(head, env)
        for a in args:
            assert isinstance(s, Arrow)
            if isinstance(s.arg, IntSort):
                acc = AppInt(acc, a)
            else:
                acc = App(acc, self.as_arg(a, s.arg, env))
            s = s.res
        return acc, s

    def as_arg(self, a: Formula, s: Sort, env: dict) -> Formula:
        if not is_int_pred(s):
            return self.pad(a, env)[0]
        ell = arity(s)
        if isinstance(a, Var) and env[a.name][1]:
            return a
        padded, _ = self.pad(a, env)
        if ell == self.M:
            return padded
        names, body = [], padded
        while isinstance(body, Abs) and len(names) < ell:
            names.append(body.name)
            body = body.body
        if len(names) == ell:
            extra = self.fresh_ints(self.M - ell)
            return lams([(n, INT) for n in names + extra], body)
        zs = self.fresh_ints(self.M)
        return lams([(z, INT) for z in zs], apply(padded, *[IVar(z) for z in zs[:ell]]))

class _Lifter:
    """Hoists every mu and lambda to a top-level definition whose leading
    parameters are its free local variables in order of first occurrence."""

    def __init__(self, supply: NameSupply) -> None:
        self.supply = supply
        self.env: dict = {}
        self.defs: list = []
        self.counter = 0

    def lift_name(self) -> str:
        while True:
            self.counter += 1
            name = f"$lift{self.counter}"
            if not self.supply.used(name):
                self.supply.reserve([name])
                return name

    def free_locals(self, g: Formula, local: dict) -> list[str]:
        out: list[str] = []
        seen = set()

        def go(h, bound):
            if isinstance(h, (Var, IVar)):
                if h.name in local and h.name not in bound and h.name not in seen:
                    seen.add(h.name)
                    out.append(h.name)
                return
            if isinstance(h, (Mu, Abs, Exists)):
                go(h.body, bound | {h.name})
                return
            if isinstance(h, Lit):
                return
            for c in children(h):
                go(c, bound)

        go(g, frozenset())
        return out

    def lift(self, g: Formula, local: dict) -> Formula:
        if isinstance(g, (Le, Var)):
            return g
        if isinstance(g, (Or, And)):
            return type(g)(self.lift(g.lhs, local), self.lift(g.rhs, local))
        if isinstance(g, App):
            return App(self.lift(g.fun, local), self.lift(g.arg, local))
        if isinstance(g, AppInt):
            return AppInt(self.lift(g.fun, local), g.arg)
        if isinstance(g, (Mu, Abs)):
            return self.hoist(g, local)
        raise NotNormalized(f"unexpected {type(g).__name__} while lifting")

    def hoist(self, g: Formula, local: dict) -> Formula:
        fvs = self.free_locals(g, local)
        captured = [(v, local[v]) for v in fvs]
        actuals = [IVar(v) if isinstance(s, IntSort) else Var(v) for v, s in captured]
        if isinstance(g, Mu):
            name = g.name if g.name not in self.env else self.supply.fresh(g.name)
            sort = g.sort
            call = apply(Var(name), *actuals)
            body = substitute(g.body, {g.name: call})
        else:
            name = self.lift_name()
            sort = typecheck({**self.env, **local}, g)
            call = apply(Var(name), *actuals)
            body = g
        binders = []
        while isinstance(body, Abs):
            binders.append((body.name, body.sort))
            body = body.body
        rest, _ = split_arrows(sort)
        extra = [(self.supply.fresh("a"), s) for s in rest[len(binders):]]
        body = apply(body, *[IVar(n) if isinstance(s, IntSort) else Var(n) for n, s in extra])
        params = captured + binders + extra
        full_sort = arrows([s for _, s in params], PROP)
        slot = len(self.defs)
        self.env[name] = full_sort
        self.defs.append(None)
        inner = {n: s for n, s in params}
        lifted = self.lift(body, inner)
        self.defs[slot] = Definition(name, tuple(params), lifted)
        return call

def normalize(f: Formula, maxar: Optional[int] = None) -> EquationSystem:
    """Closed disjunctive proposition -> equation system satisfying the
    grammar, uniform-arity and main-shape conditions."""
    from .semantics import encode_exists

    fv = free_vars(f)
    if fv:
        raise NotClosed(f"free variables: {', '.join(sorted(fv))}")
    if typecheck({}, f) != PROP:
        raise NotProp("formula is not a proposition")
    if not is_disjunctive(f):
        raise NotDisjunctive("conjunction whose left operand is not a comparison")
    supply = NameSupply(all_names(f))
    if any(isinstance(n, Exists) for n in walk(f)):
        f = encode_exists(f, supply)
    M = max(compute_maxar(f), maxar or 1)
    t = supply.fresh("t") if "t" in all_names(f) else supply.exact("t")
    threaded = _thread(f, apply(Var(t), *[Lit(0)] * M))
    padder = _Padder(M, supply)
    padded, _ = padder.pad(threaded, {t: (int_pred(M), False)})
    lifter = _Lifter(supply)
    top = supply.exact("S")
    lifter.env[top] = Arrow(int_pred(M), PROP)
    lifter.defs.append(None)
    body = lifter.lift(padded, {t: int_pred(M)})
    lifter.defs[0] = Definition(top, ((t, int_pred(M)),), body)
    zs = [supply.fresh("z") for _ in range(M)]
    main = App(Var(top), lams([(z, INT) for z in zs], TRUE))
    env = {d.name: lifter.env[d.name] for d in lifter.defs}
    es = EquationSystem(env, tuple(lifter.defs), main, M)
    check_normalized(es)
    return es


# the three conditions on normalized systems

def body_in_grammar(f: Formula) -> Optional[Formula]:
    """None if f is generated by x | f \\/ f | e <= e /\\ f | f f | f e,
    otherwise the offending node."""
    if isinstance(f, Var):
        return None
    if isinstance(f, Or):
        return body_in_grammar(f.lhs) or body_in_grammar(f.rhs)
    if isinstance(f, And):
        if not isinstance(f.lhs, Le):
            return f
        return body_in_grammar(f.rhs)
    if isinstance(f, App):
        return body_in_grammar(f.fun) or body_in_grammar(f.arg)
    if isinstance(f, AppInt):
        return body_in_grammar(f.fun)
    return f


def uniform_arity(es: EquationSystem, maxar: Optional[int] = None) -> bool:
    M = maxar or es.maxar
    if M is None:
        return False

    def ok(s: Sort) -> bool:
        if isinstance(s, Arrow):
            a = s.arg
            if not isinstance(a, IntSort) and order(a) == 0 and a != int_pred(M):
                return False
            return ok(a) and ok(s.res)
        return not isinstance(s, Product)

    return all(ok(s) for s in es.env.values())


def main_shape(es: EquationSystem) -> bool:
    M = es.maxar
    m = es.main
    if M is None or not isinstance(m, App) or not isinstance(m.fun, Var):
        return False
    if m.fun.name not in es.env or es.env[m.fun.name] != Arrow(int_pred(M), PROP):
        return False
    body, n = m.arg, 0
    while isinstance(body, Abs) and body.sort == INT:
        body, n = body.body, n + 1
    return n == M and body == TRUE


def check_normalized(es: EquationSystem) -> None:
    typecheck_system(es)
    for d in es.defs:
        if residual_sort(es, d) != PROP:
            raise NotNormalized(f"body of {d.name} is not a proposition")
        bad = body_in_grammar(d.body)
        if bad is not None:
            raise GrammarViolation(bad, f"in {d.name}")
    if not uniform_arity(es):
        raise NotNormalized("integer-predicate arguments do not all have arity M")
    if not main_shape(es):
        raise NotNormalized("main formula is not S (\\z1..zM. true)")


def beta_normal(f: Formula) -> Formula:
    """Full beta normal form (terminates on well-sorted input)."""
    if isinstance(f, (App, AppInt)):
        fun = beta_normal(f.fun)
        if isinstance(fun, Abs):
            return beta_normal(substitute(fun.body, {fun.name: f.arg}))
        arg = f.arg if isinstance(f, AppInt) else beta_normal(f.arg)
        return type(f)(fun, arg)
    if isinstance(f, (Or, And)):
        return type(f)(beta_normal(f.lhs), beta_normal(f.rhs))
    if isinstance(f, (Abs, Mu)):
        return type(f)(f.name, f.sort, beta_normal(f.body))
    if isinstance(f, Exists):
        return Exists(f.name, beta_normal(f.body))
    if isinstance(f, Tuple):
        return Tuple(tuple(beta_normal(c) for c in f.items))
    return f


def _reaches_self(graph: dict, start: str) -> bool:
    seen, todo = set(), list(graph.get(start, ()))
    while todo:
        n = todo.pop()
        if n == start:
            return True
        if n not in seen:
            seen.add(n)
            todo.extend(graph.get(n, ()))
    return False


def inline_higher(es: EquationSystem) -> EquationSystem:
    """Inline every non-recursive definition whose sort is not an integer
    predicate, then beta-normalize.  Lowered order-1 systems whose
    higher-order definitions are not recursive become order 0 this way."""
    defs = {d.name: d for d in es.defs}
    names = set(defs)
    graph = {d.name: free_vars(d.body) & names for d in es.defs}
    targets = [n for n in defs if not is_int_pred(es.env[n]) and not _reaches_self(graph, n)]
    if not targets:
        return es
    closures = {n: _closure(defs[n]) for n in targets}
    # resolve inlined names among themselves first (acyclic)
    for _ in range(len(targets)):
        closures = {n: substitute(c, {m: closures[m] for m in targets if m in free_vars(c)})
                    for n, c in closures.items()}
    keep = [d for d in es.defs if d.name not in closures]
    new_defs = []
    for d in keep:
        sub = {m: closures[m] for m in targets if m in free_vars(d.body)}
        body = beta_normal(substitute(d.body, sub)) if sub else d.body
        new_defs.append(Definition(d.name, d.params, body))
    sub = {m: closures[m] for m in targets if m in free_vars(es.main)}
    main = beta_normal(substitute(es.main, sub)) if sub else es.main
    env = {n: s for n, s in es.env.items() if n not in closures}
    return EquationSystem(env, tuple(new_defs), main, es.maxar)
