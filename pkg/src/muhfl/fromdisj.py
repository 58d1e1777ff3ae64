"""Order-lowering translation of normalized disjunctive equation systems.

A subformula of sort tau inside the body of F is translated to a bundle
(phi_*, phi_0, ..., phi_k, phi_{k+1}, ..., phi_{k+gar(tau)}) where k is
the number of order-0 predicate parameters x_1..x_k of F.  Roughly,
phi_i z w says "the formula reaches x_i w", phi_{k+i} covers the i-th
trailing order-0 argument, and phi_0 / phi_* cover order-0 predicates that
arrive through higher-order arguments.  Bundles use product sorts; a
separate pass flattens them into curried parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core.errors import (
    ArityMismatch, GrammarViolation, HigherOrderTupleEscape, InvariantViolation,
    NotNormalized, SortMismatch,
)
from .core.names import NameSupply
from .core.sorts import (
    INT, PROP, Arrow, IntSort, Product, PropSort, Sort, arity, arrows, int_pred,
    is_int_pred, order, product, split_arrows,
)
from .core.subst import substitute
from .core.syntax import (
    FALSE, TRUE, Abs, And, App, AppInt, Exists, Formula, IVar, Le, Mu, Or, Tuple, Var, all_names, apply, children, conj, eval_int, free_vars,
    lams, spine, )
from .core.system import Definition, EquationSystem
from .core.typing import typecheck
from .eqsys import beta_normal, check_normalized, system_order, toform


# sort decomposition

@dataclass(frozen=True)
class SortDecomp:
    higher_sorts: tuple
    pred_count: int
    int_count: int


@dataclass(frozen=True)
class ParamSplit:
    higher: tuple  # (name, sort) pairs
    predvars: tuple
    intvars: tuple


def decomp_sort(s: Sort, maxar: Optional[int] = None) -> SortDecomp:
    """(prefix up to the last argument of order >= 1, number of trailing
    predicate arguments, number of trailing integer arguments)."""
    args, res = split_arrows(s)
    if not isinstance(res, PropSort):
        raise ArityMismatch(f"{s} does not end in prop")
    higher: list = []
    m = n = 0
    for a in reversed(args):
        if higher or order(a) > 0:
            higher.insert(0, a)
        elif isinstance(a, IntSort):
            n += 1
        elif is_int_pred(a):
            if maxar is not None and arity(a) != maxar:
                raise ArityMismatch(f"predicate argument {a} does not have arity {maxar}")
            m += 1
        else:
            raise ArityMismatch(f"unexpected argument sort {a}")
    return SortDecomp(tuple(higher), m, n)


def gar(s: Sort, maxar: Optional[int] = None) -> int:
    return decomp_sort(s, maxar).pred_count


def decomp_params(params, fsort: Sort, maxar: Optional[int] = None) -> ParamSplit:
    params = list(params)
    args, res = split_arrows(fsort)
    if len(params) != len(args) or not isinstance(res, PropSort):
        raise ArityMismatch(f"{len(params)} parameters for sort {fsort}")
    higher: list = []
    preds: list = []
    ints: list = []
    for (name, _), a in zip(reversed(params), reversed(args)):
        if higher or order(a) > 0:
            higher.insert(0, (name, a))
        elif isinstance(a, IntSort):
            ints.insert(0, name)
        elif is_int_pred(a):
            if maxar is not None and arity(a) != maxar:
                raise ArityMismatch(f"parameter {name} : {a} does not have arity {maxar}")
            preds.insert(0, name)
        else:
            raise ArityMismatch(f"unexpected parameter sort {a}")
    return ParamSplit(tuple(higher), tuple(preds), tuple(ints))


def lower_components(s: Sort, k: int, maxar: int) -> list:
    """Component sorts of (s)_k."""
    d = decomp_sort(s, maxar)
    two = [lower_sort(a, 2, maxar) for a in d.higher_sorts]
    one = [lower_sort(a, 1, maxar) for a in d.higher_sorts]
    tail = [INT] * (d.int_count + maxar)
    return [arrows(two + tail, PROP)] * k + [arrows(one + tail, PROP)] * d.pred_count


def lower_sort(s: Sort, k: int, maxar: int) -> Sort:
    if isinstance(s, IntSort):
        return s
    return product(lower_components(s, k, maxar))


# translation of formulas

@dataclass(frozen=True)
class TranslationBundle:
    star: Formula
    indexed: tuple
    context: object = field(default=None, compare=False, repr=False)

    def components(self) -> list:
        return [self.star, *self.indexed]

    def as_tuple(self) -> Tuple:
        return Tuple(tuple(self.components()))


@dataclass
class LowerContext:
    gamma: dict            # prefix parameter -> original sort (ints included)
    predvars: list         # x_1..x_k
    intvars: list
    xi: dict               # defined name -> original sort
    maxar: int
    comp_names: dict       # prefix parameter -> [y_*, y_0, y_1, ...]
    def_names: dict        # defined name -> [F_0, F_1, ...]
    supply: NameSupply

    @property
    def k(self) -> int:
        return len(self.predvars)

    def sort_of_var(self, name: str) -> Sort:
        if name in self.gamma:
            return self.gamma[name]
        if name in self.predvars:
            return int_pred(self.maxar)
        if name in self.intvars:
            return INT
        if name in self.xi:
            return self.xi[name]
        raise SortMismatch(f"unknown variable {name}")


def _fresh(ctx: LowerContext, hint: str, n: int) -> list[str]:
    return [ctx.supply.fresh(hint) for _ in range(n)]


def _ivars(names) -> list:
    return [IVar(n) for n in names]


def _eq_all(zs, ws) -> Formula:
    atoms = []
    for z, w in zip(zs, ws):
        atoms += [Le(IVar(z), IVar(w)), Le(IVar(w), IVar(z))]
    return conj(atoms) if atoms else TRUE


def _head_sort(ctx: LowerContext, f: Formula) -> Sort:
    head, args = spine(f)
    if not isinstance(head, Var):
        raise GrammarViolation(f, "application head is not a variable")
    s = ctx.sort_of_var(head.name)
    for _ in args:
        if not isinstance(s, Arrow):
            raise SortMismatch(f"too many arguments in {f}")
        s = s.res
    return s


def lower_formula(ctx: LowerContext, f: Formula, expected: Optional[Sort] = None) -> TranslationBundle:
    comps = _lower(ctx, f)
    if expected is not None:
        s = _head_sort(ctx, f) if isinstance(f, (Var, App, AppInt)) else PROP
        if s != expected:
            raise SortMismatch(f"expected {expected}, found {s}")
    return TranslationBundle(comps[0], tuple(comps[1:]), ctx)


def _lower(ctx: LowerContext, f: Formula) -> list:
    M = ctx.maxar
    k = ctx.k
    if isinstance(f, Var):
        name = f.name
        if name in ctx.predvars:
            i = ctx.predvars.index(name) + 1
            out = []
            for j in range(-1, k + 1):      # -1 stands for *
                zs, ws = _fresh(ctx, "z", M), _fresh(ctx, "w", M)
                body = _eq_all(zs, ws) if j == i else FALSE
                out.append(lams([(z, INT) for z in zs] + [(w, INT) for w in ws], body))
            return out
        if name in ctx.gamma:
            if isinstance(ctx.gamma[name], IntSort):
                raise SortMismatch(f"integer {name} used as a formula")
            names = ctx.comp_names[name]
            m = gar(ctx.gamma[name], M)
            return [Var(names[0])] + [Var(names[1])] * (k + 1) + [Var(n) for n in names[2:2 + m]]
        if name in ctx.xi:
            names = ctx.def_names[name]
            m = gar(ctx.xi[name], M)
            return [Var(names[0])] + [Var(names[0])] * (k + 1) + [Var(n) for n in names[1:1 + m]]
        raise SortMismatch(f"variable {name} is not a predicate here")
    if isinstance(f, Or):
        a, b = _lower(ctx, f.lhs), _lower(ctx, f.rhs)
        out = []
        for pa, pb in zip(a, b):
            zs = _fresh(ctx, "z", M)
            out.append(lams([(z, INT) for z in zs], Or(apply(pa, *_ivars(zs)), apply(pb, *_ivars(zs)))))
        return out
    if isinstance(f, And):
        if not isinstance(f.lhs, Le):
            raise GrammarViolation(f, "conjunction without a comparison guard")
        inner = _lower(ctx, f.rhs)
        out = []
        for p in inner:
            zs = _fresh(ctx, "z", M)
            out.append(lams([(z, INT) for z in zs], And(f.lhs, apply(p, *_ivars(zs)))))
        return out
    if isinstance(f, AppInt):
        return [AppInt(p, f.arg) for p in _lower(ctx, f.fun)]
    if isinstance(f, App):
        fs = _head_sort(ctx, f.fun)
        if not isinstance(fs, Arrow):
            raise SortMismatch(f"applying a non-function: {f}")
        s0, tau = fs.arg, fs.res
        phi = _lower(ctx, f.fun)
        psi = _lower(ctx, f.arg)
        if order(fs) > 1:
            m = gar(fs, M)
            m1 = gar(s0, M)
            trail = psi[k + 2:k + 2 + m1]
            out = [App(phi[0], Tuple((psi[0], psi[1], *trail)))]
            out.append(App(phi[1], Tuple((psi[1], psi[1], *trail))))
            for j in range(1, k + 1):
                out.append(App(phi[j + 1], Tuple((psi[j + 1], psi[1], *trail))))
            reduced = _tuple([psi[1], *trail])
            for i in range(1, m + 1):
                out.append(App(phi[k + 1 + i], reduced))
            return out
        if not (is_int_pred(s0) and arity(s0) == M):
            raise SortMismatch(f"order-0 argument of sort {s0} (expected arity {M})")
        d = decomp_sort(tau, M)
        if d.higher_sorts:
            raise InvariantViolation("order-0 argument before a higher-order one")
        p = d.int_count
        out = []
        for j in range(0, k + 2):
            zs, ws, us = _fresh(ctx, "z", p), _fresh(ctx, "w", M), _fresh(ctx, "u", M)
            called = And(apply(phi[k + 2], *_ivars(zs), *_ivars(us)), apply(psi[j], *_ivars(us), *_ivars(ws)))
            for u in reversed(us):
                called = Exists(u, called)
            body = Or(apply(phi[j], *_ivars(zs), *_ivars(ws)), called)
            out.append(lams([(z, INT) for z in zs] + [(w, INT) for w in ws], body))
        out += phi[k + 3:]
        return out
    if isinstance(f, (Le, Abs, Mu, Exists, Tuple)):
        raise GrammarViolation(f, "not allowed in a normalized body")
    raise GrammarViolation(f)


def _tuple(items: list) -> Formula:
    return items[0] if len(items) == 1 else Tuple(tuple(items))


# definitions and systems

@dataclass
class LoweringPlan:
    """Names and sorts shared by the translation of every definition."""
    maxar: int
    def_names: dict
    env: dict
    supply: NameSupply
    taken: set = field(default_factory=set)

    def local(self, name: str, params) -> str:
        """Per-definition component name; parameters of different
        definitions may share component names."""
        if name in self.taken or name in params:
            return self.supply.fresh(name)
        self.supply.reserve([name])
        return name


def _plan(es: EquationSystem) -> LoweringPlan:
    M = es.maxar
    avoid = set(es.env)
    for d in es.defs:
        avoid |= set(d.param_names()) | all_names(d.body)
    avoid |= all_names(es.main)
    supply = NameSupply(avoid)
    def_names, env = {}, {}
    for d in es.defs:
        comps = lower_components(es.env[d.name], 1, M)
        names = [supply.exact(f"{d.name}${i}") for i in range(len(comps))]
        def_names[d.name] = names
        for n, s in zip(names, comps):
            env[n] = s
    taken = set(es.env) | set(env)
    return LoweringPlan(M, def_names, env, supply, taken)


def _context(d: Definition, es: EquationSystem, plan: LoweringPlan) -> LowerContext:
    split = decomp_params(d.params, es.env[d.name], plan.maxar)
    gamma = dict(split.higher)
    comp_names = {}
    params = set(d.param_names())
    for y, s in split.higher:
        if not isinstance(s, IntSort):
            m = gar(s, plan.maxar)
            tags = ["s"] + [str(i) for i in range(m + 1)]
            comp_names[y] = [plan.local(f"{y}${t}", params) for t in tags]
    return LowerContext(gamma, list(split.predvars), list(split.intvars), dict(es.env),
                        plan.maxar, comp_names, plan.def_names, plan.supply)


def lowered_env_of_context(ctx: LowerContext, plan: LoweringPlan) -> dict:
    """Translated environment: lowered defined names plus the components
    of every prefix parameter and the integer parameters."""
    env = dict(plan.env)
    for y, s in ctx.gamma.items():
        if isinstance(s, IntSort):
            env[y] = INT
        else:
            for n, c in zip(ctx.comp_names[y], lower_components(s, 2, ctx.maxar)):
                env[n] = c
    for z in ctx.intvars:
        env[z] = INT
    return env


def lower_def(d: Definition, es: EquationSystem, plan: Optional[LoweringPlan] = None) -> list:
    plan = plan or _plan(es)
    ctx = _context(d, es, plan)
    bundle = _lower(ctx, d.body)
    full, reduced = [], []
    for y, s in ctx.gamma.items():
        if isinstance(s, IntSort):
            full.append((y, INT))
            reduced.append((y, INT))
            continue
        names = ctx.comp_names[y]
        full.append((tuple(names), lower_sort(s, 2, ctx.maxar)))
        rest = names[1:]
        reduced.append((rest[0] if len(rest) == 1 else tuple(rest), lower_sort(s, 1, ctx.maxar)))
    ints = [(z, INT) for z in ctx.intvars]
    names = plan.def_names[d.name]
    out = [Definition(names[0], tuple(full + ints), bundle[0])]
    for i in range(1, ctx.k + 1):
        out.append(Definition(names[i], tuple(reduced + ints), bundle[i + 1]))
    return out


def lower_main(es: EquationSystem) -> EquationSystem:
    """Normalized order-(n+1) system -> order-n system with main
    exists z1..zM. S_1 z1..zM (product-typed parameters)."""
    try:
        check_normalized(es)
    except NotNormalized:
        raise
    except Exception as exc:
        raise NotNormalized(str(exc)) from exc
    plan = _plan(es)
    defs = []
    for d in es.defs:
        defs.extend(lower_def(d, es, plan))
    head = es.main.fun.name
    zs = [plan.supply.fresh("z") for _ in range(es.maxar)]
    main: Formula = apply(Var(plan.def_names[head][1]), *_ivars(zs))
    for z in reversed(zs):
        main = Exists(z, main)
    return EquationSystem(dict(plan.env), tuple(defs), main, es.maxar)


def check_bundle(d: Definition, es: EquationSystem, plan: Optional[LoweringPlan] = None):
    """Typing and occurrence conditions on the bundle of one body.  Returns a
    list of problems (empty when both hold)."""
    plan = plan or _plan(es)
    ctx = _context(d, es, plan)
    bundle = _lower(ctx, d.body)
    problems = []
    env = lowered_env_of_context(ctx, plan)
    want = lower_sort(PROP, ctx.k + 2, ctx.maxar)
    try:
        got = typecheck(env, Tuple(tuple(bundle)))
        if got != want:
            problems.append(f"{d.name}: bundle has sort {got}, expected {want}")
    except Exception as exc:
        problems.append(f"{d.name}: {exc}")
    stars = {names[0] for names in ctx.comp_names.values()}
    for c in bundle[1:]:
        bad = free_vars(c) & stars
        if bad:
            problems.append(f"{d.name}: {sorted(bad)} occur outside the * component")
    return problems


# flattening of tuples

def flatten_sort(s: Sort) -> Sort:
    if isinstance(s, Arrow):
        res = flatten_sort(s.res)
        if isinstance(s.arg, Product):
            return arrows([flatten_sort(c) for c in s.arg.components], res)
        return Arrow(flatten_sort(s.arg), res)
    if isinstance(s, Product):
        raise HigherOrderTupleEscape(f"product sort {s} outside a parameter position")
    return s


def _flatten_formula(f: Formula) -> Formula:
    if isinstance(f, App):
        fun = _flatten_formula(f.fun)
        if isinstance(f.arg, Tuple):
            return apply(fun, *[_flatten_formula(c) for c in f.arg.items])
        return App(fun, _flatten_formula(f.arg))
    if isinstance(f, Tuple):
        raise HigherOrderTupleEscape(f"tuple outside an argument position: {f}")
    if isinstance(f, AppInt):
        return AppInt(_flatten_formula(f.fun), f.arg)
    if isinstance(f, (Or, And)):
        return type(f)(_flatten_formula(f.lhs), _flatten_formula(f.rhs))
    if isinstance(f, (Abs, Mu)):
        if isinstance(f.sort, Product):
            raise HigherOrderTupleEscape(f"binder {f.name} of product sort")
        return type(f)(f.name, flatten_sort(f.sort), _flatten_formula(f.body))
    if isinstance(f, Exists):
        return Exists(f.name, _flatten_formula(f.body))
    return f


def flatten_tuples(es: EquationSystem) -> EquationSystem:
    env = {n: flatten_sort(s) for n, s in es.env.items()}
    defs = []
    for d in es.defs:
        params = []
        for pat, s in d.params:
            if isinstance(pat, tuple):
                params.extend((n, flatten_sort(c)) for n, c in zip(pat, s.components))
            else:
                params.append((pat, flatten_sort(s)))
        defs.append(Definition(d.name, tuple(params), _flatten_formula(d.body)))
    return EquationSystem(env, tuple(defs), _flatten_formula(es.main), es.maxar)


# simplification

def _occ(name: str, f) -> int:
    if name not in free_vars(f):
        return 0
    if isinstance(f, (Var, IVar)):
        return 1
    return sum(_occ(name, c) for c in children(f))


def _atomic(f: Formula) -> bool:
    return isinstance(f, Var) or f == TRUE or f == FALSE


def _conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        return _conjuncts(f.lhs) + _conjuncts(f.rhs)
    return [f]


def _closed_le(f: Formula) -> Optional[bool]:
    if isinstance(f, Le) and not free_vars(f) and f not in (TRUE, FALSE):
        return eval_int(f.lhs) <= eval_int(f.rhs)
    return None


def _eliminate(u: str, body: Formula) -> Optional[Formula]:
    """exists u. body with u = e among the conjuncts -> body[e/u]."""
    parts = _conjuncts(body)
    les = [(i, p) for i, p in enumerate(parts) if isinstance(p, Le)]
    for i, a in les:
        for j, b in les:
            if i == j:
                continue
            if a.lhs == IVar(u) and b.rhs == IVar(u) and a.rhs == b.lhs and u not in free_vars(a.rhs):
                e = a.rhs
                rest = [p for n, p in enumerate(parts) if n not in (i, j)]
                return substitute(conj(rest), {u: e}) if rest else TRUE
    return None


def _simp(f: Formula, bottom: dict) -> Formula:
    if isinstance(f, Le):
        v = _closed_le(f)
        if v is None:
            return f
        return TRUE if v else FALSE
    if isinstance(f, Var):
        return f
    if isinstance(f, Or):
        a, b = _simp(f.lhs, bottom), _simp(f.rhs, bottom)
        if a == FALSE:
            return b
        if b == FALSE:
            return a
        if a == TRUE or b == TRUE:
            return TRUE
        return Or(a, b)
    if isinstance(f, And):
        a = _simp(f.lhs, bottom)
        if a == FALSE:
            return FALSE
        b = _simp(f.rhs, bottom)
        if b == FALSE:
            return FALSE
        if a == TRUE:
            return b
        if b == TRUE:
            return a
        return And(a, b)
    if isinstance(f, Exists):
        body = _simp(f.body, bottom)
        if f.name not in free_vars(body):
            return body
        if isinstance(body, Or):
            return _simp(Or(Exists(f.name, body.lhs), Exists(f.name, body.rhs)), bottom)
        got = _eliminate(f.name, body)
        if got is not None:
            return _simp(got, bottom)
        if isinstance(body, Exists):
            # exists u. exists v. B: an equation on u may sit under v
            inner = _simp(Exists(f.name, body.body), bottom)
            if not (isinstance(inner, Exists) and inner.name == f.name):
                return _simp(Exists(body.name, inner), bottom)
        if isinstance(body, And):
            parts = _conjuncts(body)
            outside = [p for p in parts if f.name not in free_vars(p)]
            if outside:
                inside = [p for p in parts if f.name in free_vars(p)]
                return And(conj(outside), _simp(Exists(f.name, conj(inside)), bottom))
        return Exists(f.name, body)
    if isinstance(f, (Abs, Mu)):
        body = _simp(f.body, bottom)
        if isinstance(f, Abs):
            # eta
            if isinstance(body, AppInt) and isinstance(f.sort, IntSort) and body.arg == IVar(f.name) \
                    and f.name not in free_vars(body.fun):
                return body.fun
            if isinstance(body, App) and body.arg == Var(f.name) and f.name not in free_vars(body.fun):
                return body.fun
        return type(f)(f.name, f.sort, body)
    if isinstance(f, Tuple):
        return Tuple(tuple(_simp(c, bottom) for c in f.items))
    if isinstance(f, (App, AppInt)):
        head, args = spine(f)
        if isinstance(head, Var) and head.name in bottom and len(args) >= bottom[head.name]:
            return FALSE
        fun = _simp(f.fun, bottom)
        if isinstance(f, AppInt):
            if isinstance(fun, Abs):
                return _simp(substitute(fun.body, {fun.name: f.arg}), bottom)
            return AppInt(fun, f.arg)
        arg = _simp(f.arg, bottom)
        if isinstance(fun, Abs) and (_atomic(arg) or _occ(fun.name, fun.body) <= 1):
            return _simp(substitute(fun.body, {fun.name: arg}), bottom)
        return App(fun, arg)
    return f


def simplify_formula(f: Formula) -> Formula:
    """The per-body simplification of `simplify` applied to one formula."""
    while True:
        g = _simp(f, {})
        if g == f:
            return g
        f = g


def search_form(es: EquationSystem) -> Formula:
    """Single formula for the search engine: unfold, beta-normalize and
    simplify, so existentials pinned by an equation disappear before the
    witness enumeration sees them."""
    return simplify_formula(beta_normal(toform(es, allow_recursion=True)))


def _is_bottom(body: Formula) -> bool:
    while isinstance(body, Abs):
        body = body.body
    return body == FALSE


def simplify(es: EquationSystem) -> EquationSystem:
    """Beta/eta, integer-equality quantifier elimination, FALSE pruning and
    propagation of definitions whose body is FALSE.  Iterated to a fixpoint,
    so simplify(simplify(es)) == simplify(es)."""
    defs = list(es.defs)
    main = es.main
    while True:
        bottom = {}
        for d in defs:
            if _is_bottom(d.body):
                bottom[d.name] = len(d.param_names()) + _lambda_depth(d.body)
        new_defs = [Definition(d.name, d.params, _simp(d.body, bottom)) for d in defs]
        new_main = _simp(main, bottom)
        if new_defs == defs and new_main == main:
            break
        defs, main = new_defs, new_main
    return EquationSystem(dict(es.env), tuple(defs), main, es.maxar)


def _lambda_depth(body: Formula) -> int:
    n = 0
    while isinstance(body, Abs):
        n += 1
        body = body.body
    return n


# statistics

def max_predvars(es: EquationSystem) -> int:
    best = 0
    for d in es.defs:
        try:
            best = max(best, len(decomp_params(d.params, es.env[d.name], es.maxar).predvars))
        except Exception:
            pass
    return best


def stats(src: EquationSystem, out: EquationSystem) -> dict:
    return {
        "order_in": system_order(src),
        "order_out": system_order(out),
        "defs_in": len(src.defs),
        "defs_out": len(out.defs),
        "nodes_in": src.node_count(),
        "nodes_out": out.node_count(),
        "k_max": max_predvars(src),
    }


def lower(es: EquationSystem, do_simplify: bool = True, do_flatten: bool = True) -> EquationSystem:
    """lower_main followed by the optional flattening and simplification."""
    out = lower_main(es)
    if do_flatten:
        out = flatten_tuples(out)
    if do_simplify:
        out = simplify(out)
    return out
