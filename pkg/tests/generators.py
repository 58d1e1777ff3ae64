"""Random generators for the property suites.

Every recursive call is guarded by 1 <= n and decreases n, so searches on
generated inputs have finite state spaces except through existentials.
"""
from __future__ import annotations

import random

from muhfl.core.names import NameSupply
from muhfl.core.sorts import INT, PROP, Arrow, arrows, int_pred
from muhfl.core.syntax import (
    FALSE, TRUE, Abs, Add, And, App, AppInt, Exists, IVar, Le, Lit, Mu, Or,
    Var, apply, lams, size,
)
from muhfl.core.system import Definition, EquationSystem


def gen_int(rng: random.Random, ints: list, depth: int = 1):
    r = rng.random()
    if ints and r < 0.5:
        v = IVar(rng.choice(ints))
        if depth > 0 and rng.random() < 0.3:
            return Add(v, Lit(rng.randint(-2, 2)))
        return v
    if ints and depth > 0 and r < 0.6:
        return Add(IVar(rng.choice(ints)), IVar(rng.choice(ints)))
    return Lit(rng.randint(-3, 3))


def gen_guard(rng, ints):
    return Le(gen_int(rng, ints), gen_int(rng, ints))


class FormulaGen:
    """Closed formulas of order <= 1 built from guards, choices, bounded
    recursion over integers and continuation-passing recursion."""

    def __init__(self, rng: random.Random, exists_rate: float = 0.03) -> None:
        self.rng = rng
        self.supply = NameSupply()
        self.exists_rate = exists_rate

    def fresh(self, hint):
        return self.supply.fresh(hint)

    def prop(self, ints: list, preds: list, depth: int):
        rng = self.rng
        r = rng.random()
        if depth <= 0 or r < 0.2:
            return self.leaf(ints, preds)
        if r < 0.35:
            return Or(self.prop(ints, preds, depth - 1), self.prop(ints, preds, depth - 1))
        if r < 0.45:
            return And(self.prop(ints, preds, depth - 1), self.prop(ints, preds, depth - 1))
        if r < 0.6:
            return And(gen_guard(rng, ints), self.prop(ints, preds, depth - 1))
        if r < 0.6 + self.exists_rate:
            z = self.fresh("z")
            return Exists(z, And(Le(IVar(z), gen_int(rng, ints)),
                                 And(Le(gen_int(rng, ints), IVar(z)), self.prop(ints + [z], preds, depth - 1))))
        if r < 0.75:
            return self.mu0(ints, preds, depth - 1)
        if r < 0.85:
            return self.mu1(ints, preds, depth - 1)
        x = self.fresh("x")
        return AppInt(Abs(x, INT, self.prop(ints + [x], preds, depth - 1)), gen_int(self.rng, ints))

    def leaf(self, ints, preds):
        rng = self.rng
        r = rng.random()
        if preds and r < 0.45:
            return AppInt(Var(rng.choice(preds)), gen_int(rng, ints))
        if r < 0.85:
            return gen_guard(rng, ints)
        return rng.choice([TRUE, FALSE])

    def mu0(self, ints, preds, depth):
        p, x = self.fresh("p"), self.fresh("x")
        inner = ints + [x]
        base = self.prop(inner, preds, depth - 1)
        rec = AppInt(Var(p), Add(IVar(x), Lit(-1)))
        if self.rng.random() < 0.5:
            step = Or(rec, self.prop(inner, preds, depth - 1))
        else:
            step = And(gen_guard(self.rng, inner), rec)
        body = Or(And(Le(IVar(x), Lit(0)), base), And(Le(Lit(1), IVar(x)), step))
        return AppInt(Mu(p, int_pred(1), Abs(x, INT, body)), Lit(self.rng.randint(-1, 3)))

    def mu1(self, ints, preds, depth):
        rng = self.rng
        q, k, x, y, r = (self.fresh(h) for h in "qkxyr")
        inner = ints + [x]
        base = self.prop(inner, preds + [k], depth - 1)
        kont = Abs(y, INT, AppInt(Var(k), Add(IVar(x), IVar(y))) if rng.random() < 0.6
                   else And(gen_guard(rng, inner + [y]), AppInt(Var(k), IVar(y))))
        rec = AppInt(App(Var(q), kont), Add(IVar(x), Lit(-1)))
        body = Or(And(Le(IVar(x), Lit(0)), base), And(Le(Lit(1), IVar(x)), rec))
        qsort = Arrow(int_pred(1), int_pred(1))
        fn = Mu(q, qsort, lams([(k, int_pred(1)), (x, INT)], body))
        cont = Abs(r, INT, self.prop(ints + [r], preds, depth - 1))
        return AppInt(App(fn, cont), Lit(rng.randint(-1, 3)))


def random_formula(rng: random.Random, max_size: int = 40, exists_rate: float = 0.03):
    while True:
        f = FormulaGen(rng, exists_rate).prop([], [], rng.randint(1, 4))
        if size(f) <= max_size:
            return f


# normalized systems

class SystemGen:
    """Normalized disjunctive order-1 systems.  Definition i calls only
    later definitions, plus (when `recursive`) itself on n - 1 under the
    guard 1 <= n, where n is its first integer parameter."""

    def __init__(self, rng: random.Random, maxar: int = 1, recursive: bool = False) -> None:
        self.rng = rng
        self.M = maxar
        self.recursive = recursive

    def signature(self, name):
        rng = self.rng
        n_pred = rng.randint(1, 2)
        n_int = rng.randint(1 if self.recursive else 0, 2)
        kinds = ["p"] * n_pred + ["i"] * n_int
        rng.shuffle(kinds)
        params = []
        for j, kind in enumerate(kinds):
            if kind == "p":
                params.append((f"k{j}", int_pred(self.M)))
            else:
                params.append((f"n{j}", INT))
        return params

    def build(self, n_defs: int):
        M = self.M
        names = ["S"] + [f"D{i}" for i in range(1, n_defs)]
        sigs = {"S": [("t", int_pred(M))]}
        for n in names[1:]:
            sigs[n] = self.signature(n)
        env = {n: arrows([s for _, s in sigs[n]], PROP) for n in names}
        defs = []
        for i, n in enumerate(names):
            params = sigs[n]
            ints = [p for p, s in params if s == INT]
            preds = [p for p, s in params if s != INT]
            callable_ = names[i + 1:]
            body = self.body(ints, preds, callable_, sigs, 3, self_name=n if self.recursive and n != "S" else None)
            defs.append(Definition(n, tuple(params), body))
        zs = [f"z{j}" for j in range(M)]
        main = App(Var("S"), lams([(z, INT) for z in zs], TRUE))
        return EquationSystem(env, tuple(defs), main, M)

    def body(self, ints, preds, callable_, sigs, depth, self_name=None):
        rng = self.rng
        r = rng.random()
        if depth > 0 and r < 0.25:
            return Or(self.body(ints, preds, callable_, sigs, depth - 1, self_name),
                      self.body(ints, preds, callable_, sigs, depth - 1, self_name))
        if depth > 0 and r < 0.45:
            return And(gen_guard(rng, ints), self.body(ints, preds, callable_, sigs, depth - 1, self_name))
        if self_name is not None and depth > 0 and r < 0.55:
            params = sigs[self_name]
            n0 = next(p for p, s in params if s == INT)
            args = []
            for p, s in params:
                if p == n0:
                    args.append(Add(IVar(n0), Lit(-1)))
                else:
                    args.append(self.arg(s, ints, preds, callable_, sigs))
            return And(Le(Lit(1), IVar(n0)), apply(Var(self_name), *args))
        return self.call(ints, preds, callable_, sigs)

    def call(self, ints, preds, callable_, sigs):
        rng = self.rng
        if callable_ and rng.random() < 0.6:
            head = rng.choice(callable_)
            args = [self.arg(s, ints, preds, callable_, sigs) for _, s in sigs[head]]
            return apply(Var(head), *args)
        k = rng.choice(preds)
        return apply(Var(k), *[gen_int(rng, ints) for _ in range(self.M)])

    def arg(self, s, ints, preds, callable_, sigs, nest: int = 0):
        rng = self.rng
        if s == INT:
            return gen_int(rng, ints)
        # a predicate: a parameter or a definition applied to all but M trailing integers
        partial = [h for h in callable_
                   if len(sigs[h]) >= self.M and all(t == INT for _, t in sigs[h][-self.M:])]
        if partial and nest < 2 and rng.random() < 0.5:
            h = rng.choice(partial)
            front = sigs[h][:-self.M]
            return apply(Var(h), *[self.arg(t, ints, preds, callable_, sigs, nest + 1) for _, t in front])
        return Var(rng.choice(preds))


def random_system(rng: random.Random, recursive: bool = False, maxar=None, max_defs: int = 4):
    M = maxar if maxar is not None else rng.choice([1, 1, 2])
    return SystemGen(rng, M, recursive).build(rng.randint(1, max_defs))
