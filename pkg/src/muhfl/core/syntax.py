"""Formula and integer-expression trees.

All nodes are immutable.  Hashes and free-variable sets are cached on first
use because the reduction search hashes the same subtrees many times.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union

from .sorts import Sort


class Node:
    __match_args__: tuple = ()

    def _fields(self) -> tuple:
        return tuple(getattr(self, n) for n in self.__match_args__)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    def __hash__(self) -> int:
        d = self.__dict__
        h = d.get("_h")
        if h is None:
            h = hash((type(self).__name__,) + self._fields())
            object.__setattr__(self, "_h", h)
        return h

    def __str__(self) -> str:
        from .printer import formula_text, int_text

        if isinstance(self, IntExpr):
            return int_text(self)
        return formula_text(self)


# integer expressions

class IntExpr(Node):
    pass


@dataclass(frozen=True, eq=False)
class Lit(IntExpr):
    value: int


@dataclass(frozen=True, eq=False)
class IVar(IntExpr):
    name: str


@dataclass(frozen=True, eq=False)
class Add(IntExpr):
    lhs: IntExpr
    rhs: IntExpr


@dataclass(frozen=True, eq=False)
class Mul(IntExpr):
    lhs: IntExpr
    rhs: IntExpr


# formulas

class Formula(Node):
    pass


@dataclass(frozen=True, eq=False)
class Var(Formula):
    name: str


@dataclass(frozen=True, eq=False)
class Or(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, eq=False)
class And(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, eq=False)
class Mu(Formula):
    name: str
    sort: Sort
    body: Formula


@dataclass(frozen=True, eq=False)
class Abs(Formula):
    name: str
    sort: Sort
    body: Formula


@dataclass(frozen=True, eq=False)
class App(Formula):
    fun: Formula
    arg: Formula


@dataclass(frozen=True, eq=False)
class AppInt(Formula):
    fun: Formula
    arg: IntExpr


@dataclass(frozen=True, eq=False)
class Le(Formula):
    lhs: IntExpr
    rhs: IntExpr


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    name: str
    body: Formula


@dataclass(frozen=True, eq=False)
class Tuple(Formula):
    items: tuple

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("empty tuple")


@dataclass(frozen=True, eq=False)
class Cmp(Formula):
    """Comparison sugar (`<`, `>`, `=`, `>=`); removed by desugar."""
    op: str
    lhs: IntExpr
    rhs: IntExpr


Term = Union[Formula, IntExpr]

TRUE = Le(Lit(0), Lit(0))
FALSE = Le(Lit(1), Lit(0))
BINDERS = (Mu, Abs, Exists)


def is_true(f: Formula) -> bool:
    return f == TRUE


def is_false(f: Formula) -> bool:
    return f == FALSE


def apply(head: Formula, *args: Term) -> Formula:
    """Left-nested application; integer arguments become AppInt."""
    for a in args:
        head = AppInt(head, a) if isinstance(a, IntExpr) else App(head, a)
    return head


def spine(f: Formula) -> tuple[Formula, list]:
    """Split an application chain into head and argument list."""
    args = []
    while isinstance(f, (App, AppInt)):
        args.append(f.arg)
        f = f.fun
    args.reverse()
    return f, args


def lams(binders: Sequence[tuple[str, Sort]], body: Formula) -> Formula:
    for name, sort in reversed(list(binders)):
        body = Abs(name, sort, body)
    return body


def disj(items: Sequence[Formula]) -> Formula:
    items = list(items)
    if not items:
        return FALSE
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


def conj(items: Sequence[Formula]) -> Formula:
    items = list(items)
    if not items:
        return TRUE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def eq_guard(a: IntExpr, b: IntExpr, then: Formula) -> Formula:
    """a = b /\\ then, as a chain of two guards."""
    return And(Le(a, b), And(Le(b, a), then))


def neg(e: IntExpr) -> IntExpr:
    if isinstance(e, Lit):
        return Lit(-e.value)
    return Mul(Lit(-1), e)


def plus(e: IntExpr, n: int) -> IntExpr:
    if n == 0:
        return e
    if isinstance(e, Lit):
        return Lit(e.value + n)
    return Add(e, Lit(n))


# traversal helpers

def children(f: Node) -> tuple:
    if isinstance(f, (Or, And, Add, Mul, Le, Cmp)):
        return (f.lhs, f.rhs)
    if isinstance(f, (Mu, Abs, Exists)):
        return (f.body,)
    if isinstance(f, (App, AppInt)):
        return (f.fun, f.arg)
    if isinstance(f, Tuple):
        return f.items
    return ()


def walk(f: Node) -> Iterator[Node]:
    stack = [f]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def size(f: Node) -> int:
    return sum(1 for _ in walk(f))


def free_vars(f: Node) -> frozenset:
    """Free names (formula and integer variables share one namespace)."""
    d = f.__dict__
    fv = d.get("_fv")
    if fv is not None:
        return fv
    if isinstance(f, (Var, IVar)):
        fv = frozenset((f.name,))
    elif isinstance(f, Lit):
        fv = frozenset()
    elif isinstance(f, BINDERS):
        fv = free_vars(f.body) - {f.name}
    else:
        cs = children(f)
        if not cs:
            fv = frozenset()
        elif len(cs) == 1:
            fv = free_vars(cs[0])
        else:
            fv = free_vars(cs[0]).union(*(free_vars(c) for c in cs[1:]))
    object.__setattr__(f, "_fv", fv)
    return fv


def all_names(f: Node) -> set:
    out = set()
    for n in walk(f):
        if isinstance(n, (Var, IVar)):
            out.add(n.name)
        elif isinstance(n, BINDERS):
            out.add(n.name)
    return out


def eval_int(e: IntExpr, env: dict | None = None) -> int:
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, IVar):
        if env is None or e.name not in env:
            raise KeyError(e.name)
        return env[e.name]
    if isinstance(e, Add):
        return eval_int(e.lhs, env) + eval_int(e.rhs, env)
    return eval_int(e.lhs, env) * eval_int(e.rhs, env)


def fold_int(e: IntExpr) -> IntExpr:
    """Evaluate closed subexpressions."""
    if isinstance(e, (Lit, IVar)):
        return e
    a, b = fold_int(e.lhs), fold_int(e.rhs)
    if isinstance(a, Lit) and isinstance(b, Lit):
        return Lit(a.value + b.value if isinstance(e, Add) else a.value * b.value)
    return type(e)(a, b)


_intern: dict = {}
_generation = [0]


def reset_alpha_cache() -> None:
    """Forget interned closed subterms (ids cached on nodes become stale)."""
    _intern.clear()
    _generation[0] += 1


def alpha_key(f: Node, _env: dict | None = None, _depth: int = 0):
    """Hashable value identifying f up to renaming of bound names.

    Closed subterms are interned to small integers so that keys of large
    states stay cheap to hash."""
    if not free_vars(f) and not isinstance(f, Lit):
        cached = f.__dict__.get("_ak")
        if cached is not None and cached[0] == _generation[0]:
            return cached[1]
        key = _alpha_key(f, {}, 0)
        ident = _intern.get(key)
        if ident is None:
            ident = ("@", len(_intern))
            _intern[key] = ident
        object.__setattr__(f, "_ak", (_generation[0], ident))
        return ident
    return _alpha_key(f, _env or {}, _depth)


def _alpha_key(f: Node, env: dict, depth: int):
    if isinstance(f, (Var, IVar)):
        lvl = env.get(f.name)
        return (f.name,) if lvl is None else depth - lvl
    if isinstance(f, Lit):
        return ("#", f.value)
    if isinstance(f, BINDERS):
        inner = dict(env)
        inner[f.name] = depth
        key = alpha_key(f.body, inner, depth + 1)
        if isinstance(f, Exists):
            return ("E", key)
        return ("M" if isinstance(f, Mu) else "L", f.sort, key)
    tag = type(f).__name__
    if isinstance(f, Cmp):
        tag = "C" + f.op
    return (tag,) + tuple(alpha_key(c, env, depth) for c in children(f))


def alpha_eq(f: Node, g: Node) -> bool:
    return alpha_key(f) == alpha_key(g)


def uses_exists(f: Node) -> bool:
    return any(isinstance(n, Exists) for n in walk(f))


def is_plain(f: Node) -> bool:
    from .sorts import has_product

    for n in walk(f):
        if isinstance(n, Tuple):
            return False
        if isinstance(n, (Mu, Abs)) and has_product(n.sort):
            return False
    return True
