"""Simple sorts: int, prop, arrows and (for lowered output) products."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union


@dataclass(frozen=True)
class IntSort:
    def __str__(self) -> str:
        return sort_text(self)


@dataclass(frozen=True)
class PropSort:
    def __str__(self) -> str:
        return sort_text(self)


@dataclass(frozen=True)
class Arrow:
    arg: "Sort"
    res: "Sort"

    def __post_init__(self) -> None:
        if isinstance(self.res, IntSort):
            raise ValueError("arrow result must be a predicate sort")

    def __str__(self) -> str:
        return sort_text(self)


@dataclass(frozen=True)
class Product:
    components: tuple

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("empty product")
        for c in self.components:
            if isinstance(c, (IntSort, Product)):
                raise ValueError(f"bad product component {c!r}")

    def __str__(self) -> str:
        return sort_text(self)


Sort = Union[IntSort, PropSort, Arrow, Product]

INT = IntSort()
PROP = PropSort()


def arrows(args: Iterable[Sort], res: Sort) -> Sort:
    out = res
    for a in reversed(list(args)):
        out = Arrow(a, out)
    return out


def split_arrows(s: Sort) -> tuple[list[Sort], Sort]:
    args = []
    while isinstance(s, Arrow):
        args.append(s.arg)
        s = s.res
    return args, s


def int_pred(n: int) -> Sort:
    """INT^n -> Prop."""
    return arrows([INT] * n, PROP)


def product(components: Sequence[Sort]) -> Sort:
    """Product of the components; a single component stands for itself."""
    comps = tuple(components)
    if len(comps) == 1:
        return comps[0]
    return Product(comps)


def order(s: Sort) -> int:
    if isinstance(s, IntSort):
        return -1
    if isinstance(s, PropSort):
        return 0
    if isinstance(s, Arrow):
        return max(order(s.res), order(s.arg) + 1)
    return max(order(c) for c in s.components)


def arity(s: Sort) -> int:
    n = 0
    while isinstance(s, Arrow):
        n += 1
        s = s.res
    return n


def is_int_pred(s: Sort) -> bool:
    """True for INT^l -> Prop (l >= 0)."""
    args, res = split_arrows(s)
    return isinstance(res, PropSort) and all(isinstance(a, IntSort) for a in args)


def is_predicate(s: Sort) -> bool:
    return not isinstance(s, IntSort)


def has_product(s: Sort) -> bool:
    if isinstance(s, Product):
        return True
    if isinstance(s, Arrow):
        return has_product(s.arg) or has_product(s.res)
    return False


def sort_text(s: Sort) -> str:
    if isinstance(s, IntSort):
        return "int"
    if isinstance(s, PropSort):
        return "prop"
    if isinstance(s, Product):
        return "(" + " * ".join(sort_text(c) for c in s.components) + ")"
    arg = sort_text(s.arg)
    if isinstance(s.arg, Arrow):
        arg = "(" + arg + ")"
    return f"{arg} -> {sort_text(s.res)}"
