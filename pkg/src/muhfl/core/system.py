"""Equation systems (env, definitions, main formula)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .sorts import Product, Sort, arrows, split_arrows
from .syntax import Formula, size

Pattern = Union[str, tuple]


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple  # of (pattern, Sort); pattern is a name or a tuple of names
    body: Formula

    def param_names(self) -> list[str]:
        out = []
        for pat, _ in self.params:
            out.extend(pat if isinstance(pat, tuple) else (pat,))
        return out

    def param_env(self) -> dict:
        env = {}
        for pat, s in self.params:
            if isinstance(pat, tuple):
                for n, c in zip(pat, s.components):
                    env[n] = c
            else:
                env[pat] = s
        return env


@dataclass(frozen=True)
class EquationSystem:
    env: dict
    defs: tuple
    main: Formula
    maxar: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "defs", tuple(self.defs))
        object.__setattr__(self, "env", dict(self.env))

    def get(self, name: str) -> Definition:
        for d in self.defs:
            if d.name == name:
                return d
        raise KeyError(name)

    def names(self) -> list[str]:
        return [d.name for d in self.defs]

    def node_count(self) -> int:
        return size(self.main) + sum(size(d.body) for d in self.defs)

    def __str__(self) -> str:
        from .parser import system_text

        return system_text(self)


def residual_sort(es: EquationSystem, d: Definition) -> Sort:
    args, res = split_arrows(es.env[d.name])
    return arrows(args[len(d.params):], res)


def pattern_sort_ok(pat: Pattern, s: Sort) -> bool:
    if isinstance(pat, tuple):
        return isinstance(s, Product) and len(s.components) == len(pat)
    return True
