"""Fresh-name supply.

Generated names carry a `$` (or `@` for approximation stages) so they never
clash with names a user would write by hand; the supply additionally avoids
every name it has been told about.
"""
from __future__ import annotations

import itertools
import threading
from typing import Iterable


def root_of(name: str) -> str:
    root = name.split("$", 1)[0]
    return root or "v"


class NameSupply:
    def __init__(self, avoid: Iterable[str] = ()) -> None:
        self._used = set(avoid)
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def reserve(self, names: Iterable[str]) -> None:
        with self._lock:
            self._used.update(names)

    def used(self, name: str) -> bool:
        return name in self._used

    def fresh(self, hint: str = "v") -> str:
        base = root_of(hint)
        with self._lock:
            while True:
                name = f"{base}${next(self._counter)}"
                if name not in self._used:
                    self._used.add(name)
                    return name

    def exact(self, name: str) -> str:
        """`name` itself if still free, else a fresh variant of it."""
        with self._lock:
            if name not in self._used:
                self._used.add(name)
                return name
        return self.fresh(name)
