"""Toolkit for higher-order fixpoint logic with integers: type checking,
reduction-based and table-based evaluation, order-raising and
order-lowering translations, equation-system normalization and a
game-term frontend."""
import sys

from .core import *  # noqa: F401,F403

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

__version__ = "0.1.0"
