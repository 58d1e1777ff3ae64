"""Worked examples shared by several test modules."""
from pathlib import Path

from muhfl.core import parse_formula, parse_system

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

SUM_FN = (
    "(mu sum : int -> (int -> prop) -> prop. \\x : int. \\k : int -> prop. "
    "x < 0 \\/ (x = 0 /\\ k 0) \\/ (x > 0 /\\ sum (x - 1) (\\y : int. k (x + y))))"
)


def phi_sum(n: int):
    """The summation formula applied to n and the continuation r < n."""
    return parse_formula(f"{SUM_FN} ({n}) (\\r : int. r < {n})")


def load_system(name: str):
    return parse_system((CORPUS / name).read_text())


def load_text(name: str) -> str:
    return (CORPUS / name).read_text()
