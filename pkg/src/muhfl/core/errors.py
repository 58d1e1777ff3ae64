"""Exception hierarchy shared by all passes."""
from __future__ import annotations


class HflError(Exception):
    """Base class for user-facing errors (bad input)."""


class ParseError(HflError):
    def __init__(self, message: str, line: int = 0, col: int = 0) -> None:
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class HflTypeError(HflError, TypeError):
    def __init__(self, message: str, expected=None, found=None, location=None) -> None:
        parts = [message]
        if expected is not None:
            parts.append(f"expected {expected}")
        if found is not None:
            parts.append(f"found {found}")
        text = "; ".join(parts)
        if location is not None:
            text = f"{location[0]}:{location[1]}: {text}"
        super().__init__(text)
        self.expected = expected
        self.found = found
        self.location = location


class UnboundVariable(HflTypeError):
    def __init__(self, name: str, location=None) -> None:
        super().__init__(f"unbound variable {name}", location=location)
        self.name = name


class SortMismatch(HflError):
    pass


class NotClosed(HflError):
    pass


class NotProp(HflError):
    pass


class NotUnit(HflError):
    pass


class NotDisjunctive(HflError):
    pass


class NotRecursionFree(HflError):
    pass


class NotNormalized(HflError):
    pass


class GrammarViolation(NotNormalized):
    def __init__(self, node, reason: str = "") -> None:
        from .printer import formula_text

        super().__init__(f"grammar violation{': ' + reason if reason else ''}: {formula_text(node)}")
        self.node = node


class ArityMismatch(HflError):
    pass


class OrderTooHigh(HflError):
    pass


class HigherOrderTupleEscape(HflError):
    pass


class InvariantViolation(Exception):
    """An internal check failed; indicates a bug, not bad input."""
