"""Syntax, sorts, typing and structural utilities."""
from .desugar import desugar
from .errors import (
    ArityMismatch, GrammarViolation, HflError, HflTypeError, HigherOrderTupleEscape,
    InvariantViolation, NotClosed, NotDisjunctive, NotNormalized, NotProp,
    NotRecursionFree, NotUnit, OrderTooHigh, ParseError, SortMismatch, UnboundVariable,
)
from .names import NameSupply
from .parser import (
    parse_formula, parse_formula_with_sort, parse_int_expr, parse_sort,
    parse_system, system_text,
)
from .printer import formula_text, int_text
from .sorts import (
    INT, PROP, Arrow, IntSort, Product, PropSort, Sort, arity, arrows, int_pred,
    is_int_pred, order, product, sort_text, split_arrows,
)
from .subst import substitute
from .syntax import (
    FALSE, TRUE, Abs, Add, And, App, AppInt, Cmp, Exists, Formula, IntExpr, IVar,
    Le, Lit, Mu, Mul, Or, Tuple, Var, alpha_eq, alpha_key, apply, eval_int,
    free_vars, size, spine,
)
from .system import Definition, EquationSystem
from .typing import is_disjunctive, order_of_formula, typecheck

order_of_sort = order
arity_of_sort = arity
