import random

import pytest

from muhfl.core import (
    INT, PROP, TRUE, Abs, And, App, Arrow, IVar, Le, Lit, Mu, NotClosed, NotProp, Var, alpha_eq,
    is_disjunctive, order_of_formula, parse_formula, substitute, typecheck,
)
from muhfl.core.syntax import walk
from muhfl.semantics import Invalid, SearchBudget, Valid, search_valid
from muhfl.todisj import beta_admin, raise_body, raise_env, raise_sort, raise_top

from fixtures import phi_sum
from generators import random_formula

INT_PROP = Arrow(INT, PROP)
SMALL = SearchBudget(5000, 8, 20000)


def order_shift(f):
    """Expected order after raising: one more when f has a fixpoint; a
    fixpoint-free formula has order 0 on both sides."""
    has_mu = any(isinstance(n, Mu) for n in walk(f))
    return order_of_formula(f) + 1 if has_mu else 0


def mu_p(n: int):
    return parse_formula(f"(mu p : int -> prop. \\y : int. y = 0 \\/ (p (y - 1) /\\ p (y + 1))) {n}")


def test_raise_sort_examples():
    assert raise_sort(PROP) == Arrow(PROP, PROP)
    assert raise_sort(INT) == INT
    assert raise_sort(INT_PROP) == Arrow(INT, Arrow(PROP, PROP))
    assert raise_env({"k": INT_PROP}) == {"k": Arrow(INT, Arrow(PROP, PROP))}


def test_raise_comparison():
    assert alpha_eq(raise_body(TRUE), Abs("x", PROP, And(TRUE, Var("x"))))


def test_raise_conjunction_composes():
    p, q = Le(IVar("a"), Lit(0)), Le(Lit(0), IVar("a"))
    out = raise_body(And(p, q))
    expected = parse_formula(
        "\\a : int. \\x : prop. (\\u : prop. a <= 0 /\\ u) ((\\v : prop. 0 <= a /\\ v) x)"
    )
    assert alpha_eq(Abs("a", INT, out), expected)


def test_raised_fixpoint_matches_worked_display():
    out = beta_admin(raise_body(mu_p(0)))
    expected = parse_formula(
        "(mu p : int -> prop -> prop. \\y : int. \\x : prop. "
        "y <= 0 /\\ (0 <= y /\\ x) \\/ p (y - 1) (p (y + 1) x)) 0"
    )
    assert alpha_eq(out, expected)


def test_raised_fixpoint_verdicts():
    assert isinstance(search_valid(raise_top(mu_p(0)), SMALL), Valid)
    assert not isinstance(search_valid(raise_top(mu_p(1)), SMALL), Valid)


def test_raise_top_of_true():
    out = raise_top(TRUE)
    assert isinstance(out, App) and out.arg == TRUE
    assert isinstance(search_valid(out), Valid)


def test_raise_top_errors():
    with pytest.raises(NotClosed):
        raise_top(Var("p"))
    with pytest.raises(NotProp):
        raise_top(Abs("z", INT, TRUE))


def test_sum_example_is_preserved():
    for n in (-1, 2):
        src = search_valid(phi_sum(n))
        out = search_valid(raise_top(phi_sum(n)))
        assert type(src) is type(out)
    assert order_of_formula(raise_top(phi_sum(-1))) == 2


def test_raise_typing_order_and_disjunctivity_on_generated():
    rng = random.Random(17)
    for _ in range(150):
        f = random_formula(rng)
        g = raise_top(f)
        assert typecheck({}, g) == PROP
        assert typecheck({}, raise_body(f)) == Arrow(PROP, PROP)
        assert order_of_formula(g) == order_shift(f)
        assert is_disjunctive(g)


def test_raise_commutes_with_integer_substitution():
    rng = random.Random(23)
    for _ in range(100):
        g = And(Le(IVar("zz"), Lit(2)), random_formula(rng))
        e = Lit(rng.randint(-3, 3))
        lhs = raise_body(substitute(g, {"zz": e}))
        rhs = substitute(raise_body(g), {"zz": e})
        assert alpha_eq(lhs, rhs)


def test_beta_admin_is_idempotent():
    rng = random.Random(2)
    for _ in range(50):
        g = beta_admin(raise_body(random_formula(rng)))
        assert beta_admin(g) == g


def test_verdicts_agree_with_small_budget():
    rng = random.Random(31)
    for _ in range(100):
        f = random_formula(rng, max_size=25)
        a, b = search_valid(f), search_valid(raise_top(f))
        if isinstance(a, Valid) or (isinstance(a, Invalid) and a.exhaustive):
            if isinstance(b, (Valid, Invalid)):
                assert isinstance(a, Valid) == isinstance(b, Valid)
