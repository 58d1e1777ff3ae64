import random

import pytest

from muhfl.core import (
    FALSE, INT, TRUE, Add, IVar, Lit, NotClosed, NotUnit, Or, UnboundVariable, alpha_eq,
    is_disjunctive, order_of_formula, typecheck,
)
from muhfl.frontend import (
    UNIT, Angelic, Assume, Demonic, Err, Fix, TAbs, TApp, TAppInt, TArrow, TVar, Unit,
    if_then_else, only_angelic, parse_term, term_fix_order, term_text, tidy, to_formula,
    typecheck_term,
)
from muhfl.semantics import Invalid, Valid, search_valid

from fixtures import load_text, phi_sum


def test_unit_and_fail_have_unit_type():
    assert typecheck_term({}, Err()) == UNIT
    assert typecheck_term({}, Unit()) == UNIT


def test_summation_term_type():
    head = parse_term(load_text("sum.term"))
    while isinstance(head, (TApp, TAppInt)):
        head = head.fun
    assert isinstance(head, Fix)
    assert typecheck_term({}, head) == TArrow(INT, TArrow(TArrow(INT, UNIT), UNIT))


def test_unbound_term_variable():
    with pytest.raises(UnboundVariable):
        typecheck_term({}, Demonic(Unit(), TVar("x")))


def test_translation_examples():
    assert to_formula(Err()) == TRUE
    assert to_formula(Unit()) == FALSE
    f = to_formula(Angelic(Err(), Unit()))
    assert f == Or(TRUE, FALSE)
    assert isinstance(search_valid(f), Valid)


def test_summation_term_translates_to_summation_formula():
    t = parse_term(load_text("sum.term"))
    f = to_formula(t)
    assert alpha_eq(tidy(f), phi_sum(-1))
    assert order_of_formula(f) == term_fix_order(t) == 1
    assert isinstance(search_valid(f), Valid)


def test_translation_errors():
    with pytest.raises(NotClosed):
        to_formula(TVar("k"))
    with pytest.raises(NotUnit):
        to_formula(TAbs("x", INT, Unit()))


def test_game_verdicts():
    assert isinstance(search_valid(to_formula(parse_term(load_text("choice.term")))), Valid)
    assert search_valid(to_formula(parse_term(load_text("lose.term")))) == Invalid(True)


def test_if_expands_to_guarded_angelic_choice():
    x = IVar("x")
    sugared = parse_term("\\x : int. if x < 3 then fail else ()")
    manual = TAbs("x", INT, if_then_else("<", x, Lit(3), Err(), Unit()))
    assert term_text(sugared) == term_text(manual)
    expected = TAbs("x", INT, Angelic(Assume((Add(x, Lit(1)), Lit(3)), Err()),
                                      Assume((Lit(3), x), Unit())))
    assert alpha_eq(to_formula(TAppInt(sugared, Lit(0))), to_formula(TAppInt(expected, Lit(0))))


def test_assert_reaches_fail_when_violated():
    ok = parse_term("(\\n : int. assert n > 0; ()) 1")
    bad = parse_term("(\\n : int. assert n > 0; ()) 0")
    assert not isinstance(search_valid(to_formula(ok)), Valid)
    assert isinstance(search_valid(to_formula(bad)), Valid)


def test_term_text_round_trip():
    t = parse_term(load_text("sum.term"))
    assert term_text(parse_term(term_text(t))) == term_text(t)


def _random_term(rng, ints, depth, angelic_only):
    r = rng.random()
    if depth == 0 or r < 0.25:
        return rng.choice([Unit(), Err()])
    if r < 0.5 or angelic_only:
        if r < 0.7:
            return Angelic(_random_term(rng, ints, depth - 1, angelic_only),
                           _random_term(rng, ints, depth - 1, angelic_only))
        a = rng.choice(ints) if ints else Lit(rng.randint(-2, 2))
        return Assume((a, Lit(rng.randint(-2, 2))), _random_term(rng, ints, depth - 1, angelic_only))
    if r < 0.7:
        return Demonic(_random_term(rng, ints, depth - 1, angelic_only),
                       _random_term(rng, ints, depth - 1, angelic_only))
    # a counting loop with an integer parameter
    f, n = f"f{depth}", f"n{depth}"
    body = Angelic(Assume((IVar(n), Lit(0)), _random_term(rng, ints + [IVar(n)], depth - 1, angelic_only)),
                   Assume((Lit(1), IVar(n)), TAppInt(TVar(f), Add(IVar(n), Lit(-1)))))
    loop = Fix(f, TAbs(n, INT, body), TArrow(INT, UNIT))
    return TAppInt(loop, Lit(rng.randint(-1, 3)))


def test_translation_preserves_typing_and_order():
    rng = random.Random(12)
    for _ in range(150):
        t = _random_term(rng, [], 4, angelic_only=False)
        f = to_formula(t)
        assert typecheck({}, f) == typecheck({}, TRUE)
        assert order_of_formula(f) == term_fix_order(t)


def test_angelic_terms_translate_to_disjunctive_formulas():
    rng = random.Random(14)
    for _ in range(150):
        t = _random_term(rng, [], 4, angelic_only=True)
        assert only_angelic(t)
        assert is_disjunctive(to_formula(t))
