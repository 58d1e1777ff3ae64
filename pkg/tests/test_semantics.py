import random

import numpy as np
import pytest

from muhfl.core import (
    FALSE, INT, TRUE, And, Abs, AppInt, Exists, IVar, Le,
    Lit, Mu, NotClosed, NotProp, Or, OrderTooHigh, Var, alpha_eq, int_pred, parse_formula,
    parse_system,
)
from muhfl.fromdisj import lower
from muhfl.semantics import (
    Invalid, SearchBudget, Unknown, Valid, encode_exists, kleene_eval, kleene_tables, replay,
    search_valid, step, witness_order,
)

from fixtures import load_system, phi_sum
from generators import random_formula


def test_step_examples():
    assert step(And(TRUE, Le(Lit(0), Lit(1)))) == [Le(Lit(0), Lit(1))]
    a, b = Le(Lit(0), Lit(1)), Le(Lit(2), Lit(1))
    assert step(Or(a, b)) == [a, b]
    assert step(Le(Lit(3), Lit(2))) == [FALSE]
    assert step(And(FALSE, a)) == [FALSE]


def test_step_unfolds_and_beta_reduces():
    mu = parse_formula("(mu p : int -> prop. \\y : int. y <= 0) 3")
    (unfolded,) = step(mu)
    (reduced,) = step(unfolded)
    assert reduced == Le(Lit(3), Lit(0))


def test_step_enumerates_witnesses_in_box():
    f = Exists("z", Le(IVar("z"), Lit(0)))
    out = step(f, SearchBudget(exists_box=2))
    assert out == [Le(Lit(n), Lit(0)) for n in [0, 1, -1, 2, -2]]
    assert witness_order(1) == [0, 1, -1]


def test_step_rejects_bad_input():
    with pytest.raises(NotClosed):
        step(Var("p"))
    with pytest.raises(NotProp):
        step(Abs("x", INT, TRUE))


def test_sum_example_verdicts():
    assert isinstance(search_valid(phi_sum(-1)), Valid)
    assert search_valid(phi_sum(2)) == Invalid(True)


def test_trivial_fixpoint_is_refuted():
    assert search_valid(parse_formula("mu x : prop. x")) == Invalid(True)


def test_valid_traces_replay():
    v = search_valid(phi_sum(-1))
    assert replay(v.trace)
    assert v.steps == len(v.trace) - 1


def test_verdict_lines():
    assert str(Valid(3)) == "VALID steps=3"
    assert str(Invalid(True)) == "INVALID exhaustive=true"
    assert str(Unknown("FuelExhausted")) == "UNKNOWN reason=FuelExhausted"


def test_fuel_exhaustion_is_unknown():
    f = parse_formula("(mu p : int -> prop. \\y : int. p (y + 1)) 0")
    assert search_valid(f, SearchBudget(max_steps=50)) == Unknown("FuelExhausted")


def test_truncated_existential_is_unknown():
    f = parse_formula("exists z. z = 100")
    assert search_valid(f, SearchBudget(exists_box=8)) == Unknown("BoundTruncated")
    assert isinstance(search_valid(f, SearchBudget(exists_box=128)), Valid)


def test_encode_exists_shape():
    f = parse_formula("exists z. z = 3")
    g = encode_exists(f)
    assert isinstance(g, AppInt) and g.arg == Lit(0)
    assert isinstance(g.fun, Mu) and g.fun.sort == int_pred(1)
    y = g.fun.body.name
    expected = parse_formula(
        f"(mu x : int -> prop. \\{y} : int. ({y} = 3 \\/ -1 * {y} = 3) \\/ x ({y} + 1)) 0"
    )
    assert alpha_eq(g, expected)


def test_encode_exists_verdicts():
    assert isinstance(search_valid(encode_exists(parse_formula("exists z. z = -2"))), Valid)
    bottom = encode_exists(parse_formula("exists z. false"))
    assert isinstance(search_valid(bottom, SearchBudget(max_steps=2000)), Unknown)


def test_exists_agreement_on_generated():
    rng = random.Random(21)
    budget = SearchBudget(max_steps=3000, exists_box=8)
    for _ in range(40):
        f = random_formula(rng, max_size=30, exists_rate=0.3)
        a = search_valid(f, budget)
        b = search_valid(encode_exists(f), budget)
        if isinstance(b, Valid):
            assert not isinstance(a, Invalid)
        if isinstance(a, Valid) and not isinstance(b, Unknown):
            assert isinstance(b, Valid)


def test_budget_monotonicity():
    rng = random.Random(4)
    small, large = SearchBudget(200, 4, 400), SearchBudget(20000, 16, 40000)
    for _ in range(80):
        f = random_formula(rng, max_size=30, exists_rate=0.2)
        a, b = search_valid(f, small), search_valid(f, large)
        if isinstance(a, Valid):
            assert not isinstance(b, Invalid)
        if isinstance(a, Invalid) and a.exhaustive:
            assert not isinstance(b, Valid)


def test_exact_on_fixpoint_free_formulas():
    rng = random.Random(9)
    seen = 0
    while seen < 40:
        f = random_formula(rng, max_size=20, exists_rate=0.0)
        if any(isinstance(n, Mu) for n in _nodes(f)):
            continue
        seen += 1
        v = search_valid(f)
        assert isinstance(v, Valid) or v == Invalid(True)


def _nodes(f):
    from muhfl.core.syntax import walk
    return list(walk(f))


def _counter_system():
    return parse_system("""%ENV
P : int -> prop;
%DEFS
P z =mu z = 0 \\/ P (z - 1);
%MAIN exists z. P z;
""")


def test_kleene_base_case():
    assert kleene_eval(_counter_system(), box=4) == Valid(1)


def test_kleene_bottom_fixpoint_is_unknown():
    es = parse_system("""%ENV
P : int -> prop;
%DEFS
P z =mu P z;
%MAIN P 0;
""")
    assert isinstance(kleene_eval(es, box=4), Unknown)


def test_kleene_tables_match_least_fixpoint():
    tables = kleene_tables(_counter_system(), box=4)
    # P z holds exactly for z >= 0 inside the box
    assert tables["P"].tolist() == [False] * 4 + [True] * 5


def test_kleene_monotone_in_box():
    small = kleene_tables(_counter_system(), box=3)["P"]
    large = kleene_tables(_counter_system(), box=6)["P"]
    assert np.array_equal(small, large[3:10])


def test_kleene_rejects_higher_order():
    with pytest.raises(OrderTooHigh):
        kleene_eval(load_system("d_sum.hes"))


def test_kleene_on_lowered_sum_system():
    assert isinstance(kleene_eval(lower(load_system("d_sum.hes")), box=16), Valid)


def test_kleene_wide_existentials_fall_back_to_enumeration():
    # five nested witnesses would need 17**6 cells at once
    body = "exists a. exists b. exists c. exists d. exists e. a + b + c + d + e = z /\\ a = b /\\ c = d /\\ e = 1"
    es = parse_system(f"""%ENV
P : int -> prop;
%DEFS
P z =mu {body};
%MAIN P 1;
""")
    assert kleene_eval(es, box=8) == Valid(1)
