import random

import pytest

from starext.errors import ParseError
from starext.funlang import Const, VAR, parse_fn
from starext.gen import rand_formula
from starext.nary import NaryFn
from starext.transfer import (
    And,
    AtomEq,
    Bounded,
    Not,
    Or,
    Registry,
    eval_base,
    eval_hyper,
    formula_text,
    free_variables,
    parse_formula,
    transfer_check,
    truth_predicate,
)
from tests.conftest import make_universe


def registry_with(**fns) -> Registry:
    return Registry.default().with_functions(
        {name: NaryFn(1, parse_fn(src), name=name) for name, src in fns.items()}
    )


# -- parsing --------------------------------------------------------------------

def test_parse_shapes():
    phi = parse_formula("x + 0 = x")
    assert isinstance(phi, AtomEq)
    psi = parse_formula("exists y < x . y + y = x")
    assert isinstance(psi, Bounded) and psi.kind == "exists"
    chi = parse_formula("!(0 = 1) & (x = x | x < 1)")
    assert isinstance(chi, And)


def test_parse_implication_right_associative():
    phi = parse_formula("x = 0 -> x = 1 -> x = 2")
    assert formula_text(phi) == "(x = 0 -> (x = 1 -> x = 2))"


def test_parse_relation_by_name():
    reg = Registry.default()
    phi = parse_formula("lt(x, y)", reg)
    assert formula_text(phi) == "lt(x, y)"


def test_parse_registry_function_calls():
    reg = registry_with(sq="x * x")
    phi = parse_formula("sq(v) = v * v", reg)
    assert eval_base(phi, {"v": 9}, reg)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_formula("x +")
    with pytest.raises(ParseError):
        parse_formula("forall y . y = y")  # missing bound
    with pytest.raises(ParseError):
        parse_formula("unknown_rel(x, y) =")


def test_free_variables_tracking():
    phi = parse_formula("exists y < x . y + z = x")
    assert free_variables(phi) == {"x", "z"}


# -- base evaluation ----------------------------------------------------------------

def test_eval_base_examples():
    assert eval_base(parse_formula("x + 0 = x"), {"x": 7})
    assert eval_base(parse_formula("exists y < x . y + y = x"), {"x": 6})
    assert not eval_base(parse_formula("exists y < x . y + y = x"), {"x": 7})
    assert eval_base(parse_formula("!(0 = 1)"), {})


def test_eval_base_bounded_forall():
    assert eval_base(parse_formula("forall y < x . y < x"), {"x": 5})
    assert eval_base(parse_formula("forall y < 0 . 0 = 1"), {})  # vacuous


def test_eval_base_missing_variable():
    with pytest.raises(KeyError):
        eval_base(parse_formula("x = 0"), {})


# -- hyper evaluation ----------------------------------------------------------------

def test_standard_env_truth_sets_are_trivial(u):
    phi = parse_formula("v + 1 = 2")
    pred_true = truth_predicate(phi, {"v": u.standard(1)}, horizon=u.oracle.horizon)
    pred_false = truth_predicate(phi, {"v": u.standard(5)}, horizon=u.oracle.horizon)
    assert pred_true.constant_value() is True or pred_true.mask(100).all()
    assert pred_false.constant_value() is False or not pred_false.mask(100).any()


def test_atom_agrees_with_equalizer_membership(u):
    reg = registry_with(f="x mod 2", g="0")
    omega = u.point(VAR)
    phi = parse_formula("f(v) = g(v)", reg)
    via_formula = eval_hyper(phi, {"v": omega}, u, reg)
    eqz = u.equalizer(parse_fn("x mod 2"), Const(0))
    assert via_formula == u.member(omega, eqz)


def test_quantified_truth_set_is_evens():
    u = make_universe(horizon=512)
    omega = u.point(VAR)
    evens = u.star_set("ifeq(x mod 2, 0, 1, 0)")
    d = u.member(omega, evens)
    phi = parse_formula("exists y < x . y + y = x")
    assert eval_hyper(phi, {"x": omega}, u) == d


def test_expanded_quantifier_matches_pointwise():
    u = make_universe(horizon=512)
    omega = u.point(VAR)
    phi = parse_formula("exists y < (x mod 9) . y * y = x mod 9")
    pred = truth_predicate(phi, {"x": omega}, horizon=512)
    mask = pred.mask(512)
    for m in range(0, 512, 11):
        expected = any(y * y == m % 9 for y in range(m % 9))
        assert bool(mask[m]) == expected


def test_transfer_examples(u):
    for src, env in [
        ("x + 0 = x", {"x": 7}),
        ("exists y < x . y + y = x", {"x": 6}),
        ("exists y < x . y + y = x", {"x": 7}),
        ("0 = 1", {}),
        ("x < x + 1 & !(x = x + 1)", {"x": 3}),
        ("forall y < x . y < x", {"x": 5}),
    ]:
        assert transfer_check(parse_formula(src), env, u)


def test_transfer_random_sentences():
    rng = random.Random(17)
    reg = registry_with(sq="x * x", half="x div 2")
    for _ in range(60):
        u = make_universe(horizon=500)
        phi = rand_formula(rng, ["v", "w"], reg, depth=2)
        env = {"v": rng.randrange(300), "w": rng.randrange(300)}
        assert transfer_check(phi, env, u, reg)


def test_los_negation_law():
    rng = random.Random(23)
    reg = Registry.default()
    for _ in range(25):
        u = make_universe(horizon=500)
        phi = rand_formula(rng, ["v"], reg, depth=2, allow_quantifier=False)
        env = {"v": u.point("x + 3")}
        a = eval_hyper(phi, env, u, reg)
        assert eval_hyper(Not(phi), env, u, reg) == (not a)


def test_los_connective_laws():
    rng = random.Random(29)
    reg = Registry.default()
    for _ in range(25):
        u = make_universe(horizon=500)
        phi = rand_formula(rng, ["v"], reg, depth=1, allow_quantifier=False)
        psi = rand_formula(rng, ["v"], reg, depth=1, allow_quantifier=False)
        env = {"v": u.point("x * 2")}
        a, b = eval_hyper(phi, env, u, reg), eval_hyper(psi, env, u, reg)
        assert eval_hyper(And(phi, psi), env, u, reg) == (a and b)
        assert eval_hyper(Or(phi, psi), env, u, reg) == (a or b)


def test_formula_text_reused_as_predicate_id():
    u = make_universe(horizon=256)
    omega = u.point(VAR)
    phi = parse_formula("exists y < x . y * y * y = x")
    before = len(u.oracle.log)
    first = eval_hyper(phi, {"x": omega}, u)
    mid = len(u.oracle.log)
    second = eval_hyper(phi, {"x": omega}, u)
    assert first == second
    assert len(u.oracle.log) == mid  # repeated evaluation reuses the entry
    assert mid == before + 1
