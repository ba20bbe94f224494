import random

import pytest
from hypothesis import given, settings

from bstc.normalize import (
    Prop,
    complete,
    extend,
    normalize,
    skeleton,
    to_choice_flat,
    top_conjuncts,
    wrap,
)
from bstc.oracle import OracleBounds, brute_decide
from bstc.solver import SEMANTICS
from bstc.syntax import (
    And,
    Choice,
    Iff,
    Implies,
    Not,
    SetVar,
    formula_terms,
    is_choice_free,
    parse_formula,
    render_formula,
)
from corpus import random_formula
from strategies import formulas
from test_syntax import DISPLAY


def _choices(f):
    return [t for t in formula_terms(f) if isinstance(t, Choice)]


def test_nested_choice_gets_fresh_variable():
    nf = to_choice_flat(parse_formula("c(c(X)) = 0"))
    assert nf.fresh_vars == {"_C1": Choice(SetVar("X"))}
    assert render_formula(nf.formula) == "c(_C1) = 0 and _C1 = c(X)"


def test_flat_formula_unchanged():
    f = parse_formula("c(X) <= Y and c(Y + X) = 0")
    nf = to_choice_flat(f)
    assert nf.formula == f and nf.fresh_vars == {}


def test_triple_nesting():
    nf = to_choice_flat(parse_formula("c(c(c(X))) = 0"))
    assert len(nf.fresh_vars) == 2
    assert nf.k == 3


def test_completion_counts():
    assert complete(to_choice_flat(parse_formula("X = Y"))).formula == parse_formula("X = Y")
    one = complete(to_choice_flat(parse_formula("c(X) = Y")))
    assert len(top_conjuncts(one.formula)) == 1 + 2
    three = complete(to_choice_flat(parse_formula("c(A) = c(B) and c(C) = 0")))
    implications = [g for g in top_conjuncts(three.formula) if isinstance(g, Implies)]
    assert len(top_conjuncts(three.formula)) == 2 + 3 * 2 + 3
    assert len(implications) == 3


def test_single_valuedness_is_order_normalized():
    nf = normalize(parse_formula("c(B) = c(A)"))
    imp = [g for g in top_conjuncts(nf.formula) if isinstance(g, Implies)][0]
    assert render_formula(imp) == "A = B -> c(A) = c(B)"


def test_complete_requires_flat_input():
    with pytest.raises(ValueError):
        complete(wrap(parse_formula("c(c(X)) = 0")))


def test_display_skeleton():
    sk = skeleton(parse_formula(DISPLAY))
    p1, p2, p3 = Prop(1), Prop(2), Prop(3)
    assert sk.prop == Iff(Implies(And(p1, p2), Not(p3)), Implies(p1, Implies(p2, p3)))


def test_shared_atom_shares_variable():
    sk = skeleton(parse_formula("X = Y and not X = Y"))
    assert sk.render() == "P1 and not P1"
    assert not any(sk.evaluate({1: v}) for v in (True, False))


def test_single_atom_skeleton():
    assert skeleton(parse_formula("X <= Y")).prop == Prop(1)


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_normal_form_invariants(f):
    flat = to_choice_flat(f)
    assert all(is_choice_free(c.arg) for c in _choices(flat.formula))
    nf = complete(flat)
    assert nf.term_universe[0] == parse_formula("0 = 0").lhs
    # completion adds no new terms
    assert set(nf.term_universe) == set(flat.term_universe)
    # and is idempotent
    assert complete(nf) is nf
    assert extend(nf, top_conjuncts(nf.formula)) is nf


def test_normalization_equisatisfiable():
    rng = random.Random(11)
    bounds = OracleBounds(max_universe=3)
    checked = 0
    while checked < 25:
        f = random_formula(rng, set_vars=("A", "B"), max_choice=2, max_atoms=2, depth=1)
        nf = normalize(f)
        if len(nf.set_vars) > 4:
            continue
        for sem in SEMANTICS:
            assert brute_decide(f, sem, bounds).status == brute_decide(nf.formula, sem, bounds).status, (
                render_formula(f), sem)
        checked += 1
