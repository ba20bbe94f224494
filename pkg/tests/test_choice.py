import itertools
import json
import random

import pytest

from bstc.choice import (
    AXIOMS,
    ChoiceError,
    FiniteChoice,
    canonical_relation,
    check_axiom,
    envelope,
    euler_diagram,
    is_subset_closed,
    load_choice,
    maximal,
    rationalizable,
    rejection,
    relativized_domain,
    replay_violation,
    satisfies,
)
from bstc.oracle import brute_lift
from corpus import random_partial_choice, random_total_choice

fs = frozenset


def choice(universe, mapping, singletons=True):
    return FiniteChoice.from_sets(universe, mapping, implicit_singletons=singletons)


def test_rejection():
    ch = choice("xyz", {"xy": "x", "xyz": "xyz"})
    assert rejection(ch, "xy") == fs("y")
    assert rejection(ch, "xyz") == fs()
    with pytest.raises(ChoiceError):
        rejection(ch, "yz")


def test_rejection_on_fixture(no_alpha_lift):
    assert rejection(no_alpha_lift, "xyz") == fs("x")


def test_invalid_choices_rejected():
    with pytest.raises(ChoiceError):
        FiniteChoice.from_sets("xy", {"xy": ""})
    with pytest.raises(ChoiceError):
        FiniteChoice.from_sets("xy", {"x": "y"})
    with pytest.raises(ChoiceError):
        FiniteChoice.from_sets("xy", [("xy", "x"), ("yx", "y")])
    with pytest.raises(ChoiceError):
        FiniteChoice.from_json({"universe": ["x"]})


def test_total_flag():
    assert choice("xy", {"xy": "x"}).is_total
    assert not choice("xyz", {"xy": "x"}).is_total


def test_json_round_trip(no_alpha_lift, tmp_path):
    data = no_alpha_lift.to_json()
    assert FiniteChoice.from_json(json.loads(json.dumps(data))) == no_alpha_lift
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ChoiceError):
        load_choice(p)


def test_fixture_axioms(no_alpha_lift, cyclic_pairs):
    assert check_axiom(no_alpha_lift, "alpha").satisfied
    # on a domain of pairs and singletons WARP is never triggered non-trivially
    assert check_axiom(cyclic_pairs, "alpha").satisfied
    assert check_axiom(cyclic_pairs, "warp").satisfied


def test_singletons_satisfy_everything():
    ch = FiniteChoice.from_sets("xyz", {}, implicit_singletons=True)
    assert all(check_axiom(ch, ax).satisfied for ax in AXIOMS)


def test_axiom_counterexamples_replay():
    ch = choice("xyz", {"xy": "xy", "xyz": "x"})
    w = check_axiom(ch, "beta")
    assert not w.satisfied and w.counterexample == {"A": fs("xy"), "B": fs("xyz")}
    assert replay_violation(ch, w)
    g = choice("xyz", {"xy": "x", "xz": "x", "xyz": "y"})
    assert not check_axiom(g, "gamma").satisfied
    r = choice("xyz", {"xy": "x", "xyz": "y"})
    assert not check_axiom(r, "rho").satisfied


def test_random_counterexamples_replay():
    rng = random.Random(3)
    for _ in range(300):
        ch = random_partial_choice(rng, rng.randint(2, 4), density=0.6)
        for ax in AXIOMS:
            w = check_axiom(ch, ax)
            if not w.satisfied:
                assert replay_violation(ch, w)


def _definition_check(ch, axiom):
    sets = ch.as_sets()
    for A, cA in sets.items():
        for B, cB in sets.items():
            if axiom == "alpha" and A <= B and not (A & cB) <= cA:
                return False
            if axiom == "beta" and A <= B and cA & cB and not cA <= cB:
                return False
            if axiom == "warp" and A <= B and A & cB and cA != A & cB:
                return False
            U = A | B
            if U in sets:
                cU = sets[U]
                if axiom == "gamma" and not (cA & cB) <= cU:
                    return False
                if axiom == "rho" and not cA <= cU and not B & cU:
                    return False
    return True


def test_checker_matches_definitions():
    rng = random.Random(4)
    for _ in range(400):
        ch = random_partial_choice(rng, rng.randint(1, 4), density=rng.random())
        for ax in AXIOMS:
            assert check_axiom(ch, ax).satisfied == _definition_check(ch, ax)


def test_euler_examples():
    d = euler_diagram([fs("xy"), fs("yz")])
    assert set(d.regions) == {fs("x"), fs("y"), fs("z")}
    assert euler_diagram([fs("xy")]).regions == (fs("xy"),)
    assert envelope(d, "y") == [fs("y")]
    assert set(envelope(d, "xz")) == {fs("x"), fs("z")}
    assert envelope(d, "w") == []
    with pytest.raises(ValueError):
        euler_diagram([])


def test_euler_of_cyclic_pairs(cyclic_pairs):
    family = cyclic_pairs.menus() + [cyclic_pairs(m) for m in cyclic_pairs.menus()]
    d = euler_diagram(family)
    assert set(d.regions) == {fs("x"), fs("y"), fs("z")}
    # agrees with the intersection-difference definition
    by_definition = set()
    fam = list(dict.fromkeys(family))
    for r in range(1, len(fam) + 1):
        for gamma in itertools.combinations(fam, r):
            inside = fs.intersection(*gamma)
            outside = fs().union(*(s for s in fam if s not in gamma))
            if inside - outside:
                by_definition.add(inside - outside)
    assert by_definition == set(d.regions)


def test_euler_partition_laws():
    rng = random.Random(5)
    for _ in range(1000):
        universe = "abcdef"[: rng.randint(1, 6)]
        family = [fs(rng.sample(universe, rng.randint(1, len(universe)))) for _ in range(rng.randint(1, 5))]
        d = euler_diagram(family)
        union = fs().union(*family)
        assert fs().union(*d.regions) == union
        assert sum(len(r) for r in d.regions) == len(union)
        for r in d.regions:
            assert r
            for s in family:
                assert r <= s or not (r & s)
        for s in family:
            assert envelope(d, s) == [r for r in d.regions if r <= s]


def test_relativized_domain_and_closure(no_alpha_lift):
    dom = [fs("xy"), fs("yz")]
    assert relativized_domain(dom, "xyz") == dom
    assert relativized_domain(dom, "xy") == [fs("xy")]
    assert relativized_domain(dom, "x") == []
    assert is_subset_closed(dom, dom)
    assert not is_subset_closed([fs("xy")], [fs("x"), fs("xy")])
    menus = no_alpha_lift.menus()
    assert is_subset_closed(menus, menus)
    with pytest.raises(ChoiceError):
        is_subset_closed([fs("w")], dom)


def test_rationalizable_examples(cyclic_pairs, no_alpha_lift):
    rel = rationalizable(cyclic_pairs)
    # (a, b) reads "a is worse than b"; x beats y, y beats z, z beats x
    assert rel == {("y", "x"), ("z", "y"), ("x", "z")}
    assert rationalizable(no_alpha_lift) is None
    total = FiniteChoice("xyz", {m: m for m in range(1, 8)})
    assert rationalizable(total) == set()


def _brute_rationalizable(ch):
    u = ch.universe
    pairs = [(a, b) for a in u for b in u if a != b]
    for bits in range(1 << len(pairs)):
        rel = {p for i, p in enumerate(pairs) if bits >> i & 1}
        if all(maximal(ch.names(m), rel) == ch.names(c) for m, c in ch.table.items()):
            return True
    return False


def test_rationalizable_against_relation_search():
    rng = random.Random(6)
    for _ in range(200):
        ch = random_partial_choice(rng, rng.randint(1, 3), density=rng.random())
        assert (rationalizable(ch) is not None) == _brute_rationalizable(ch)


def test_canonical_relation_only_on_shared_menus():
    ch = choice("xyz", {"xy": "x"}, singletons=False)
    assert canonical_relation(ch) == {("y", "x")}


def test_rejection_inclusion_equivalence():
    rng = random.Random(7)
    universe = range(6)
    for _ in range(1000):
        B = fs(x for x in universe if rng.random() < 0.6)
        A = fs(x for x in B if rng.random() < 0.6)
        A2 = fs(x for x in universe if rng.random() < 0.5)
        B2 = fs(x for x in universe if rng.random() < 0.5)
        assert (A & B2 <= A2) == (A - A2 <= B - B2)


def test_alpha_is_rejection_monotonicity():
    rng = random.Random(8)
    for _ in range(1000):
        ch = random_partial_choice(rng, rng.randint(1, 5), density=rng.random())
        sets = ch.as_sets()
        monotone = all(A - sets[A] <= B - sets[B] for A in sets for B in sets if A <= B)
        assert check_axiom(ch, "alpha").satisfied == monotone


def test_warp_is_alpha_and_beta_on_total_choices():
    rng = random.Random(9)
    for _ in range(1000):
        ch = random_total_choice(rng, rng.randint(1, 5))
        assert ch.is_total
        assert check_axiom(ch, "warp").satisfied == satisfies(ch, "alpha", "beta")


def test_warp_choices_are_rationalizable():
    rng = random.Random(10)
    for _ in range(200):
        ch = random_total_choice(rng, rng.randint(1, 4), rank_bias=0.8)
        if check_axiom(ch, "warp").satisfied:
            assert rationalizable(ch) is not None
            assert brute_lift(ch, "rational") == ch
