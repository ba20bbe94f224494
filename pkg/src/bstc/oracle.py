"""Brute-force ground truth: bounded model enumeration and exhaustive lifting.

Nothing here reuses the place engine or the lifting constructions. Formulas
are evaluated on bitmask models by a separate evaluator, choice values are
branched on only for menus the formula actually names, and extendability of
those values to a total choice is settled by search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .choice import FiniteChoice, check_axiom, rationalizable
from .normalize import normalize, skeleton, top_conjuncts
from .places import ResourceLimit
from .semantics import FiniteModel, evaluate, evaluate_term
from .solver import SEMANTICS, Verdict, prepare
from .syntax import (
    EQ,
    And,
    Atom,
    Choice,
    Diff,
    Empty,
    Formula,
    Iff,
    Implies,
    Inter,
    Not,
    Or,
    SetVar,
    Singleton,
    Union_,
    formula_terms,
    variables,
)

LIFT_AXIOMS = ("alpha", "beta", "warp", "rational")


@dataclass(frozen=True)
class OracleBounds:
    max_universe: int = 5
    menu_cap: int = 63  # refuse universes with more nonempty menus than this

    def __post_init__(self):
        if self.max_universe < 1:
            raise ValueError("max_universe must be at least 1")


def _guard(n: int, bounds: OracleBounds) -> None:
    if (1 << n) - 1 > bounds.menu_cap:
        raise ResourceLimit(f"universe of {n} elements exceeds the menu cap {bounds.menu_cap}")


def _bits(m: int):
    return [i for i in range(m.bit_length()) if m >> i & 1]


def _nonempty_subsets(m: int, largest_first: bool = True) -> list[int]:
    out = []
    s = m
    while s:
        out.append(s)
        s = (s - 1) & m
    out.sort(key=lambda x: bin(x).count("1"), reverse=largest_first)
    return out


# --------------------------------------------------------------------------
# Axioms on masks, straight from their definitions (A a submenu of B)

def _axiom_ok(axiom: str, a: int, ca: int, b: int, cb: int) -> bool:
    if axiom == "alpha":
        return a & cb & ~ca == 0
    if axiom == "beta":
        return not (ca & cb) or ca & ~cb == 0
    if axiom == "warp":
        return not (a & cb) or ca == a & cb
    raise ValueError(f"unknown axiom {axiom!r}")


# --------------------------------------------------------------------------
# Total extensions

def _weak_orders(n: int):
    """Every total preorder on range(n), as a rank tuple (higher is better)."""
    for ranks in itertools.product(range(n), repeat=n):
        used = sorted(set(ranks))
        if used == list(range(len(used))):
            yield ranks


def _maxima(menu: int, ranks) -> int:
    top = max(ranks[i] for i in _bits(menu))
    return sum(1 << i for i in _bits(menu) if ranks[i] == top)


def _extend_warp(n: int, fixed: dict) -> dict | None:
    # a total choice obeys WARP exactly when it picks maxima of a total preorder
    for ranks in _weak_orders(n):
        if all(_maxima(m, ranks) == c for m, c in fixed.items()):
            return {m: _maxima(m, ranks) for m in range(1, 1 << n)}
    return None


def _extend_search(n: int, fixed: dict, axiom: str) -> dict | None:
    menus = sorted(range(1, 1 << n), key=lambda m: (bin(m).count("1"), m))
    table: dict[int, int] = {}
    supersets = {b: [(B, c) for B, c in fixed.items() if B != b and b & ~B == 0] for b in menus}

    def consistent(b: int, cb: int) -> bool:
        for a, ca in table.items():
            if a & ~b == 0 and not _axiom_ok(axiom, a, ca, b, cb):
                return False
        return all(_axiom_ok(axiom, b, cb, B, cB) for B, cB in supersets[b])

    def candidates(b: int) -> list[int]:
        if b in fixed:
            return [fixed[b]]
        if axiom == "alpha":
            # Keep every item that no submenu rejects: enlarging c(b) only
            # loosens the constraints on larger menus, so this candidate
            # succeeds whenever any does.
            keep = b
            for a, ca in table.items():
                if a & ~b == 0:
                    keep &= ~(a & ~ca)
            return [keep] if keep else []
        return _nonempty_subsets(b)

    def rec(i: int) -> bool:
        if i == len(menus):
            return True
        b = menus[i]
        for cb in candidates(b):
            if consistent(b, cb):
                table[b] = cb
                if rec(i + 1):
                    return True
                del table[b]
        return False

    return dict(table) if rec(0) else None


def _extend_rational(n: int, fixed: dict) -> dict | None:
    # a total rationalizable choice is the maxima of the relation its pairs reveal
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for picks in itertools.product((0, 1, 2), repeat=len(pairs)):
        beats = set()
        for (i, j), p in zip(pairs, picks):
            if p == 0:
                beats.add((i, j))
            elif p == 1:
                beats.add((j, i))
        table = {}
        for m in range(1, 1 << n):
            items = _bits(m)
            best = sum(1 << x for x in items if not any((y, x) in beats for y in items))
            if not best or fixed.get(m, best) != best:
                break
            table[m] = best
        else:
            return table
    return None


@lru_cache(maxsize=200_000)
def _extension(n: int, fixed_items: frozenset, axiom: str) -> tuple | None:
    fixed = dict(fixed_items)
    if axiom == "unrestricted":
        table = {m: fixed.get(m, m) for m in range(1, 1 << n)}
    elif axiom == "warp":
        table = _extend_warp(n, fixed)
    elif axiom == "rational":
        table = _extend_rational(n, fixed)
    else:
        table = _extend_search(n, fixed, axiom)
    return None if table is None else tuple(sorted(table.items()))


def brute_lift(ch: FiniteChoice, axiom: str, bounds: OracleBounds = OracleBounds(max_universe=6)) -> FiniteChoice | None:
    """A total extension of ``ch`` obeying ``axiom`` (or rationalizable), found by search."""
    if axiom not in LIFT_AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}")
    n = len(ch.universe)
    if n > bounds.max_universe:
        raise ResourceLimit(f"universe of {n} elements exceeds the oracle bound {bounds.max_universe}")
    _guard(n, bounds)
    if n == 0:
        return ch
    found = _extension(n, frozenset(ch.table.items()), axiom)
    if found is None:
        return None
    total = FiniteChoice(ch.universe, dict(found))
    if axiom == "rational" and rationalizable(total) is None:
        raise AssertionError("oracle produced a non-rationalizable lift")
    return total


# --------------------------------------------------------------------------
# Bounded model search

def _term_value(t, ind: dict, sets: dict, vals: dict) -> int:
    if isinstance(t, SetVar):
        return sets[t.name]
    if isinstance(t, Empty):
        return 0
    if isinstance(t, Singleton):
        return 1 << ind[t.name]
    if isinstance(t, Union_):
        return vals[t.left] | vals[t.right]
    if isinstance(t, Inter):
        return vals[t.left] & vals[t.right]
    if isinstance(t, Diff):
        return vals[t.left] & ~vals[t.right]
    raise TypeError(f"not a term: {t!r}")


def _holds(f: Formula, vals: dict) -> bool:
    if isinstance(f, Atom):
        lhs, rhs = vals[f.lhs], vals[f.rhs]
        return lhs == rhs if f.op == EQ else lhs & ~rhs == 0
    if isinstance(f, Not):
        return not _holds(f.arg, vals)
    if isinstance(f, And):
        return _holds(f.left, vals) and _holds(f.right, vals)
    if isinstance(f, Or):
        return _holds(f.left, vals) or _holds(f.right, vals)
    if isinstance(f, Implies):
        return not _holds(f.left, vals) or _holds(f.right, vals)
    if isinstance(f, Iff):
        return _holds(f.left, vals) == _holds(f.right, vals)
    raise TypeError(f"not a formula: {f!r}")


def _search_choices(f, terms, n, ind, sets, table, semantics):
    """Branch over choice values of the menus the formula names."""
    vals: dict = {}
    for t in terms:
        if isinstance(t, Choice):
            menu = vals[t.arg]
            if not menu:
                return None  # choice of the empty set is undefined
            if menu not in table:
                for opt in _nonempty_subsets(menu):
                    if semantics != "unrestricted" and not _locally_ok(table, menu, opt, semantics):
                        continue
                    found = _search_choices(f, terms, n, ind, sets, {**table, menu: opt}, semantics)
                    if found is not None:
                        return found
                return None
            vals[t] = table[menu]
        else:
            vals[t] = _term_value(t, ind, sets, vals)
    if not _holds(f, vals):
        return None
    axiom = "warp" if semantics == "warp" else semantics
    ext = _extension(n, frozenset(table.items()), axiom)
    return None if ext is None else dict(ext)


def _locally_ok(table: dict, menu: int, opt: int, semantics: str) -> bool:
    for m, c in table.items():
        if m & ~menu == 0 and not _axiom_ok(semantics, m, c, menu, opt):
            return False
        if menu & ~m == 0 and not _axiom_ok(semantics, menu, opt, m, c):
            return False
    return True


def _assignments(n: int, inds: list, svars: list, naive: bool = False):
    """Individual and set assignments on range(n), one per isomorphism type.

    Individuals occupy the first elements in order of first use; elements
    nobody names are listed by nondecreasing membership signature. With
    ``naive`` every raw assignment is produced instead.
    """
    s = len(svars)
    if naive:
        for places in itertools.product(range(n), repeat=len(inds)):
            for masks in itertools.product(range(1 << n), repeat=s):
                yield dict(zip(inds, places)), dict(zip(svars, masks))
        return

    def growth(i: int, top: int):
        if i == len(inds):
            yield []
            return
        for v in range(min(top + 2, n)):
            for rest in growth(i + 1, max(top, v)):
                yield [v] + rest

    for places in growth(0, -1):
        named = max(places) + 1 if places else 0
        if named > n:
            continue
        for head in itertools.product(range(1 << s), repeat=named):
            for tail in itertools.combinations_with_replacement(range(1 << s), n - named):
                sig = head + tail
                masks = {v: sum(1 << e for e, g in enumerate(sig) if g >> k & 1) for k, v in enumerate(svars)}
                yield dict(zip(inds, places)), masks


def theory_bound(f: Formula, semantics: str) -> int:
    """Atoms of the engine's input that can be false, plus individuals, plus 2^k.

    An atom asserted as a top-level conjunct is true in every model, so it never
    needs a witness element.
    """
    nf = prepare(f, semantics)
    asserted = {g for g in top_conjuncts(nf.formula) if isinstance(g, Atom)}
    free = sum(1 for a in skeleton(nf).atoms if a not in asserted)
    return max(1, free + len(nf.individual_vars) + 2 ** normalize(f).k)


def _model(n, ind, sets, f, table) -> FiniteModel:
    universe = tuple(f"a{j + 1}" for j in range(n))
    total = FiniteChoice(universe, table)
    names = lambda m: frozenset(universe[j] for j in _bits(m))
    model = FiniteModel(
        universe,
        {x: universe[e] for x, e in ind.items()},
        {v: names(m) for v, m in sets.items()},
        {},
        total,
    )
    chosen = {t: total(evaluate_term(t.arg, model)) for t in formula_terms(f) if isinstance(t, Choice)}
    return FiniteModel(model.universe, model.individuals, model.sets, chosen, total)


def brute_decide(f: Formula, semantics: str = "unrestricted", bounds: OracleBounds = OracleBounds(),
                 naive: bool = False) -> Verdict:
    """Exhaustive search for a model over universes of size 1..bound.

    The verdict is exact when the bound reaches :func:`theory_bound`;
    otherwise ``stats["bounded"]`` is true and Unsat means "none this small".
    """
    if semantics not in SEMANTICS:
        raise ValueError(f"unknown semantics {semantics!r}")
    inds, svars = variables(f)
    terms = list(formula_terms(f))
    limit = theory_bound(f, semantics)
    top = min(limit, bounds.max_universe)
    stats = {"theory_bound": limit, "max_universe": top, "bounded": top < limit}
    for n in range(1, top + 1):
        _guard(n, bounds)
        for ind, sets in _assignments(n, inds, svars, naive):
            table = _search_choices(f, terms, n, ind, sets, {}, semantics)
            if table is not None:
                model = _model(n, ind, sets, f, table)
                if not evaluate(f, model):
                    raise AssertionError("oracle model fails re-evaluation")
                stats["universe_size"] = n
                return Verdict("sat", semantics, model, stats=stats)
    return Verdict("unsat", semantics, stats=stats)


def brute_decide_by_orders(f: Formula, bounds: OracleBounds = OracleBounds()) -> Verdict:
    """WARP verdict by enumerating total preorders and full choice tables.

    Independent of :func:`brute_decide`: every total choice generated is
    re-checked against WARP and the formula is evaluated on it directly.
    """
    inds, svars = variables(f)
    limit = theory_bound(f, "warp")
    top = min(limit, bounds.max_universe)
    stats = {"theory_bound": limit, "max_universe": top, "bounded": top < limit}
    for n in range(1, top + 1):
        _guard(n, bounds)
        universe = tuple(f"a{j + 1}" for j in range(n))
        choices = []
        for ranks in _weak_orders(n):
            total = FiniteChoice(universe, {m: _maxima(m, ranks) for m in range(1, 1 << n)})
            if check_axiom(total, "warp").satisfied:
                choices.append(total)
        for ind, sets in _assignments(n, inds, svars):
            base = FiniteModel(
                universe,
                {x: universe[e] for x, e in ind.items()},
                {v: frozenset(universe[j] for j in _bits(m)) for v, m in sets.items()},
            )
            for total in choices:
                model = base.with_choice(total)
                try:
                    ok = all(evaluate_term(t.arg, model) for t in formula_terms(f) if isinstance(t, Choice))
                    ok = ok and evaluate(f, model)
                except ValueError:
                    ok = False
                if ok:
                    stats["universe_size"] = n
                    return Verdict("sat", "warp", model, stats=stats)
    return Verdict("unsat", "warp", stats=stats)
