"""Choice-flat form, completion, and propositional skeletons."""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    EMPTY,
    EQ,
    SUB,
    And,
    Atom,
    Choice,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    SetVar,
    Term,
    atoms,
    conj,
    formula_terms,
    is_choice_free,
    map_terms,
    neq,
    render_formula,
    render_term,
    replace_term,
    subterms,
    variables,
)

FRESH_PREFIX = "_C"


@dataclass(frozen=True)
class NormalizedFormula:
    formula: Formula
    choice_terms: tuple[Term, ...]  # the arguments T_1..T_k of c(T_i)
    fresh_vars: dict = field(default_factory=dict)  # name -> replaced Choice term
    individual_vars: tuple[str, ...] = ()
    set_vars: tuple[str, ...] = ()
    term_universe: tuple[Term, ...] = ()

    @property
    def k(self) -> int:
        return len(self.choice_terms)


def _choice_terms_in(f: Formula) -> list[Term]:
    seen: dict[Term, None] = {}
    for t in formula_terms(f):
        if isinstance(t, Choice):
            seen.setdefault(t.arg)
    return list(seen)


def term_universe(f: Formula) -> tuple[Term, ...]:
    """All set terms of ``f`` plus the empty set, children before parents."""
    seen: dict[Term, None] = {EMPTY: None}
    for t in formula_terms(f):
        seen.setdefault(t)
    return tuple(seen)


def wrap(f: Formula, fresh_vars: dict | None = None) -> NormalizedFormula:
    ind, sets = variables(f)
    return NormalizedFormula(
        formula=f,
        choice_terms=tuple(_choice_terms_in(f)),
        fresh_vars=dict(fresh_vars or {}),
        individual_vars=tuple(ind),
        set_vars=tuple(sets),
        term_universe=term_universe(f),
    )


def _nested_choice(f: Formula) -> Choice | None:
    """An innermost choice term that sits under another choice symbol."""
    for a in atoms(f):
        for side in (a.lhs, a.rhs):
            for t in subterms(side):
                if isinstance(t, Choice) and not is_choice_free(t.arg):
                    for s in subterms(t.arg):
                        if isinstance(s, Choice) and is_choice_free(s.arg):
                            return s
    return None


def to_choice_flat(f: Formula) -> NormalizedFormula:
    """Name nested choice terms with fresh set variables, innermost first."""
    fresh: dict[str, Choice] = {}
    defs: list[Formula] = []
    while (target := _nested_choice(f)) is not None:
        name = f"{FRESH_PREFIX}{len(fresh) + 1}"
        var = SetVar(name)
        fresh[name] = target
        f = map_terms(f, lambda t: replace_term(t, target, var))
        defs = [map_terms(d, lambda t: replace_term(t, target, var)) for d in defs]
        defs.append(Atom(EQ, var, target))
    return wrap(conj([f, *defs]) if defs else f, fresh)


def top_conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return top_conjuncts(f.left) + top_conjuncts(f.right)
    return [f]


def choice_conditions(terms) -> list[Formula]:
    out: list[Formula] = []
    for t in terms:
        out.append(neq(EMPTY, Choice(t)))
        out.append(Atom(SUB, Choice(t), t))
    return out


def _ordered_eq(a: Term, b: Term) -> Atom:
    # one orientation per pair, so i<j alone covers both directions
    return Atom(EQ, a, b) if render_term(a) <= render_term(b) else Atom(EQ, b, a)


def single_valuedness_conditions(terms) -> list[Formula]:
    terms = list(terms)
    return [
        Implies(_ordered_eq(terms[i], terms[j]), _ordered_eq(Choice(terms[i]), Choice(terms[j])))
        for i in range(len(terms))
        for j in range(i + 1, len(terms))
    ]


def extend(nf: NormalizedFormula, extra: list[Formula]) -> NormalizedFormula:
    """Conjoin ``extra`` (skipping conjuncts already present) and rewrap."""
    present = set(top_conjuncts(nf.formula))
    new = []
    for g in extra:
        if g not in present:
            present.add(g)
            new.append(g)
    if not new:
        return nf
    return wrap(conj([nf.formula, *new]), nf.fresh_vars)


def complete(nf: NormalizedFormula) -> NormalizedFormula:
    """Conjoin choice conditions and single-valuedness conditions.

    One implication is emitted per unordered pair ``i < j``.
    """
    if any(not is_choice_free(t) for t in nf.choice_terms):
        raise ValueError("formula is not choice-flat")
    return extend(
        nf, choice_conditions(nf.choice_terms) + single_valuedness_conditions(nf.choice_terms)
    )


def normalize(f: Formula) -> NormalizedFormula:
    return complete(to_choice_flat(f))


# --------------------------------------------------------------------------
# Propositional skeleton

@dataclass(frozen=True)
class Prop:
    index: int  # 1-based, matching P1, P2, ...


@dataclass(frozen=True)
class Skeleton:
    prop: object  # Formula over Prop leaves
    atoms: tuple[Atom, ...]  # atoms[i] is P(i+1)

    @property
    def atom_index(self) -> dict[Atom, int]:
        return {a: i + 1 for i, a in enumerate(self.atoms)}

    def evaluate(self, truth) -> bool:
        """Evaluate under ``truth``: a callable or mapping from 1-based index to bool."""
        get = truth if callable(truth) else truth.__getitem__
        return evaluate_prop(self.prop, get)

    def render(self) -> str:
        return render_formula(self.prop, leaf=lambda p: f"P{p.index}")


def evaluate_prop(f, get) -> bool:
    if isinstance(f, Prop):
        return bool(get(f.index))
    if isinstance(f, Not):
        return not evaluate_prop(f.arg, get)
    left = evaluate_prop(f.left, get)
    if isinstance(f, And):
        return left and evaluate_prop(f.right, get)
    if isinstance(f, Implies):
        return (not left) or evaluate_prop(f.right, get)
    right = evaluate_prop(f.right, get)
    if isinstance(f, Or):
        return left or right
    if isinstance(f, Iff):
        return left == right
    raise TypeError(f"not a propositional formula: {f!r}")


def skeleton(nf: NormalizedFormula | Formula) -> Skeleton:
    f = nf.formula if isinstance(nf, NormalizedFormula) else nf
    index: dict[Atom, int] = {}
    for a in atoms(f):
        index.setdefault(a, len(index) + 1)

    def go(g):
        if isinstance(g, Atom):
            return Prop(index[g])
        if isinstance(g, Not):
            return Not(go(g.arg))
        return type(g)(go(g.left), go(g.right))

    return Skeleton(go(f), tuple(index))

