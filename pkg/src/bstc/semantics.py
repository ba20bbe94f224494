"""Finite models and formula evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .choice import FiniteChoice
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
    Term,
    Union_,
    render_term,
)


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteModel:
    universe: tuple
    individuals: dict = field(default_factory=dict)  # name -> element
    sets: dict = field(default_factory=dict)  # name -> frozenset
    choice_terms: dict = field(default_factory=dict)  # Choice term -> frozenset
    total_choice: FiniteChoice | None = None

    def with_choice(self, total: FiniteChoice) -> "FiniteModel":
        return replace(self, total_choice=total)

    def to_json(self, all_menus: bool = True) -> dict:
        out = {
            "universe": list(self.universe),
            "individuals": dict(self.individuals),
            "sets": {k: sorted(v, key=self.universe.index) for k, v in self.sets.items()},
        }
        if self.total_choice is not None and all_menus:
            tc = self.total_choice
            out["choice"] = [
                {"menu": tc.ordered(m), "chosen": tc.ordered(tc.table[m])} for m in tc.domain
            ]
        else:
            out["choice"] = [
                {"term": render_term(t), "chosen": sorted(v, key=self.universe.index)}
                for t, v in self.choice_terms.items()
            ]
        return out


def evaluate_term(t: Term, model: FiniteModel, opaque: bool = False) -> frozenset:
    """Value of ``t``; with ``opaque`` choice terms are read from ``choice_terms``."""
    if isinstance(t, SetVar):
        try:
            return frozenset(model.sets[t.name])
        except KeyError:
            raise EvaluationError(f"set variable {t.name} is unassigned") from None
    if isinstance(t, Empty):
        return frozenset()
    if isinstance(t, Singleton):
        try:
            return frozenset([model.individuals[t.name]])
        except KeyError:
            raise EvaluationError(f"individual variable {t.name} is unassigned") from None
    if isinstance(t, Union_):
        return evaluate_term(t.left, model, opaque) | evaluate_term(t.right, model, opaque)
    if isinstance(t, Inter):
        return evaluate_term(t.left, model, opaque) & evaluate_term(t.right, model, opaque)
    if isinstance(t, Diff):
        return evaluate_term(t.left, model, opaque) - evaluate_term(t.right, model, opaque)
    if isinstance(t, Choice):
        if opaque:
            try:
                return frozenset(model.choice_terms[t])
            except KeyError:
                raise EvaluationError(f"choice term {render_term(t)} is unassigned") from None
        arg = evaluate_term(t.arg, model, opaque)
        if model.total_choice is None:
            raise EvaluationError("model has no choice function")
        if not arg:
            raise EvaluationError(f"choice applied to the empty set in {render_term(t)}")
        return model.total_choice(arg)
    raise TypeError(f"not a term: {t!r}")


def evaluate_atom(a: Atom, model: FiniteModel, opaque: bool = False) -> bool:
    lhs = evaluate_term(a.lhs, model, opaque)
    rhs = evaluate_term(a.rhs, model, opaque)
    return lhs == rhs if a.op == EQ else lhs <= rhs


def evaluate(f: Formula, model: FiniteModel, opaque: bool = False) -> bool:
    if isinstance(f, Atom):
        return evaluate_atom(f, model, opaque)
    if isinstance(f, Not):
        return not evaluate(f.arg, model, opaque)
    left = evaluate(f.left, model, opaque)
    if isinstance(f, And):
        return left and evaluate(f.right, model, opaque)
    if isinstance(f, Or):
        return left or evaluate(f.right, model, opaque)
    if isinstance(f, Implies):
        return (not left) or evaluate(f.right, model, opaque)
    if isinstance(f, Iff):
        return left == evaluate(f.right, model, opaque)
    raise TypeError(f"not a formula: {f!r}")
