"""Hypothesis strategies for syntax trees."""

from hypothesis import strategies as st

from bstc.syntax import (
    EMPTY,
    EQ,
    SUB,
    And,
    Atom,
    Choice,
    Diff,
    Iff,
    Implies,
    Inter,
    Not,
    Or,
    SetVar,
    Singleton,
    Union_,
)

SET_NAMES = ("A", "B", "X1", "Yb")
IND_NAMES = ("x", "y", "z2")

leaf_terms = st.one_of(
    st.sampled_from(SET_NAMES).map(SetVar),
    st.sampled_from(IND_NAMES).map(Singleton),
    st.just(EMPTY),
)


def _grow_terms(children):
    return st.one_of(
        st.builds(Union_, children, children),
        st.builds(Inter, children, children),
        st.builds(Diff, children, children),
        st.builds(Choice, children),
    )


terms = st.recursive(leaf_terms, _grow_terms, max_leaves=6)
choice_free_terms = st.recursive(
    leaf_terms,
    lambda ch: st.one_of(st.builds(Union_, ch, ch), st.builds(Inter, ch, ch), st.builds(Diff, ch, ch)),
    max_leaves=5,
)
atoms = st.builds(Atom, st.sampled_from((EQ, SUB)), terms, terms)


def _grow_formulas(children):
    return st.one_of(
        st.builds(Not, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
        st.builds(Implies, children, children),
        st.builds(Iff, children, children),
    )


formulas = st.recursive(atoms, _grow_formulas, max_leaves=5)
