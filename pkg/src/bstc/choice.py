"""Finite choice correspondences and their consistency axioms.

Menus are stored as bitmasks over the universe tuple, so the element order of
the universe fixes every iteration order (and hence every counterexample).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

AXIOMS = ("alpha", "beta", "gamma", "rho", "warp")


class ChoiceError(ValueError):
    pass


def popcount(m: int) -> int:
    return bin(m).count("1")


def menu_key(m: int) -> tuple[int, int]:
    """Deterministic menu order: by size, then by bitmask."""
    return (popcount(m), m)


def submasks(m: int) -> Iterator[int]:
    """Nonempty submasks of ``m``, largest first."""
    s = m
    while s:
        yield s
        s = (s - 1) & m


def nonempty_masks(n: int) -> list[int]:
    return sorted(range(1, 1 << n), key=menu_key)


@dataclass(frozen=True)
class FiniteChoice:
    universe: tuple
    table: dict = field(hash=False)  # menu mask -> chosen mask

    def __post_init__(self):
        if len(set(self.universe)) != len(self.universe):
            raise ChoiceError("duplicate elements in universe")
        full = (1 << len(self.universe)) - 1
        for menu, chosen in self.table.items():
            if menu == 0 or menu & ~full:
                raise ChoiceError("menus must be nonempty subsets of the universe")
            if chosen == 0:
                raise ChoiceError(f"empty choice on menu {self.names(menu)}")
            if chosen & ~menu:
                raise ChoiceError(f"choice on {self.names(menu)} is not a subset of the menu")

    # conversions -------------------------------------------------------
    @classmethod
    def from_sets(cls, universe: Iterable, mapping, implicit_singletons: bool = False) -> "FiniteChoice":
        universe = tuple(universe)
        pos = {u: i for i, u in enumerate(universe)}

        def mask(s) -> int:
            m = 0
            for u in s:
                if u not in pos:
                    raise ChoiceError(f"element {u!r} not in universe")
                m |= 1 << pos[u]
            return m

        table: dict[int, int] = {}
        items = mapping.items() if hasattr(mapping, "items") else mapping
        for menu, chosen in items:
            mm = mask(menu)
            if mm in table:
                raise ChoiceError(f"duplicate menu {sorted(menu, key=pos.get)}")
            table[mm] = mask(chosen)
        if implicit_singletons:
            for i in range(len(universe)):
                table.setdefault(1 << i, 1 << i)
        return cls(universe, table)

    def mask(self, s: Iterable) -> int:
        pos = {u: i for i, u in enumerate(self.universe)}
        m = 0
        for u in s:
            if u not in pos:
                raise ChoiceError(f"element {u!r} not in universe")
            m |= 1 << pos[u]
        return m

    def names(self, m: int) -> frozenset:
        return frozenset(u for i, u in enumerate(self.universe) if m >> i & 1)

    def ordered(self, m: int) -> list:
        return [u for i, u in enumerate(self.universe) if m >> i & 1]

    # queries -----------------------------------------------------------
    @property
    def full_mask(self) -> int:
        return (1 << len(self.universe)) - 1

    @property
    def domain(self) -> list[int]:
        return sorted(self.table, key=menu_key)

    @property
    def is_total(self) -> bool:
        return len(self.table) == (1 << len(self.universe)) - 1

    def __call__(self, menu) -> frozenset:
        m = menu if isinstance(menu, int) else self.mask(menu)
        if m not in self.table:
            raise ChoiceError(f"menu {self.names(m) if isinstance(menu, int) else set(menu)} not in domain")
        return self.names(self.table[m])

    def menus(self) -> list[frozenset]:
        return [self.names(m) for m in self.domain]

    def as_sets(self) -> dict[frozenset, frozenset]:
        return {self.names(m): self.names(c) for m, c in self.table.items()}

    def extends(self, other: "FiniteChoice") -> bool:
        """True if ``self`` agrees with ``other`` on all of ``other``'s menus."""
        if self.universe != other.universe:
            return False
        return all(self.table.get(m) == c for m, c in other.table.items())

    def restrict(self, menus: Iterable[int]) -> "FiniteChoice":
        return FiniteChoice(self.universe, {m: self.table[m] for m in menus})

    # JSON --------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "universe": list(self.universe),
            "menus": [
                {"menu": self.ordered(m), "choice": self.ordered(self.table[m])}
                for m in self.domain
            ],
        }

    @classmethod
    def from_json(cls, data) -> "FiniteChoice":
        if not isinstance(data, dict) or "universe" not in data or "menus" not in data:
            raise ChoiceError("choice file needs 'universe' and 'menus'")
        universe = data["universe"]
        if not isinstance(universe, list) or not all(isinstance(u, str) for u in universe):
            raise ChoiceError("'universe' must be a list of strings")
        pairs = []
        for entry in data["menus"]:
            try:
                pairs.append((entry["menu"], entry["choice"]))
            except (KeyError, TypeError):
                raise ChoiceError("each menu entry needs 'menu' and 'choice'") from None
        return cls.from_sets(universe, pairs, bool(data.get("implicit_singletons", False)))


def load_choice(path) -> FiniteChoice:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChoiceError(f"invalid JSON: {exc}") from None
    return FiniteChoice.from_json(data)


def rejection(ch: FiniteChoice, menu) -> frozenset:
    """Rejected items ``B \\ c(B)``; may be empty."""
    m = menu if isinstance(menu, int) else ch.mask(menu)
    if m not in ch.table:
        raise ChoiceError(f"menu {ch.names(m)} not in domain")
    return ch.names(m & ~ch.table[m])


# --------------------------------------------------------------------------
# Axioms

@dataclass(frozen=True)
class AxiomWitness:
    axiom: str
    satisfied: bool
    counterexample: dict | None = None  # {"A": frozenset, "B": frozenset}

    def to_json(self) -> dict:
        out: dict = {"axiom": self.axiom, "satisfied": self.satisfied}
        if self.counterexample is not None:
            out["counterexample"] = {k: sorted(v) for k, v in self.counterexample.items()}
        return out


def _violates(axiom: str, a: int, ca: int, b: int, cb: int, cab: int | None = None) -> bool:
    """Whether menus A, B (with choices ca, cb) violate ``axiom``.

    For alpha/beta/warp the caller guarantees A <= B; for gamma/rho ``cab``
    is the choice on A | B.
    """
    if axiom == "alpha":
        return bool(a & cb & ~ca)
    if axiom == "beta":
        return bool(ca & cb) and bool(ca & ~cb)
    if axiom == "warp":
        return bool(a & cb) and ca != (a & cb)
    if axiom == "gamma":
        return bool(ca & cb & ~cab)
    if axiom == "rho":
        return bool(ca & ~cab) and not (b & cab)
    raise ValueError(f"unknown axiom {axiom!r}")


def check_axiom(ch: FiniteChoice, axiom: str) -> AxiomWitness:
    """Check one axiom over every applicable pair of menus in the domain.

    alpha, beta and WARP range over pairs ``A <= B``; gamma and rho over pairs
    whose union is a menu too (other pairs are vacuously fine). The first
    violation in menu order is reported.
    """
    if axiom not in AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}")
    table = ch.table
    dom = ch.domain
    if axiom in ("alpha", "beta", "warp"):
        use_submasks = ch.is_total and len(dom) > 64
        for b in dom:
            cb = table[b]
            smaller = (s for s in submasks(b) if s in table) if use_submasks else (
                a for a in dom if a & ~b == 0
            )
            for a in smaller:
                if _violates(axiom, a, table[a], b, cb):
                    return AxiomWitness(axiom, False, {"A": ch.names(a), "B": ch.names(b)})
        return AxiomWitness(axiom, True)
    for a in dom:
        for b in dom:
            u = a | b
            if u in table and _violates(axiom, a, table[a], b, table[b], table[u]):
                return AxiomWitness(axiom, False, {"A": ch.names(a), "B": ch.names(b)})
    return AxiomWitness(axiom, True)


def satisfies(ch: FiniteChoice, *axioms: str) -> bool:
    return all(check_axiom(ch, ax).satisfied for ax in axioms)


def replay_violation(ch: FiniteChoice, witness: AxiomWitness) -> bool:
    """Re-evaluate the axiom's defining implication on the counterexample."""
    a = ch.mask(witness.counterexample["A"])
    b = ch.mask(witness.counterexample["B"])
    ca, cb = ch.table[a], ch.table[b]
    A, B, cA, cB = (ch.names(x) for x in (a, b, ca, cb))
    ax = witness.axiom
    if ax == "alpha":
        return A <= B and not (A & cB) <= cA
    if ax == "beta":
        return A <= B and bool(cA & cB) and not cA <= cB
    if ax == "warp":
        return A <= B and bool(A & cB) and cA != (A & cB)
    cU = ch(A | B)
    if ax == "gamma":
        return not (cA & cB) <= cU
    return bool(cA - cU) and not (B & cU)


# --------------------------------------------------------------------------
# Euler diagrams

@dataclass(frozen=True)
class EulerDiagram:
    family: tuple  # tuple of frozensets
    regions: tuple  # tuple of frozensets, a partition of the family's union
    signatures: tuple  # signatures[i][j]: region i lies inside family[j]

    def region_of(self, u) -> frozenset | None:
        for r in self.regions:
            if u in r:
                return r
        return None


def euler_diagram(family) -> EulerDiagram:
    """Partition the union of ``family`` by membership signature."""
    fam = tuple(frozenset(s) for s in family)
    if not fam:
        raise ValueError("family must be nonempty")
    blocks: dict[tuple, list] = {}
    order: list = []
    for s in fam:
        for u in sorted(s, key=repr):
            if u not in order:
                order.append(u)
    for u in order:
        sig = tuple(u in s for s in fam)
        blocks.setdefault(sig, []).append(u)
    regions = tuple(frozenset(v) for v in blocks.values())
    return EulerDiagram(fam, regions, tuple(blocks))


def envelope(d: EulerDiagram, a) -> list[frozenset]:
    """Regions of ``d`` meeting ``a``."""
    a = frozenset(a)
    return [r for r in d.regions if r & a]


def relativized_domain(domain, a) -> list[frozenset]:
    """Menus of ``domain`` that are submenus of ``a``."""
    a = frozenset(a)
    return [frozenset(b) for b in domain if frozenset(b) <= a]


def is_subset_closed(family, domain) -> bool:
    """Whether ``family`` contains every menu of ``domain`` inside its union."""
    fam = {frozenset(b) for b in family}
    dom = {frozenset(b) for b in domain}
    if not fam <= dom:
        raise ChoiceError("family is not a subfamily of the domain")
    top = frozenset().union(*fam)
    return all(b in fam for b in dom if b <= top)


# --------------------------------------------------------------------------
# Rationalizability

def canonical_relation(ch: FiniteChoice) -> set[tuple]:
    """Pairs ``(a, b)`` with ``a`` never chosen from a menu that contains ``b``.

    Read ``(a, b)`` as "a is strictly worse than b". Only pairs that share a
    menu are included.
    """
    n = len(ch.universe)
    together = [[False] * n for _ in range(n)]
    chosen_with = [[False] * n for _ in range(n)]
    for m, c in ch.table.items():
        idx = [i for i in range(n) if m >> i & 1]
        for i in idx:
            for j in idx:
                if i != j:
                    together[i][j] = True
                    if c >> i & 1:
                        chosen_with[i][j] = True
    u = ch.universe
    return {
        (u[i], u[j])
        for i in range(n)
        for j in range(n)
        if i != j and together[i][j] and not chosen_with[i][j]
    }


def maximal(menu, strict: set[tuple]) -> frozenset:
    menu = frozenset(menu)
    return frozenset(a for a in menu if not any((a, b) in strict for b in menu))


def rationalizable(ch: FiniteChoice) -> set[tuple] | None:
    """The canonical strict relation if it rationalizes ``ch``, else None.

    Every rationalizing relation is contained in the canonical one on pairs that
    share a menu, and shrinking a relation only enlarges maxima, so the canonical
    relation works whenever any relation does.
    """
    rel = canonical_relation(ch)
    for m in ch.domain:
        if maximal(ch.names(m), rel) != ch.names(ch.table[m]):
            return None
    return rel


def all_menus(universe) -> list[frozenset]:
    universe = list(universe)
    return [frozenset(c) for r in range(1, len(universe) + 1) for c in combinations(universe, r)]
