"""Places, ample sets, and the certificate search behind the decision procedure.

A place is a 0/1 valuation of the formula's set terms that respects the
Boolean operators; each place becomes one element of the extracted model. A
certificate fixes which atoms are false, a set of places witnessing exactly
those atoms, the place of every individual variable, and (for WARP) ranks on
the classes of places that meet a choice argument.

The search itself is a propositional encoding handed to a CDCL solver; the
verdict is exact within the slot bound, and :func:`validate_certificate`
re-checks every returned certificate from scratch.
"""

from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass, field

from pysat.solvers import Solver

from .normalize import NormalizedFormula, Prop, Skeleton
from .semantics import FiniteModel
from .syntax import (
    EQ,
    And,
    Choice,
    Diff,
    Empty,
    Iff,
    Implies,
    Inter,
    Not,
    Or,
    SetVar,
    Singleton,
    Term,
    Union_,
)

DEFAULT_MAX_PLACES = 512
RANK_CLAUSE_LIMIT = 3_000_000
MINIMIZE_CONFLICT_BUDGET = 20_000  # per call; minimization is best effort
SAT_BACKEND = "cadical153"


class ResourceLimit(RuntimeError):
    """A configured ceiling was exceeded; the instance was not decided."""


class CertificateError(AssertionError):
    """A certificate failed independent validation."""


def max_places_ceiling() -> int:
    raw = os.environ.get("BSTC_MAX_PLACES")
    if raw is None:
        return DEFAULT_MAX_PLACES
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"BSTC_MAX_PLACES must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("BSTC_MAX_PLACES must be positive")
    return value


# --------------------------------------------------------------------------
# Places

def is_place(bits, term_universe) -> bool:
    """Whether ``bits`` (term -> bool) respects the empty set and the Boolean operators."""
    for t in term_universe:
        v = bool(bits[t])
        if isinstance(t, Empty) and v:
            return False
        if isinstance(t, Union_) and v != (bits[t.left] or bits[t.right]):
            return False
        if isinstance(t, Inter) and v != (bits[t.left] and bits[t.right]):
            return False
        if isinstance(t, Diff) and v != (bits[t.left] and not bits[t.right]):
            return False
    return True


def differs(place, atom) -> bool:
    """Whether a place separates the two sides of an atom.

    For ``T1 = T2`` that is ``T1 != T2`` at the place, for ``T1 <= T2`` it is
    ``T1 = 1, T2 = 0``: exactly the places that must be absent when the atom is
    true and one of which must be present when it is false.
    """
    lhs, rhs = place[atom.lhs], place[atom.rhs]
    return lhs != rhs if atom.op == EQ else (lhs and not rhs)


@dataclass(frozen=True)
class Certificate:
    false_atoms: frozenset  # 1-based skeleton indices of atoms deemed false
    places: tuple  # tuple of dicts term -> bool
    var_place: dict  # individual name -> index into places
    ranks: dict | None = None  # place index -> rank (WARP only)
    stats: dict = field(default_factory=dict, compare=False)

    def place_bound(self, nf: NormalizedFormula, semantics: str) -> int:
        base = len(self.false_atoms) + len(nf.individual_vars)
        return max(1, base + (2 ** nf.k if semantics == "warp" else 0))  # universes are nonempty


def _class_key(place, nf: NormalizedFormula) -> tuple:
    return tuple(
        (bool(place[t]), bool(place[Choice(t)])) for t in nf.choice_terms
    )


def _in_choice_part(place, nf: NormalizedFormula) -> bool:
    return any(place[t] or place[Choice(t)] for t in nf.choice_terms)


def validate_certificate(cert: Certificate, nf: NormalizedFormula, sk: Skeleton, semantics: str) -> None:
    """Re-check every certificate condition; raise :class:`CertificateError` on failure."""
    atoms = sk.atoms
    false = cert.false_atoms
    if not sk.evaluate(lambda i: i not in false):
        raise CertificateError("atom polarity does not satisfy the skeleton")
    if not cert.places:
        raise CertificateError("no places")
    for j, p in enumerate(cert.places):
        if set(p) != set(nf.term_universe):
            raise CertificateError(f"place {j} is not defined on exactly the formula's terms")
        if not is_place(p, nf.term_universe):
            raise CertificateError(f"valuation {j} is not a place")
        for i, a in enumerate(atoms, 1):
            if i not in false and differs(p, a):
                raise CertificateError(f"place {j} contradicts true atom P{i}")
    for i, a in enumerate(atoms, 1):
        if i in false and not any(differs(p, a) for p in cert.places):
            raise CertificateError(f"false atom P{i} has no witness place")
    for x in nf.individual_vars:
        at_x = [j for j, p in enumerate(cert.places) if p[Singleton(x)]]
        if at_x != [cert.var_place.get(x)]:
            raise CertificateError(f"variable {x} does not have exactly one place")
    if len(cert.places) > max(1, cert.place_bound(nf, semantics)):
        raise CertificateError("too many places")
    if semantics == "warp":
        _validate_ranks(cert, nf)


def _validate_ranks(cert: Certificate, nf: NormalizedFormula) -> None:
    if nf.k == 0:
        return
    if cert.ranks is None:
        raise CertificateError("WARP certificate without ranks")
    classes: dict[tuple, int] = {}
    for j, p in enumerate(cert.places):
        if not _in_choice_part(p, nf):
            continue
        key = _class_key(p, nf)
        r = cert.ranks.get(j)
        if r is None:
            raise CertificateError(f"place {j} has no rank")
        if classes.setdefault(key, r) != r:
            raise CertificateError("rank is not constant on a class")
    for i, t in enumerate(nf.choice_terms):
        in_menu = [key for key in classes if key[i][0]]
        in_choice = [key for key in classes if key[i][1]]
        for lo in in_menu:
            for hi in in_choice:
                if classes[lo] > classes[hi]:
                    raise CertificateError(f"class below choice term {i + 1} ranks too high")
        if in_menu:
            top = max(classes[key] for key in in_menu)
            if any(classes[key] == top and not key[i][1] for key in in_menu):
                raise CertificateError(f"maximal class in choice argument {i + 1} is not chosen")


# --------------------------------------------------------------------------
# Propositional encoding

class _Encoding:
    """CNF for "some certificate fits in these slots".

    With ``slots=None`` every individual variable and every atom owns a slot
    (plus ``2^k`` spare slots for WARP): a false atom is witnessed in its own
    slot, and a slot holding an individual is a copy of that individual's
    slot. Without interchangeable slots, refutations stay cheap. Given a
    number of slots instead, the slots are interchangeable and filled in
    order, which is what the minimization loop needs.
    """

    def __init__(self, nf: NormalizedFormula, sk: Skeleton, semantics: str, slots: int | None = None):
        self.nf, self.sk, self.semantics = nf, sk, semantics
        self.dedicated = slots is None
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.prop = [0] + [self.new() for _ in sk.atoms]  # prop[i]: atom i is true
        self.clauses.append([self._skeleton(sk.prop)])
        if self.dedicated:
            spare = 2 ** nf.k if semantics == "warp" else 0
            if not nf.individual_vars:
                spare += 1  # somewhere to put an element when every atom is true
            self.roles = (
                [("var", x) for x in nf.individual_vars]
                + [("atom", i) for i in range(1, len(sk.atoms) + 1)]
                + [("spare", j) for j in range(spare)]
            )
        else:
            self.roles = [("slot", s) for s in range(slots)]
        self.m = len(self.roles)
        self.act = [self.new() for _ in range(self.m)]
        self.clauses.append(list(self.act))  # the universe is nonempty
        self.bit = [{t: self.new() for t in nf.term_universe} for _ in range(self.m)]
        for s in range(self.m):
            self._structure(s)
            if not self.dedicated and s:
                self.clauses.append([-self.act[s], self.act[s - 1]])
        self._atoms()
        self.var_slot = self._individuals()
        self.rank = self._ranks() if semantics == "warp" and nf.k else None

    def new(self) -> int:
        self.nvars += 1
        return self.nvars

    def _skeleton(self, f) -> int:
        if isinstance(f, Prop):
            return self.prop[f.index]
        if isinstance(f, Not):
            return -self._skeleton(f.arg)
        a, b = self._skeleton(f.left), self._skeleton(f.right)
        if isinstance(f, Implies):
            return self._or(-a, b)
        if isinstance(f, Or):
            return self._or(a, b)
        if isinstance(f, And):
            return self._and(a, b)
        if isinstance(f, Iff):
            v = self.new()
            self.clauses += [[-v, -a, b], [-v, a, -b], [v, a, b], [v, -a, -b]]
            return v
        raise TypeError(f"unexpected skeleton node {f!r}")

    def _and(self, a: int, b: int) -> int:
        v = self.new()
        self.clauses += [[-v, a], [-v, b], [v, -a, -b]]
        return v

    def _or(self, a: int, b: int) -> int:
        v = self.new()
        self.clauses += [[-v, a, b], [v, -a], [v, -b]]
        return v

    def _structure(self, s: int) -> None:
        bit = self.bit[s]
        for t, v in bit.items():
            if isinstance(t, Empty):
                self.clauses.append([-v])
            elif isinstance(t, (Union_, Inter, Diff)):
                left, right = bit[t.left], bit[t.right]
                if isinstance(t, Diff):
                    right = -right
                if isinstance(t, Union_):
                    self.clauses += [[-v, left, right], [v, -left], [v, -right]]
                else:
                    self.clauses += [[-v, left], [-v, right], [v, -left, -right]]

    def _differs(self, s: int, atom) -> int:
        lhs, rhs = self.bit[s][atom.lhs], self.bit[s][atom.rhs]
        v = self.new()
        if atom.op == EQ:
            self.clauses += [[-v, lhs, rhs], [-v, -lhs, -rhs], [v, -lhs, rhs], [v, lhs, -rhs]]
        else:
            self.clauses += [[-v, lhs], [-v, -rhs], [v, -lhs, rhs]]
        return v

    def _atoms(self) -> None:
        own = {i: s for s, (role, i) in enumerate(self.roles) if role == "atom"}
        for i, atom in enumerate(self.sk.atoms, 1):
            p = self.prop[i]
            witnesses = []
            for s in range(self.m):
                d = self._differs(s, atom)
                # a true atom admits no separating place
                self.clauses.append([-self.act[s], -p, -d])
                if not self.dedicated:
                    w = self.new()
                    self.clauses += [[-w, self.act[s]], [-w, d]]
                    witnesses.append(w)
                elif own.get(i) == s:
                    self.clauses += [[p, self.act[s]], [p, d], [-p, -self.act[s]]]
            if not self.dedicated:
                # a false atom needs a witness
                self.clauses.append([p, *witnesses])

    def _individuals(self) -> dict:
        if self.dedicated:
            return self._individuals_dedicated()
        var_slot = {}
        for x in self.nf.individual_vars:
            hs = []
            for s in range(self.m):
                h = self.new()
                b = self.bit[s][Singleton(x)]
                self.clauses += [[-h, self.act[s]], [-h, b], [h, -self.act[s], -b]]
                hs.append(h)
            self.clauses.append(hs)
            for a in range(self.m):
                for b in range(a + 1, self.m):
                    self.clauses.append([-hs[a], -hs[b]])
            var_slot[x] = hs
        return var_slot

    def _individuals_dedicated(self) -> dict:
        var_slot = {x: s for s, (role, x) in enumerate(self.roles) if role == "var"}
        for x, home in var_slot.items():
            self.clauses += [[self.act[home]], [self.bit[home][Singleton(x)]]]
            for s in range(self.m):
                if s == home:
                    continue
                guard = [-self.act[s], -self.bit[s][Singleton(x)]]
                # a slot that holds x is a copy of x's own slot
                for t, v in self.bit[s].items():
                    h = self.bit[home][t]
                    self.clauses += [guard + [-v, h], guard + [v, -h]]
        return var_slot

    def _ranks(self):
        """Order-encoded rank per class; only classes some active slot has are constrained."""
        k = self.nf.k
        keys = [(t, Choice(t)) for t in self.nf.choice_terms]
        classes = [c for c in itertools.product((0, 1, 2), repeat=k) if any(c)]
        levels = max(1, min(len(classes), self.m))
        if len(classes) ** 2 * levels > RANK_CLAUSE_LIMIT:
            raise ResourceLimit(f"{len(classes)} rank classes exceed the WARP encoding limit")
        present = {c: self.new() for c in classes}
        expect = {0: (False, False), 1: (True, False), 2: (True, True)}
        for s in range(self.m):
            for c in classes:
                clause = [-self.act[s], present[c]]
                for (arg, ch), v in zip(keys, c):
                    for term, want in zip((arg, ch), expect[v]):
                        b = self.bit[s][term]
                        clause.append(-b if want else b)
                self.clauses.append(clause)
        # ge[c][v] <-> rank(c) >= v, for v = 1..levels-1
        ge = {c: [0] + [self.new() for _ in range(1, levels)] for c in classes}
        for c in classes:
            for v in range(2, levels):
                self.clauses.append([-ge[c][v], ge[c][v - 1]])
        for a in classes:
            for b in classes:
                if a == b:
                    continue
                below = [i for i in range(k) if a[i] and b[i] == 2]
                if not below:
                    continue
                # outside the choice set: strictly below every chosen class
                strict = any(a[i] == 1 for i in below)
                guard = [-present[a], -present[b]]
                if strict:
                    self.clauses.append(guard + ([ge[b][1]] if levels > 1 else []))
                    for v in range(1, levels):
                        tail = [ge[b][v + 1]] if v + 1 < levels else []
                        self.clauses.append(guard + [-ge[a][v]] + tail)
                else:
                    for v in range(1, levels):
                        self.clauses.append(guard + [-ge[a][v], ge[b][v]])
        return ge

    def _class_of(self, val: set, s: int) -> tuple:
        out = []
        for t in self.nf.choice_terms:
            tb, cb = self.bit[s][t] in val, self.bit[s][Choice(t)] in val
            out.append(2 if cb else 1 if tb else 0)
        return tuple(out)

    def decode(self, model: list[int]) -> Certificate:
        val = set(lit for lit in model if lit > 0)
        active = [s for s in range(self.m) if self.act[s] in val]
        places: list[dict] = []
        index: dict[tuple, int] = {}
        slot_place = {}
        for s in active:
            p = {t: (v in val) for t, v in self.bit[s].items()}
            key = tuple(p.values())
            if key not in index:
                index[key] = len(places)
                places.append(p)
            slot_place[s] = index[key]
        if self.dedicated:
            var_place = {x: slot_place[s] for x, s in self.var_slot.items()}
        else:
            var_place = {
                x: slot_place[next(s for s in active if hs[s] in val)] for x, hs in self.var_slot.items()
            }
        false = frozenset(i for i in range(1, len(self.prop)) if self.prop[i] not in val)
        ranks = None
        if self.rank is not None:
            ranks = {}
            for s in active:
                c = self._class_of(val, s)
                if any(c):
                    ranks[slot_place[s]] = sum(1 for lit in self.rank[c][1:] if lit in val)
        return Certificate(false, tuple(places), var_place, ranks)


# --------------------------------------------------------------------------
# Search

def slot_bound(nf: NormalizedFormula, sk: Skeleton, semantics: str) -> int:
    """Largest place count any certificate needs: all atoms false, every variable apart."""
    bound = len(sk.atoms) + len(nf.individual_vars)
    if semantics == "warp":
        bound += 2 ** nf.k
    return max(1, bound)


def prune(cert: Certificate, nf: NormalizedFormula, sk: Skeleton) -> Certificate:
    """Drop places that are neither a variable's place nor a needed witness."""
    keep = sorted(set(cert.var_place.values()))
    for i in sorted(cert.false_atoms):
        a = sk.atoms[i - 1]
        if not any(differs(cert.places[j], a) for j in keep):
            keep.append(next(j for j, p in enumerate(cert.places) if differs(p, a)))
    keep = sorted(keep) or [0]
    pos = {j: n for n, j in enumerate(keep)}
    ranks = None
    if cert.ranks is not None:
        ranks = {pos[j]: r for j, r in cert.ranks.items() if j in pos}
        # compact to 0..r-1 preserving order
        levels = sorted(set(ranks.values()))
        ranks = {j: levels.index(r) for j, r in ranks.items()}
    return Certificate(
        cert.false_atoms,
        tuple(cert.places[j] for j in keep),
        {x: pos[j] for x, j in cert.var_place.items()},
        ranks,
        cert.stats,
    )


def find_certificate(
    nf: NormalizedFormula,
    sk: Skeleton,
    semantics: str,
    max_places: int | None = None,
    minimize: bool = True,
) -> Certificate | None:
    """Search for a certificate; None means none exists within the bound.

    ``semantics`` is ``"minus"`` (choice terms are opaque set variables) or
    ``"warp"``. The verdict comes from the dedicated-slot encoding. With
    ``minimize`` the number of places is then driven down on the
    interchangeable-slot encoding, under a conflict budget per call.
    """
    if semantics not in ("minus", "warp"):
        raise ValueError(f"unknown engine semantics {semantics!r}")
    ceiling = max_places if max_places is not None else max_places_ceiling()
    slots = slot_bound(nf, sk, semantics)
    if slots > ceiling:
        raise ResourceLimit(f"{slots} place slots needed, ceiling is {ceiling}")
    start = time.perf_counter()
    enc = _Encoding(nf, sk, semantics)
    calls, decisions, conflicts = 1, 0, 0
    with Solver(name=SAT_BACKEND, bootstrap_with=enc.clauses) as solver:
        sat = solver.solve()
        st = solver.accum_stats() or {}
        decisions += int(st.get("decisions", 0))
        conflicts += int(st.get("conflicts", 0))
        if not sat:
            return None
        best = prune(enc.decode(solver.get_model()), nf, sk)
    if minimize and len(best.places) > 1:
        small = _Encoding(nf, sk, semantics, len(best.places) - 1)
        with Solver(name=SAT_BACKEND, bootstrap_with=small.clauses) as solver:
            n = len(best.places) - 1
            while n >= 1:
                # slots are filled in order, so "slot n inactive" caps the count at n
                calls += 1
                solver.conf_budget(MINIMIZE_CONFLICT_BUDGET)
                assumptions = [-small.act[n]] if n < small.m else []
                if not solver.solve_limited(assumptions=assumptions):
                    break
                best = prune(small.decode(solver.get_model()), nf, sk)
                n = len(best.places) - 1
            st = solver.accum_stats() or {}
            decisions += int(st.get("decisions", 0))
            conflicts += int(st.get("conflicts", 0))
    stats = {
        "slots": slots,
        "places": len(best.places),
        "variables": enc.nvars,
        "clauses": len(enc.clauses),
        "solver_calls": calls,
        "search_nodes": decisions,
        "conflicts": conflicts,
        "engine_seconds": round(time.perf_counter() - start, 4),
    }
    cert = Certificate(best.false_atoms, best.places, best.var_place, best.ranks, stats)
    validate_certificate(cert, nf, sk, semantics)
    return cert


# --------------------------------------------------------------------------
# Model extraction

def element_name(j: int) -> str:
    return f"a{j + 1}"


def extract_model(cert: Certificate, nf: NormalizedFormula) -> FiniteModel:
    """One element per place; a set holds the elements of the places inside it."""
    universe = tuple(element_name(j) for j in range(len(cert.places)))

    def members(term: Term) -> frozenset:
        return frozenset(universe[j] for j, p in enumerate(cert.places) if p[term])

    sets = {name: members(SetVar(name)) for name in nf.set_vars}
    individuals = {x: universe[j] for x, j in cert.var_place.items()}
    choice_terms = {Choice(t): members(Choice(t)) for t in nf.choice_terms}
    return FiniteModel(universe, individuals, sets, choice_terms)
