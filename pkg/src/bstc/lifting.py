"""Deciding and constructing total extensions of partial choices.

Each ``*_liftable`` decides whether a partial choice extends to a total choice
satisfying the axiom; each ``*_lift`` builds such an extension and verifies it
before returning.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

from .choice import (
    ChoiceError,
    EulerDiagram,
    FiniteChoice,
    check_axiom,
    euler_diagram,
    menu_key,
    nonempty_masks,
)

log = logging.getLogger(__name__)

MAX_LIFT_UNIVERSE = 16
EXHAUSTIVE_REGION_LIMIT = 6


class LiftError(ChoiceError):
    """Precondition violated or a constructed lift failed verification."""


@dataclass(frozen=True)
class RegionPreorder:
    diagram: EulerDiagram
    rank: dict  # region (frozenset) -> int

    def leq(self, e, f) -> bool:
        return self.rank[e] <= self.rank[f]


@dataclass(frozen=True)
class LiftResult:
    liftable: bool
    certificate: object = None
    lifted: FiniteChoice | None = None


def _guard(ch: FiniteChoice):
    if len(ch.universe) > MAX_LIFT_UNIVERSE:
        raise LiftError(f"universe of {len(ch.universe)} elements is too large to tabulate")


def _verify(total: FiniteChoice, ch: FiniteChoice, axiom: str) -> FiniteChoice:
    if not total.extends(ch):
        raise LiftError(f"internal error: {axiom} lift does not extend the input")
    w = check_axiom(total, axiom)
    if not w.satisfied:
        raise LiftError(f"internal error: {axiom} lift violates the axiom at {w.counterexample}")
    return total


# --------------------------------------------------------------------------
# (alpha)

def closed_unions(ch: FiniteChoice) -> list[int]:
    """Unions of all nonempty subfamilies of the domain.

    A subset-closed family is determined by its union U (it is the set of
    menus inside U), so these unions enumerate the subset-closed families
    without repetition.
    """
    seen: set[int] = set()
    frontier = set()
    for m in ch.table:
        if m not in seen:
            seen.add(m)
            frontier.add(m)
    while frontier:
        nxt = set()
        for u in frontier:
            for m in ch.table:
                v = u | m
                if v not in seen:
                    seen.add(v)
                    nxt.add(v)
        frontier = nxt
    return sorted(seen, key=menu_key)


def _alpha_condition_a(ch: FiniteChoice):
    w = check_axiom(ch, "alpha")
    return None if w.satisfied else w


def alpha_liftable(ch: FiniteChoice) -> LiftResult:
    """Contraction consistency on the domain plus nonemptiness on closed families."""
    w = _alpha_condition_a(ch)
    if w is not None:
        return LiftResult(False, {"condition": "contraction", "A": w.counterexample["A"],
                                  "B": w.counterexample["B"]})
    for top in closed_unions(ch):
        family = [m for m in ch.domain if m & ~top == 0]
        rejected = 0
        for m in family:
            rejected |= m & ~ch.table[m]
        if top & ~rejected == 0:
            return LiftResult(False, {"condition": "nonemptiness",
                                      "family": [ch.names(m) for m in family],
                                      "union": ch.names(top)})
    return LiftResult(True, None)


def alpha_lift(ch: FiniteChoice, verify: bool = True) -> FiniteChoice:
    """Total choice removing from each menu everything rejected in a submenu."""
    _guard(ch)
    if not alpha_liftable(ch).liftable:
        raise LiftError("choice does not have the alpha-lifting property")
    table = {}
    items = list(ch.table.items())
    for a in nonempty_masks(len(ch.universe)):
        rejected = 0
        for m, c in items:
            if m & ~a == 0:
                rejected |= m & ~c
        table[a] = a & ~rejected
    total = FiniteChoice(ch.universe, table)
    return _verify(total, ch, "alpha") if verify else total


# --------------------------------------------------------------------------
# (beta)

def beta_liftable(ch: FiniteChoice) -> LiftResult:
    w = check_axiom(ch, "beta")
    if w.satisfied:
        return LiftResult(True, None)
    return LiftResult(False, {"condition": "beta", **w.counterexample})


def _least(m: int) -> int:
    return m & -m


def _components(sets: list[int]) -> list[int]:
    """Unions of connected components of the intersection graph on ``sets``."""
    parent = list(range(len(sets)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(sets)), 2):
        if sets[i] & sets[j]:
            parent[find(i)] = find(j)
    merged: dict[int, int] = {}
    for i, s in enumerate(sets):
        r = find(i)
        merged[r] = merged.get(r, 0) | s
    return list(merged.values())


def beta_lift(ch: FiniteChoice, verify: bool = True) -> FiniteChoice:
    """Total choice built from intersection-graph components of submenu choices.

    The representative of a menu is the least chosen element for menus in the
    domain and the least element otherwise.
    """
    _guard(ch)
    if not beta_liftable(ch).liftable:
        raise LiftError("choice violates axiom beta")
    items = list(ch.table.items())
    table = {}
    for a in nonempty_masks(len(ch.universe)):
        rep = _least(ch.table[a]) if a in ch.table else _least(a)
        chosen_sets = [c for m, c in items if m & ~a == 0]
        table[a] = rep
        for comp in _components(chosen_sets):
            if comp & rep:
                table[a] = comp
                break
    total = FiniteChoice(ch.universe, table)
    return _verify(total, ch, "beta") if verify else total


# --------------------------------------------------------------------------
# WARP

def warp_diagram(ch: FiniteChoice) -> EulerDiagram:
    family = [ch.names(m) for m in ch.domain] + [ch.names(ch.table[m]) for m in ch.domain]
    return euler_diagram(family)


def preorder_conditions_hold(ch: FiniteChoice, diagram: EulerDiagram, rank: dict) -> bool:
    """Check both region conditions literally for a rank function on regions."""
    for m in ch.domain:
        b, cb = ch.names(m), ch.names(ch.table[m])
        inside = [e for e in diagram.regions if e <= b]
        chosen = [e for e in diagram.regions if e <= cb]
        # menu regions rank no higher than chosen regions
        if any(rank[e] > rank[f] for e in inside for f in chosen):
            return False
        # maximal regions of the envelope lie in the choice
        env = [e for e in diagram.regions if e & b]
        top = max(rank[e] for e in env)
        if any(rank[e] == top and not e <= cb for e in env):
            return False
    return True


def _region_constraints(ch: FiniteChoice, diagram: EulerDiagram):
    """Edges ``(e, f, strict, menu)`` meaning rank(e) <= rank(f) (or <)."""
    idx = {r: i for i, r in enumerate(diagram.regions)}
    edges = []
    for m in ch.domain:
        b, cb = ch.names(m), ch.names(ch.table[m])
        chosen = [r for r in diagram.regions if r <= cb]
        for e in diagram.regions:
            if e <= b:
                strict = not e <= cb
                for f in chosen:
                    if e != f:
                        edges.append((idx[e], idx[f], strict, b))
    return edges


def _solve_ranks(n: int, edges):
    """Least ranks with rank[u] + strict <= rank[v]; None on a strict cycle."""
    rank = [0] * n
    for _ in range(n + 1):
        changed = False
        for u, v, strict, _menu in edges:
            need = rank[u] + (1 if strict else 0)
            if rank[v] < need:
                rank[v] = need
                changed = True
        if not changed:
            return rank
    return None


def _strict_cycle(n: int, edges):
    """A cycle through a strict edge, as a list of edges."""
    adj: dict[int, list] = {i: [] for i in range(n)}
    for e in edges:
        adj[e[0]].append(e)
    for start in edges:
        if not start[2]:
            continue
        # path from start's head back to its tail
        goal, src = start[0], start[1]
        prev = {src: None}
        queue = [src]
        while queue:
            u = queue.pop(0)
            if u == goal:
                path = []
                while prev[u] is not None:
                    path.append(prev[u])
                    u = prev[u][0]
                return [start] + path[::-1]
            for e in adj[u]:
                if e[1] not in prev:
                    prev[e[1]] = e
                    queue.append(e[1])
    return None


def exhaustive_region_preorder(ch: FiniteChoice, diagram: EulerDiagram | None = None):
    """Search every rank function with values in ``0..n-1`` (lexicographic order)."""
    diagram = diagram or warp_diagram(ch)
    regions = diagram.regions
    n = len(regions)
    for ranks in itertools.product(range(n), repeat=n):
        rank = dict(zip(regions, ranks))
        if preorder_conditions_hold(ch, diagram, rank):
            return RegionPreorder(diagram, rank)
    return None


def warp_liftable(ch: FiniteChoice, exhaustive_limit: int = EXHAUSTIVE_REGION_LIMIT) -> LiftResult:
    """Search for a total preorder on Euler regions meeting the region conditions.

    Every region of a menu must rank no higher than every region of its choice,
    and strictly lower when it lies outside the choice (otherwise it would be
    maximal in the envelope). Least ranks under these constraints are found by
    longest-path relaxation; a cycle through a strict edge means no preorder
    exists. If the fast path fails and the diagram is small, the exhaustive
    search is run as a cross-check.
    """
    if not ch.table:
        return LiftResult(True, None)
    w = check_axiom(ch, "warp")
    if not w.satisfied:
        return LiftResult(False, {"condition": "warp", **w.counterexample})
    diagram = warp_diagram(ch)
    n = len(diagram.regions)
    edges = _region_constraints(ch, diagram)
    ranks = _solve_ranks(n, edges)
    if ranks is not None:
        rank = dict(zip(diagram.regions, ranks))
        if not preorder_conditions_hold(ch, diagram, rank):
            raise LiftError("internal error: computed region ranks fail verification")
        return LiftResult(True, RegionPreorder(diagram, rank))
    if n <= exhaustive_limit:
        found = exhaustive_region_preorder(ch, diagram)
        if found is not None:
            log.warning("exhaustive search found a region preorder the fast path missed")
            return LiftResult(True, found)
    cycle = _strict_cycle(n, edges) or []
    trace = [
        {"lower": diagram.regions[u], "upper": diagram.regions[v],
         "strict": strict, "menu": menu}
        for u, v, strict, menu in cycle
    ]
    return LiftResult(False, {"condition": "region-preorder", "cycle": trace})


def warp_lift(ch: FiniteChoice, pre: RegionPreorder | None = None, verify: bool = True) -> FiniteChoice:
    """Total choice picking the top-ranked items of each menu.

    Items take the rank of their region; items outside every menu and choice
    set rank below all regions.
    """
    _guard(ch)
    if pre is None:
        res = warp_liftable(ch)
        if not res.liftable:
            raise LiftError("choice does not have the WARP-lifting property")
        pre = res.certificate
    elif not preorder_conditions_hold(ch, pre.diagram, pre.rank):
        raise LiftError("region preorder does not satisfy the lifting conditions")
    n = len(ch.universe)
    elem_rank = [-1] * n
    for region, r in (pre.rank.items() if pre is not None else ()):
        for u in region:
            elem_rank[ch.universe.index(u)] = r
    table = {}
    for a in nonempty_masks(n):
        top = max(elem_rank[i] for i in range(n) if a >> i & 1)
        table[a] = sum(1 << i for i in range(n) if a >> i & 1 and elem_rank[i] == top)
    total = FiniteChoice(ch.universe, table)
    if not verify:
        return total
    if not total.extends(ch):
        raise LiftError("internal error: WARP lift does not extend the input")
    if n <= 12:
        _verify(total, ch, "warp")
    return total


def lift(ch: FiniteChoice, axiom: str) -> LiftResult:
    """Decide liftability and, when liftable, attach the verified lift."""
    if axiom == "alpha":
        res = alpha_liftable(ch)
        return LiftResult(True, None, alpha_lift(ch)) if res.liftable else res
    if axiom == "beta":
        res = beta_liftable(ch)
        return LiftResult(True, None, beta_lift(ch)) if res.liftable else res
    if axiom == "warp":
        res = warp_liftable(ch)
        if res.liftable:
            return LiftResult(True, res.certificate, warp_lift(ch, res.certificate))
        return res
    raise ValueError(f"no lifting procedure for {axiom!r}")


__all__ = [
    "LiftError",
    "LiftResult",
    "RegionPreorder",
    "alpha_lift",
    "alpha_liftable",
    "beta_lift",
    "beta_liftable",
    "closed_unions",
    "exhaustive_region_preorder",
    "lift",
    "warp_diagram",
    "warp_lift",
    "warp_liftable",
]
