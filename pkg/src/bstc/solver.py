"""Satisfiability under the unrestricted, alpha, beta and WARP semantics."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .choice import FiniteChoice, check_axiom, euler_diagram, nonempty_masks
from .lifting import RegionPreorder, alpha_lift, beta_lift, warp_lift, MAX_LIFT_UNIVERSE
from .normalize import NormalizedFormula, extend, normalize, skeleton
from .places import (
    Certificate,
    CertificateError,
    ResourceLimit,
    extract_model,
    find_certificate,
)
from .semantics import FiniteModel, evaluate, evaluate_term
from .syntax import (
    EMPTY,
    SUB,
    And,
    Atom,
    Choice,
    Diff,
    Formula,
    Implies,
    Inter,
    SetVar,
    formula_terms,
    map_terms,
    neq,
    replace_term,
    union_all,
)

SEMANTICS = ("unrestricted", "alpha", "beta", "warp")
REQUIRED_AXIOMS = {
    "unrestricted": (),
    "alpha": ("alpha",),
    "beta": ("beta",),
    "warp": ("warp", "alpha", "beta"),
}
EXHAUSTIVE_VERIFY_LIMIT = 12


@dataclass(frozen=True)
class Limits:
    max_places: int | None = None  # None: BSTC_MAX_PLACES or the built-in default
    max_alpha_k: int = 12
    minimize: bool = True
    sample_menus: int = 2000  # axiom spot checks above the exhaustive limit


@dataclass(frozen=True)
class Verdict:
    status: str  # "sat" or "unsat"
    semantics: str
    model: FiniteModel | None = None
    certificate: Certificate | None = field(default=None, compare=False)
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def sat(self) -> bool:
        return self.status == "sat"

    def to_json(self) -> dict:
        out = {"status": self.status, "semantics": self.semantics}
        if self.model is not None:
            out["model"] = self.model.to_json()
        out["stats"] = dict(self.stats)
        return out


# --------------------------------------------------------------------------
# Reductions to the choice-free fragment

def beta_conditions(terms) -> list[Formula]:
    terms = list(terms)
    out = []
    for ti in terms:
        for tj in terms:
            ci, cj = Choice(ti), Choice(tj)
            out.append(Implies(And(Atom(SUB, ti, tj), neq(Inter(ci, cj), EMPTY)), Atom(SUB, ci, cj)))
    return out


def alpha_conditions(terms) -> list[Formula]:
    """Instances ``Ti <= Tj -> Ti & c(Tj) <= c(Ti)`` of contraction consistency."""
    terms = list(terms)
    return [
        Implies(Atom(SUB, ti, tj), Atom(SUB, Inter(ti, Choice(tj)), Choice(ti)))
        for ti in terms
        for tj in terms
    ]


def nonemptiness_conditions(terms) -> list[Formula]:
    terms = list(terms)
    out = []
    for mask in range(1, 1 << len(terms)):
        chosen = [t for i, t in enumerate(terms) if mask >> i & 1]
        rejected = union_all(Diff(t, Choice(t)) for t in chosen)
        out.append(neq(Diff(union_all(chosen), rejected), EMPTY))
    return out


def reduce_beta(nf: NormalizedFormula) -> NormalizedFormula:
    return extend(nf, beta_conditions(nf.choice_terms))


def reduce_alpha(nf: NormalizedFormula, max_k: int = 12) -> NormalizedFormula:
    if nf.k > max_k:
        raise ResourceLimit(f"{nf.k} choice terms give 2^{nf.k} nonemptiness conditions (ceiling k={max_k})")
    return extend(nf, alpha_conditions(nf.choice_terms) + nonemptiness_conditions(nf.choice_terms))


def opaque_formula(nf: NormalizedFormula, prefix: str = "_K") -> Formula:
    """The formula with each choice term replaced by a fresh set variable."""
    f = nf.formula
    for i, t in enumerate(nf.choice_terms, 1):
        target, var = Choice(t), SetVar(f"{prefix}{i}")
        f = map_terms(f, lambda term: replace_term(term, target, var))
    return f


# --------------------------------------------------------------------------
# Total choices on extracted models

def partial_choice(model: FiniteModel, nf: NormalizedFormula) -> FiniteChoice:
    """The choice the model assigns to the menus named by choice arguments."""
    pos = {u: i for i, u in enumerate(model.universe)}

    def mask(s) -> int:
        return sum(1 << pos[u] for u in s)

    table: dict[int, int] = {}
    for t in nf.choice_terms:
        menu = mask(evaluate_term(t, model, opaque=True))
        chosen = mask(model.choice_terms[Choice(t)])
        if table.setdefault(menu, chosen) != chosen:
            raise CertificateError("model assigns two choice sets to one menu")
    return FiniteChoice(model.universe, table)


def _region_preorder(partial: FiniteChoice, cert: Certificate) -> RegionPreorder | None:
    if not partial.table:
        return None
    family = [partial.names(m) for m in partial.domain] + [partial.names(c) for c in partial.table.values()]
    diagram = euler_diagram(family)
    index = {u: j for j, u in enumerate(partial.universe)}
    rank = {}
    for region in diagram.regions:
        values = {cert.ranks[index[u]] for u in region}
        if len(values) != 1:
            raise CertificateError("certificate ranks are not constant on a region")
        rank[region] = values.pop()
    return RegionPreorder(diagram, rank)


def build_total_choice(model: FiniteModel, nf: NormalizedFormula, semantics: str,
                       cert: Certificate | None = None) -> FiniteChoice:
    """Extend the model's partial choice to every nonempty menu of its universe."""
    if len(model.universe) > MAX_LIFT_UNIVERSE:
        raise ResourceLimit(f"model universe of {len(model.universe)} elements is too large to tabulate")
    partial = partial_choice(model, nf)
    if semantics == "unrestricted":
        table = {m: partial.table.get(m, m) for m in nonempty_masks(len(model.universe))}
        return FiniteChoice(model.universe, table)
    if semantics == "alpha":
        return alpha_lift(partial)
    if semantics == "beta":
        return beta_lift(partial)
    if semantics == "warp":
        pre = _region_preorder(partial, cert) if cert is not None and cert.ranks else None
        return warp_lift(partial, pre)
    raise ValueError(f"unknown semantics {semantics!r}")


def verify_axioms(total: FiniteChoice, axioms, sample: int = 2000, seed: int = 0) -> None:
    """Exhaustive axiom check on small universes, random menu pairs above."""
    if len(total.universe) <= EXHAUSTIVE_VERIFY_LIMIT:
        for ax in axioms:
            w = check_axiom(total, ax)
            if not w.satisfied:
                raise CertificateError(f"total choice violates {ax} at {w.counterexample}")
        return
    rng = random.Random(seed)
    menus = list(total.table)
    for _ in range(sample):
        b = rng.choice(menus)
        a = rng.randrange(1, b + 1) & b or b
        sub = total.restrict({a, b})
        for ax in axioms:
            if not check_axiom(sub, ax).satisfied:
                raise CertificateError(f"total choice violates {ax}")


def choice_arguments_defined(f: Formula, model: FiniteModel) -> bool:
    """Whether every choice term of ``f`` is applied to a nonempty menu."""
    for t in formula_terms(f):
        if isinstance(t, Choice) and not evaluate_term(t.arg, model):
            return False
    return True


# --------------------------------------------------------------------------
# Entry point

def prepare(f: Formula, semantics: str, limits: Limits = Limits()) -> NormalizedFormula:
    """Normalized (and, for alpha/beta, reduced) formula handed to the engine."""
    nf = normalize(f)
    if semantics == "beta":
        return reduce_beta(nf)
    if semantics == "alpha":
        return reduce_alpha(nf, limits.max_alpha_k)
    return nf


def decide(f: Formula, semantics: str = "unrestricted", limits: Limits = Limits()) -> Verdict:
    """Exact satisfiability verdict; Sat verdicts carry a verified finite model.

    Raises :class:`ResourceLimit` when a ceiling is hit (never a guessed verdict).
    """
    if semantics not in SEMANTICS:
        raise ValueError(f"unknown semantics {semantics!r}")
    start = time.perf_counter()
    nf = prepare(f, semantics, limits)
    sk = skeleton(nf)
    engine = "warp" if semantics == "warp" else "minus"
    cert = find_certificate(nf, sk, engine, limits.max_places, limits.minimize)
    stats = {"atoms": len(sk.atoms), "choice_terms": nf.k, "terms": len(nf.term_universe)}
    if cert is None:
        stats["seconds"] = round(time.perf_counter() - start, 4)
        return Verdict("unsat", semantics, stats=stats)
    model = extract_model(cert, nf)
    total = build_total_choice(model, nf, semantics, cert)
    model = model.with_choice(total)
    verify_axioms(total, REQUIRED_AXIOMS[semantics], limits.sample_menus)
    if not choice_arguments_defined(f, model) or not evaluate(f, model):
        raise CertificateError("extracted model does not satisfy the formula")
    stats.update(cert.stats)
    stats["false_atoms"] = len(cert.false_atoms)
    stats["place_bound"] = cert.place_bound(nf, engine)
    stats["seconds"] = round(time.perf_counter() - start, 4)
    return Verdict("sat", semantics, model, cert, stats)


def decide_opaque(nf: NormalizedFormula, limits: Limits = Limits()) -> Verdict:
    """Decide a reduced formula as a choice-free one, through the public pipeline."""
    return decide(opaque_formula(nf), "unrestricted", limits)
