"""Acceptance criteria; each test records one PASS/FAIL line for the summary."""

import random
import time

import pytest

from bstc.choice import (
    FiniteChoice,
    check_axiom,
    euler_diagram,
    nonempty_masks,
    rationalizable,
    rejection,
    submasks,
)
from bstc.lifting import alpha_liftable, lift
from bstc.normalize import normalize
from bstc.oracle import OracleBounds, brute_decide, brute_lift, theory_bound
from bstc.solver import SEMANTICS, decide, decide_opaque, reduce_alpha, reduce_beta
from bstc.syntax import load_formula, parse_formula, render_formula, variables
from conftest import ACCEPTANCE, FIXTURES
from corpus import random_choice_formula, random_formula, random_partial_choice, random_total_choice

ORACLE_CAP = 5
EXACT_REACH = 7  # search the full bound when it is this small
CORPUS_SIZE = 300


def record(n, ok, detail):
    ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(2024)
    out = []
    while len(out) < CORPUS_SIZE:
        f = random_formula(rng) if len(out) % 2 else random_choice_formula(rng)
        inds, svars = variables(f)
        if len(svars) <= 3 and len(inds) <= 2 and normalize(f).k <= 2:
            out.append(f)
    return out


@pytest.fixture(scope="module")
def verdicts(corpus):
    start = time.perf_counter()
    table = {(i, s): decide(f, s) for i, f in enumerate(corpus) for s in SEMANTICS}
    return table, time.perf_counter() - start


def test_criterion_1_fixtures(cyclic_pairs, no_alpha_lift):
    checks = {}
    slowest = 0.0

    def timed(name, fn):
        nonlocal slowest
        t = time.perf_counter()
        checks[name] = fn()
        slowest = max(slowest, time.perf_counter() - t)

    timed("cyclic pairs: rationalizable", lambda: rationalizable(cyclic_pairs) is not None)
    timed("cyclic pairs: no rational lift", lambda: brute_lift(cyclic_pairs, "rational") is None)
    timed("cyclic pairs: no warp lift", lambda: not lift(cyclic_pairs, "warp").liftable)
    timed("no-alpha-lift: alpha holds", lambda: check_axiom(no_alpha_lift, "alpha").satisfied)

    def no_alpha():
        res = alpha_liftable(no_alpha_lift)
        family = set(res.certificate["family"]) if res.certificate else set()
        return not res.liftable and family == {no_alpha_lift.names(m) for m in no_alpha_lift.domain}

    timed("no-alpha-lift: no alpha lift, witness is the whole domain", no_alpha)
    failed = [k for k, v in checks.items() if not v]
    ok = record(1, not failed and slowest < 1.0,
                f"{len(checks) - len(failed)}/{len(checks)} fixture verdicts, slowest {slowest:.3f}s"
                + (f", failed: {failed}" if failed else ""))
    assert ok


def test_criterion_2_lift_soundness():
    rng = random.Random(11)
    start = time.perf_counter()
    cases = positives = 0
    failures = []
    for i in range(600):
        bias = "rank" if i % 3 == 0 else None
        ch = random_partial_choice(rng, rng.randint(1, 5), rng.random(), bias)
        cases += 1
        for ax in ("alpha", "beta", "warp"):
            res = lift(ch, ax)
            if not res.liftable:
                continue
            positives += 1
            total = res.lifted
            good = (total.is_total and total.extends(ch)
                    and len(total.table) == 2 ** len(ch.universe) - 1
                    and check_axiom(total, ax).satisfied)
            if not good:
                failures.append((ch.to_json(), ax))
    elapsed = time.perf_counter() - start
    ok = record(2, not failures and elapsed < 60 and cases >= 500,
                f"{cases} partial choices, {positives} lifts verified, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures[:3]


def test_criterion_3_lift_completeness():
    rng = random.Random(12)
    start = time.perf_counter()
    cases = agree = 0
    mismatches = []
    for i in range(250):
        bias = "rank" if i % 4 == 0 else None
        ch = random_partial_choice(rng, rng.randint(1, 4), rng.random(), bias)
        for ax in ("alpha", "beta", "warp"):
            cases += 1
            fast = lift(ch, ax).liftable
            slow = brute_lift(ch, ax) is not None
            if fast == slow:
                agree += 1
            else:
                mismatches.append((ch.to_json(), ax, fast, slow))
    elapsed = time.perf_counter() - start
    ok = record(3, not mismatches and elapsed < 300,
                f"{agree}/{cases} verdicts agree (250 choices x 3 axioms), {elapsed:.1f}s")
    assert ok, mismatches[:3]


def test_criterion_4_solver_vs_oracle(corpus, verdicts):
    table, solver_seconds = verdicts
    start = time.perf_counter()
    compared = agree = exact = 0
    mismatches = []
    for i, f in enumerate(corpus):
        for s in SEMANTICS:
            v = table[i, s]
            bound = theory_bound(f, s)
            reach = bound if bound <= EXACT_REACH else ORACLE_CAP
            check = brute_decide(f, s, OracleBounds(max_universe=reach, menu_cap=(1 << EXACT_REACH) - 1))
            compared += 1
            if check.sat or not check.stats["bounded"]:
                exact += 1
            if v.status == check.status:
                agree += 1
            else:
                mismatches.append((render_formula(f), s, v.status, check.status))
    elapsed = solver_seconds + time.perf_counter() - start
    ok = record(4, not mismatches and exact == compared and elapsed < 600,
                f"{agree}/{compared} verdicts agree; {exact}/{compared} oracle runs reached the "
                f"small-model bound (oracle searches |U| <= {EXACT_REACH} when the bound allows, "
                f"else |U| <= {ORACLE_CAP}); {elapsed:.1f}s")
    assert not mismatches, mismatches[:3]
    assert elapsed < 600
    assert exact == compared, "oracle could not search up to the small-model bound on every formula"


def test_criterion_5_phi_w():
    f = load_formula(FIXTURES / "phi_w.bstc")
    got = {s: decide(f, s).status for s in SEMANTICS}
    want = {"unrestricted": "sat", "alpha": "sat", "beta": "sat", "warp": "unsat"}
    ok = record(5, got == want, ", ".join(f"{s} {got[s]}" for s in SEMANTICS))
    assert ok


def test_criterion_6_reductions(corpus, verdicts):
    table, _ = verdicts
    cases = agree = 0
    mismatches = []
    for i, f in enumerate(corpus):
        nf = normalize(f)
        for s, reduce in (("beta", reduce_beta), ("alpha", reduce_alpha)):
            cases += 1
            if decide_opaque(reduce(nf)).status == table[i, s].status:
                agree += 1
            else:
                mismatches.append((render_formula(f), s))
    ok = record(6, not mismatches, f"{agree}/{cases} reduced formulas match the direct verdict")
    assert ok, mismatches[:3]


def _rejection_inclusion_cases(rng, n):
    u = (1 << n) - 1
    for _ in range(1000):
        b = rng.randint(0, u)
        a = rng.randint(0, u) & b
        a2, b2 = rng.randint(0, u), rng.randint(0, u)
        yield (a & b2) & ~a2 == 0, (a & ~a2) & ~(b & ~b2) == 0


def _rejection_monotone(ch):
    for a in ch.domain:
        for b in ch.domain:
            if a & b == a and not rejection(ch, ch.names(a)) <= rejection(ch, ch.names(b)):
                return False
    return True


def _euler_ok(family):
    d = euler_diagram(family)
    union = frozenset().union(*family)
    seen = set()
    for r in d.regions:
        if not r or seen & r:
            return False
        seen |= r
        sigs = {tuple(u in s for s in d.family) for u in r}
        if len(sigs) != 1:
            return False
    if seen != union:
        return False
    for s in d.family:
        if frozenset().union(*[r for r in d.regions if r <= s]) != s:
            return False
        if any(r & s and not r <= s for r in d.regions):
            return False
    return len({tuple(next(iter(r)) in s for s in d.family) for r in d.regions}) == len(d.regions)


def test_criterion_7_structural_invariants():
    rng = random.Random(13)
    counts = {}
    fails = {}

    def tally(name, ok):
        counts[name] = counts.get(name, 0) + 1
        fails[name] = fails.get(name, 0) + (not ok)

    for lhs, rhs in _rejection_inclusion_cases(rng, 6):
        tally("rejection-inclusion", lhs == rhs)
    for _ in range(1000):
        ch = random_partial_choice(rng, rng.randint(1, 5), rng.random(), "rank" if rng.random() < 0.3 else None)
        tally("alpha-rejection", check_axiom(ch, "alpha").satisfied == _rejection_monotone(ch))
    for _ in range(1000):
        ch = random_total_choice(rng, rng.randint(1, 5))
        both = check_axiom(ch, "alpha").satisfied and check_axiom(ch, "beta").satisfied
        tally("warp-alpha-beta", check_axiom(ch, "warp").satisfied == both)
    letters = "abcdefg"
    for _ in range(1000):
        family = [frozenset(c for c in letters if rng.random() < 0.4) or frozenset("a")
                  for _ in range(rng.randint(1, 5))]
        tally("euler", _euler_ok(family))
    for _ in range(1000):
        f = random_formula(rng)
        tally("round-trip", parse_formula(render_formula(f), allow_reserved=True) == f)
    bad = {k: v for k, v in fails.items() if v}
    ok = record(7, not bad and all(c >= 1000 for c in counts.values()),
                ", ".join(f"{k} {counts[k] - fails[k]}/{counts[k]}" for k in counts))
    assert ok, bad


def test_criterion_8_small_model_bound(corpus, verdicts):
    table, _ = verdicts
    models = 0
    violations = []
    for (i, s), v in table.items():
        if v.sat:
            models += 1
            nf = normalize(corpus[i])
            bound = max(1, v.stats["false_atoms"] + len(nf.individual_vars) + 2 ** nf.k)
            if len(v.model.universe) > bound:
                violations.append((render_formula(corpus[i]), s))
    ok = record(8, models > 0 and not violations,
                f"{models - len(violations)}/{models} models within max(1, |false atoms| + |individuals| + 2^k)")
    assert ok, violations[:3]
