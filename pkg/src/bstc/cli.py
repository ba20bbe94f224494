"""Command-line entry point: ``bstc solve | check-axioms | lift | rationalize | oracle``.

Structured output is JSON on stdout (or ``--output``); a one-line summary goes
to stderr. Exit codes: 0 sat / yes, 1 unsat / no, 2 input or usage error,
3 resource limit, 4 disagreement with the oracle.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .choice import AXIOMS, ChoiceError, check_axiom, load_choice, rationalizable
from .lifting import RegionPreorder, lift
from .oracle import OracleBounds, brute_decide, brute_lift
from .places import ResourceLimit
from .solver import SEMANTICS, Limits, decide
from .syntax import ParseError, load_formula

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_LIMIT, EXIT_DISAGREE = 0, 1, 2, 3, 4


class _InputError(Exception):
    pass


def jsonable(x):
    """Plain JSON data from certificates holding sets, tuples and non-string keys."""
    if isinstance(x, RegionPreorder):
        rows = sorted(x.rank.items(), key=lambda kv: (kv[1], sorted(map(str, kv[0]))))
        return [{"region": jsonable(r), "rank": k} for r, k in rows]
    if isinstance(x, (set, frozenset)):
        return sorted((jsonable(v) for v in x), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, str) else k: jsonable(v) for k, v in x.items()}
    return x


def _emit(data: dict, args) -> None:
    text = json.dumps(jsonable(data), indent=2)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _formula(path):
    try:
        return load_formula(path)
    except OSError as e:
        raise _InputError(f"cannot read {path}: {e.strerror or e}") from None
    except ParseError as e:
        raise _InputError(f"{path}: {e}") from None


def _choice(path):
    try:
        return load_choice(path)
    except OSError as e:
        raise _InputError(f"cannot read {path}: {e.strerror or e}") from None
    except (ChoiceError, ValueError) as e:
        raise _InputError(f"{path}: {e}") from None


def _oracle_agreement(verdict, check) -> bool | None:
    """True/False when the oracle settles the question, None when its bound is too small."""
    if verdict.status == check.status:
        return True
    if check.status == "sat":
        return False
    # solver sat, oracle found nothing up to its bound
    if not check.stats["bounded"] or len(verdict.model.universe) <= check.stats["max_universe"]:
        return False
    return None


def cmd_solve(args) -> int:
    f = _formula(args.input)
    limits = Limits(max_places=args.max_places)
    verdict = decide(f, args.semantics, limits)
    out = verdict.to_json()
    if not args.model:
        out.pop("model", None)
    code = EXIT_YES if verdict.sat else EXIT_NO
    if args.oracle_check:
        check = brute_decide(f, args.semantics, OracleBounds(max_universe=args.max_universe))
        agrees = _oracle_agreement(verdict, check)
        out["oracle"] = {"status": check.status, "agrees": agrees, **check.stats}
        if agrees is False:
            code = EXIT_DISAGREE
    _emit(out, args)
    _say(f"{args.semantics}: {verdict.status}"
         + (f" ({len(verdict.model.universe)} elements)" if verdict.sat else "")
         + (" [oracle disagrees]" if code == EXIT_DISAGREE else ""))
    return code


def cmd_check(args) -> int:
    ch = _choice(args.input)
    axioms = args.axioms.split(",") if args.axioms else list(AXIOMS)
    unknown = [a for a in axioms if a not in AXIOMS]
    if unknown:
        raise _InputError(f"unknown axiom(s): {', '.join(unknown)}")
    report = [check_axiom(ch, a) for a in axioms]
    _emit({"axioms": [w.to_json() for w in report]}, args)
    _say(", ".join(f"{w.axiom} {'pass' if w.satisfied else 'fail'}" for w in report))
    return EXIT_YES if all(w.satisfied for w in report) else EXIT_NO


def cmd_lift(args) -> int:
    ch = _choice(args.input)
    if args.axiom == "rational":
        total = brute_lift(ch, "rational", OracleBounds(max_universe=args.max_universe))
        out = {"axiom": "rational", "liftable": total is not None, "certificate": None}
    else:
        res = lift(ch, args.axiom)
        total = res.lifted
        out = {"axiom": args.axiom, "liftable": res.liftable, "certificate": res.certificate}
    if total is not None:
        out["lifted"] = total.to_json()
        if args.emit:
            with open(args.emit, "w") as fh:
                json.dump(total.to_json(), fh, indent=2)
                fh.write("\n")
    _emit(out, args)
    _say(f"{args.axiom}: {'liftable' if total is not None else 'not liftable'}")
    return EXIT_YES if total is not None else EXIT_NO


def cmd_rationalize(args) -> int:
    ch = _choice(args.input)
    rel = rationalizable(ch)
    out = {"rationalizable": rel is not None}
    if rel is not None:
        out["worse_than"] = sorted([a, b] for a, b in rel)
    _emit(out, args)
    _say("rationalizable" if rel is not None else "not rationalizable")
    return EXIT_YES if rel is not None else EXIT_NO


def cmd_oracle(args) -> int:
    f = _formula(args.input)
    verdict = brute_decide(f, args.semantics, OracleBounds(max_universe=args.max_universe))
    _emit(verdict.to_json(), args)
    bounded = " (bounded search)" if verdict.stats["bounded"] and not verdict.sat else ""
    _say(f"oracle {args.semantics}: {verdict.status}{bounded}")
    return EXIT_YES if verdict.sat else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bstc", description="Decide Boolean set formulae with a choice function.")
    p.add_argument("--version", action="version", version=f"bstc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, semantics=False, universe=False):
        sp.add_argument("input", help="input file")
        sp.add_argument("--output", "-o", help="write JSON here instead of stdout")
        if semantics:
            sp.add_argument("--semantics", choices=SEMANTICS, default="unrestricted")
        if universe:
            sp.add_argument("--max-universe", type=int, default=5, help="oracle universe bound")

    sp = sub.add_parser("solve", help="decide satisfiability of a formula file")
    common(sp, semantics=True, universe=True)
    sp.add_argument("--model", action="store_true", help="include the model and its full choice table")
    sp.add_argument("--oracle-check", action="store_true", help="cross-check with brute-force search")
    sp.add_argument("--max-places", type=int, help="slot ceiling (default: BSTC_MAX_PLACES or 512)")
    sp.set_defaults(run=cmd_solve)

    sp = sub.add_parser("check-axioms", help="check choice axioms on a choice file")
    common(sp)
    sp.add_argument("--axioms", help=f"comma-separated subset of {','.join(AXIOMS)}")
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("lift", help="extend a partial choice to a total one")
    common(sp, universe=True)
    sp.add_argument("--axiom", choices=("alpha", "beta", "warp", "rational"), required=True)
    sp.add_argument("--emit", help="write the lifted total choice to this file")
    sp.set_defaults(run=cmd_lift)

    sp = sub.add_parser("rationalize", help="test rationalizability of a choice file")
    common(sp)
    sp.set_defaults(run=cmd_rationalize)

    sp = sub.add_parser("oracle", help="brute-force model search")
    common(sp, semantics=True, universe=True)
    sp.set_defaults(run=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_YES
    try:
        return args.run(args)
    except _InputError as e:
        _say(f"error: {e}")
        return EXIT_INPUT
    except ResourceLimit as e:
        _say(f"resource limit: {e}")
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
