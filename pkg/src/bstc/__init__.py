"""Decision procedure for Boolean set formulae with a choice function."""

__version__ = "0.1.0"

from .choice import FiniteChoice, check_axiom, rationalizable
from .lifting import lift
from .oracle import OracleBounds, brute_decide, brute_lift
from .places import ResourceLimit
from .solver import Limits, Verdict, decide
from .syntax import ParseError, parse_formula, render_formula

__all__ = [
    "FiniteChoice",
    "Limits",
    "OracleBounds",
    "ParseError",
    "ResourceLimit",
    "Verdict",
    "brute_decide",
    "brute_lift",
    "check_axiom",
    "decide",
    "lift",
    "parse_formula",
    "rationalizable",
    "render_formula",
]
