"""Abstract syntax, parser and printer for Boolean set formulae with choice.

Surface syntax (ASCII):

    ====================  =========================
    math                  ASCII
    ====================  =========================
    empty set             ``0``
    union                 ``T1 + T2``
    intersection          ``T1 & T2``
    difference            ``T1 \\ T2``
    singleton             ``{x}``  (``{x, y}`` is ``{x} + {y}``)
    choice                ``c(T)``
    equality / subset     ``=``  ``<=``
    negated predicates    ``!=`` ``!<=``
    membership            ``x in T``  (sugar for ``{x} <= T``)
    connectives           ``not`` ``and`` ``or`` ``->`` ``<->``
    ====================  =========================

Set variables start with an uppercase letter, individual variables with a
lowercase one. Identifiers starting with ``_`` are reserved for generated
variables. ``#`` starts a comment running to the end of the line.

The printer is canonical: it never emits sugar, writes negated atoms as
``not T1 <= T2`` and uses the fewest parentheses that reparse to the same tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Union


class ParseError(ValueError):
    """Raised for malformed formula text; carries a 1-based position."""

    kind = "syntax error"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{self.kind} at line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class LexError(ParseError):
    kind = "lexical error"


class ArityError(ParseError):
    kind = "arity error"


# --------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class SetVar:
    name: str


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Singleton:
    name: str


@dataclass(frozen=True)
class Union_:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Inter:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Diff:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Choice:
    arg: "Term"


Term = Union[SetVar, Empty, Singleton, Union_, Inter, Diff, Choice]
BINARY_TERMS = (Union_, Inter, Diff)

EMPTY = Empty()

# --------------------------------------------------------------------------
# Formulae

EQ = "="
SUB = "<="


@dataclass(frozen=True)
class Atom:
    op: str  # EQ or SUB
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.op not in (EQ, SUB):
            raise ValueError(f"unknown predicate {self.op!r}")


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Iff]
BINARY_FORMULAS = (And, Or, Implies, Iff)


def conj(parts) -> Formula:
    """Left-nested conjunction of a nonempty sequence of formulae."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def union_all(terms) -> Term:
    terms = list(terms)
    if not terms:
        return EMPTY
    out = terms[0]
    for t in terms[1:]:
        out = Union_(out, t)
    return out


def neq(lhs: Term, rhs: Term) -> Formula:
    return Not(Atom(EQ, lhs, rhs))


# --------------------------------------------------------------------------
# Traversals

def subterms(t: Term) -> Iterator[Term]:
    """Post-order walk over a term (children before parents)."""
    if isinstance(t, BINARY_TERMS):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, Choice):
        yield from subterms(t.arg)
    yield t


def atoms(f: Formula) -> Iterator[Atom]:
    """Atoms in left-to-right order of occurrence (with repetitions)."""
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.arg)
    else:
        yield from atoms(f.left)
        yield from atoms(f.right)


def formula_terms(f: Formula) -> Iterator[Term]:
    for a in atoms(f):
        yield from subterms(a.lhs)
        yield from subterms(a.rhs)


def is_choice_free(t: Term) -> bool:
    return not any(isinstance(s, Choice) for s in subterms(t))


def map_terms(f: Formula, fn: Callable[[Term], Term]) -> Formula:
    """Rebuild ``f`` applying ``fn`` to both sides of every atom."""
    if isinstance(f, Atom):
        return Atom(f.op, fn(f.lhs), fn(f.rhs))
    if isinstance(f, Not):
        return Not(map_terms(f.arg, fn))
    return type(f)(map_terms(f.left, fn), map_terms(f.right, fn))


def replace_term(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, BINARY_TERMS):
        return type(t)(replace_term(t.left, old, new), replace_term(t.right, old, new))
    if isinstance(t, Choice):
        return Choice(replace_term(t.arg, old, new))
    return t


def variables(f: Formula) -> tuple[list[str], list[str]]:
    """Individual and set variable names in order of first occurrence."""
    ind: dict[str, None] = {}
    sets: dict[str, None] = {}
    for t in formula_terms(f):
        if isinstance(t, Singleton):
            ind.setdefault(t.name)
        elif isinstance(t, SetVar):
            sets.setdefault(t.name)
    return list(ind), list(sets)


# --------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<op><->|->|!<=|!=|<=|[=+&\\{}(),])
  | (?P<zero>0(?![0-9A-Za-z_]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

KEYWORDS = {"not", "and", "or", "in"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'op', 'zero', 'kw', 'setvar', 'ivar', 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str, allow_reserved: bool = False) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "ident":
            if s.startswith("_") and not allow_reserved:
                raise LexError(f"identifier {s!r} is reserved", line, col)
            bare = s.lstrip("_")
            if s in KEYWORDS:
                kind = "kw"
            elif not bare:
                raise LexError(f"bad identifier {s!r}", line, col)
            elif bare[0].isupper():
                kind = "setvar"
            else:
                kind = "ivar"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# --------------------------------------------------------------------------
# Parser (recursive descent with one backtracking point at '(')

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.furthest: ParseError | None = None

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None, cls=ParseError) -> ParseError:
        tok = tok or self.tok
        err = cls(msg, tok.line, tok.column)
        if self.furthest is None or (tok.line, tok.column) > (self.furthest.line, self.furthest.column):
            self.furthest = err
        return err

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    # formulae -----------------------------------------------------------
    def formula(self) -> Formula:
        left = self.implication()
        while self.at("<->"):
            self.i += 1
            left = Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.i += 1
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("or"):
            self.i += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("and"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.at("not"):
            self.i += 1
            return Not(self.unary())
        if self.at("("):
            start = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = start
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        tok = self.tok
        if tok.kind == "ivar" and not self.peek().text == "(":
            nxt = self.peek()
            if nxt.kind == "kw" and nxt.text == "in":
                self.i += 2
                return Atom(SUB, Singleton(tok.text), self.term())
            if nxt.kind == "op" and nxt.text in ("=", "!="):
                other = self.peek(2)
                if other.kind != "ivar":
                    raise self.error("expected an individual variable", other)
                self.i += 3
                a = Atom(EQ, Singleton(tok.text), Singleton(other.text))
                return a if nxt.text == "=" else Not(a)
            raise self.error(f"individual variable {tok.text!r} must be followed by 'in', '=' or '!='", nxt)
        lhs = self.term()
        op = self.tok
        if op.kind == "op" and op.text in ("=", "<=", "!=", "!<="):
            self.i += 1
            rhs = self.term()
            base = Atom(EQ if op.text in ("=", "!=") else SUB, lhs, rhs)
            return Not(base) if op.text.startswith("!") else base
        found = op.text or "end of input"
        raise self.error(f"expected a predicate ('=', '<=', '!=', '!<='), found {found!r}")

    # terms --------------------------------------------------------------
    def term(self) -> Term:
        left = self.factor()
        while self.at("+"):
            self.i += 1
            left = Union_(left, self.factor())
        return left

    def factor(self) -> Term:
        left = self.primary()
        while self.at("&") or self.at("\\"):
            cls = Inter if self.tok.text == "&" else Diff
            self.i += 1
            left = cls(left, self.primary())
        return left

    def primary(self) -> Term:
        tok = self.tok
        if tok.kind == "setvar":
            self.i += 1
            return SetVar(tok.text)
        if tok.kind == "zero":
            self.i += 1
            return EMPTY
        if tok.kind == "ivar" and tok.text == "c" and self.peek().text == "(":
            self.i += 2
            if self.at(")"):
                raise self.error("choice takes exactly one argument", cls=ArityError)
            arg = self.term()
            if self.at(","):
                raise self.error("choice takes exactly one argument", cls=ArityError)
            self.expect(")")
            return Choice(arg)
        if self.at("{"):
            self.i += 1
            if self.at("}"):
                raise self.error("singleton needs an individual variable", cls=ArityError)
            names = [self.ivar()]
            while self.at(","):
                self.i += 1
                names.append(self.ivar())
            self.expect("}")
            return union_all(Singleton(n) for n in names)
        if self.at("("):
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        if tok.kind == "ivar":
            raise self.error(f"individual variable {tok.text!r} is not a set term; write {{{tok.text}}}")
        found = tok.text or "end of input"
        raise self.error(f"expected a set term, found {found!r}")

    def ivar(self) -> str:
        tok = self.tok
        if tok.kind != "ivar":
            raise self.error("expected an individual variable")
        self.i += 1
        return tok.text


def parse_formula(text: str, allow_reserved: bool = False) -> Formula:
    """Parse formula text into an AST.

    Raises a :class:`ParseError` subclass (lexical, syntax or arity error)
    positioned at the offending token.
    """
    p = _Parser(tokenize(text, allow_reserved))
    try:
        f = p.formula()
    except ParseError as err:
        # report the deepest failure seen, which is the most informative one
        raise (p.furthest or err) from None
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after formula")
    return f


def parse_term(text: str, allow_reserved: bool = False) -> Term:
    p = _Parser(tokenize(text, allow_reserved))
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after term")
    return t


def load_formula(path) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse_formula(fh.read())


# --------------------------------------------------------------------------
# Printer

_TERM_PREC = {Union_: 1, Inter: 2, Diff: 2}
_TERM_OP = {Union_: "+", Inter: "&", Diff: "\\"}


def render_term(t: Term) -> str:
    if isinstance(t, SetVar):
        return t.name
    if isinstance(t, Empty):
        return "0"
    if isinstance(t, Singleton):
        return "{" + t.name + "}"
    if isinstance(t, Choice):
        return f"c({render_term(t.arg)})"
    prec = _TERM_PREC[type(t)]
    left = render_term(t.left)
    right = render_term(t.right)
    if isinstance(t.left, BINARY_TERMS) and _TERM_PREC[type(t.left)] < prec:
        left = f"({left})"
    if isinstance(t.right, BINARY_TERMS) and _TERM_PREC[type(t.right)] <= prec:
        right = f"({right})"
    return f"{left} {_TERM_OP[type(t)]} {right}"


def render_atom(a: Atom) -> str:
    return f"{render_term(a.lhs)} {a.op} {render_term(a.rhs)}"


_FORM_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_FORM_OP = {Iff: "<->", Implies: "->", Or: "or", And: "and"}


def render_formula(f, leaf: Callable[[object], str] = render_atom) -> str:
    """Print a formula; ``leaf`` renders non-connective nodes (atoms by default)."""

    def prec(g) -> int:
        if isinstance(g, Not):
            return 5
        return _FORM_PREC.get(type(g), 6)

    def go(g) -> str:
        if isinstance(g, Not):
            inner = go(g.arg)
            return f"not ({inner})" if prec(g.arg) < 5 else f"not {inner}"
        if not isinstance(g, BINARY_FORMULAS):
            return leaf(g)
        p = prec(g)
        left, right = go(g.left), go(g.right)
        right_assoc = isinstance(g, Implies)
        lp, rp = prec(g.left), prec(g.right)
        if lp < p or (right_assoc and lp == p):
            left = f"({left})"
        if rp < p or (not right_assoc and rp == p):
            right = f"({right})"
        return f"{left} {_FORM_OP[type(g)]} {right}"

    return go(f)
