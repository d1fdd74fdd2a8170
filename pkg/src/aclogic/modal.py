"""Monomodal propositional formulas and their lambda-calculus embeddings.

The formula language has one box operator over a single accessibility
relation, named by the reserved constant ``r``.  Core constructors are
Atom, Not, Or and Box; Implies, And, Top, Bottom and Diamond are
first-class nodes defined by expansion into the core (`expand_derived`),
and the semantic procedures treat them natively with exactly the
expansion semantics.

Two embeddings into typed lambda terms are provided, both landing in the
world-predicate type ``i->o``:

* `embed_recursive` maps a formula directly to its beta-eta-normal
  translation (atoms to ``i->o`` constants, box to quantification over
  r-successors);
* `embed_local` instead applies the one-definition-per-connective
  lambda terms (D_NOT, D_OR, D_BOX, ...) without recursing into them,
  so its output normalizes to the recursive translation but is not
  itself normal.

`mval` lifts a world predicate to a closed boolean (truth in every
world).  `axiom_r` / `axiom_t` build the closed second-order terms
stating that box satisfies reflexivity / transitivity over all
predicates; together they characterize preorder frames.

Text syntax (parse_modal / pretty_modal round-trip)::

    formula := impl
    impl    := disj ('->' impl)?          right associative
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '~' unary | 'box' unary | 'dia' unary | atom
    atom    := NAME | 'true' | 'false' | '(' formula ')'
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import stt
from .stt import App, Const, Lam, Term, Var


RELATION_NAME = "r"
R_CONST = Const(RELATION_NAME, stt.REL)


class Logic(enum.Enum):
    """Frame class a validity question is asked over."""
    K = "K"            # all frames
    S4 = "S4"          # reflexive-transitive frames

    def __str__(self):
        return self.value


class ModalError(Exception):
    pass


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Diamond(Formula):
    sub: Formula


TOP = Top()
BOTTOM = Bottom()


def expand_derived(f: Formula) -> Formula:
    """Rewrite And/Implies/Diamond into the {Atom, Not, Or, Box, Top,
    Bottom} core (Top and Bottom stay primitive)."""
    match f:
        case Atom() | Top() | Bottom():
            return f
        case Not(s):
            return Not(expand_derived(s))
        case Or(a, b):
            return Or(expand_derived(a), expand_derived(b))
        case Box(s):
            return Box(expand_derived(s))
        case And(a, b):
            return Not(Or(Not(expand_derived(a)), Not(expand_derived(b))))
        case Implies(a, b):
            return Or(Not(expand_derived(a)), expand_derived(b))
        case Diamond(s):
            return Not(Box(Not(expand_derived(s))))
    raise ModalError(f"not a modal formula: {f!r}")


def atoms_of(f: Formula) -> frozenset[str]:
    match f:
        case Atom(name):
            return frozenset([name])
        case Top() | Bottom():
            return frozenset()
        case Not(s) | Box(s) | Diamond(s):
            return atoms_of(s)
        case Or(a, b) | And(a, b) | Implies(a, b):
            return atoms_of(a) | atoms_of(b)
    raise ModalError(f"not a modal formula: {f!r}")


def _check_atom(name: str) -> None:
    if name == RELATION_NAME:
        raise ModalError(
            f"atom name {RELATION_NAME!r} is reserved for the accessibility relation")


# ---------------------------------------------------------------------------
# Local connective definitions (one closed lambda term per connective)

_A = Var("A", stt.PRED)
_B = Var("B", stt.PRED)
_R = Var("R", stt.REL)
_X = Var("X", stt.I)
_Y = Var("Y", stt.I)
_W = Var("W", stt.I)

D_NOT = Lam("A", stt.PRED, Lam("X", stt.I, stt.neg(App(_A, _X))))
D_OR = Lam("A", stt.PRED, Lam("B", stt.PRED,
           Lam("X", stt.I, stt.or_(App(_A, _X), App(_B, _X)))))
D_IMPL = Lam("A", stt.PRED, Lam("B", stt.PRED,
             Lam("X", stt.I, stt.implies(App(_A, _X), App(_B, _X)))))
D_AND = Lam("A", stt.PRED, Lam("B", stt.PRED,
            Lam("X", stt.I, stt.and_(App(_A, _X), App(_B, _X)))))
# Top/Bottom are used in formula positions of type i->o, so they are the
# lifted constants \X:i. true and \X:i. false rather than functions that
# discard an i->o argument; types would not line up otherwise.
D_TOP = Lam("X", stt.I, stt.TRUE)
D_BOT = Lam("X", stt.I, stt.FALSE)
D_BOX = Lam("R", stt.REL, Lam("A", stt.PRED, Lam("X", stt.I,
            stt.forall("Y", stt.I,
                       stt.implies(stt.app(_R, _X, _Y), App(_A, _Y))))))
D_DIA = Lam("R", stt.REL, Lam("A", stt.PRED, Lam("X", stt.I,
            stt.neg(stt.forall("Y", stt.I,
                    stt.implies(stt.app(_R, _X, _Y), stt.neg(App(_A, _Y))))))))
D_MVAL = Lam("A", stt.PRED, stt.forall("W", stt.I, App(_A, _W)))


def embed_local(f: Formula) -> Term:
    """Embed by applying the connective definitions, without recursing
    into them.  `beta_eta_normalize(embed_local(f))` is alpha-equal to
    `embed_recursive(f)`."""
    match f:
        case Atom(name):
            _check_atom(name)
            return Const(name, stt.PRED)
        case Not(s):
            return App(D_NOT, embed_local(s))
        case Or(a, b):
            return stt.app(D_OR, embed_local(a), embed_local(b))
        case Box(s):
            return stt.app(D_BOX, R_CONST, embed_local(s))
        case And(a, b):
            return stt.app(D_AND, embed_local(a), embed_local(b))
        case Implies(a, b):
            return stt.app(D_IMPL, embed_local(a), embed_local(b))
        case Top():
            return D_TOP
        case Bottom():
            return D_BOT
        case Diamond(s):
            return stt.app(D_DIA, R_CONST, embed_local(s))
    raise ModalError(f"not a modal formula: {f!r}")


def embed_recursive(f: Formula) -> Term:
    """Embed by structural recursion; the result is beta-eta normal and
    has type i->o."""
    return stt.beta_eta_normalize(_embed_rec(f))


def _embed_rec(f: Formula) -> Term:
    x = Var("X", stt.I)
    y = Var("Y", stt.I)

    def at(g: Formula, w: Var) -> Term:
        return App(_embed_rec(g), w)

    match f:
        case Atom(name):
            _check_atom(name)
            return Const(name, stt.PRED)
        case Not(s):
            return Lam("X", stt.I, stt.neg(at(s, x)))
        case Or(a, b):
            return Lam("X", stt.I, stt.or_(at(a, x), at(b, x)))
        case Box(s):
            return Lam("X", stt.I, stt.forall(
                "Y", stt.I, stt.implies(stt.app(R_CONST, x, y), at(s, y))))
        case And(a, b):
            return Lam("X", stt.I, stt.and_(at(a, x), at(b, x)))
        case Implies(a, b):
            return Lam("X", stt.I, stt.implies(at(a, x), at(b, x)))
        case Top():
            return D_TOP
        case Bottom():
            return D_BOT
        case Diamond(s):
            return Lam("X", stt.I, stt.neg(stt.forall(
                "Y", stt.I,
                stt.implies(stt.app(R_CONST, x, y), stt.neg(at(s, y))))))
    raise ModalError(f"not a modal formula: {f!r}")


def mval(t: Term) -> Term:
    """Lift a world predicate (type i->o) to the closed boolean stating
    it holds at every world."""
    ty = stt.type_of(t)
    if ty != stt.PRED:
        raise stt.TypeCheckError(
            f"mval expects a term of type {stt.PRED}, got {ty}",
            expected=stt.PRED, found=ty)
    return stt.beta_eta_normalize(App(D_MVAL, t))


def axiom_r() -> Term:
    """Reflexivity axiom: every boxed predicate holds here too,
    quantified over all predicates."""
    x = Var("X", stt.PRED)
    body = App(D_MVAL, stt.app(D_IMPL, stt.app(D_BOX, R_CONST, x), x))
    return stt.beta_eta_normalize(stt.forall("X", stt.PRED, body))


def axiom_t() -> Term:
    """Transitivity axiom: box implies box box, quantified over all
    predicates."""
    x = Var("X", stt.PRED)
    bx = stt.app(D_BOX, R_CONST, x)
    bbx = stt.app(D_BOX, R_CONST, bx)
    body = App(D_MVAL, stt.app(D_IMPL, bx, bbx))
    return stt.beta_eta_normalize(stt.forall("X", stt.PRED, body))


# ---------------------------------------------------------------------------
# Text syntax

_KEYWORDS = ("box", "dia", "true", "false")


class ModalSyntaxError(ModalError):
    def __init__(self, message, pos=None):
        super().__init__(message if pos is None else f"{message} (at offset {pos})")
        self.pos = pos


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        c = text[pos]
        if c.isspace():
            pos += 1
            continue
        if text.startswith("->", pos):
            toks.append(("->", pos))
            pos += 2
        elif c in "~|&()":
            toks.append((c, pos))
            pos += 1
        elif c.isalpha() or c == "_":
            end = pos
            while end < n and (text[end].isalnum() or text[end] == "_"):
                end += 1
            toks.append((text[pos:end], pos))
            pos = end
        else:
            raise ModalSyntaxError(f"unexpected character {c!r}", pos)
    toks.append(("", n))
    return toks


class _ModalParser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def parse(self):
        f = self.parse_impl()
        if self.peek() != "":
            val, pos = self.next()
            raise ModalSyntaxError(f"trailing input {val!r}", pos)
        return f

    def parse_impl(self):
        left = self.parse_disj()
        if self.peek() == "->":
            self.next()
            return Implies(left, self.parse_impl())
        return left

    def parse_disj(self):
        left = self.parse_conj()
        while self.peek() == "|":
            self.next()
            left = Or(left, self.parse_conj())
        return left

    def parse_conj(self):
        left = self.parse_unary()
        while self.peek() == "&":
            self.next()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self):
        val, pos = self.next()
        if val == "~":
            return Not(self.parse_unary())
        if val == "box":
            return Box(self.parse_unary())
        if val == "dia":
            return Diamond(self.parse_unary())
        if val == "(":
            f = self.parse_impl()
            if self.next()[0] != ")":
                raise ModalSyntaxError("missing closing parenthesis", pos)
            return f
        if val == "true":
            return TOP
        if val == "false":
            return BOTTOM
        if val and (val[0].isalpha() or val[0] == "_") and val not in _KEYWORDS:
            _check_atom(val)
            return Atom(val)
        raise ModalSyntaxError(f"expected a formula, found {val!r}", pos)


def parse_modal(text: str) -> Formula:
    return _ModalParser(text).parse()


_M_IMPL, _M_OR, _M_AND, _M_UNARY = 0, 1, 2, 3


def pretty_modal(f: Formula) -> str:
    return _mpp(f, _M_IMPL)


def _mpp(f: Formula, lvl: int) -> str:
    def wrap(s, this):
        return f"({s})" if lvl > this else s

    match f:
        case Atom(name):
            return name
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Not(s):
            return f"~{_mpp(s, _M_UNARY)}"
        case Box(s):
            return f"box {_mpp(s, _M_UNARY)}"
        case Diamond(s):
            return f"dia {_mpp(s, _M_UNARY)}"
        case And(a, b):
            return wrap(f"{_mpp(a, _M_AND)} & {_mpp(b, _M_UNARY)}", _M_AND)
        case Or(a, b):
            return wrap(f"{_mpp(a, _M_OR)} | {_mpp(b, _M_AND)}", _M_OR)
        case Implies(a, b):
            return wrap(f"{_mpp(a, _M_OR)} -> {_mpp(b, _M_IMPL)}", _M_IMPL)
    raise ModalError(f"not a modal formula: {f!r}")


def formula_key(f: Formula):
    """Total deterministic ordering key, used wherever processing order
    must not depend on hash randomization."""
    match f:
        case Atom(name):
            return (0, name)
        case Top():
            return (1, "")
        case Bottom():
            return (2, "")
        case Not(s):
            return (3, "", formula_key(s))
        case Box(s):
            return (4, "", formula_key(s))
        case Diamond(s):
            return (5, "", formula_key(s))
        case Or(a, b):
            return (6, "", formula_key(a), formula_key(b))
        case And(a, b):
            return (7, "", formula_key(a), formula_key(b))
        case Implies(a, b):
            return (8, "", formula_key(a), formula_key(b))
    raise ModalError(f"not a modal formula: {f!r}")
