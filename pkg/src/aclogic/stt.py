"""Simply typed lambda calculus kernel.

Terms are built over the two base types ``o`` (booleans) and ``i``
(individuals, used as possible worlds by the modal embedding) with the
logical constants ``neg : o>o``, ``or : o>o>o`` and, for every type a,
``pi : (a>o)>o`` (the universal quantifier).  ``true`` and ``false`` are
distinguished constants of type ``o``.  Implication, conjunction and
bi-implication are derived, built by the helpers below as their usual
neg/or encodings.

Everything here is a pure function on immutable values: type checking,
capture-avoiding substitution, normal-order beta-eta normalization and
alpha equivalence.  Fresh names for renamed binders are derived
deterministically from the clash set, so identical inputs always print
byte-identically.

Concrete text syntax (used by `pretty` / `parse_term`, round-trips)::

    term  := '\\' NAME ':' type '.' term          lambda, extends right
           | 'forall' NAME ':' type '.' term      pi applied to a lambda
           | impl
    impl  := disj ('=>' impl)?                    right associative
    disj  := conj ('|' conj)*
    conj  := negt ('&' negt)*
    negt  := '~' negt | app
    app   := atom atom*                           application, left assoc
    atom  := NAME | 'true' | 'false' | 'neg' | 'or'
           | 'Pi' '[' type ']' | '(' term ')'
    type  := btype ('->' type)?                   right associative
    btype := 'i' | 'o' | '(' type ')'

``a => b`` abbreviates ``~a | b`` and ``a & b`` abbreviates
``~(~a | ~b)``; the printer re-sugars exactly those shapes.
"""

from __future__ import annotations

from dataclasses import dataclass


class SttError(Exception):
    pass


class TypeCheckError(SttError):
    """Ill-typed application or constant/variable used at the wrong type."""

    def __init__(self, message, expected=None, found=None):
        super().__init__(message)
        self.expected = expected
        self.found = found


class UnboundVariableError(SttError):
    pass


class TermSyntaxError(SttError):
    def __init__(self, message, pos=None):
        super().__init__(message if pos is None else f"{message} (at offset {pos})")
        self.pos = pos


# ---------------------------------------------------------------------------
# Types


class SimpleType:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class BaseType(SimpleType):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Arrow(SimpleType):
    domain: SimpleType
    codomain: SimpleType

    def __str__(self):
        dom = str(self.domain)
        if isinstance(self.domain, Arrow):
            dom = f"({dom})"
        return f"{dom}->{self.codomain}"


O = BaseType("o")
I = BaseType("i")


def arrow(*types: SimpleType) -> SimpleType:
    """Right-fold `types` into a function type: arrow(a,b,c) == a->(b->c)."""
    if not types:
        raise ValueError("arrow() needs at least one type")
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = Arrow(ty, result)
    return result


PRED = Arrow(I, O)          # world predicates, the type of embedded formulas
REL = arrow(I, I, O)        # accessibility relations


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str
    type: SimpleType


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str
    type: SimpleType


@dataclass(frozen=True, slots=True)
class Lam(Term):
    var: str
    var_type: SimpleType
    body: Term


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term


NEG = Const("neg", arrow(O, O))
OR = Const("or", arrow(O, O, O))
TRUE = Const("true", O)
FALSE = Const("false", O)


def pi(alpha: SimpleType) -> Const:
    """The universal quantifier constant at argument type `alpha`."""
    return Const("pi", Arrow(Arrow(alpha, O), O))


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def neg(s: Term) -> Term:
    return App(NEG, s)


def or_(a: Term, b: Term) -> Term:
    return app(OR, a, b)


def implies(a: Term, b: Term) -> Term:
    return or_(neg(a), b)


def and_(a: Term, b: Term) -> Term:
    return neg(or_(neg(a), neg(b)))


def iff(a: Term, b: Term) -> Term:
    return and_(implies(a, b), implies(b, a))


def forall(name: str, alpha: SimpleType, body: Term) -> Term:
    return App(pi(alpha), Lam(name, alpha, body))


def is_logical(c: Const) -> bool:
    return c in (NEG, OR, TRUE, FALSE) or is_pi(c)


def is_pi(t: Term) -> bool:
    return (
        isinstance(t, Const)
        and t.name == "pi"
        and isinstance(t.type, Arrow)
        and isinstance(t.type.domain, Arrow)
        and t.type.domain.codomain == O
        and t.type.codomain == O
    )


# ---------------------------------------------------------------------------
# Type checking


def type_of(t: Term, env: dict[str, SimpleType] | None = None) -> SimpleType:
    """Infer the unique type of `t`.

    Variables carry their own type; when `env` is supplied it is used to
    reject unbound or inconsistently typed free variables.
    """
    match t:
        case Const(_, ty):
            return ty
        case Var(name, ty):
            if env is not None:
                bound = env.get(name)
                if bound is None:
                    raise UnboundVariableError(f"unbound variable {name}")
                if bound != ty:
                    raise TypeCheckError(
                        f"variable {name} used at type {ty}, bound at {bound}",
                        expected=bound, found=ty)
            return ty
        case Lam(x, xt, body):
            inner = None if env is None else {**env, x: xt}
            return Arrow(xt, type_of(body, inner))
        case App(fn, arg):
            fn_ty = type_of(fn, env)
            arg_ty = type_of(arg, env)
            if not isinstance(fn_ty, Arrow):
                raise TypeCheckError(
                    f"non-function of type {fn_ty} applied to an argument",
                    expected="function type", found=fn_ty)
            if fn_ty.domain != arg_ty:
                raise TypeCheckError(
                    f"function expects {fn_ty.domain}, argument has type {arg_ty}",
                    expected=fn_ty.domain, found=arg_ty)
            return fn_ty.codomain
    raise SttError(f"not a term: {t!r}")


def free_vars(t: Term) -> frozenset[tuple[str, SimpleType]]:
    match t:
        case Var(name, ty):
            return frozenset([(name, ty)])
        case Const():
            return frozenset()
        case Lam(x, _, body):
            return frozenset((n, ty) for n, ty in free_vars(body) if n != x)
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
    raise SttError(f"not a term: {t!r}")


def free_names(t: Term) -> frozenset[str]:
    return frozenset(n for n, _ in free_vars(t))


def constants_of(t: Term) -> frozenset[tuple[str, SimpleType]]:
    match t:
        case Const(name, ty):
            return frozenset([(name, ty)])
        case Var():
            return frozenset()
        case Lam(_, _, body):
            return constants_of(body)
        case App(fn, arg):
            return constants_of(fn) | constants_of(arg)
    raise SttError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Substitution and normalization


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    """Deterministic fresh name: `base`, else base_1, base_2, ..."""
    if base not in avoid:
        return base
    root = base.split("_")[0] if base.rsplit("_", 1)[-1].isdigit() else base
    k = 1
    while f"{root}_{k}" in avoid:
        k += 1
    return f"{root}_{k}"


def substitute(term: Term, var: Var, replacement: Term) -> Term:
    """Capture-avoiding substitution of `replacement` for `var` in `term`."""
    repl_ty = type_of(replacement)
    if repl_ty != var.type:
        raise TypeCheckError(
            f"cannot substitute a {repl_ty} term for variable of type {var.type}",
            expected=var.type, found=repl_ty)
    repl_free = free_names(replacement)

    def go(t: Term) -> Term:
        match t:
            case Var(name, ty):
                if name == var.name and ty == var.type:
                    return replacement
                return t
            case Const():
                return t
            case App(fn, arg):
                return App(go(fn), go(arg))
            case Lam(x, xt, body):
                if x == var.name:
                    return t  # binder shadows the substituted name
                if x in repl_free and var.name in free_names(body):
                    avoid = repl_free | free_names(body) | {var.name}
                    x2 = fresh_name(x, avoid)
                    body = substitute(body, Var(x, xt), Var(x2, xt))
                    return Lam(x2, xt, go(body))
                return Lam(x, xt, go(body))
        raise SttError(f"not a term: {t!r}")

    return go(term)


def _beta(t: Term) -> Term:
    # normal order: reduce the head before the argument, substitute the
    # argument unevaluated (leftmost-outermost)
    match t:
        case App(fn, arg):
            fn = _beta(fn)
            if isinstance(fn, Lam):
                return _beta(substitute(fn.body, Var(fn.var, fn.var_type), arg))
            return App(fn, _beta(arg))
        case Lam(x, xt, body):
            return Lam(x, xt, _beta(body))
        case _:
            return t


def _eta(t: Term) -> Term:
    # bottom-up eta contraction; on a beta-normal term a single pass
    # suffices and cannot create new beta redexes
    match t:
        case App(fn, arg):
            return App(_eta(fn), _eta(arg))
        case Lam(x, xt, body):
            body = _eta(body)
            if (isinstance(body, App) and body.arg == Var(x, xt)
                    and x not in free_names(body.fn)):
                return body.fn
            return Lam(x, xt, body)
        case _:
            return t


def beta_eta_normalize(t: Term) -> Term:
    """Beta-eta normal form; idempotent, terminates on well-typed input."""
    return _eta(_beta(t))


def alpha_eq(a: Term, b: Term) -> bool:
    """Structural equality up to renaming of bound variables."""

    def go(a, b, ea, eb, depth):
        match a, b:
            case (Var(n1, t1), Var(n2, t2)):
                if t1 != t2:
                    return False
                i1, i2 = ea.get(n1), eb.get(n2)
                if i1 is None and i2 is None:
                    return n1 == n2
                return i1 is not None and i1 == i2
            case (Const(n1, t1), Const(n2, t2)):
                return n1 == n2 and t1 == t2
            case (Lam(x1, xt1, b1), Lam(x2, xt2, b2)):
                if xt1 != xt2:
                    return False
                return go(b1, b2, {**ea, x1: depth}, {**eb, x2: depth}, depth + 1)
            case (App(f1, a1), App(f2, a2)):
                return go(f1, f2, ea, eb, depth) and go(a1, a2, ea, eb, depth)
            case _:
                return False

    return go(a, b, {}, {}, 0)


def alpha_beta_eta_eq(a: Term, b: Term) -> bool:
    """True iff the beta-eta normal forms of `a` and `b` are alpha-equal."""
    ta, tb = type_of(a), type_of(b)
    if ta != tb:
        raise TypeCheckError(
            f"comparing terms of different types {ta} and {tb}",
            expected=ta, found=tb)
    return alpha_eq(beta_eta_normalize(a), beta_eta_normalize(b))


# ---------------------------------------------------------------------------
# Pretty printer

_LVL_LAM = 0
_LVL_IMPL = 1
_LVL_OR = 2
_LVL_AND = 3
_LVL_NEG = 4
_LVL_APP = 5


def pretty_type(ty: SimpleType) -> str:
    return str(ty)


def pretty(t: Term) -> str:
    """Plain-text rendering; `parse_term` inverts it."""
    return _pp(t, 0)


def _pp(t: Term, lvl: int) -> str:
    def wrap(s, this_lvl):
        return f"({s})" if lvl > this_lvl else s

    match t:
        case Const("true", BaseType("o")):
            return "true"
        case Const("false", BaseType("o")):
            return "false"
        case Const(name, _) if is_pi(t):
            return f"Pi[{pretty_type(t.type.domain.domain)}]"
        case Const(name, _) | Var(name, _):
            return name
        case App(fn, Lam(x, xt, body)) if is_pi(fn):
            return wrap(f"forall {x}:{pretty_type(xt)}. {_pp(body, _LVL_LAM)}", _LVL_LAM)
        case App(Const("neg", _), App(App(Const("or", _), App(Const("neg", _), a)), App(Const("neg", _), b))):
            return wrap(f"{_pp(a, _LVL_AND + 1)} & {_pp(b, _LVL_AND + 1)}", _LVL_AND)
        case App(App(Const("or", _), App(Const("neg", _), a)), b):
            return wrap(f"{_pp(a, _LVL_IMPL + 1)} => {_pp(b, _LVL_IMPL)}", _LVL_IMPL)
        case App(App(Const("or", _), a), b):
            return wrap(f"{_pp(a, _LVL_OR)} | {_pp(b, _LVL_OR + 1)}", _LVL_OR)
        case App(Const("neg", _), a):
            return wrap(f"~{_pp(a, _LVL_NEG)}", _LVL_NEG)
        case App(fn, arg):
            return wrap(f"{_pp(fn, _LVL_APP)} {_pp(arg, _LVL_APP + 1)}", _LVL_APP)
        case Lam(x, xt, body):
            return wrap(f"\\{x}:{pretty_type(xt)}. {_pp(body, _LVL_LAM)}", _LVL_LAM)
    raise SttError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Term parser (diagnostics / tests)

_PUNCT = ["->", "=>", "(", ")", "[", "]", "\\", ":", ".", "~", "|", "&"]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        c = text[pos]
        if c.isspace():
            pos += 1
            continue
        for p in _PUNCT:
            if text.startswith(p, pos):
                toks.append(("punct", p, pos))
                pos += len(p)
                break
        else:
            if c.isalpha() or c == "_":
                end = pos
                while end < n and (text[end].isalnum() or text[end] in "_'"):
                    end += 1
                toks.append(("name", text[pos:end], pos))
                pos = end
            else:
                raise TermSyntaxError(f"unexpected character {c!r}", pos)
    toks.append(("eof", "", n))
    return toks


class _TermParser:
    def __init__(self, text, sig, free):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.free = free

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.next()
        if val != value:
            raise TermSyntaxError(f"expected {value!r}, found {val!r}", pos)

    def parse_type(self):
        left = self.parse_btype()
        if self.peek()[1] == "->":
            self.next()
            return Arrow(left, self.parse_type())
        return left

    def parse_btype(self):
        kind, val, pos = self.next()
        if val == "(":
            ty = self.parse_type()
            self.expect(")")
            return ty
        if val == "i":
            return I
        if val == "o":
            return O
        raise TermSyntaxError(f"expected a type, found {val!r}", pos)

    def parse(self, env):
        t = self.parse_term(env)
        kind, val, pos = self.peek()
        if kind != "eof":
            raise TermSyntaxError(f"trailing input {val!r}", pos)
        return t

    def parse_term(self, env):
        kind, val, pos = self.peek()
        if val == "\\" or val == "forall":
            self.next()
            _, name, npos = self.next()
            self.expect(":")
            ty = self.parse_type()
            self.expect(".")
            body = self.parse_term({**env, name: ty})
            if val == "\\":
                return Lam(name, ty, body)
            return forall(name, ty, body)
        return self.parse_impl(env)

    def parse_impl(self, env):
        left = self.parse_disj(env)
        if self.peek()[1] == "=>":
            self.next()
            return implies(left, self.parse_impl_or_binder(env))
        return left

    def parse_impl_or_binder(self, env):
        if self.peek()[1] in ("\\", "forall"):
            return self.parse_term(env)
        return self.parse_impl(env)

    def parse_disj(self, env):
        left = self.parse_conj(env)
        while self.peek()[1] == "|":
            self.next()
            left = or_(left, self.parse_conj(env))
        return left

    def parse_conj(self, env):
        left = self.parse_neg(env)
        while self.peek()[1] == "&":
            self.next()
            left = and_(left, self.parse_neg(env))
        return left

    def parse_neg(self, env):
        if self.peek()[1] == "~":
            self.next()
            return neg(self.parse_neg(env))
        return self.parse_app(env)

    def parse_app(self, env):
        t = self.parse_atom(env)
        while True:
            kind, val, pos = self.peek()
            if val == "(" or (kind == "name" and val not in ("forall",)):
                t = App(t, self.parse_atom(env))
            else:
                return t

    def parse_atom(self, env):
        kind, val, pos = self.next()
        if val == "(":
            t = self.parse_term(env)
            self.expect(")")
            return t
        if kind != "name":
            raise TermSyntaxError(f"expected a term, found {val!r}", pos)
        if val == "true":
            return TRUE
        if val == "false":
            return FALSE
        if val == "neg":
            return NEG
        if val == "or":
            return OR
        if val == "Pi":
            self.expect("[")
            ty = self.parse_type()
            self.expect("]")
            return pi(ty)
        if val in env:
            return Var(val, env[val])
        if val in self.free:
            return Var(val, self.free[val])
        if val in self.sig:
            return Const(val, self.sig[val])
        raise TermSyntaxError(f"unknown identifier {val!r}", pos)


def parse_term(text: str,
               sig: dict[str, SimpleType] | None = None,
               free: dict[str, SimpleType] | None = None) -> Term:
    """Parse the printer's syntax back into a term.

    `sig` assigns types to free constants, `free` to free variables;
    bound variables take their type from the binder.
    """
    return _TermParser(text, sig or {}, free or {}).parse({})
