"""Evaluator for lambda terms over finite standard models.

A finite interpretation fixes the size of the individual domain and a
denotation for each non-logical constant; booleans are {F, T} and every
function domain is the full (finite) function space, represented
extensionally as tables in a canonical enumeration order.  Evaluation
follows the usual clauses: variables from the assignment, constants from
the interpretation, application by table lookup, abstraction by
tabulating the body over the argument domain.  The logical constants
always denote negation, disjunction and universal quantification.

`model_from_kripke` / `kripke_from_model` convert between Kripke models
and interpretations of the relation constant plus atom predicates; the
two directions are mutually inverse and preserve reflexivity and
transitivity of the relation.

`check_frame_correspondence` is the exhaustive finite oracle for the
frame-correspondence fact that the two box axioms (reflexivity and
transitivity, quantified over all predicates) hold exactly on the
preorder relation tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from . import modal, stt
from .kripke import KripkeModel
from .stt import App, Arrow, BaseType, Const, Lam, SimpleType, Term, Var


DEFAULT_DOMAIN_CAP = 2 ** 16


class InterpError(Exception):
    pass


class DomainTooLargeError(InterpError):
    pass


class MissingInterpretationError(InterpError):
    pass


class Value:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class VBool(Value):
    value: bool


@dataclass(frozen=True, slots=True)
class VInd(Value):
    index: int


@dataclass(frozen=True, slots=True)
class VFun(Value):
    """Total function table; outputs[k] is the result on the k-th element
    of the argument domain in canonical order."""
    arg_type: SimpleType
    outputs: tuple[Value, ...]


TRUE_V = VBool(True)
FALSE_V = VBool(False)


def domain_size(ty: SimpleType, iota_size: int, cap: int = DEFAULT_DOMAIN_CAP) -> int:
    match ty:
        case BaseType("o"):
            return 2
        case BaseType("i"):
            return iota_size
        case Arrow(dom, cod):
            size = domain_size(cod, iota_size, cap) ** domain_size(dom, iota_size, cap)
            if size > cap:
                raise DomainTooLargeError(
                    f"domain for {ty} has {size} elements (cap {cap})")
            return size
    raise InterpError(f"not a type: {ty!r}")


@lru_cache(maxsize=None)
def enumerate_domain(ty: SimpleType, iota_size: int,
                     cap: int = DEFAULT_DOMAIN_CAP) -> tuple[Value, ...]:
    """All elements of the domain in canonical order (booleans F then T,
    individuals by index, functions by output tuples, last slot fastest)."""
    match ty:
        case BaseType("o"):
            return (FALSE_V, TRUE_V)
        case BaseType("i"):
            return tuple(VInd(i) for i in range(iota_size))
        case Arrow(dom, cod):
            domain_size(ty, iota_size, cap)  # cap check
            arg_count = domain_size(dom, iota_size, cap)
            cod_elems = enumerate_domain(cod, iota_size, cap)
            return tuple(VFun(dom, outs)
                         for outs in itertools.product(cod_elems, repeat=arg_count))
    raise InterpError(f"not a type: {ty!r}")


def domain_index(v: Value, iota_size: int, cap: int = DEFAULT_DOMAIN_CAP) -> int:
    """Position of `v` in the canonical enumeration of its domain."""
    match v:
        case VBool(b):
            return int(b)
        case VInd(i):
            return i
        case VFun(dom, outs):
            # radix is the codomain size; recover it from the first output
            radix = _value_domain_size(outs[0], iota_size, cap)
            idx = 0
            for out in outs:
                idx = idx * radix + domain_index(out, iota_size, cap)
            return idx
    raise InterpError(f"not a value: {v!r}")


def _value_domain_size(v: Value, iota_size: int, cap: int) -> int:
    match v:
        case VBool():
            return 2
        case VInd():
            return iota_size
        case VFun(dom, outs):
            return (_value_domain_size(outs[0], iota_size, cap)
                    ** domain_size(dom, iota_size, cap))
    raise InterpError(f"not a value: {v!r}")


def apply_value(f: Value, arg: Value, iota_size: int,
                cap: int = DEFAULT_DOMAIN_CAP) -> Value:
    if not isinstance(f, VFun):
        raise InterpError(f"cannot apply non-function value {f!r}")
    return f.outputs[domain_index(arg, iota_size, cap)]


@dataclass(frozen=True)
class FiniteInterpretation:
    """Finite standard model: individual domain {0..iota_size-1}, full
    function spaces, and denotations for the non-logical constants
    (keyed by name and type; same-named constants at different types are
    distinct symbols)."""
    iota_size: int
    const_interp: dict[tuple[str, SimpleType], Value]
    cap: int = DEFAULT_DOMAIN_CAP

    def __post_init__(self):
        if self.iota_size < 1:
            raise ValueError("the individual domain must be non-empty")


@lru_cache(maxsize=None)
def _logical_table(name: str, ty: SimpleType, iota_size: int, cap: int) -> Value:
    if name == "neg":
        return VFun(stt.O, (TRUE_V, FALSE_V))
    if name == "or":
        return VFun(stt.O, (VFun(stt.O, (FALSE_V, TRUE_V)),
                            VFun(stt.O, (TRUE_V, TRUE_V))))
    if name == "pi":
        alpha = ty.domain.domain
        preds = enumerate_domain(Arrow(alpha, stt.O), iota_size, cap)
        outs = tuple(VBool(all(o == TRUE_V for o in p.outputs)) for p in preds)
        return VFun(Arrow(alpha, stt.O), outs)
    raise InterpError(f"not a logical constant: {name}")


@lru_cache(maxsize=None)
def _index_map(ty: SimpleType, iota_size: int, cap: int) -> dict[Value, int]:
    return {v: i for i, v in enumerate(enumerate_domain(ty, iota_size, cap))}


class _Ctx:
    """Per-interpretation evaluation context (domain caches are global)."""
    __slots__ = ("m", "iota", "cap")

    def __init__(self, m: FiniteInterpretation):
        self.m = m
        self.iota = m.iota_size
        self.cap = m.cap

    def domain(self, ty):
        return enumerate_domain(ty, self.iota, self.cap)

    def index(self, ty, val):
        return _index_map(ty, self.iota, self.cap)[val]


@lru_cache(maxsize=None)
def _compile(t: Term):
    """Compile a term to a closure (ctx, env) -> Value; evaluation of the
    same term over many interpretations then skips re-dispatch."""
    match t:
        case Var(name, _):
            def run(ctx, env, _name=name):
                try:
                    return env[_name]
                except KeyError:
                    raise stt.UnboundVariableError(
                        f"unassigned variable {_name}") from None
            return run
        case Const("true", BaseType("o")):
            return lambda ctx, env: TRUE_V
        case Const("false", BaseType("o")):
            return lambda ctx, env: FALSE_V
        case Const(name, ty):
            if t == stt.NEG or t == stt.OR or stt.is_pi(t):
                def run(ctx, env, _n=name, _ty=ty):
                    return _logical_table(_n, _ty, ctx.iota, ctx.cap)
                return run

            def run(ctx, env, _n=name, _ty=ty):
                try:
                    return ctx.m.const_interp[(_n, _ty)]
                except KeyError:
                    raise MissingInterpretationError(
                        f"no interpretation for constant {_n} : {_ty}") from None
            return run
        case App(Const("neg", _), s) if t.fn == stt.NEG:
            cs = _compile(s)

            def run(ctx, env):
                return FALSE_V if cs(ctx, env) == TRUE_V else TRUE_V
            return run
        case App(App(Const("or", _), a), b) if t.fn.fn == stt.OR:
            ca, cb = _compile(a), _compile(b)

            def run(ctx, env):
                if ca(ctx, env) == TRUE_V:
                    return TRUE_V
                return cb(ctx, env)
            return run
        case App(Lam(x, xt, body), arg):
            # a beta redex evaluates like a let binding: the abstraction's
            # table would only ever be probed at this argument's value
            cb, ca = _compile(body), _compile(arg)

            def run(ctx, env, _x=x):
                inner = dict(env)
                inner[_x] = ca(ctx, env)
                return cb(ctx, inner)
            return run
        case App(fn, arg) if stt.is_pi(fn):
            # universal quantifier applied directly: test the argument
            # table instead of materializing the quantifier's own table
            carg = _compile(arg)

            def run(ctx, env):
                pred = carg(ctx, env)
                for o in pred.outputs:
                    if o != TRUE_V:
                        return FALSE_V
                return TRUE_V
            return run
        case App(fn, arg):
            cf, ca = _compile(fn), _compile(arg)

            def run(ctx, env):
                f_val = cf(ctx, env)
                a_val = ca(ctx, env)
                if not isinstance(f_val, VFun):
                    raise InterpError(f"cannot apply non-function value {f_val!r}")
                # individuals and booleans are their own indices; only
                # function-valued arguments need the canonical position map
                cls = a_val.__class__
                if cls is VInd:
                    idx = a_val.index
                elif cls is VBool:
                    idx = 1 if a_val.value else 0
                else:
                    idx = ctx.index(f_val.arg_type, a_val)
                return f_val.outputs[idx]
            return run
        case Lam(x, xt, body):
            cb = _compile(body)

            def run(ctx, env, _x=x, _xt=xt):
                elems = ctx.domain(_xt)
                inner = dict(env)
                outs = []
                for z in elems:
                    inner[_x] = z
                    outs.append(cb(ctx, inner))
                return VFun(_xt, tuple(outs))
            return run
    raise InterpError(f"not a term: {t!r}")


def evaluate(m: FiniteInterpretation,
             assignment: dict[str, Value],
             t: Term) -> Value:
    """Value of `t` under variable assignment `assignment`.

    Free variables must be assigned; every non-logical constant occurring
    in `t` must be interpreted (missing ones raise, they do not default).
    """
    return _compile(t)(_Ctx(m), assignment)


# ---------------------------------------------------------------------------
# Kripke model conversions


def model_from_kripke(k: KripkeModel) -> FiniteInterpretation:
    """Standard model over the worlds of `k`: each atom becomes a world
    predicate table, the relation constant the curried relation table."""
    n = k.num_worlds
    consts: dict[tuple[str, SimpleType], Value] = {}
    for name in sorted(k.valuation):
        outs = tuple(VBool(w in k.valuation[name]) for w in range(n))
        consts[(name, stt.PRED)] = VFun(stt.I, outs)
    rows = tuple(
        VFun(stt.I, tuple(VBool((a, b) in k.relation) for b in range(n)))
        for a in range(n))
    consts[(modal.RELATION_NAME, stt.REL)] = VFun(stt.I, rows)
    return FiniteInterpretation(n, consts)


def kripke_from_model(m: FiniteInterpretation, atoms: list[str]) -> KripkeModel:
    """Kripke model on the individuals of `m`; inverse of
    `model_from_kripke` for the listed atoms."""
    n = m.iota_size
    try:
        r = m.const_interp[(modal.RELATION_NAME, stt.REL)]
    except KeyError:
        raise MissingInterpretationError(
            f"no interpretation for relation constant {modal.RELATION_NAME}") from None
    relation = frozenset(
        (a, b) for a in range(n) for b in range(n)
        if r.outputs[a].outputs[b] == TRUE_V)
    valuation = {}
    for name in atoms:
        try:
            table = m.const_interp[(name, stt.PRED)]
        except KeyError:
            raise MissingInterpretationError(
                f"no interpretation for atom {name}") from None
        valuation[name] = frozenset(w for w in range(n) if table.outputs[w] == TRUE_V)
    return KripkeModel(n, relation, valuation)


# ---------------------------------------------------------------------------
# Frame correspondence oracle

_R = Var("R", stt.REL)
_X = Var("X", stt.I)
_Y = Var("Y", stt.I)
_Z = Var("Z", stt.I)

REFL_DEF = Lam("R", stt.REL, stt.forall("X", stt.I, stt.app(_R, _X, _X)))
TRANS_DEF = Lam("R", stt.REL, stt.forall("X", stt.I, stt.forall("Y", stt.I,
              stt.forall("Z", stt.I,
                         stt.implies(stt.and_(stt.app(_R, _X, _Y),
                                              stt.app(_R, _Y, _Z)),
                                     stt.app(_R, _X, _Z))))))


def _relation_table(rel_bits: int, n: int) -> VFun:
    rows = tuple(
        VFun(stt.I, tuple(VBool(bool((rel_bits >> (a * n + b)) & 1))
                          for b in range(n)))
        for a in range(n))
    return VFun(stt.I, rows)


def check_frame_correspondence(iota_size: int) -> bool:
    """Exhaustively verify, over every relation table on the individual
    domain, that (reflexivity axiom and transitivity axiom) holds exactly
    when the table is reflexive and transitive; the biconditional is also
    evaluated as a single closed term.  Expected true for sizes 1..3."""
    if iota_size > 3:
        raise DomainTooLargeError(
            "frame correspondence oracle enumerates 2^(2^n) predicates; "
            "sizes above 3 are rejected")
    n = iota_size
    axioms = stt.and_(modal.axiom_r(), modal.axiom_t())
    refl_term = App(REFL_DEF, modal.R_CONST)
    trans_term = App(TRANS_DEF, modal.R_CONST)
    for rel_bits in range(1 << (n * n)):
        table = _relation_table(rel_bits, n)
        m = FiniteInterpretation(n, {(modal.RELATION_NAME, stt.REL): table})
        axioms_hold = evaluate(m, {}, axioms) == TRUE_V
        # independent check on the raw bits
        reflexive = all((rel_bits >> (w * n + w)) & 1 for w in range(n))
        transitive = True
        for a in range(n):
            for b in range(n):
                if (rel_bits >> (a * n + b)) & 1:
                    for c in range(n):
                        if (rel_bits >> (b * n + c)) & 1 and \
                                not (rel_bits >> (a * n + c)) & 1:
                            transitive = False
        if axioms_hold != (reflexive and transitive):
            return False
        # the relation-property terms must agree with the raw bits too
        if (evaluate(m, {}, refl_term) == TRUE_V) != reflexive:
            return False
        if (evaluate(m, {}, trans_term) == TRUE_V) != transitive:
            return False
    return True
