"""Finite Kripke models and bounded countermodel search.

A model is a set of worlds 0..n-1, one accessibility relation and a
valuation mapping each atom to the set of worlds where it holds.
`satisfies` is the textbook satisfaction relation; unknown atoms raise
instead of defaulting to false, since a silent default would mask
miswired problem sets.

`find_countermodel` searches models with at most `max_worlds` worlds in
which every premise is valid at every world (the global consequence
reading) while the goal fails somewhere.  The search is exhaustive up to
the bound and deterministic: it returns the countermodel with the fewest
worlds, and among those the one with the lexicographically least
(relation, valuation) encoding, where a relation is encoded as the
integer with bit w1*n+w2 set for each pair and a valuation as the
integer with bit a*n+w set when sorted-atom a holds at w.

Internally all valuations for a candidate relation are checked at once:
the truth of a subformula at a world is computed as a bitmask over the
2^(atoms*worlds) valuations.  At four worlds the existence question is
first screened over permutation-canonical relations only (validity is
isomorphism-invariant, so exhaustiveness is preserved) and the ordered
scan runs only once a countermodel is known to exist at that size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from . import modal
from .modal import Atom, And, Bottom, Box, Diamond, Formula, Implies, Logic, Not, Or, Top


class UnknownAtomError(Exception):
    pass


class ResourceLimitError(Exception):
    """Enumeration budget exhausted before the search space was covered."""


@dataclass(frozen=True)
class KripkeModel:
    num_worlds: int
    relation: frozenset[tuple[int, int]]
    valuation: dict[str, frozenset[int]]

    def __post_init__(self):
        if self.num_worlds < 1:
            raise ValueError("a Kripke model needs at least one world")
        for (a, b) in self.relation:
            if not (0 <= a < self.num_worlds and 0 <= b < self.num_worlds):
                raise ValueError(f"relation pair {(a, b)} outside worlds")
        for name, worlds in self.valuation.items():
            if not worlds <= frozenset(range(self.num_worlds)):
                raise ValueError(f"valuation of {name} outside worlds")

    def successors(self, w: int) -> list[int]:
        return sorted(b for (a, b) in self.relation if a == w)


def satisfies(m: KripkeModel, w: int, f: Formula) -> bool:
    """Truth of `f` at world `w` of `m`."""
    if not 0 <= w < m.num_worlds:
        raise ValueError(f"world {w} outside model")
    match f:
        case Atom(name):
            if name not in m.valuation:
                raise UnknownAtomError(f"atom {name!r} has no valuation")
            return w in m.valuation[name]
        case Top():
            return True
        case Bottom():
            return False
        case Not(s):
            return not satisfies(m, w, s)
        case Or(a, b):
            return satisfies(m, w, a) or satisfies(m, w, b)
        case And(a, b):
            return satisfies(m, w, a) and satisfies(m, w, b)
        case Implies(a, b):
            return (not satisfies(m, w, a)) or satisfies(m, w, b)
        case Box(s):
            return all(satisfies(m, u, s) for u in m.successors(w))
        case Diamond(s):
            return any(satisfies(m, u, s) for u in m.successors(w))
    raise modal.ModalError(f"not a modal formula: {f!r}")


def valid_in_model(m: KripkeModel, f: Formula) -> bool:
    return all(satisfies(m, w, f) for w in range(m.num_worlds))


def is_preorder(relation: frozenset[tuple[int, int]], num_worlds: int) -> bool:
    for w in range(num_worlds):
        if (w, w) not in relation:
            return False
    for (a, b) in relation:
        for (c, d) in relation:
            if b == c and (a, d) not in relation:
                return False
    return True


def reflexive_transitive_closure(relation: frozenset[tuple[int, int]],
                                 num_worlds: int) -> frozenset[tuple[int, int]]:
    reach = {w: {w} | {b for (a, b) in relation if a == w} for w in range(num_worlds)}
    changed = True
    while changed:
        changed = False
        for w in range(num_worlds):
            extra = set()
            for u in reach[w]:
                extra |= reach[u]
            if not extra <= reach[w]:
                reach[w] |= extra
                changed = True
    return frozenset((w, u) for w in range(num_worlds) for u in reach[w])


@dataclass(frozen=True)
class CountermodelReport:
    model: KripkeModel
    witness_world: int
    formula: Formula
    logic: Logic

    def to_text(self) -> str:
        lines = [f"countermodel (logic={self.logic}, worlds={self.model.num_worlds})"]
        pairs = " ".join(f"({a},{b})" for (a, b) in sorted(self.model.relation))
        lines.append(f"relation: {pairs if pairs else '(empty)'}")
        lines.append("valuation:")
        for name in sorted(self.model.valuation):
            worlds = sorted(self.model.valuation[name])
            shown = "{" + ", ".join(map(str, worlds)) + "}"
            lines.append(f"  {name}: {shown}")
        lines.append(f"witness world: {self.witness_world}")
        lines.append(f"goal: {modal.pretty_modal(self.formula)}")
        return "\n".join(lines)


def verify_countermodel(report: CountermodelReport,
                        premises: list[Formula]) -> bool:
    """Re-check a report with `satisfies` only: premises globally valid,
    goal false at the witness, and a preorder relation for S4."""
    m = report.model
    if report.logic is Logic.S4 and not is_preorder(m.relation, m.num_worlds):
        return False
    if satisfies(m, report.witness_world, report.formula):
        return False
    return all(valid_in_model(m, p) for p in premises)


# ---------------------------------------------------------------------------
# Search internals


def _succ_masks(rel_int: int, n: int) -> list[int]:
    return [(rel_int >> (w * n)) & ((1 << n) - 1) for w in range(n)]


def _is_preorder_int(rel_int: int, n: int) -> bool:
    succ = _succ_masks(rel_int, n)
    for w in range(n):
        if not (succ[w] >> w) & 1:
            return False
    for w in range(n):
        row = succ[w]
        for u in range(n):
            if (row >> u) & 1 and succ[u] & ~row:
                return False
    return True


@lru_cache(maxsize=None)
def _valuation_bit_mask(j: int, total_bits: int) -> int:
    # bitmask over valuation integers v selecting those with bit j set
    half = 1 << j
    pattern = ((1 << half) - 1) << half
    size = half * 2
    while size < total_bits:
        pattern |= pattern << size
        size *= 2
    return pattern & ((1 << total_bits) - 1)


@lru_cache(maxsize=8)
def _canonical_relations(n: int) -> tuple[int, ...]:
    """Relation encodings minimal in their world-permutation orbit."""
    perms = list(itertools.permutations(range(n)))[1:]
    maps = []
    for sigma in perms:
        maps.append([(a * n + b, sigma[a] * n + sigma[b])
                     for a in range(n) for b in range(n)])
    out = []
    for rel in range(1 << (n * n)):
        minimal = True
        for table in maps:
            img = 0
            for src, dst in table:
                if (rel >> src) & 1:
                    img |= 1 << dst
            if img < rel:
                minimal = False
                break
        if minimal:
            out.append(rel)
    return tuple(out)


class _Search:
    # screening over canonical relations starts at this world count;
    # below it a single ordered scan is already cheap
    CANONICAL_MIN = 4
    CANONICAL_MAX = 4

    def __init__(self, premises, goal, logic, budget):
        self.premises = list(premises)
        self.goal = goal
        self.logic = logic
        self.budget = budget
        self.spent = 0
        names = set(modal.atoms_of(goal))
        for p in self.premises:
            names |= modal.atoms_of(p)
        self.atoms = sorted(names)

    def _charge(self, candidates: int):
        self.spent += candidates
        if self.spent > self.budget:
            raise ResourceLimitError(
                f"enumeration budget exhausted ({self.spent} > {self.budget} checks)")

    def _relation_hits(self, rel_int: int, n: int, atom_masks, full) -> int:
        """Bitmask of valuations making all premises globally valid and
        the goal invalid, for one candidate relation."""
        succ = [[u for u in range(n) if (rel_int >> (w * n + u)) & 1]
                for w in range(n)]
        cache: dict[tuple[Formula, int], int] = {}

        def sat(f: Formula, w: int) -> int:
            key = (f, w)
            got = cache.get(key)
            if got is not None:
                return got
            match f:
                case Atom(name):
                    m = atom_masks[name][w]
                case Top():
                    m = full
                case Bottom():
                    m = 0
                case Not(s):
                    m = full ^ sat(s, w)
                case Or(a, b):
                    m = sat(a, w) | sat(b, w)
                case And(a, b):
                    m = sat(a, w) & sat(b, w)
                case Implies(a, b):
                    m = (full ^ sat(a, w)) | sat(b, w)
                case Box(s):
                    m = full
                    for u in succ[w]:
                        m &= sat(s, u)
                        if not m:
                            break
                case Diamond(s):
                    m = 0
                    for u in succ[w]:
                        m |= sat(s, u)
                case _:
                    raise modal.ModalError(f"not a modal formula: {f!r}")
            cache[key] = m
            return m

        ok = full
        for p in self.premises:
            for w in range(n):
                ok &= sat(p, w)
                if not ok:
                    return 0
        goal_valid = full
        for w in range(n):
            goal_valid &= sat(self.goal, w)
        return ok & ~goal_valid & full

    def _atom_masks(self, n: int):
        num_valuations = 1 << (len(self.atoms) * n)
        if not self.atoms:
            # single empty valuation, encoded as the one set bit
            return {}, 1, 1
        full = (1 << num_valuations) - 1
        masks = {
            name: [_valuation_bit_mask(a * n + w, num_valuations) for w in range(n)]
            for a, name in enumerate(self.atoms)
        }
        return masks, full, num_valuations

    def _relations(self, n: int):
        if self.logic is Logic.S4:
            return (rel for rel in range(1 << (n * n)) if _is_preorder_int(rel, n))
        return iter(range(1 << (n * n)))

    def _exists_at(self, n: int) -> bool:
        atom_masks, full, total = self._atom_masks(n)
        if self.CANONICAL_MIN <= n <= self.CANONICAL_MAX:
            rels = _canonical_relations(n)
            if self.logic is Logic.S4:
                rels = [rel for rel in rels if _is_preorder_int(rel, n)]
            for rel in rels:
                self._charge(total)
                if self._relation_hits(rel, n, atom_masks, full):
                    return True
            return False
        for rel in self._relations(n):
            self._charge(total)
            if self._relation_hits(rel, n, atom_masks, full):
                return True
        return False

    def _least_at(self, n: int):
        atom_masks, full, total = self._atom_masks(n)
        for rel in self._relations(n):
            self._charge(total)
            hits = self._relation_hits(rel, n, atom_masks, full)
            if hits:
                v = (hits & -hits).bit_length() - 1
                return self._build_report(rel, v, n)
        return None

    def _build_report(self, rel_int: int, v: int, n: int) -> CountermodelReport:
        relation = frozenset(
            (a, b) for a in range(n) for b in range(n)
            if (rel_int >> (a * n + b)) & 1)
        valuation = {
            name: frozenset(w for w in range(n) if (v >> (a * n + w)) & 1)
            for a, name in enumerate(self.atoms)
        }
        model = KripkeModel(n, relation, valuation)
        witness = next(w for w in range(n) if not satisfies(model, w, self.goal))
        return CountermodelReport(model, witness, self.goal, self.logic)

    def run(self, max_worlds: int):
        for n in range(1, max_worlds + 1):
            if self.CANONICAL_MIN <= n <= self.CANONICAL_MAX:
                if self._exists_at(n):
                    report = self._least_at(n)
                    assert report is not None
                    return report
            else:
                report = self._least_at(n)
                if report is not None:
                    return report
        return None


def find_countermodel(premises: list[Formula],
                      goal: Formula,
                      logic: Logic,
                      max_worlds: int = 4,
                      budget: int = 10 ** 8) -> CountermodelReport | None:
    """Smallest countermodel to `premises |= goal` within `max_worlds`
    worlds, or None if there is none with at most that many worlds.

    Premises must be valid at every world of the candidate model; the
    goal must fail at the witness world.  For S4 only preorders are
    explored.  Raises ResourceLimitError when the enumeration budget
    (counted in candidate relation/valuation pairs) runs out.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    return _Search(premises, goal, logic, budget).run(max_worlds)
