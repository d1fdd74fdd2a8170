"""Signed tableau decision procedure for propositional K and S4.

`decide(goal, premises, logic)` answers whether the premises globally
entail the goal over the chosen frame class: premises are asserted at
every world the tableau creates, the goal is refuted at the root.  The
procedure is a refutation search over signed formula sets:

* propositional rules saturate a world, non-branching rules first, with
  a fixed formula ordering so runs are reproducible;
* each false-signed box (and true-signed diamond) demands a successor
  world seeded with the contents of all true-signed boxes and
  false-signed diamonds plus the premises;
* for S4 the boxed formulas themselves are inherited by successors
  (transitivity) and assert their bodies locally (reflexivity);
* a successor whose seed already occurred on the current ancestor chain
  is satisfied by looping back to that ancestor instead of expanding,
  which both forces termination and stays sound: the loop target makes
  exactly the same formulas true.  Seeds found unsatisfiable are
  memoized globally; unsatisfiability of a seed does not depend on
  where it was encountered.

An open expansion is converted into an explicit Kripke countermodel
(reflexive-transitive closure of the created edges for S4) carried on
the verdict, with the root as witness world; a closed expansion means
the entailment is Valid.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import modal
from .kripke import KripkeModel, reflexive_transitive_closure
from .modal import (Atom, And, Bottom, Box, Diamond, Formula, Implies, Logic,
                    Not, Or, Top, formula_key)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    countermodel: KripkeModel | None = None
    witness_world: int | None = None

    def __str__(self):
        if self.valid:
            return "Valid"
        return f"Invalid (countermodel with {self.countermodel.num_worlds} worlds)"


@dataclass(frozen=True)
class _LoopRef:
    depth: int


@dataclass
class _Node:
    tset: frozenset[Formula]
    fset: frozenset[Formula]
    succ: list


_BRANCHING = {(True, Or), (False, And), (True, Implies)}


def _is_branching(sign: bool, f: Formula) -> bool:
    return (sign, type(f)) in _BRANCHING


def _item_key(item):
    sign, f = item
    return (_is_branching(sign, f), formula_key(f), not sign)


class _Tableau:
    def __init__(self, premises, logic: Logic, trace=None):
        self.logic = logic
        self.premise_items = tuple((True, p) for p in premises)
        self.unsat: set[frozenset] = set()
        self.trace = trace

    def _log(self, depth, message):
        if self.trace is not None:
            self.trace.append(f"[{depth}] {message}")

    def _queueable(self, sign: bool, f: Formula) -> bool:
        match (sign, f):
            case (_, Not()) | (_, Or()) | (_, And()) | (_, Implies()):
                return True
            case (True, Box()) | (False, Diamond()):
                return self.logic is Logic.S4  # local reflexivity rules
            case _:
                return False

    def _alternatives(self, sign: bool, f: Formula):
        """Decomposition of a signed formula: a list of alternative
        addition lists (one alternative = one branch)."""
        match (sign, f):
            case (True, Not(s)):
                return [[(False, s)]]
            case (False, Not(s)):
                return [[(True, s)]]
            case (True, Or(a, b)):
                return [[(True, a)], [(True, b)]]
            case (False, Or(a, b)):
                return [[(False, a), (False, b)]]
            case (True, And(a, b)):
                return [[(True, a), (True, b)]]
            case (False, And(a, b)):
                return [[(False, a)], [(False, b)]]
            case (True, Implies(a, b)):
                return [[(False, a)], [(True, b)]]
            case (False, Implies(a, b)):
                return [[(True, a), (False, b)]]
            case (True, Box(s)) | (False, Diamond(s)):
                # S4 reflexivity: the body holds here as well
                return [[(sign, s)]]
        raise modal.ModalError(f"no rule for {'T' if sign else 'F'} {f!r}")

    @staticmethod
    def _add(state, sign: bool, f: Formula, queueable):
        """Add a signed formula; None on clash, else the new state."""
        tset, fset, todo = state
        if sign:
            if isinstance(f, Bottom) or f in fset:
                return None
            if f in tset:
                return state
            tset = tset | {f}
        else:
            if isinstance(f, Top) or f in tset:
                return None
            if f in fset:
                return state
            fset = fset | {f}
        if queueable(sign, f):
            todo = todo | {(sign, f)}
        return (tset, fset, todo)

    def _saturate(self, tset, fset, todo, depth):
        """Yield every propositionally saturated open extension, in
        deterministic branch order."""
        if not todo:
            yield (tset, fset)
            return
        item = min(todo, key=_item_key)
        sign, f = item
        rest = todo - {item}
        for additions in self._alternatives(sign, f):
            state = (tset, fset, rest)
            for (s2, f2) in additions:
                state = self._add(state, s2, f2, self._queueable)
                if state is None:
                    break
            if state is not None:
                self._log(depth, f"{'T' if sign else 'F'} {modal.pretty_modal(f)}")
                yield from self._saturate(*state, depth)

    def _seed_state(self, seed):
        state = (frozenset(), frozenset(), frozenset())
        for (sign, f) in sorted(seed, key=_item_key):
            state = self._add(state, sign, f, self._queueable)
            if state is None:
                return None
        return state

    def _successor_seed(self, tset, fset, trigger_sign, trigger_body):
        items = {(trigger_sign, trigger_body)}
        for f in tset:
            if isinstance(f, Box):
                items.add((True, f.sub))
                if self.logic is Logic.S4:
                    items.add((True, f))   # transitivity: boxes persist
        for f in fset:
            if isinstance(f, Diamond):
                items.add((False, f.sub))
                if self.logic is Logic.S4:
                    items.add((False, f))
        items.update(self.premise_items)
        return frozenset(items)

    def expand(self, seed: frozenset, path: tuple):
        """Return a satisfiable expansion (_Node or _LoopRef) or None."""
        for d, ancestor in enumerate(path):
            if ancestor == seed:
                self._log(len(path), f"loop back to depth {d}")
                return _LoopRef(d)
        if seed in self.unsat:
            return None
        state = self._seed_state(seed)
        if state is None:
            self.unsat.add(seed)
            return None
        depth = len(path)
        for (tset, fset) in self._saturate(*state, depth):
            triggers = sorted(
                [(False, f.sub) for f in fset if isinstance(f, Box)]
                + [(True, f.sub) for f in tset if isinstance(f, Diamond)],
                key=_item_key)
            succ = []
            open_branch = True
            for (sign, body) in triggers:
                seed2 = self._successor_seed(tset, fset, sign, body)
                self._log(depth, f"successor for {'T dia' if sign else 'F box'} "
                                 f"{modal.pretty_modal(body)}")
                result = self.expand(seed2, path + (seed,))
                if result is None:
                    open_branch = False
                    break
                succ.append(result)
            if open_branch:
                return _Node(tset, fset, succ)
        self.unsat.add(seed)
        return None


def _assemble_model(root: _Node, atoms, logic: Logic) -> KripkeModel:
    states: list[_Node] = []
    edges: set[tuple[int, int]] = set()

    def walk(node: _Node, ancestors: list[int]) -> int:
        idx = len(states)
        states.append(node)
        for child in node.succ:
            if isinstance(child, _LoopRef):
                edges.add((idx, ancestors[child.depth]))
            else:
                edges.add((idx, walk(child, ancestors + [idx])))
        return idx

    walk(root, [])
    n = len(states)
    relation = frozenset(edges)
    if logic is Logic.S4:
        relation = reflexive_transitive_closure(relation, n)
    valuation = {
        a: frozenset(w for w in range(n) if Atom(a) in states[w].tset)
        for a in sorted(atoms)
    }
    return KripkeModel(n, relation, valuation)


def decide(goal: Formula,
           premises: list[Formula] | tuple[Formula, ...] = (),
           logic: Logic = Logic.K,
           trace: list[str] | None = None) -> Verdict:
    """Valid iff `premises` (each valid at every world) entail `goal`
    over all frames (K) or all preorder frames (S4).

    Invalid verdicts carry an explicit countermodel built from the open
    tableau branch; the goal fails at its witness world and every
    premise is valid in it.
    """
    tab = _Tableau(premises, logic, trace)
    seed = frozenset([(False, goal), *tab.premise_items])
    result = tab.expand(seed, ())
    if result is None:
        return Verdict(valid=True)
    atoms = modal.atoms_of(goal)
    for p in premises:
        atoms |= modal.atoms_of(p)
    if isinstance(result, _LoopRef):  # cannot happen at the root
        raise AssertionError("root expansion returned a loop reference")
    model = _assemble_model(result, atoms, logic)
    return Verdict(valid=False, countermodel=model, witness_world=0)


def prove_corpus(problem) -> Verdict:
    """Decide a benchmark corpus problem: translate its assumptions and
    conjecture to modal formulas and run the tableau under the problem's
    logic (S4 when the reflexivity/transitivity axioms are switched on,
    plain K otherwise)."""
    from . import icl
    premises = [icl.translate_to_modal(a) for a in problem.assumptions]
    goal = icl.translate_to_modal(problem.conjecture)
    return decide(goal, premises, problem.logic)
