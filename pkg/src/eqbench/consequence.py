"""Deciding whether an identity follows from an axiom system.

Two complementary engines:

* ``semantic_consequence`` hunts for a countermodel among the finite models
  of the system up to a size bound.  No countermodel up to size k is
  reported as HoldsUpTo(k), never as proved.
* ``derive`` searches for an equational derivation (reflexivity, symmetry,
  transitivity, congruence, substitution, axiom instances) within term-depth
  and step budgets, returning a replayable proof object.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .axioms import AxiomSystem, system_ops
from .models import (
    DEFAULT_SIZE_LIMIT,
    FiniteAlgebra,
    ResourceLimitError,
    _Search,
    find_violation,
    to_record,
)
from .terms import (
    App,
    Equation,
    OP_ORDER,
    Term,
    Var,
    VARIABLE_ALPHABET,
    canonical_equation,
    equation_key,
    format_equation,
    operations_of_equation,
    substitute,
    term_depth,
    variables_of,
    variables_of_equation,
)

RULES = (
    "axiom-instance",
    "reflexivity",
    "symmetry",
    "transitivity",
    "congruence",
    "substitution",
)


@dataclass(frozen=True)
class DerivationStep:
    rule: str
    premises: tuple
    equation: Equation


@dataclass(frozen=True)
class Proved:
    derivation: tuple


@dataclass(frozen=True)
class Refuted:
    countermodel: FiniteAlgebra
    witness: tuple  # ((variable, element), ...)

    def witness_map(self) -> dict:
        return dict(self.witness)


@dataclass(frozen=True)
class HoldsUpTo:
    max_size: int


@dataclass(frozen=True)
class Unknown:
    bounds: tuple  # ((budget name, value), ...)


Verdict = Union[Proved, Refuted, HoldsUpTo, Unknown]


@dataclass(frozen=True)
class CandidateSpace:
    max_vars: int = 2
    max_depth: int = 1

    def __post_init__(self):
        if not (1 <= self.max_vars <= 3):
            raise ValueError("max_vars must be between 1 and 3")
        if not (0 <= self.max_depth <= 2):
            raise ValueError("max_depth must be between 0 and 2")


@dataclass(frozen=True)
class DeriveBudgets:
    max_term_depth: int = 3
    max_steps: int = 8
    max_nodes: int = 50_000

    def __post_init__(self):
        if self.max_term_depth < 1 or self.max_steps < 1:
            raise ValueError("budgets must be positive")


#: node budget for a single countermodel search
DEFAULT_SEARCH_NODES = 5_000_000


# ---------------------------------------------------------------------------
# semantic consequence

class _RefutationSearch(_Search):
    """Model search that only keeps completions violating a candidate.

    The candidate becomes decidable as soon as every cell it can read has
    been assigned; because slots are filled strictly in order this happens
    at a fixed search depth.  Branches on which the candidate provably holds
    are cut there, which keeps the search feasible even when the raw model
    count explodes.
    """

    def __init__(self, sys: AxiomSystem, n: int, ops: tuple, cand: Equation,
                 max_nodes: int = DEFAULT_SEARCH_NODES):
        super().__init__(sys, n, ops)
        self.cand = cand
        self.max_nodes = max_nodes
        consts = set(self.const_names)
        self.cand_free = [x for x in variables_of_equation(cand) if x not in consts]
        ready = 0
        for op in operations_of_equation(cand):
            ready = max(ready, self._op_base[op] + self.n2)
        for name in variables_of_equation(cand):
            if name in consts:
                ready = max(ready, self._const_slot[name] + 1)
        self.cand_ready_at = ready

    def _cand_violated(self) -> bool:
        lhs, rhs = self.cand.lhs, self.cand.rhs
        for values in itertools.product(range(self.n), repeat=len(self.cand_free)):
            env = dict(zip(self.cand_free, values))
            if self._eval(lhs, env) != self._eval(rhs, env):
                return True
        return False

    def countermodels(self) -> Iterator[FiniteAlgebra]:
        if self.unsat:
            return
        cells, n, total = self.cells, self.n, self.total
        ready = self.cand_ready_at
        if ready == 0 and not self._cand_violated():
            return
        if total == 0:
            if self._leaf_ok():
                yield self._snapshot()
            return
        nodes = 0
        slot = 0
        while True:
            v = cells[slot] + 1
            if v >= n:
                cells[slot] = -1
                slot -= 1
                if slot < 0:
                    return
                continue
            nodes += 1
            if nodes > self.max_nodes:
                raise ResourceLimitError(
                    f"countermodel search for {format_equation(self.cand)!r} "
                    f"exceeded {self.max_nodes} nodes at size {n}")
            cells[slot] = v
            if not self._static_ok(slot):
                continue
            if slot + 1 == ready and not self._cand_violated():
                continue
            if slot == total - 1:
                if self._leaf_ok():
                    yield self._snapshot()
            else:
                slot += 1


def _search_ops(sys: AxiomSystem, cand: Equation) -> tuple:
    wanted = system_ops(sys) | operations_of_equation(cand)
    return tuple(op for op in OP_ORDER if op in wanted)


def _cand_first_ops(sys: AxiomSystem, cand: Equation) -> tuple:
    ops = _search_ops(sys, cand)
    cand_ops = operations_of_equation(cand)
    return tuple(op for op in ops if op in cand_ops) + tuple(
        op for op in ops if op not in cand_ops)


def _has_countermodel(sys: AxiomSystem, cand: Equation, n: int, max_nodes: int) -> bool:
    search = _RefutationSearch(sys, n, _cand_first_ops(sys, cand), cand, max_nodes)
    return next(search.countermodels(), None) is not None


def _first_countermodel(sys: AxiomSystem, cand: Equation, n: int,
                        max_nodes: int) -> FiniteAlgebra:
    search = _RefutationSearch(sys, n, _search_ops(sys, cand), cand, max_nodes)
    return next(search.countermodels())


def semantic_consequence(sys: AxiomSystem, cand: Equation, max_size: int,
                         allow_large: bool = False,
                         max_nodes: int = DEFAULT_SEARCH_NODES) -> Verdict:
    """Refuted with the first countermodel in enumeration order, or
    HoldsUpTo(max_size) when no model of size <= max_size violates ``cand``."""
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    if max_size > DEFAULT_SIZE_LIMIT and not allow_large:
        raise ResourceLimitError(
            f"max_size {max_size} exceeds the default limit of {DEFAULT_SIZE_LIMIT}; "
            "pass allow_large to override")
    for k in range(1, max_size + 1):
        # existence first (aggressively pruned), then the lex-least witness
        if _has_countermodel(sys, cand, k, max_nodes):
            alg = _first_countermodel(sys, cand, k, max_nodes)
            witness = find_violation(alg, cand, _candidate_constants(sys, cand, alg))
            return Refuted(alg, tuple(sorted(witness.items())))
    return HoldsUpTo(max_size)


def _candidate_constants(sys: AxiomSystem, cand: Equation, alg: FiniteAlgebra) -> dict:
    values = alg.constant_map()
    return {x: values[x] for x in variables_of_equation(cand) if x in sys.constants}


# ---------------------------------------------------------------------------
# candidate identity space

def terms_within(max_vars: int, max_depth: int) -> tuple:
    """All terms over the first ``max_vars`` variables with depth <= max_depth,
    in structural order."""
    level = [Var(VARIABLE_ALPHABET[i]) for i in range(max_vars)]
    for _ in range(max_depth):
        apps = [App(op, l, r) for op in OP_ORDER for l in level for r in level]
        seen, uniq = set(), []
        for t in level + apps:
            if t not in seen:
                seen.add(t)
                uniq.append(t)
        level = uniq
    return tuple(level)


def candidate_identities(space: CandidateSpace) -> tuple:
    """Candidate equations modulo variable renaming and symmetry of '='."""
    terms = terms_within(space.max_vars, space.max_depth)
    seen = set()
    out = []
    for lhs, rhs in itertools.product(terms, repeat=2):
        eq = canonical_equation(Equation(lhs, rhs))
        if eq not in seen:
            seen.add(eq)
            out.append(eq)
    out.sort(key=equation_key)
    return tuple(out)


def consequence_set(sys: AxiomSystem, space: Optional[CandidateSpace] = None,
                    model_size: int = 2, workers: int = 1,
                    allow_large: bool = False) -> tuple:
    """Candidates holding in every model of ``sys`` up to ``model_size``,
    i.e. the bounded proxy for the system's deductive strength."""
    space = space or CandidateSpace()
    cands = candidate_identities(space)

    def holds(eq: Equation) -> bool:
        return isinstance(
            semantic_consequence(sys, eq, model_size, allow_large=allow_large),
            HoldsUpTo,
        )

    if workers <= 1:
        flags = [holds(eq) for eq in cands]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(holds, cands))
    return tuple(eq for eq, ok in zip(cands, flags) if ok)


# ---------------------------------------------------------------------------
# syntactic derivation

def _positions(t: Term) -> Iterator[tuple]:
    yield ()
    if isinstance(t, App):
        for p in _positions(t.left):
            yield (0,) + p
        for p in _positions(t.right):
            yield (1,) + p


def _subterm_at(t: Term, pos: tuple) -> Term:
    for d in pos:
        t = t.left if d == 0 else t.right
    return t


def _replace_at(t: Term, pos: tuple, new: Term) -> Term:
    if not pos:
        return new
    if pos[0] == 0:
        return App(t.op, _replace_at(t.left, pos[1:], new), t.right)
    return App(t.op, t.left, _replace_at(t.right, pos[1:], new))


def match(pattern: Term, subject: Term, rigid: frozenset, sigma: dict) -> bool:
    """Extend ``sigma`` so that sigma(pattern) == subject; rigid names match
    only themselves."""
    if isinstance(pattern, Var):
        if pattern.name in rigid:
            return pattern == subject
        bound = sigma.get(pattern.name)
        if bound is None:
            sigma[pattern.name] = subject
            return True
        return bound == subject
    return (
        isinstance(subject, App)
        and subject.op is pattern.op
        and match(pattern.left, subject.left, rigid, sigma)
        and match(pattern.right, subject.right, rigid, sigma)
    )


def _rewrites(t: Term, sys: AxiomSystem, leaves: Sequence[Term],
              max_depth: int) -> Iterator[tuple]:
    """One-step rewrites of ``t`` by axiom instances, with the edge label
    (axiom index, forward?, position, substitution) used to rebuild proofs."""
    rigid = sys.constants
    for idx, eq in enumerate(sys.equations):
        for src, dst, forward in ((eq.lhs, eq.rhs, True), (eq.rhs, eq.lhs, False)):
            for pos in _positions(t):
                sigma = {}
                if not match(src, _subterm_at(t, pos), rigid, sigma):
                    continue
                axiom_vars = dict.fromkeys(
                    variables_of(eq.lhs) + variables_of(eq.rhs))
                unbound = [
                    v for v in axiom_vars
                    if v not in sigma and v not in rigid
                ]
                for combo in itertools.product(leaves, repeat=len(unbound)):
                    full = dict(sigma)
                    full.update(zip(unbound, combo))
                    full.update({c: Var(c) for c in rigid if c in axiom_vars})
                    new_sub = substitute(dst, full)
                    new_t = _replace_at(t, pos, new_sub)
                    if term_depth(new_t) <= max_depth:
                        yield new_t, (idx, forward, pos, full)


def _identity_sigma(sigma: dict) -> bool:
    return all(isinstance(v, Var) and v.name == k for k, v in sigma.items())


class _Proof:
    """Accumulates derivation steps and hands out their indices."""

    def __init__(self):
        self.steps = []

    def add(self, rule: str, premises: tuple, equation: Equation) -> int:
        self.steps.append(DerivationStep(rule, premises, equation))
        return len(self.steps) - 1

    def rewrite_block(self, sys: AxiomSystem, t_from: Term, t_to: Term,
                      edge: tuple) -> int:
        """Steps proving t_from = t_to for one rewrite; returns the final index."""
        idx, forward, pos, sigma = edge
        axiom = sys.equations[idx]
        cur = self.add("axiom-instance", (), axiom)
        work = axiom
        if not forward:
            work = work.flipped()
            cur = self.add("symmetry", (cur,), work)
        if not _identity_sigma(sigma):
            work = Equation(substitute(work.lhs, sigma), substitute(work.rhs, sigma))
            cur = self.add("substitution", (cur,), work)
        # lift through the surrounding context, innermost first
        for j in range(len(pos) - 1, -1, -1):
            parent = _subterm_at(t_from, pos[:j])
            side = pos[j]
            sibling = parent.right if side == 0 else parent.left
            refl = self.add("reflexivity", (), Equation(sibling, sibling))
            lhs_from = _subterm_at(t_from, pos[:j])
            lhs_to = _subterm_at(t_to, pos[:j])
            premises = (cur, refl) if side == 0 else (refl, cur)
            cur = self.add("congruence", premises, Equation(lhs_from, lhs_to))
        return cur


def derive(sys: AxiomSystem, cand: Equation,
           budgets: Optional[DeriveBudgets] = None) -> Verdict:
    """Bounded bidirectional search for an equational proof of ``cand``.

    Proved verdicts carry a derivation that has been replayed through
    validate_derivation; exhausted budgets give Unknown, never an error.
    """
    budgets = budgets or DeriveBudgets()
    bounds = (
        ("max_nodes", budgets.max_nodes),
        ("max_steps", budgets.max_steps),
        ("max_term_depth", budgets.max_term_depth),
    )
    if cand.lhs == cand.rhs:
        proof = _Proof()
        proof.add("reflexivity", (), cand)
        return Proved(tuple(proof.steps))
    if not sys.equations:
        return Unknown(bounds)

    leaves = [Var(x) for x in variables_of_equation(cand)]
    leaves += [Var(c) for c in sorted(sys.constants) if Var(c) not in leaves]
    if not leaves:
        leaves = [Var("a")]
    depth_cap = max(
        budgets.max_term_depth,
        term_depth(cand.lhs),
        term_depth(cand.rhs),
    )

    # parents[side][term] = (previous term, edge); side 0 grows from the lhs,
    # side 1 from the rhs.  Edges are reversible, so a meeting term yields a
    # full rewrite path.
    parents = ({cand.lhs: None}, {cand.rhs: None})
    frontiers = ([cand.lhs], [cand.rhs])
    depths = [0, 0]
    nodes = 0
    meet = None
    while meet is None and (frontiers[0] or frontiers[1]):
        if depths[0] + depths[1] >= budgets.max_steps:
            break
        # grow the smaller live frontier; a closed side can still be met
        if frontiers[0] and (not frontiers[1] or len(frontiers[0]) <= len(frontiers[1])):
            side = 0
        else:
            side = 1
        new_frontier = []
        for t in frontiers[side]:
            for u, edge in _rewrites(t, sys, leaves, depth_cap):
                if u in parents[side]:
                    continue
                nodes += 1
                if nodes > budgets.max_nodes:
                    return Unknown(bounds)
                parents[side][u] = (t, edge)
                new_frontier.append(u)
                if u in parents[1 - side]:
                    meet = u
                    break
            if meet is not None:
                break
        frontiers = (new_frontier, frontiers[1]) if side == 0 else (frontiers[0], new_frontier)
        depths[side] += 1
    if meet is None:
        return Unknown(bounds)

    # forward path lhs -> meet, then reversed edges meet -> rhs
    chain = []
    t = meet
    while parents[0][t] is not None:
        prev, edge = parents[0][t]
        chain.append((prev, t, edge))
        t = prev
    chain.reverse()
    t = meet
    while parents[1][t] is not None:
        prev, edge = parents[1][t]
        idx, forward, pos, sigma = edge
        chain.append((t, prev, (idx, not forward, pos, sigma)))
        t = prev

    proof = _Proof()
    last = None
    for t_from, t_to, edge in chain:
        block = proof.rewrite_block(sys, t_from, t_to, edge)
        if last is None:
            last = block
        else:
            start = proof.steps[last].equation.lhs
            last = proof.add(
                "transitivity", (last, block),
                Equation(start, proof.steps[block].equation.rhs))
    derivation = tuple(proof.steps)
    problem = validate_derivation(sys, derivation, cand)
    if problem is not None:
        raise RuntimeError(f"internal error: built an invalid derivation ({problem})")
    return Proved(derivation)


def validate_derivation(sys: AxiomSystem, derivation: Sequence[DerivationStep],
                        cand: Optional[Equation] = None) -> Optional[str]:
    """Replay a derivation step by step; None if sound, else a description
    of the first broken step."""
    if not derivation:
        return "empty derivation"
    for i, step in enumerate(derivation):
        if step.rule not in RULES:
            return f"step {i}: unknown rule {step.rule!r}"
        if any(p >= i or p < 0 for p in step.premises):
            return f"step {i}: premise out of range"
        prem = [derivation[p].equation for p in step.premises]
        eq = step.equation
        if step.rule == "axiom-instance":
            if prem or eq not in sys.equations:
                return f"step {i}: not an axiom of {sys.name}"
        elif step.rule == "reflexivity":
            if prem or eq.lhs != eq.rhs:
                return f"step {i}: reflexivity with distinct sides"
        elif step.rule == "symmetry":
            if len(prem) != 1 or eq != prem[0].flipped():
                return f"step {i}: not the flip of its premise"
        elif step.rule == "transitivity":
            if (len(prem) != 2 or prem[0].rhs != prem[1].lhs
                    or eq != Equation(prem[0].lhs, prem[1].rhs)):
                return f"step {i}: transitivity does not chain"
        elif step.rule == "congruence":
            if len(prem) != 2:
                return f"step {i}: congruence needs two premises"
            ok = (
                isinstance(eq.lhs, App) and isinstance(eq.rhs, App)
                and eq.lhs.op is eq.rhs.op
                and prem[0] == Equation(eq.lhs.left, eq.rhs.left)
                and prem[1] == Equation(eq.lhs.right, eq.rhs.right)
            )
            if not ok:
                return f"step {i}: congruence shape mismatch"
        elif step.rule == "substitution":
            if len(prem) != 1:
                return f"step {i}: substitution needs one premise"
            sigma = {}
            if not (match(prem[0].lhs, eq.lhs, sys.constants, sigma)
                    and match(prem[0].rhs, eq.rhs, sys.constants, sigma)):
                return f"step {i}: not a substitution instance of its premise"
    if cand is not None and derivation[-1].equation != cand:
        return "conclusion differs from the candidate"
    return None


# ---------------------------------------------------------------------------
# serialization

def step_record(step: DerivationStep) -> dict:
    return {
        "rule": step.rule,
        "premises": list(step.premises),
        "equation": format_equation(step.equation),
    }


def verdict_record(v: Verdict) -> dict:
    if isinstance(v, Proved):
        return {"verdict": "proved",
                "derivation": [step_record(s) for s in v.derivation]}
    if isinstance(v, Refuted):
        return {"verdict": "refuted",
                "countermodel": to_record(v.countermodel),
                "witness": {name: val for name, val in v.witness}}
    if isinstance(v, HoldsUpTo):
        return {"verdict": "holds-up-to", "max_size": v.max_size}
    return {"verdict": "unknown", "bounds": {k: n for k, n in v.bounds}}
