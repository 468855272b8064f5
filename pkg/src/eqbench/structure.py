"""Structural classification of finite algebras: commutativity,
associativity, neutral elements, groups, latin squares, and whether the
three operations of a model collapse into one (the coincidence property).

Every check is an exhaustive scan; every False verdict carries the
lexicographically first failing tuple as a witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .models import FiniteAlgebra
from .terms import OP_ORDER, Op


def is_commutative(alg: FiniteAlgebra, op: Op):
    """(flag, witness): witness is the first (a, b) with a∘b != b∘a."""
    t = alg.table(op)
    n = alg.size
    for a in range(n):
        for b in range(n):
            if t[a][b] != t[b][a]:
                return False, (a, b)
    return True, None


def is_associative(alg: FiniteAlgebra, op: Op):
    """(flag, witness): witness is the first (a, b, c) breaking (a∘b)∘c = a∘(b∘c)."""
    t = alg.table(op)
    n = alg.size
    for a, b, c in itertools.product(range(n), repeat=3):
        if t[t[a][b]][c] != t[a][t[b][c]]:
            return False, (a, b, c)
    return True, None


def identity_elements(alg: FiniteAlgebra, op: Op) -> tuple:
    """All e with a∘e = e∘a = a for every a (there is at most one, but the
    scan does not assume that)."""
    t = alg.table(op)
    n = alg.size
    return tuple(
        e for e in range(n)
        if all(t[a][e] == a and t[e][a] == a for a in range(n))
    )


def is_latin_square(alg: FiniteAlgebra, op: Op):
    """(flag, witness): each row and column must be a permutation of the
    carrier; the witness names the first offending line."""
    t = alg.table(op)
    n = alg.size
    full = set(range(n))
    for i in range(n):
        if set(t[i]) != full:
            return False, ("row", i)
    for j in range(n):
        if {t[i][j] for i in range(n)} != full:
            return False, ("col", j)
    return True, None


def is_group(alg: FiniteAlgebra, op: Op):
    """(flag, reason): associativity, a two-sided identity, and an inverse
    for every element."""
    ok, witness = is_associative(alg, op)
    if not ok:
        return False, f"not associative at {witness}"
    ids = identity_elements(alg, op)
    if not ids:
        return False, "no identity element"
    e = ids[0]
    t = alg.table(op)
    n = alg.size
    for a in range(n):
        if not any(t[a][b] == e and t[b][a] == e for b in range(n)):
            return False, f"no inverse for {a}"
    return True, None


def is_abelian_group(alg: FiniteAlgebra, op: Op):
    ok, reason = is_group(alg, op)
    if not ok:
        return False, reason
    ok, witness = is_commutative(alg, op)
    if not ok:
        return False, f"not commutative at {witness}"
    return True, None


def ops_coincide(alg: FiniteAlgebra):
    """(flag, witness): the product and left division tables agree entrywise
    and right division is the product with swapped arguments, i.e. exactly
    the collapse forced by the three-way coincidence axioms."""
    prod = alg.table(Op.PROD)
    ldiv = alg.table(Op.LDIV)
    rdiv = alg.table(Op.RDIV)
    n = alg.size
    for a in range(n):
        for b in range(n):
            if prod[a][b] != ldiv[a][b] or rdiv[b][a] != prod[a][b]:
                return False, (a, b)
    return True, None


@dataclass(frozen=True)
class OpReport:
    commutative: bool
    commutative_witness: Optional[tuple]
    associative: bool
    associative_witness: Optional[tuple]
    latin_square: bool
    latin_square_witness: Optional[tuple]
    identity_elements: tuple
    is_group: bool
    group_reason: Optional[str]
    is_abelian_group: bool
    abelian_group_reason: Optional[str]


@dataclass(frozen=True)
class StructureReport:
    size: int
    ops: tuple  # ((Op, OpReport | None), ...) over all three operations
    ops_coincide: Optional[bool]
    ops_coincide_witness: Optional[tuple]

    def op_report(self, op: Op) -> Optional[OpReport]:
        return dict(self.ops)[op]


def classify_op(alg: FiniteAlgebra, op: Op) -> OpReport:
    comm, comm_w = is_commutative(alg, op)
    assoc, assoc_w = is_associative(alg, op)
    latin, latin_w = is_latin_square(alg, op)
    group, group_r = is_group(alg, op)
    abelian, abelian_r = is_abelian_group(alg, op)
    return OpReport(
        commutative=comm, commutative_witness=comm_w,
        associative=assoc, associative_witness=assoc_w,
        latin_square=latin, latin_square_witness=latin_w,
        identity_elements=identity_elements(alg, op),
        is_group=group, group_reason=group_r,
        is_abelian_group=abelian, abelian_group_reason=abelian_r,
    )


def classify_structure(alg: FiniteAlgebra) -> StructureReport:
    """Aggregate report; operations without a table get a None entry and the
    coincidence flag is only computed when all three tables are present."""
    present = set(alg.ops)
    reports = tuple(
        (op, classify_op(alg, op) if op in present else None) for op in OP_ORDER
    )
    if all(op in present for op in OP_ORDER):
        coincide, coincide_w = ops_coincide(alg)
    else:
        coincide, coincide_w = None, None
    return StructureReport(alg.size, reports, coincide, coincide_w)


def report_record(report: StructureReport) -> dict:
    ops = {}
    for op, rep in report.ops:
        if rep is None:
            ops[op.value] = None
            continue
        ops[op.value] = {
            "commutative": rep.commutative,
            "commutative_witness": _w(rep.commutative_witness),
            "associative": rep.associative,
            "associative_witness": _w(rep.associative_witness),
            "latin_square": rep.latin_square,
            "latin_square_witness": _w(rep.latin_square_witness),
            "identity_elements": list(rep.identity_elements),
            "is_group": rep.is_group,
            "group_reason": rep.group_reason,
            "is_abelian_group": rep.is_abelian_group,
            "abelian_group_reason": rep.abelian_group_reason,
        }
    return {
        "size": report.size,
        "ops": ops,
        "ops_coincide": report.ops_coincide,
        "ops_coincide_witness": _w(report.ops_coincide_witness),
    }


def _w(witness):
    return list(witness) if witness is not None else None
