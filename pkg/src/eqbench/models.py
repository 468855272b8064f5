"""Finite algebras on {0..n-1}: evaluation, satisfaction, enumeration, and
isomorphism classification.

Enumeration fills table cells in a fixed order (tables in canonical operation
order, row-major, then constants) and prunes a branch as soon as some ground
instance of an axiom is fully determined and violated.  The emitted stream is
therefore in lexicographic order of the serialized (tables, constants) bundle
and is reproducible for any worker count.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator, Mapping, Optional

from .axioms import AxiomSystem, system_ops
from .terms import (
    Equation,
    OP_ORDER,
    Op,
    Term,
    Var,
    operations_of_equation,
    term_depth,
    variables_of_equation,
)


class MissingTableError(LookupError):
    pass


class MissingConstantError(LookupError):
    pass


class ResourceLimitError(RuntimeError):
    """Enumeration exceeded a configured cap; distinct from normal completion."""


#: sizes above this need an explicit override (three free tables at n = 4
#: already mean 4^16 candidates per table).
DEFAULT_SIZE_LIMIT = 3


@dataclass(frozen=True)
class FiniteAlgebra:
    """Carrier {0..size-1} with up to three operation tables.

    ``tables`` is a tuple of (Op, row-major tuple-of-tuples) pairs in
    canonical operation order; ``constants`` maps distinguished constant
    names to elements, sorted by name.  Instances are immutable and hashable.
    """

    size: int
    tables: tuple = ()
    constants: tuple = ()

    @property
    def ops(self) -> tuple:
        return tuple(op for op, _ in self.tables)

    def table(self, op: Op) -> tuple:
        for o, t in self.tables:
            if o is op:
                return t
        raise MissingTableError(f"missing table {op.value}")

    def constant_map(self) -> dict:
        return dict(self.constants)


def make_algebra(size: int, tables: Mapping, constants: Mapping = ()) -> FiniteAlgebra:
    if size < 1:
        raise ValueError("carrier must be nonempty")
    packed = []
    for op in OP_ORDER:
        if op not in tables:
            continue
        rows = tuple(tuple(int(x) for x in row) for row in tables[op])
        if len(rows) != size or any(len(r) != size for r in rows):
            raise ValueError(f"{op.value} table must be {size}x{size}")
        if any(not 0 <= x < size for r in rows for x in r):
            raise ValueError(f"{op.value} table entry out of range")
        packed.append((op, rows))
    consts = tuple(sorted((str(k), int(v)) for k, v in dict(constants).items()))
    if any(not 0 <= v < size for _, v in consts):
        raise ValueError("constant value out of range")
    return FiniteAlgebra(size, tuple(packed), consts)


# ---------------------------------------------------------------------------
# evaluation and satisfaction

def eval_term(alg: FiniteAlgebra, t: Term, v: Mapping) -> int:
    """Tarskian evaluation by recursive table lookup."""
    if isinstance(t, Var):
        try:
            return v[t.name]
        except KeyError:
            raise KeyError(f"no binding for variable {t.name!r}") from None
    table = alg.table(t.op)
    return table[eval_term(alg, t.left, v)][eval_term(alg, t.right, v)]


def find_violation(alg: FiniteAlgebra, eq: Equation, constants: Optional[Mapping] = None):
    """First assignment (variables in first-occurrence order, values counted
    up lexicographically) on which the two sides differ, or None."""
    fixed = dict(constants) if constants else {}
    free = [x for x in variables_of_equation(eq) if x not in fixed]
    for values in itertools.product(range(alg.size), repeat=len(free)):
        env = dict(zip(free, values))
        env.update(fixed)
        if eval_term(alg, eq.lhs, env) != eval_term(alg, eq.rhs, env):
            return {x: env[x] for x in free}
    return None


def satisfies(alg: FiniteAlgebra, eq: Equation, constants: Optional[Mapping] = None) -> bool:
    """True iff the identity holds for every assignment into the carrier."""
    return find_violation(alg, eq, constants) is None


def bind_constants(alg: FiniteAlgebra, sys: AxiomSystem) -> dict:
    values = alg.constant_map()
    bound = {}
    for name in sorted(sys.constants):
        if name not in values:
            raise MissingConstantError(f"system {sys.name!r} names constant {name!r} "
                                       f"but the algebra does not define it")
        bound[name] = values[name]
    return bound


def satisfies_all(alg: FiniteAlgebra, sys: AxiomSystem) -> bool:
    bound = bind_constants(alg, sys)
    return all(satisfies(alg, eq, bound) for eq in sys.equations)


# ---------------------------------------------------------------------------
# enumeration

@dataclass(frozen=True)
class EnumOptions:
    up_to_iso: bool = False
    max_results: Optional[int] = None
    parallel_width: int = 1
    #: operations to instantiate; defaults to those mentioned by the system
    ops: Optional[frozenset] = None
    #: permit sizes above DEFAULT_SIZE_LIMIT
    allow_large: bool = False

    def __post_init__(self):
        if self.max_results is not None and self.max_results < 1:
            raise ValueError("max_results must be >= 1")


def _ordered_ops(sys: AxiomSystem, opts: EnumOptions) -> tuple:
    wanted = opts.ops if opts.ops is not None else system_ops(sys)
    return tuple(op for op in OP_ORDER if op in wanted)


class _Search:
    """Backtracking search over table cells and constant values.

    Ground instances of axioms whose sides are depth <= 1 and constant-free
    read statically known cells; those are indexed per cell and checked the
    moment the cell is written.  Everything else is re-checked once a branch
    is complete.
    """

    def __init__(self, sys: AxiomSystem, n: int, ops: tuple):
        self.sys = sys
        self.n = n
        self.ops = ops
        self.n2 = n * n
        self.const_names = sorted(sys.constants)
        self.table_slots = len(ops) * self.n2
        self.total = self.table_slots + len(self.const_names)
        self.cells = [-1] * self.total
        self.unsat = False
        self.static_by_slot = [[] for _ in range(self.total)]
        self.general = []
        op_base = {op: i * self.n2 for i, op in enumerate(ops)}
        self._op_base = op_base
        self._const_slot = {
            name: self.table_slots + k for k, name in enumerate(self.const_names)
        }
        for eq in sys.equations:
            missing = operations_of_equation(eq) - set(ops)
            if missing:
                names = ", ".join(op.value for op in sorted(missing, key=OP_ORDER.index))
                raise MissingTableError(f"missing table {names}")
            self._compile(eq)

    def _compile(self, eq: Equation):
        consts = set(self.const_names)
        mentions_const = any(x in consts for x in variables_of_equation(eq))
        if mentions_const or term_depth(eq.lhs) > 1 or term_depth(eq.rhs) > 1:
            self.general.append(eq)
            return
        n, op_base = self.n, self._op_base
        free = variables_of_equation(eq)
        for values in itertools.product(range(n), repeat=len(free)):
            env = dict(zip(free, values))

            def side(t):
                if isinstance(t, Var):
                    return ("v", env[t.name])
                return ("c", op_base[t.op] + env[t.left.name] * n + env[t.right.name])

            a, b = side(eq.lhs), side(eq.rhs)
            if a[0] == "v" and b[0] == "v":
                if a[1] != b[1]:
                    self.unsat = True
            elif a[0] == "v":
                self.static_by_slot[b[1]].append(("cv", b[1], a[1]))
            elif b[0] == "v":
                self.static_by_slot[a[1]].append(("cv", a[1], b[1]))
            elif a[1] != b[1]:
                inst = ("cc", a[1], b[1])
                self.static_by_slot[a[1]].append(inst)
                self.static_by_slot[b[1]].append(inst)

    def _static_ok(self, slot: int) -> bool:
        cells = self.cells
        for inst in self.static_by_slot[slot]:
            kind, s1, s2 = inst
            if kind == "cv":
                if cells[s1] != s2:
                    return False
            else:
                v1, v2 = cells[s1], cells[s2]
                if v1 != -1 and v2 != -1 and v1 != v2:
                    return False
        return True

    def _eval(self, t: Term, env: Mapping) -> int:
        if isinstance(t, Var):
            name = t.name
            if name in self._const_slot:
                return self.cells[self._const_slot[name]]
            return env[name]
        l = self._eval(t.left, env)
        r = self._eval(t.right, env)
        return self.cells[self._op_base[t.op] + l * self.n + r]

    def _leaf_ok(self) -> bool:
        consts = set(self.const_names)
        for eq in self.general:
            free = [x for x in variables_of_equation(eq) if x not in consts]
            for values in itertools.product(range(self.n), repeat=len(free)):
                env = dict(zip(free, values))
                if self._eval(eq.lhs, env) != self._eval(eq.rhs, env):
                    return False
        return True

    def _snapshot(self) -> FiniteAlgebra:
        n, n2 = self.n, self.n2
        tables = []
        for i, op in enumerate(self.ops):
            base = i * n2
            rows = tuple(
                tuple(self.cells[base + r * n: base + r * n + n]) for r in range(n)
            )
            tables.append((op, rows))
        consts = tuple(
            (name, self.cells[self._const_slot[name]]) for name in self.const_names
        )
        return FiniteAlgebra(n, tuple(tables), consts)

    def run(self, prefix: tuple = ()) -> Iterator[FiniteAlgebra]:
        """Depth-first stream; ``prefix`` pins the first slots of the search."""
        if self.unsat:
            return
        cells, n, total = self.cells, self.n, self.total
        for i, v in enumerate(prefix):
            cells[i] = v
            if not self._static_ok(i):
                return
        start = len(prefix)
        if start == total:
            if self._leaf_ok():
                yield self._snapshot()
            return
        slot = start
        while True:
            v = cells[slot] + 1
            if v >= n:
                cells[slot] = -1
                slot -= 1
                if slot < start:
                    return
                continue
            cells[slot] = v
            if not self._static_ok(slot):
                continue
            if slot == total - 1:
                if self._leaf_ok():
                    yield self._snapshot()
            else:
                slot += 1


def _partition_run(sys, n, ops, prefix):
    return list(_Search(sys, n, ops).run(prefix))


def _raw_stream(sys: AxiomSystem, n: int, opts: EnumOptions) -> Iterator[FiniteAlgebra]:
    ops = _ordered_ops(sys, opts)
    width = max(1, opts.parallel_width)
    search = _Search(sys, n, ops)
    if width == 1 or search.total == 0 or n == 1:
        yield from search.run()
        return
    # Workers take disjoint subtrees (split on the leading cells); emitting
    # partition by partition keeps the stream identical for every width.
    depth = 1
    while n ** depth < width and depth < search.total:
        depth += 1
    prefixes = list(itertools.product(range(n), repeat=depth))
    with ThreadPoolExecutor(max_workers=width) as pool:
        futures = [pool.submit(_partition_run, sys, n, ops, p) for p in prefixes]
        for fut in futures:
            yield from fut.result()


def enumerate_models(sys: AxiomSystem, n: int, opts: Optional[EnumOptions] = None
                     ) -> Iterator[FiniteAlgebra]:
    """All algebras of size ``n`` over the system's operations satisfying it.

    With ``up_to_iso`` only the canonically least member of each isomorphism
    class is emitted.  Raises ResourceLimitError if ``n`` exceeds the default
    size limit without ``allow_large``, or when ``max_results`` is surpassed.
    """
    if n < 1:
        raise ValueError("size must be >= 1")
    opts = opts or EnumOptions()
    if n > DEFAULT_SIZE_LIMIT and not opts.allow_large:
        raise ResourceLimitError(
            f"size {n} exceeds the default limit of {DEFAULT_SIZE_LIMIT}; "
            "pass allow_large to override")
    emitted = 0
    for alg in _raw_stream(sys, n, opts):
        if opts.up_to_iso and not is_canonical(alg):
            continue
        if opts.max_results is not None and emitted >= opts.max_results:
            raise ResourceLimitError(
                f"more than max_results={opts.max_results} models exist")
        emitted += 1
        yield alg


def count_models(sys: AxiomSystem, n: int, up_to_iso: bool = False,
                 opts: Optional[EnumOptions] = None) -> int:
    opts = replace(opts or EnumOptions(), up_to_iso=up_to_iso)
    return sum(1 for _ in enumerate_models(sys, n, opts))


# ---------------------------------------------------------------------------
# isomorphism

def _entry_vector(alg: FiniteAlgebra, perm, inv) -> list:
    n = alg.size
    out = []
    for _, table in alg.tables:
        for i in range(n):
            row = table[inv[i]]
            out.extend(perm[row[inv[j]]] for j in range(n))
    out.extend(perm[v] for _, v in alg.constants)
    return out


def canonical_form(alg: FiniteAlgebra) -> bytes:
    """Serialized bundle minimized over all carrier relabelings.

    Two algebras get equal forms exactly when some bijection of carriers
    maps all tables and constants of one onto the other.
    """
    n = alg.size
    ident = tuple(range(n))
    best = None
    for perm in itertools.permutations(range(n)):
        inv = ident if perm == ident else tuple(sorted(range(n), key=perm.__getitem__))
        vec = _entry_vector(alg, perm, inv)
        if best is None or vec < best:
            best = vec
    header = "%d;%s;%s;" % (
        n,
        ",".join(op.value for op, _ in alg.tables),
        ",".join(name for name, _ in alg.constants),
    )
    return header.encode() + bytes(best)


def is_canonical(alg: FiniteAlgebra) -> bool:
    n = alg.size
    ident = tuple(range(n))
    own = _entry_vector(alg, ident, ident)
    for perm in itertools.permutations(range(n)):
        if perm == ident:
            continue
        inv = tuple(sorted(range(n), key=perm.__getitem__))
        if _entry_vector(alg, perm, inv) < own:
            return False
    return True


# ---------------------------------------------------------------------------
# serialization

def to_record(alg: FiniteAlgebra) -> dict:
    return {
        "size": alg.size,
        "ops": {op.value: [list(row) for row in table] for op, table in alg.tables},
        "constants": {name: v for name, v in alg.constants},
    }


def record_line(alg: FiniteAlgebra) -> str:
    return json.dumps(to_record(alg), separators=(",", ":"))


def from_record(rec: Mapping) -> FiniteAlgebra:
    try:
        size = int(rec["size"])
        ops = {Op(name): table for name, table in rec.get("ops", {}).items()}
        constants = rec.get("constants", {})
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed algebra record: {exc}") from exc
    return make_algebra(size, ops, constants)
