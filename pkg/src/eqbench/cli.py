"""Command-line front end.

Subcommands: enumerate, check, prove, refute, compare, rank, classify,
audit.  Output is either human-readable text or line-delimited JSON records
(--format records); record output is byte-stable for identical configs.

Exit codes: 0 success; 1 negative verdict (not proved / not refuted /
does not satisfy); 2 configuration or input error; 3 resource cap;
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from pathlib import Path

from .axioms import (
    AxiomFileError,
    AxiomSystem,
    BUILTIN_NAMES,
    UnknownSystemError,
    builtin_system,
    empty_system,
    load_axioms,
    make_system,
    merge,
    system_content_key,
)
from .consequence import (
    CandidateSpace,
    DeriveBudgets,
    Proved,
    Refuted,
    derive,
    semantic_consequence,
    verdict_record,
)
from .models import (
    EnumOptions,
    FiniteAlgebra,
    MissingConstantError,
    MissingTableError,
    ResourceLimitError,
    bind_constants,
    enumerate_models,
    find_violation,
    from_record,
    record_line,
    to_record,
)
from .power import compare, power_record, rank_all, rank_record
from .structure import classify_structure, is_abelian_group, report_record
from .terms import Op, ParseError, format_equation, parse_equation

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_IO = 4

CACHE_ENV = "EQBENCH_CACHE_DIR"


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_CONFIG):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# argument plumbing

def _resolve_system(selector: str) -> AxiomSystem:
    if selector.lower() == "none":
        return empty_system()
    try:
        return builtin_system(selector)
    except UnknownSystemError:
        pass
    path = Path(selector)
    if path.exists():
        return load_axioms(path)
    raise CliError(
        f"unknown system or missing axiom file: {selector!r} "
        f"(built-ins: none, {', '.join(BUILTIN_NAMES)})")


def _resolve_merged(selectors) -> AxiomSystem:
    systems = [_resolve_system(s) for s in selectors]
    return systems[0] if len(systems) == 1 else merge(systems)


def _parse_ops(arg: str) -> frozenset:
    out = set()
    for name in arg.split(","):
        name = name.strip().lower()
        if not name:
            continue
        try:
            out.add(Op(name))
        except ValueError:
            raise CliError(f"unknown operation {name!r}; use prod, ldiv, rdiv") from None
    return frozenset(out)


def _read_algebra_records(source: str):
    if source == "-":
        text = _sys.stdin.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(from_record(json.loads(line)))
        except (json.JSONDecodeError, ValueError) as exc:
            raise CliError(f"{source}:{lineno}: bad algebra record: {exc}")
    if not records:
        raise CliError(f"{source}: no algebra records found")
    return records


def _emit(record: dict):
    print(json.dumps(record, separators=(",", ":")))


def _algebra_text(alg: FiniteAlgebra) -> str:
    parts = [f"size={alg.size}"]
    for op, table in alg.tables:
        parts.append(f"{op.value}={json.dumps([list(r) for r in table], separators=(',', ':'))}")
    if alg.constants:
        parts.append("constants=" + ",".join(f"{k}={v}" for k, v in alg.constants))
    return " ".join(parts)


# ---------------------------------------------------------------------------
# enumerate (with the model cache)

def _cache_path(cache_dir: str, sys_: AxiomSystem, ops, n: int, up_to_iso: bool) -> Path:
    opsig = ",".join(op.value for op in sorted(ops, key=lambda o: o.value)) if ops else "auto"
    key = f"{system_content_key(sys_)}-{opsig}-n{n}-{'iso' if up_to_iso else 'raw'}"
    return Path(cache_dir) / f"{key}.jsonl"


def cmd_enumerate(args) -> int:
    sys_ = _resolve_merged(args.system)
    ops = _parse_ops(args.ops) if args.ops else None
    opts = EnumOptions(
        up_to_iso=args.up_to_iso,
        max_results=None,
        parallel_width=args.parallel,
        ops=ops,
        allow_large=args.allow_large,
    )
    cache_dir = args.cache_dir or os.environ.get(CACHE_ENV)
    if cache_dir:
        path = _cache_path(cache_dir, sys_, ops, args.size, args.up_to_iso)
        if path.exists():
            algebras = [
                from_record(json.loads(line))
                for line in path.read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
        else:
            algebras = list(enumerate_models(sys_, args.size, opts))
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text("".join(record_line(a) + "\n" for a in algebras),
                           encoding="utf-8")
            tmp.replace(path)
        if args.max_results is not None and len(algebras) > args.max_results:
            raise ResourceLimitError(
                f"more than max_results={args.max_results} models exist")
        stream = iter(algebras)
    else:
        opts = EnumOptions(
            up_to_iso=args.up_to_iso,
            max_results=args.max_results,
            parallel_width=args.parallel,
            ops=ops,
            allow_large=args.allow_large,
        )
        stream = enumerate_models(sys_, args.size, opts)

    if args.count:
        print(sum(1 for _ in stream))
        return EXIT_OK
    for alg in stream:
        if args.format == "records":
            print(record_line(alg))
        else:
            print(_algebra_text(alg))
    return EXIT_OK


# ---------------------------------------------------------------------------
# check / classify

def cmd_check(args) -> int:
    sys_ = _resolve_merged(args.system)
    code = EXIT_OK
    for alg in _read_algebra_records(args.algebra):
        bound = bind_constants(alg, sys_)
        failed = None
        witness = None
        for eq in sys_.equations:
            witness = find_violation(alg, eq, bound)
            if witness is not None:
                failed = eq
                break
        ok = failed is None
        if args.format == "records":
            _emit({
                "system": sys_.name,
                "satisfies": ok,
                "failed_equation": format_equation(failed) if failed else None,
                "witness": dict(sorted(witness.items())) if witness else None,
            })
        elif ok:
            print(f"satisfies {sys_.name}")
        else:
            at = ", ".join(f"{k}={v}" for k, v in sorted(witness.items()))
            print(f"fails {sys_.name}: {format_equation(failed)} at {at}")
        if not ok:
            code = EXIT_NEGATIVE
    return code


def cmd_classify(args) -> int:
    for alg in _read_algebra_records(args.algebra):
        report = classify_structure(alg)
        if args.format == "records":
            _emit(report_record(report))
            continue
        coincide = report.ops_coincide
        print(f"size={report.size} ops_coincide="
              f"{'n/a' if coincide is None else coincide}")
        for op, rep in report.ops:
            if rep is None:
                print(f"  {op.value}: not applicable (no table)")
                continue
            print(
                f"  {op.value}: commutative={rep.commutative}"
                f" associative={rep.associative}"
                f" latin_square={rep.latin_square}"
                f" identities={list(rep.identity_elements)}"
                f" group={rep.is_group} abelian_group={rep.is_abelian_group}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# prove / refute

def cmd_prove(args) -> int:
    sys_ = _resolve_merged(args.system)
    cand = parse_equation(args.identity)
    budgets = DeriveBudgets(max_term_depth=args.max_term_depth,
                            max_steps=args.max_steps)
    verdict = derive(sys_, cand, budgets)
    if args.format == "records":
        _emit(verdict_record(verdict))
    elif isinstance(verdict, Proved):
        print(f"proved: {format_equation(cand)}")
        for i, step in enumerate(verdict.derivation):
            uses = f" [{', '.join(str(p + 1) for p in step.premises)}]" if step.premises else ""
            print(f"  {i + 1}. {step.rule}{uses}: {format_equation(step.equation)}")
    else:
        print(f"unknown: {format_equation(cand)} not derived within "
              f"depth {args.max_term_depth}, steps {args.max_steps}")
    return EXIT_OK if isinstance(verdict, Proved) else EXIT_NEGATIVE


def cmd_refute(args) -> int:
    sys_ = _resolve_merged(args.system)
    cand = parse_equation(args.identity)
    verdict = semantic_consequence(sys_, cand, args.max_size,
                                   allow_large=args.allow_large)
    if args.format == "records":
        _emit(verdict_record(verdict))
    elif isinstance(verdict, Refuted):
        at = ", ".join(f"{k}={v}" for k, v in verdict.witness)
        print(f"refuted: {format_equation(cand)} fails at {at} in")
        print("  " + _algebra_text(verdict.countermodel))
    else:
        print(f"holds in every model up to size {verdict.max_size}")
    return EXIT_OK if isinstance(verdict, Refuted) else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# compare / rank

def _space(args) -> CandidateSpace:
    return CandidateSpace(max_vars=args.max_vars, max_depth=args.max_depth)


def cmd_compare(args) -> int:
    sys_a = _resolve_system(args.first)
    sys_b = _resolve_system(args.second)
    report = compare(sys_a, sys_b, _space(args), args.model_size,
                     workers=args.parallel)
    if args.format == "records":
        _emit(power_record(report))
    else:
        print(f"{report.first} vs {report.second}: {report.relation}")
        if report.witness_first_only is not None:
            print(f"  only in {report.first}: "
                  f"{format_equation(report.witness_first_only)}")
        if report.witness_second_only is not None:
            print(f"  only in {report.second}: "
                  f"{format_equation(report.witness_second_only)}")
    return EXIT_OK


def cmd_rank(args) -> int:
    systems = [_resolve_system(s) for s in args.systems]
    report = rank_all(systems, _space(args), args.model_size,
                      workers=args.parallel)
    if args.format == "records":
        _emit(rank_record(report))
    else:
        for names in report.classes:
            print("class: " + ", ".join(names))
        for a, b in report.edges:
            print(f"{a} > {b}")
        if not report.edges:
            print("(no strict order)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# audit of the commutative-group reading of the moduli

_AUDIT_ROWS = (
    ("G1", Op.PROD, "ab = ba", ("Mx_as_printed", "Mx_neutral")),
    ("G2", Op.LDIV, "a:b = b:a", ("Mldiv_as_printed", "Mldiv_neutral")),
    ("G3", Op.RDIV, "a/b = b/a", ("Mrdiv_as_printed", "Mrdiv_diagonal", "Mrdiv_neutral")),
)


def cmd_audit(args) -> int:
    """For every reading of each structure's modulus, report whether all of
    its models up to the size bound are abelian groups, with the first
    countermodel when they are not."""
    for struct, op, comm, readings in _AUDIT_ROWS:
        for reading_name in readings:
            reading = builtin_system(reading_name)
            audited = make_system(
                f"{struct}[{reading.name}]",
                [parse_equation(comm)] + list(reading.equations),
                reading.constants,
            )
            sizes = {}
            all_ok = True
            for n in range(1, args.max_size + 1):
                total = 0
                abelian = 0
                counter = None
                reason = None
                for alg in enumerate_models(audited, n):
                    total += 1
                    ok, why = is_abelian_group(alg, op)
                    if ok:
                        abelian += 1
                    elif counter is None:
                        counter = alg
                        reason = why
                sizes[str(n)] = {
                    "models": total,
                    "abelian_groups": abelian,
                    "all_abelian": counter is None,
                    "countermodel": to_record(counter) if counter else None,
                    "reason": reason,
                }
                if counter is not None:
                    all_ok = False
            record = {
                "structure": struct,
                "operation": op.value,
                "reading": reading.name,
                "axioms": [format_equation(eq) for eq in audited.equations],
                "constants": sorted(audited.constants),
                "sizes": sizes,
                "abelian_group_claim_holds": all_ok,
                "max_size": args.max_size,
            }
            if args.format == "records":
                _emit(record)
            else:
                verdictxt = "all abelian groups" if all_ok else "claim fails"
                print(f"{struct} with {reading.name} (sizes 1..{args.max_size}): {verdictxt}")
                for n, info in sizes.items():
                    line = (f"  size {n}: {info['abelian_groups']}/{info['models']}"
                            f" abelian groups")
                    if info["reason"]:
                        line += f"; first failure: {info['reason']}"
                    print(line)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_format(p):
    p.add_argument("--format", choices=("text", "records"), default="text",
                   help="human-readable text or line-delimited JSON records")


def _add_system(p, required=True):
    p.add_argument("--system", action="append", required=required,
                   metavar="NAME|FILE",
                   help="built-in system name, axiom file path, or 'none'; "
                        "repeat to merge several")


def _add_budgets(p):
    p.add_argument("--max-vars", type=int, default=2,
                   help="variables in the candidate-identity space (default 2)")
    p.add_argument("--max-depth", type=int, default=1,
                   help="term depth in the candidate-identity space (default 1)")
    p.add_argument("--model-size", type=int, default=2,
                   help="model size bound for semantic checks (default 2)")
    p.add_argument("--parallel", type=int, default=1,
                   help="worker count hint (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqbench",
        description="Workbench for equational axiom systems over product, "
                    "left division, and right division: enumerate finite "
                    "models, prove or refute identities, classify structure, "
                    "and compare systems by deductive power.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="enumerate finite models of a system")
    _add_system(p)
    p.add_argument("--size", type=int, required=True, help="carrier size")
    p.add_argument("--ops", help="comma-separated operations to instantiate "
                                 "(default: those the system mentions)")
    p.add_argument("--count", action="store_true", help="print only the count")
    p.add_argument("--up-to-iso", action="store_true",
                   help="one representative per isomorphism class")
    p.add_argument("--max-results", type=int, default=None)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--allow-large", action="store_true",
                   help="permit sizes above the built-in limit")
    p.add_argument("--cache-dir", default=None,
                   help=f"cache directory (default: ${CACHE_ENV})")
    _add_format(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("check", help="check an algebra against a system")
    _add_system(p)
    p.add_argument("--algebra", required=True, metavar="FILE|-",
                   help="algebra record file (JSON lines), '-' for stdin")
    _add_format(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("prove", help="derive an identity from a system")
    _add_system(p)
    p.add_argument("identity", help="candidate identity, e.g. 'ab = b/a'")
    p.add_argument("--max-term-depth", type=int, default=3)
    p.add_argument("--max-steps", type=int, default=8)
    _add_format(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("refute", help="search for a countermodel")
    _add_system(p)
    p.add_argument("identity")
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--allow-large", action="store_true")
    _add_format(p)
    p.set_defaults(func=cmd_refute)

    p = sub.add_parser("compare", help="compare two systems by power")
    p.add_argument("first")
    p.add_argument("second")
    _add_budgets(p)
    _add_format(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("rank", help="order several systems by power")
    p.add_argument("systems", nargs="+")
    _add_budgets(p)
    _add_format(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("classify", help="structural report for algebras")
    p.add_argument("--algebra", default="-", metavar="FILE|-",
                   help="algebra record file, '-' for stdin (default)")
    _add_format(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser(
        "audit",
        help="report whether each modulus reading makes the single-operation "
             "structures abelian groups at small sizes")
    p.add_argument("--max-size", type=int, default=3)
    _add_format(p)
    p.set_defaults(func=cmd_audit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return exc.code
    except (ParseError, AxiomFileError, UnknownSystemError,
            MissingTableError, MissingConstantError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_RESOURCE
    except BrokenPipeError:
        # downstream closed the stream (e.g. piping into head); die quietly
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, _sys.stdout.fileno())
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
