"""Command-line surface: gen, compare, convert, and run.

Exit codes: 0 ok, 1 usage or program-parse error, 2 validation error,
3 datapath run fault.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .datapath import (
    ProgramParseError,
    RunFault,
    Source,
    UnboundPlaceholderError,
    builtin_function1,
    builtin_function2,
    parse_program,
    run,
)
from .moduli import (
    CardinalityError,
    GenerationRequest,
    ModuliSet,
    RangeTooSmallError,
    SchemeId,
    bit_cost,
    find_moduli,
)
from .rns import RnsContext, RnsError, to_rns, from_rns, RnsNumber
from .tables import comparison_rows, rows_to_csv, rows_to_markdown

__all__ = ["main", "console_main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUN_FAULT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the interface wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str, what: str) -> list[int]:
    items = [part for part in text.split(",") if part]
    if not items:
        raise _UsageError(f"empty {what} list")
    try:
        return [int(part) for part in items]
    except ValueError:
        raise _UsageError(f"bad {what} list {text!r}") from None


def _bindings(parts: list[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for chunk in parts:
        for item in chunk.split(","):
            if not item:
                continue
            name, sep, value = item.partition("=")
            if not sep or not name or not value.isdigit():
                raise _UsageError(f"bad binding {item!r} (expected NAME=UNSIGNED)")
            out[name] = int(value)
    return out


def cmd_gen(args) -> int:
    moduli_set, trace = find_moduli(GenerationRequest(args.bits, args.count))
    print("moduli:", ",".join(str(m) for m in moduli_set.moduli))
    print("bit_cost:", bit_cost(moduli_set))
    print("dynamic_range:", moduli_set.dynamic_range)
    if args.trace:
        print("x:", trace.x)
        print("center:", trace.center)
        for i, extra in enumerate(trace.extras, start=1):
            print(f"k[{i}]: {extra.k} root={extra.k_root} chosen={extra.chosen}")
    return EXIT_OK


def cmd_compare(args) -> int:
    bits_list = _int_list(args.bits, "bits")
    schemes = []
    for label in args.schemes.split(","):
        if not label:
            continue
        try:
            scheme = SchemeId.parse(label)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
        if scheme.family == "proposed" and not 3 <= scheme.cardinality <= 6:
            raise _UsageError(f"unknown scheme {label!r}")
        schemes.append(scheme)
    if not schemes:
        raise _UsageError("empty schemes list")
    rows = comparison_rows(bits_list, schemes)
    if args.format == "csv":
        sys.stdout.write(rows_to_csv(rows))
    else:
        sys.stdout.write(rows_to_markdown(rows))
    return EXIT_OK


def _context(moduli_text: str) -> RnsContext:
    return RnsContext(ModuliSet(tuple(_int_list(moduli_text, "moduli"))))


def cmd_convert(args) -> int:
    ctx = _context(args.moduli)
    total = ctx.moduli_set.dynamic_range
    if args.value is not None:
        value = int(args.value)
        if value >= total:
            print(
                f"warning: value {value} >= dynamic range {total}; reduced modulo the range",
                file=sys.stderr,
            )
        number = to_rns(ctx, value)
        print(",".join(str(r) for r in number.residues))
    else:
        residues = tuple(_int_list(args.residues, "residues"))
        number = RnsNumber(residues, ctx.moduli_set)
        print(from_rns(ctx, number))
    return EXIT_OK


def _print_trace(trace) -> None:
    order = (Source.IN1, Source.IN2, Source.ADD, Source.SUB, Source.MUL)
    for i, latches in enumerate(trace):
        cells = []
        for src in order:
            number = latches.get(src)
            if number is None:
                cells.append(f"{src.value}=-")
            else:
                cells.append(f"{src.value}=({','.join(str(r) for r in number.residues)})")
        print(f"step {i}: " + " ".join(cells), file=sys.stderr)


def cmd_run(args) -> int:
    bindings = _bindings(args.bind or [])
    if args.builtin is not None:
        if args.builtin == "function1":
            prog = builtin_function1()
        elif args.builtin == "function2":
            if "E" not in bindings:
                raise _UsageError("function2 needs a binding for E (the exponent)")
            prog = builtin_function2(bindings.pop("E"))
        else:
            raise _UsageError(f"unknown builtin {args.builtin!r}")
    else:
        text = Path(args.program).read_text(encoding="utf-8")
        prog = parse_program(text)
    ctx = _context(args.moduli)
    outputs, trace = run(ctx, prog, bindings)
    if args.trace:
        _print_trace(trace)
    for value in outputs:
        print(value)
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="rnskit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_gen = sub.add_parser("gen", help="generate a moduli set")
    p_gen.add_argument("--bits", type=int, required=True, help="target range width in bits")
    p_gen.add_argument("--count", type=int, required=True, help="number of moduli (>= 3)")
    p_gen.add_argument("--trace", action="store_true", help="print generator intermediates")
    p_gen.set_defaults(func=cmd_gen)

    p_cmp = sub.add_parser("compare", help="tabulate schemes against bit widths")
    p_cmp.add_argument("--bits", required=True, help="comma-separated bit widths")
    p_cmp.add_argument(
        "--schemes",
        required=True,
        help="comma-separated: proposed3..proposed6, sm1, sm2, sm3",
    )
    p_cmp.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p_cmp.set_defaults(func=cmd_compare)

    p_conv = sub.add_parser("convert", help="binary <-> residues over a moduli set")
    p_conv.add_argument("--moduli", required=True, help="comma-separated moduli")
    direction = p_conv.add_mutually_exclusive_group(required=True)
    direction.add_argument("--value", help="unsigned integer to convert to residues")
    direction.add_argument("--residues", help="comma-separated residues to convert back")
    p_conv.set_defaults(func=cmd_convert)

    p_run = sub.add_parser("run", help="run a microprogram on the datapath")
    source = p_run.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", help="function1 or function2")
    source.add_argument("--program", help="path to a program text file")
    p_run.add_argument("--moduli", required=True, help="comma-separated moduli")
    p_run.add_argument(
        "--bind", action="append", help="placeholder bindings, e.g. X=7,Y=5,Z=3"
    )
    p_run.add_argument("--trace", action="store_true", help="print per-step latches to stderr")
    p_run.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"rnskit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProgramParseError as exc:
        for number, message in exc.diagnostics:
            print(f"rnskit: parse error: line {number}: {message}", file=sys.stderr)
        return EXIT_USAGE
    except UnboundPlaceholderError as exc:
        print(f"rnskit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CardinalityError, RangeTooSmallError, RnsError) as exc:
        print(f"rnskit: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RunFault as exc:
        print(f"rnskit: run fault: {exc}", file=sys.stderr)
        return EXIT_RUN_FAULT
    except OSError as exc:
        print(f"rnskit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())
