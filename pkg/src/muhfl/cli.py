"""Command-line driver: muhfl <subcommand> FILE [options].

Input kind follows the extension (.hfl formula, .hes equation system,
.term game term); for `-` (standard input) it is sniffed from the text.
Exit codes: 0 success or Valid, 1 Invalid, 2 Unknown, 3 bad input,
4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional

from .core.errors import HflError, InvariantViolation
from .core.parser import parse_formula, parse_system, system_text
from .core.printer import formula_text
from .core.sorts import sort_text
from .core.syntax import size
from .core.typing import order_of_formula, typecheck
from .eqsys import (
    inline_higher, m_approximation, normalize, recursion_free, system_order,
    typecheck_system,
)
from .fromdisj import flatten_tuples, lower_main, search_form, simplify, stats
from .frontend import parse_term, term_fix_order, to_formula, typecheck_term
from .semantics import Invalid, SearchBudget, Valid, kleene_eval, search_valid
from .todisj import raise_top

EXIT_OK, EXIT_INVALID, EXIT_UNKNOWN, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3, 4


class InputError(HflError):
    pass


def read_input(path: str) -> tuple[str, str]:
    """(kind, text)"""
    if path == "-":
        text = sys.stdin.read()
        return sniff(text), text
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    for ext in ("hfl", "hes", "term"):
        if path.endswith("." + ext):
            return ext, text
    return sniff(text), text


def sniff(text: str) -> str:
    if "%DEFS" in text or "%ENV" in text:
        return "hes"
    if "fail" in text or "[+]" in text or "[*]" in text or "fix " in text or "unit" in text:
        return "term"
    return "hfl"


def load_formula(kind: str, text: str):
    if kind == "hfl":
        return parse_formula(text)
    if kind == "term":
        return to_formula(parse_term(text))
    raise InputError(f"expected a formula, got a .{kind} input")


def load_system(kind: str, text: str, maxar: Optional[int] = None):
    if kind == "hes":
        es = parse_system(text)
        typecheck_system(es)
        return es
    return normalize(load_formula(kind, text), maxar)


def emit(text: str, output: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def stats_text(values: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in values.items())


def verdict_code(v) -> int:
    if isinstance(v, Valid):
        return EXIT_OK
    if isinstance(v, Invalid):
        return EXIT_INVALID
    return EXIT_UNKNOWN


def cmd_typecheck(args) -> int:
    kind, text = read_input(args.file)
    if kind == "hes":
        es = parse_system(text)
        typecheck_system(es)
        emit(f"ok system order={system_order(es)} defs={len(es.defs)}", args.output)
    elif kind == "term":
        t = parse_term(text)
        emit(f"ok term : {typecheck_term({}, t)} order={term_fix_order(t)}", args.output)
    else:
        f = parse_formula(text)
        s = typecheck({}, f)
        emit(f"ok formula : {sort_text(s)} order={order_of_formula(f)}", args.output)
    return EXIT_OK


def cmd_eval(args) -> int:
    kind, text = read_input(args.file)
    budget = SearchBudget(args.fuel, args.box, args.states)
    if kind == "hes":
        es = parse_system(text)
        typecheck_system(es)
        engine = args.engine
        if engine == "auto":
            engine = "kleene" if system_order(inline_higher(es)) == 0 else "search"
        if engine == "kleene":
            v = kleene_eval(inline_higher(es), box=args.box, max_iters=args.iters)
        else:
            v = search_valid(search_form(es), budget)
    else:
        if args.engine == "kleene":
            raise InputError("the table engine needs an order-0 equation system")
        v = search_valid(load_formula(kind, text), budget)
    emit(str(v), args.output)
    return verdict_code(v)


def cmd_raise(args) -> int:
    kind, text = read_input(args.file)
    emit(formula_text(raise_top(load_formula(kind, text))), args.output)
    return EXIT_OK


def cmd_normalize(args) -> int:
    kind, text = read_input(args.file)
    emit(system_text(normalize(load_formula(kind, text), args.maxar)), args.output)
    return EXIT_OK


def cmd_lower(args) -> int:
    kind, text = read_input(args.file)
    es = load_system(kind, text, args.maxar)
    out = lower_main(es)
    if not args.no_flatten:
        out = flatten_tuples(out)
    if not args.no_simplify:
        out = simplify(out)
    emit(system_text(out), args.output)
    values = stats(es, out)
    if args.output not in (None, "-"):
        with open(args.output + ".stats", "w", encoding="utf-8") as fh:
            fh.write(stats_text(values))
    elif args.stats:
        with open(args.stats, "w", encoding="utf-8") as fh:
            fh.write(stats_text(values))
    return EXIT_OK


def cmd_approx(args) -> int:
    kind, text = read_input(args.file)
    emit(system_text(m_approximation(load_system(kind, text, None), args.m)), args.output)
    return EXIT_OK


def cmd_from_term(args) -> int:
    _, text = read_input(args.file)
    emit(formula_text(to_formula(parse_term(text))), args.output)
    return EXIT_OK


def cmd_stats(args) -> int:
    kind, text = read_input(args.file)
    if kind == "hes":
        es = parse_system(text)
        typecheck_system(es)
        values = {
            "order": system_order(es),
            "defs": len(es.defs),
            "nodes": es.node_count(),
            "maxar": es.maxar,
            "recursion_free": str(recursion_free(es)).lower(),
        }
    else:
        f = load_formula(kind, text)
        values = {"order": order_of_formula(f), "nodes": size(f)}
    emit(stats_text(values), args.output)
    return EXIT_OK


def positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return v


def nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return v


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not the Unknown verdict code 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="muhfl", description="Fixpoint-logic order translations.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file", help="input file, or - for standard input")
        sp.add_argument("-o", "--output", help="output file (default: standard output)")
        sp.set_defaults(func=func)
        return sp

    add("typecheck", cmd_typecheck, "check sorts and report order")
    sp = add("eval", cmd_eval, "decide validity under a budget")
    sp.add_argument("--fuel", type=positive, default=100000, help="expansion budget for search")
    sp.add_argument("--box", type=positive, default=64, help="integer range for witnesses and tables")
    sp.add_argument("--states", type=positive, default=200000, help="visited-state cap for search")
    sp.add_argument("--iters", type=positive, default=10000, help="iteration cap for tables")
    sp.add_argument("--engine", choices=("auto", "search", "kleene"), default="auto")
    add("raise", cmd_raise, "formula to disjunctive formula of one order higher")
    sp = add("normalize", cmd_normalize, "formula to normalized equation system")
    sp.add_argument("--maxar", type=positive, default=None, help="minimum predicate arity")
    sp = add("lower", cmd_lower, "normalized system to system of one order lower")
    sp.add_argument("--no-simplify", action="store_true")
    sp.add_argument("--no-flatten", action="store_true")
    sp.add_argument("--maxar", type=positive, default=None, help="arity when the input is a formula")
    sp.add_argument("--stats", help="stats file when writing to standard output")
    sp = add("approx", cmd_approx, "m-th approximation of a system")
    sp.add_argument("-m", type=nonnegative, required=True, help="number of stages")
    add("from-term", cmd_from_term, "game term to formula")
    add("stats", cmd_stats, "size and order statistics")
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"muhfl: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (HflError, ValueError, OSError) as exc:
        where = "" if args.file == "-" else f"{args.file}:"
        print(f"muhfl: {where}{exc}", file=sys.stderr)
        return EXIT_INPUT
    except RecursionError:
        print("muhfl: internal error: recursion limit exceeded", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
