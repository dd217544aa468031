"""Command line front end.

    lamp parse FILE                     pretty-print the parsed sequent
    lamp check FILE                     typecheck; print the derivation
    lamp run FILE [--mode M] [--seed N] reduce (full | cbv | concurrent)
    lamp enumerate FILE [--budget N]    all normal forms + confluence verdict
    lamp translate FILE --direction D   to-mll (program file) or
                                        to-nmll (sequent-derivation file)
    lamp props [--n N] [--seed N]       run the metatheory property suites

Exit codes: 0 success, 1 type error, 2 parse error, 3 internal invariant
violation, 4 state budget exceeded.  Set LAMP_COLOR=1 for ANSI-colored
trace output.
"""

from __future__ import annotations

import argparse
import os
import sys

from .derivations import RuleViolation, check_derivation
from .mll import MllRuleViolation, check_mll, mll_to_nmll, nmll_to_mll
from .parser import ParseError, parse_program
from .reconstruct import TypecheckError, reconstruct
from .reduction import (
    BudgetExceeded, cbv_trace, enumerate_normal_forms, normalize,
)
from .runtime import ChannelProtocolError, DeadlockReport, run_concurrent
from .terms import flatten_par, join_par, print_sequent, print_term
from .sexpr import derivation_to_sexpr, mll_to_sexpr, sexpr_to_mll
from .testlab import GenConfig, run_property_suite

EXIT_OK, EXIT_TYPE, EXIT_PARSE, EXIT_INTERNAL, EXIT_BUDGET = 0, 1, 2, 3, 4


def _color_enabled() -> bool:
    return os.environ.get("LAMP_COLOR", "0") == "1"


def _render_trace_lines(initial: str, steps: list[tuple[str, str]]) -> str:
    color = _color_enabled()
    lines = [initial]
    for k, (desc, term) in enumerate(steps, start=1):
        prefix = f"step {k}: {desc}"
        if color:
            prefix = f"\x1b[36m{prefix}\x1b[0m"
        lines.append(f"{prefix} => {term}")
    return "\n".join(lines)


def _load(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


def cmd_parse(args) -> int:
    prog = _load(args.file)
    print(print_sequent(prog.sequent))
    return EXIT_OK


def cmd_check(args) -> int:
    prog = _load(args.file)
    d = reconstruct(prog.sequent, prog.annotations)
    check_derivation(d)
    print(derivation_to_sexpr(d))
    return EXIT_OK


def cmd_run(args) -> int:
    prog = _load(args.file)
    term = prog.sequent.joined_term()
    if args.mode == "full":
        trace = normalize(term)
        print(_render_trace_lines(
            print_term(trace.initial),
            [(d, print_term(t)) for d, t in trace.steps]))
        return EXIT_OK
    if args.mode == "cbv":
        steps = [(desc, print_term(join_par(state)))
                 for desc, state in cbv_trace(flatten_par(term))]
        print(_render_trace_lines(print_term(term), steps))
        return EXIT_OK
    # concurrent: honor the precondition by typechecking first
    reconstruct(prog.sequent, prog.annotations)
    final = run_concurrent(prog.sequent, seed=args.seed)
    print(f"final: {print_term(join_par(final))}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    prog = _load(args.file)
    term = prog.sequent.joined_term()
    forms = enumerate_normal_forms(term, args.budget)
    for text in sorted(print_term(t) for t in forms):
        print(text)
    print("CONFLUENT" if len(forms) == 1 else "NON-CONFLUENT")
    return EXIT_OK


def cmd_translate(args) -> int:
    if args.direction == "to-mll":
        prog = _load(args.file)
        d = reconstruct(prog.sequent, prog.annotations)
        m = nmll_to_mll(d)
        check_mll(m)
        print(mll_to_sexpr(m))
        return EXIT_OK
    with open(args.file, encoding="utf-8") as fh:
        m = sexpr_to_mll(fh.read())
    check_mll(m)
    d = mll_to_nmll(m)
    check_derivation(d)
    print(derivation_to_sexpr(d))
    return EXIT_OK


def cmd_props(args) -> int:
    cfg = GenConfig(seed=args.seed, max_nodes=args.max_nodes)
    report = run_property_suite(args.n, cfg)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lamp", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print a program")
    p.add_argument("file")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("check", help="typecheck and print the derivation")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("run", help="reduce a program")
    p.add_argument("file")
    p.add_argument("--mode", choices=["full", "cbv", "concurrent"],
                   default="full")
    p.add_argument("--seed", type=int, default=0,
                   help="scheduler permutation for --mode concurrent")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("enumerate", help="explore every reduction order")
    p.add_argument("file")
    p.add_argument("--budget", type=int, default=100_000,
                   help="maximum number of visited states")
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("translate", help="convert between derivation styles")
    p.add_argument("file")
    p.add_argument("--direction", choices=["to-mll", "to-nmll"], required=True)
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("props", help="run the metatheory property suites")
    p.add_argument("--n", type=int, default=100, help="generated cases")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-nodes", type=int, default=12)
    p.set_defaults(fn=cmd_props)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except TypecheckError as err:
        print(f"type error: {err}", file=sys.stderr)
        return EXIT_TYPE
    except BudgetExceeded as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except (RuleViolation, MllRuleViolation, DeadlockReport,
            ChannelProtocolError) as err:
        print(f"internal invariant violation: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
