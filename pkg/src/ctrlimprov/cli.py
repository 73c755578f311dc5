"""Command-line entry point.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible instance,
3 resource limit. Randomness comes from ``random.Random(seed)`` (Mersenne
Twister, 19937 bits of state), so a fixed seed gives identical output.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Sequence

from .automata import DETERMINIZE_CAP, Dfa, Nfa, determinize, product
from .counting import count_words
from .errors import CtrlImprovError, ResourceLimitError
from .factor_oracle import WindowSpec, build_factor_oracle, oracle_as_nfa, window_admissibility_dfa
from .improvise import (
    BudgetExhausted,
    ComputablePredicate,
    FeasibilityVerdict,
    Improviser,
    NotApplicable,
    broken_improviser,
    feasibility,
    format_count,
    parse_rational,
    synthesize,
    synthesize_enumerative,
    verify_improviser,
)
from .io import automaton_to_json, format_word, load_automaton, load_instance, parse_word

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_RESOURCE = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _oracle(args):
    from .sat.solver import make_oracle

    try:
        return make_oracle(args.solver)
    except ValueError as exc:
        raise _Exit(EXIT_USAGE, str(exc)) from None


def _emit(args, record: dict, text: str) -> None:
    if args.format == "json-lines":
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


def _as_dfa(a, cap: int) -> Dfa:
    return a if isinstance(a, Dfa) else determinize(a, cap)


def cmd_count(args) -> int:
    a = load_automaton(args.automaton)
    if not isinstance(a, (Dfa, Nfa)):
        raise _Exit(EXIT_USAGE, "count takes an explicit automaton; use symbolic-count")
    c = count_words(_as_dfa(a, args.det_cap))
    _emit(args, {"count": format_count(c)}, format_count(c))
    return EXIT_OK


def _explicit_verdict(inst, cap: int) -> FeasibilityVerdict:
    improv, admiss = inst.improv, inst.admiss
    if isinstance(admiss, ComputablePredicate):
        raise _Exit(EXIT_USAGE, "feasibility needs an admissibility automaton")
    i_dfa = _as_dfa(improv, cap)
    a_dfa = _as_dfa(product(improv, admiss), cap)
    return feasibility(count_words(i_dfa), count_words(a_dfa), inst.epsilon, inst.rho)


def cmd_feasible(args) -> int:
    inst = load_instance(args.instance)
    if inst.is_symbolic:
        raise _Exit(EXIT_USAGE, "symbolic instances are decided by 'improvise --symbolic'")
    v = _explicit_verdict(inst, args.det_cap)
    record = {
        "feasible": v.feasible,
        "size_I": format_count(v.size_I),
        "size_A": format_count(v.size_A),
        "thresholds": [str(t) for t in v.thresholds],
    }
    _emit(args, record, v.line())
    return EXIT_OK if v.feasible else EXIT_INFEASIBLE


def _synthesize(args, inst, rng):
    if args.symbolic or inst.is_symbolic:
        from .symbolic.scheme import synthesize_symbolic

        return synthesize_symbolic(
            inst, Fraction(args.tau), float(parse_rational(args.delta)), rng, _oracle(args),
            D_bound=args.diameter_bound, diameter_cap=args.diameter_cap,
        )
    if isinstance(inst.admiss, ComputablePredicate):
        return synthesize_enumerative(inst, args.budget)
    return synthesize(inst, args.det_cap)


def _require_improviser(args, result) -> Improviser:
    if isinstance(result, Improviser):
        return result
    if isinstance(result, FeasibilityVerdict):
        _emit(args, {"infeasible": True, "verdict": result.line()}, result.line())
        raise _Exit(EXIT_INFEASIBLE)
    if isinstance(result, BudgetExhausted):
        if result.reason == "language exhausted":
            _emit(args, {"infeasible": True, "reason": result.reason}, "infeasible language exhausted")
            raise _Exit(EXIT_INFEASIBLE)
        raise _Exit(EXIT_RESOURCE, f"enumeration budget exhausted after {result.enumerated} words")
    if isinstance(result, NotApplicable):
        raise _Exit(EXIT_RESOURCE, f"no tractable scheme applies: {result.reason}")
    raise AssertionError(f"unexpected synthesis result {result!r}")


def cmd_improvise(args) -> int:
    inst = load_instance(args.instance)
    rng = random.Random(args.seed)
    imp = _require_improviser(args, _synthesize(args, inst, rng))
    if args.format == "json-lines":
        print(json.dumps({"certificate": imp.certificate()}, sort_keys=True))
        for _ in range(args.n):
            print(json.dumps({"word": list(imp.draw(rng))}))
    else:
        print(imp.certificate_line(), file=sys.stderr)
        for _ in range(args.n):
            print(format_word(imp.draw(rng)))
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    rng = random.Random(args.seed)
    if args.control is not None:
        imp = broken_improviser(parse_word(args.control), inst.rho)
    else:
        imp = _require_improviser(args, _synthesize(args, inst, rng))
    report = verify_improviser(imp, inst, args.draws, rng, _oracle(args))
    record = report.as_dict()
    record["case"] = imp.case_tag
    record["eps"] = str(imp.epsilon)
    record["rho"] = str(imp.rho)
    print(json.dumps(record, sort_keys=True))
    return EXIT_OK


def _reference(text: str) -> tuple[str, ...]:
    return tuple(text.split()) if " " in text.strip() else tuple(text)


def cmd_oracle(args) -> int:
    ref = _reference(args.reference)
    f = build_factor_oracle(ref)
    if args.window is not None:
        k, low, high = args.window
        out = automaton_to_json(window_admissibility_dfa(f, WindowSpec(k, low, high)))
    else:
        out = automaton_to_json(oracle_as_nfa(f, include_eps_links=True))
    print(json.dumps(out, sort_keys=True) if args.format == "json-lines" else json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def _load_symbolic(path: str):
    from .symbolic.automaton import SymbolicAutomaton, encode_dfa

    a = load_automaton(path)
    if isinstance(a, Dfa):
        return encode_dfa(a)
    if not isinstance(a, SymbolicAutomaton):
        raise _Exit(EXIT_USAGE, "expected a symbolic automaton or a DFA")
    return a


def cmd_symbolic_count(args) -> int:
    from .symbolic.sampling import approx_count
    from .symbolic.unroll import diameter, user_diameter

    s = _load_symbolic(args.automaton)
    oracle = _oracle(args)
    d = user_diameter(args.diameter_bound) if args.diameter_bound is not None else diameter(s, oracle, args.diameter_cap)
    est = approx_count(s, oracle, float(Fraction(args.tau)), float(Fraction(args.delta)), d, random.Random(args.seed))
    value = format_count(est.value)
    kind = "exact" if est.exact else "approx"
    _emit(args, {"count": value, "exact": est.exact, "D": d.D}, f"{value} {kind}")
    return EXIT_OK


def cmd_symbolic_diameter(args) -> int:
    from .symbolic.unroll import diameter

    s = _load_symbolic(args.automaton)
    d = diameter(s, _oracle(args), args.diameter_cap)
    _emit(args, {"D": d.D, "reach": d.reach, "unsat_at": d.unsat_at}, str(d.D))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, suppress: bool) -> None:
        def d(value):
            return argparse.SUPPRESS if suppress else value

        parser.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
        parser.add_argument("--solver", default=d("internal"), help="'internal' or 'external:/path/to/solver'")
        parser.add_argument("--format", choices=("text", "json-lines"), default=d("text"))
        parser.add_argument("--det-cap", type=int, default=d(DETERMINIZE_CAP), help="subset-construction cap")
        parser.add_argument("--diameter-cap", type=int, default=d(64), help="longest simple path searched")

    p = argparse.ArgumentParser(prog="ctrlimprov", description="Control improvisation toolkit.")
    global_flags(p, False)
    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, True)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="count the words of an automaton", parents=[common])
    c.add_argument("automaton")
    c.set_defaults(func=cmd_count)

    c = sub.add_parser("feasible", help="decide feasibility of an instance", parents=[common])
    c.add_argument("instance")
    c.set_defaults(func=cmd_feasible)

    for name, func, helptext in (
        ("improvise", cmd_improvise, "synthesize an improviser and draw words"),
        ("verify", cmd_verify, "synthesize and audit an improviser"),
    ):
        c = sub.add_parser(name, help=helptext, parents=[common])
        c.add_argument("instance")
        c.add_argument("--symbolic", action="store_true", help="use the SAT-based scheme")
        c.add_argument("--tau", default="7")
        c.add_argument("--delta", default="1/5")
        c.add_argument("--diameter-bound", type=int, default=None)
        c.add_argument("--budget", type=int, default=10**5, help="words enumerated for black-box predicates")
        if name == "improvise":
            c.add_argument("--n", type=int, default=10, help="number of words to draw")
        else:
            c.add_argument("--draws", type=int, default=10**5)
            c.add_argument("--control", default=None, help="audit a point mass on this word instead")
        c.set_defaults(func=func)

    c = sub.add_parser("oracle", help="factor oracle of a reference word", parents=[common])
    c.add_argument("reference")
    c.add_argument("--window", type=int, nargs=3, metavar=("K", "L", "H"))
    c.set_defaults(func=cmd_oracle)

    for name, func in (("symbolic-count", cmd_symbolic_count), ("symbolic-diameter", cmd_symbolic_diameter)):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("automaton")
        if name == "symbolic-count":
            c.add_argument("--tau", default="1/2")
            c.add_argument("--delta", default="1/10")
            c.add_argument("--diameter-bound", type=int, default=None)
        c.set_defaults(func=func)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _Exit as exc:
        if str(exc):
            print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ResourceLimitError as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (CtrlImprovError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
