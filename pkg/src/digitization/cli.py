"""``digitize`` command line tool.

Exit codes: 0 pass / Holds / NoCounterexampleFound, 1 Counterexample,
2 input error, 3 Inconclusive or failed gate, 4 state cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from digitization.closure_lab import (
    FuzzConfig,
    Kind,
    Verdict,
    check_reach_equivalence,
    check_ta_cud,
    test_formula_cud,
    test_formula_cuid,
    test_ta_cud_fuzz,
    test_ta_cuid_fuzz,
    verify,
)
from digitization.errors import DomainError, ParseError, ResourceError
from digitization.mtl import classify_pattern, evaluate, is_weakly_constrained, parse_formula
from digitization.tick_semantics import DEFAULT_STATE_CAP, build_tick_automaton, export_dot
from digitization.timed_automata import (
    TimedAutomaton,
    classify,
    closure_transform,
    interior_transform,
)
from digitization.timed_traces import (
    TimedStateSequence,
    critical_epsilons,
    digitization_classes,
    digitize_trace,
    format_time,
    parse_time,
)

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3
EXIT_RESOURCE = 4

_EXIT_FOR_KIND = {
    Kind.HOLDS: EXIT_OK,
    Kind.NO_COUNTEREXAMPLE: EXIT_OK,
    Kind.COUNTEREXAMPLE: EXIT_COUNTEREXAMPLE,
    Kind.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class InputError(Exception):
    pass


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_automaton(path) -> TimedAutomaton:
    return TimedAutomaton.from_dict(_load_json(path))


def load_trace(path) -> TimedStateSequence:
    return TimedStateSequence.from_dict(_load_json(path))


def _emit(args, text_lines, doc):
    if args.format == "structured":
        print(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False))
    else:
        for line in text_lines:
            print(line)


def _verdict_lines(v: Verdict) -> list[str]:
    lines = [f"verdict: {v.summary()}"]
    for key in ("trace", "eps", "tick_word", "digitization"):
        if key in v.evidence:
            value = v.evidence[key]
            if key == "eps":
                value = format_time(value)
            elif key == "tick_word":
                value = " ".join(value) or "<empty>"
            lines.append(f"  {key}: {value}")
    for key, value in v.details.items():
        if isinstance(value, (set, frozenset)):
            value = ", ".join(sorted(value))
        lines.append(f"  {key}: {value}")
    lines.extend(f"  note: {n}" for n in v.notes)
    return lines


def _fuzz_config(args) -> FuzzConfig:
    return FuzzConfig(args.seed, args.trials, args.max_length, args.max_time, args.denominator)


# ------------------------------------------------------------------ commands


def cmd_digitize(args) -> int:
    eta = load_trace(args.trace)
    if (args.eps is None) == (not args.all):
        raise InputError("give exactly one of --eps or --all")
    if args.eps is not None:
        d = digitize_trace(eta, parse_time(args.eps))
        _emit(args, [str(d)], {"eps": format_time(parse_time(args.eps)), "trace": d.to_dict()})
        return EXIT_OK
    crit = critical_epsilons(eta)
    classes = digitization_classes(eta)
    lines = ["critical epsilons: " + ", ".join(map(format_time, crit))]
    lines += [f"eps in {c.render()}: {d}" for c, d in classes]
    doc = {
        "critical_epsilons": [format_time(e) for e in crit],
        "digitizations": [{"eps": c.render(), "trace": d.to_dict()} for c, d in classes],
    }
    _emit(args, lines, doc)
    return EXIT_OK


def cmd_classify(args) -> int:
    A = load_automaton(args.automaton)
    if args.apply_closure:
        A = closure_transform(A)
    if args.apply_interior:
        A = interior_transform(A)
    cls = classify(A)
    constraints = A.constraints()
    strict = [(w, c) for w, c in constraints if c.op.strict]
    loose = [(w, c) for w, c in constraints if not c.op.strict]
    lines = [cls.value]
    if cls.value == "Mixed":
        lines.append("offending strict constraints:")
        lines += [f"  {w}: {c}" for w, c in strict]
        lines.append("offending non-strict constraints:")
        lines += [f"  {w}: {c}" for w, c in loose]
    else:
        lines += [f"  {w}: {c} ({'strict' if c.op.strict else 'non-strict'})" for w, c in constraints]
    if args.export_tick:
        N = build_tick_automaton(A, args.state_cap)
        Path(args.export_tick).write_text(export_dot(N), encoding="utf-8")
        lines.append(f"tick automaton with {len(N.states)} states written to {args.export_tick}")
    doc = {
        "class": cls.value,
        "strict": [{"where": w, "constraint": str(c)} for w, c in strict],
        "non_strict": [{"where": w, "constraint": str(c)} for w, c in loose],
    }
    _emit(args, lines, doc)
    return EXIT_OK


def cmd_check_cud(args) -> int:
    A = load_automaton(args.automaton)
    v = check_ta_cud(A, args.state_cap, seed=args.seed)
    _emit(args, _verdict_lines(v), v.to_dict())
    return _EXIT_FOR_KIND[v.kind]


def cmd_mtl(args) -> int:
    phi = parse_formula(args.formula)
    if args.mtl_command == "check":
        result = is_weakly_constrained(phi)
        lines = ["Yes" if result else "No"] + [f"  {v}" for v in result.violations]
        doc = {
            "formula": str(phi),
            "weakly_constrained": result.ok,
            "violations": [{"condition": v.condition, "subformula": str(v.subformula), "reason": v.reason}
                           for v in result.violations],
        }
        _emit(args, lines, doc)
        return EXIT_OK
    if args.mtl_command == "classify":
        pattern = classify_pattern(phi)
        _emit(args, [str(pattern)], {"formula": str(phi), "pattern": str(pattern)})
        return EXIT_OK
    if args.trace is None:
        raise InputError("mtl eval needs --trace")
    eta = load_trace(args.trace)
    value = evaluate(phi, eta, 0)
    lines = [str(value).lower()]
    doc = {"formula": str(phi), "value": value}
    if args.digitizations:
        rows = [(c, d, evaluate(phi, d, 0)) for c, d in digitization_classes(eta)]
        lines += [f"  eps in {c.render()}: {d} -> {str(b).lower()}" for c, d, b in rows]
        doc["digitizations"] = [{"eps": c.render(), "trace": d.to_dict(), "value": b} for c, d, b in rows]
    _emit(args, lines, doc)
    return EXIT_OK


def cmd_verify(args) -> int:
    A = load_automaton(args.automaton)
    phi = parse_formula(args.formula)
    atom_map = _load_json(args.atom_map) if args.atom_map else None
    v = verify(A, phi, args.bound, atom_map, args.state_cap)
    gates = [n for n in v.notes if n.startswith("gate")]
    rest = [line for line in _verdict_lines(v) if line.removeprefix("  note: ") not in gates]
    _emit(args, gates + rest, v.to_dict())
    return _EXIT_FOR_KIND[v.kind]


def cmd_fuzz(args) -> int:
    cfg = _fuzz_config(args)
    reports = []
    if args.fuzz_command in ("formula-cud", "formula-cuid"):
        tester = test_formula_cud if args.fuzz_command == "formula-cud" else test_formula_cuid
        for text in args.targets:
            reports.append((text, tester(parse_formula(text), cfg)))
    else:
        tester = {
            "ta-cud": test_ta_cud_fuzz,
            "ta-cuid": test_ta_cuid_fuzz,
            "reach": check_reach_equivalence,
        }[args.fuzz_command]
        for path in args.targets:
            reports.append((path, tester(load_automaton(path), cfg, args.state_cap)))
    lines = []
    for target, v in reports:
        lines.append(f"{args.fuzz_command} {target}")
        lines += _verdict_lines(v)
    doc = {
        "command": args.fuzz_command,
        "config": {"seed": cfg.seed, "trials": cfg.trials, "max_length": cfg.max_length,
                   "max_time": cfg.max_time, "denominator": cfg.denominator},
        "reports": [dict(v.to_dict(), target=target) for target, v in reports],
    }
    _emit(args, lines, doc)
    codes = {_EXIT_FOR_KIND[v.kind] for _, v in reports}
    for code in (EXIT_COUNTEREXAMPLE, EXIT_INCONCLUSIVE):
        if code in codes:
            return code
    return EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive, default=1000)
    common.add_argument("--bound", type=_positive, default=6)
    common.add_argument("--format", choices=["text", "structured"], default="text")
    common.add_argument("--state-cap", type=_positive, default=DEFAULT_STATE_CAP)
    common.add_argument("--max-length", type=_positive, default=6)
    common.add_argument("--max-time", type=_positive, default=4)
    common.add_argument("--denominator", type=_positive, default=8)

    parser = argparse.ArgumentParser(
        prog="digitize", description="Digitization analyses for timed automata and MTL."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("digitize", parents=[common], help="digitize a timed state sequence")
    p.add_argument("trace")
    p.add_argument("--eps")
    p.add_argument("--all", action="store_true")
    p.set_defaults(func=cmd_digitize)

    p = sub.add_parser("classify", parents=[common], help="Closed/Open/Mixed classification")
    p.add_argument("automaton")
    p.add_argument("--apply-closure", action="store_true")
    p.add_argument("--apply-interior", action="store_true")
    p.add_argument("--export-tick", metavar="PATH")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check-cud", parents=[common], help="decide closure under digitization")
    p.add_argument("automaton")
    p.set_defaults(func=cmd_check_cud)

    p = sub.add_parser("mtl", parents=[common], help="MTL syntax checks and evaluation")
    p.add_argument("mtl_command", choices=["check", "classify", "eval"])
    p.add_argument("formula")
    p.add_argument("--trace")
    p.add_argument("--digitizations", action="store_true", help="also evaluate every digitization")
    p.set_defaults(func=cmd_mtl)

    p = sub.add_parser("verify", parents=[common], help="dense-time verification through integer time")
    p.add_argument("automaton")
    p.add_argument("formula")
    p.add_argument("--atom-map", help="JSON file mapping actions to atom lists")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", parents=[common], help="seeded closure falsification")
    p.add_argument("fuzz_command", choices=["formula-cud", "formula-cuid", "ta-cud", "ta-cuid", "reach"])
    p.add_argument("targets", nargs="+", help="formulas or automaton files")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, ParseError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
