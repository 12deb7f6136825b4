"""Command-line front end.

Exit codes: 0 for true, valid, accepted or all-pass; 1 for false,
countermodel, rejected or a failing entry; 2 for malformed input;
64 for bad usage.
"""
from __future__ import annotations

import argparse
import json
import sys

from .bisim import partition
from .formula import ParseError, measures, parse, render
from .kripke import FRAME_CLASSES, EnumerationLimitError, ModelError, dump_model, read_model
from .proofcheck import ProofFormatError, check_proof, read_proof
from .rewrite import reduction_steps
from .semantics import bounded_validity, eval_with_witness
from .suite import format_result, run_paper_suite

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _emit(args, text_lines, payload):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def cmd_check(args) -> int:
    model = read_model(args.model)
    f = parse(args.formula)
    verdict = eval_with_witness(model, args.state, f)
    lines = ["true" if verdict.value else "false"]
    witness = None
    if verdict.witness is not None:
        w = verdict.witness
        announcement = render(w.formula)
        witness = {"states": sorted(w.states), "announcement": announcement}
        lines += ["witness:",
                  f"  states: {', '.join(sorted(w.states))}",
                  f"  announcement: {announcement}"]
    _emit(args, lines, {"formula": render(f), "state": args.state, "value": verdict.value,
                        "witness": witness})
    return EXIT_OK if verdict.value else EXIT_NO


def cmd_valid(args) -> int:
    f = parse(args.formula)
    agents = _names(args.agents) if args.agents else None
    atoms = _names(args.atoms) if args.atoms is not None else None
    report = bounded_validity(f, args.max_states, agents, atoms, args.frame_class, jobs=args.jobs)
    lines = [report.describe()]
    if not report.valid:
        lines.append(json.dumps(dump_model(report.countermodel), sort_keys=True))
    _emit(args, lines, {
        "formula": render(f), "valid": report.valid, "models_checked": report.models_checked,
        "max_states": args.max_states, "frame_class": args.frame_class,
        "countermodel": None if report.valid else dump_model(report.countermodel),
        "state": report.state,
    })
    return EXIT_OK if report.valid else EXIT_NO


def cmd_bisim(args) -> int:
    blocks = sorted(partition(read_model(args.model)).named_blocks())
    _emit(args, [", ".join(b) for b in blocks], {"blocks": blocks})
    return EXIT_OK


def cmd_rewrite(args) -> int:
    f = parse(args.formula)
    rows = [(None, f)] + list(reduction_steps(f))
    lines, steps = [], []
    for axiom, g in rows:
        c = measures(g)
        lines.append(f"{axiom or '--'}  {render(g)}  ({c.udepth}, {c.size})")
        steps.append({"axiom": axiom, "formula": render(g), "udepth": c.udepth, "size": c.size})
    _emit(args, lines, {"steps": steps, "result": steps[-1]["formula"]})
    return EXIT_OK


def cmd_complexity(args) -> int:
    f = parse(args.formula)
    c = measures(f)
    _emit(args, [f"udepth={c.udepth} size={c.size}"],
          {"formula": render(f), "udepth": c.udepth, "size": c.size})
    return EXIT_OK


def cmd_prove(args) -> int:
    proof = read_proof(args.proof)
    report = check_proof(proof)
    lines = []
    for r, step in zip(report.steps, proof.steps):
        status = "ok" if r.ok else r.error
        line = f"{r.index}  {status}  {render(step.formula)}"
        lines.append(line + (f"  -- {r.message}" if r.message else ""))
    lines.append("accepted" if report.accepted else "rejected")
    _emit(args, lines, {
        "accepted": report.accepted,
        "steps": [{"index": r.index, "ok": r.ok, "error": r.error, "message": r.message}
                  for r in report.steps],
    })
    return EXIT_OK if report.accepted else EXIT_NO


def cmd_props(args) -> int:
    try:
        results = run_paper_suite(args.bound, args.entry, samples=args.samples, jobs=args.jobs)
    except KeyError as exc:
        raise UsageError(f"props: {exc.args[0]}") from None
    passed = all(r.passed for r in results)
    _emit(args, [format_result(r) for r in results], {
        "passed": passed,
        "entries": [{"id": r.id, "section": r.section, "passed": r.passed, "detail": r.detail}
                    for r in results],
    })
    return EXIT_OK if passed else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lutkit", description="Model and proof checking for unknowable truths.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.set_defaults(func=func)
        return p

    p = command("check", cmd_check, "evaluate a formula at a state of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--formula", required=True)

    p = command("valid", cmd_valid, "bounded validity search")
    p.add_argument("--formula", required=True)
    p.add_argument("--max-states", type=int, default=3)
    p.add_argument("--agents", help="comma-separated; defaults to the formula's agents")
    p.add_argument("--atoms", help="comma-separated; defaults to the formula's atoms")
    p.add_argument("--frame-class", choices=FRAME_CLASSES, default="reflexive")
    p.add_argument("--jobs", type=int, default=1)

    p = command("bisim", cmd_bisim, "print the autobisimulation blocks of a model")
    p.add_argument("--model", required=True)

    p = command("rewrite", cmd_rewrite, "eliminate announcements step by step")
    p.add_argument("--formula", required=True)

    p = command("complexity", cmd_complexity, "print U-depth and size")
    p.add_argument("--formula", required=True)

    p = command("prove", cmd_prove, "check a derivation file")
    p.add_argument("--proof", required=True)

    p = command("props", cmd_props, "run the property catalog")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--entry")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "max_states", 1) < 1 or getattr(args, "bound", 1) < 1:
            raise UsageError("bounds must be positive")
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be positive")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"error: formula: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelError, ProofFormatError, EnumerationLimitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
