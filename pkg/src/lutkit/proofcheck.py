"""Checker for Hilbert-style derivations.

Axioms: PL (tautology instances), K, KA, T, AP, AN, AC, AK, AA, AU.
Rules: MP, GEN (K_i), GENA ([chi]).  The rule RU quantifies over every
epistemic formula, so a finite step list can never discharge its premises;
steps citing it are rejected with an explanation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .formula import (Ann, And, Atom, Formula, Know, Neg, ParseError, Top, Unk, implies,
                      is_el, parse, render)

__all__ = [
    "AXIOMS", "Axiom", "MP", "Gen", "GenA", "RU", "Step", "Proof",
    "Hole", "ImpliesForm", "KnowForm", "AnnForm", "fill", "admissible_decompositions",
    "match_axiom", "instantiate", "schema_bindings", "tautology_skeleton", "check_proof", "load_proof", "read_proof",
    "ProofFormatError", "SkeletonTooLargeError", "StepResult", "ProofReport",
]

# Atom names inside schema text act as metavariables: phi, psi, chi, delta
# range over formulas, p over atoms; the agent i ranges over agents.
_SCHEMAS = {
    "K": "K_i (phi -> psi) -> (K_i phi -> K_i psi)",
    "KA": "[chi] (phi -> psi) -> ([chi] phi -> [chi] psi)",
    "T": "K_i phi -> phi",
    "AP": "[psi] p <-> (psi -> p)",
    "AN": "[psi] ~phi <-> (psi -> ~[psi] phi)",
    "AC": "[psi] (phi & chi) <-> ([psi] phi & [psi] chi)",
    "AK": "[psi] K_i phi <-> (psi -> K_i [psi] phi)",
    "AA": "[psi] [chi] phi <-> [psi & [psi] chi] phi",
    "AU": "U_i phi -> phi & [psi] ~K_i phi",
}
_FORMULA_VARS = {"phi", "psi", "chi", "delta"}
_ATOM_VARS = {"p"}
_AGENT_VARS = {"i"}

AXIOMS = ("PL", *_SCHEMAS)
_PATTERNS = {name: parse(text) for name, text in _SCHEMAS.items()}

MAX_SKELETON_LETTERS = 20


class ProofFormatError(ValueError):
    pass


class SkeletonTooLargeError(ValueError):
    pass


# -- schema matching -----------------------------------------------------------

def _match(pattern: Formula, f: Formula, env: dict) -> bool:
    match pattern:
        case Atom(name) if name in _FORMULA_VARS:
            bound = env.get(name)
            if bound is None:
                env[name] = f
                return True
            return bound == f
        case Atom(name) if name in _ATOM_VARS:
            if not isinstance(f, Atom):
                return False
            return env.setdefault(name, f) == f
        case Atom() | Top():
            return pattern == f
        case Neg(sub):
            return isinstance(f, Neg) and _match(sub, f.sub, env)
        case And(left, right):
            return isinstance(f, And) and _match(left, f.left, env) and _match(right, f.right, env)
        case Know(agent, sub) | Unk(agent, sub):
            if type(f) is not type(pattern):
                return False
            if agent in _AGENT_VARS:
                if env.setdefault("agent:" + agent, f.agent) != f.agent:
                    return False
            elif agent != f.agent:
                return False
            return _match(sub, f.sub, env)
        case Ann(ann, body):
            return isinstance(f, Ann) and _match(ann, f.announcement, env) and _match(body, f.body, env)
    return False


def schema_bindings(f: Formula, name: str) -> dict | None:
    """Metavariable assignment making ``f`` an instance of schema ``name``."""
    env: dict = {}
    return env if _match(_PATTERNS[name], f, env) else None


def instantiate(name: str, env: dict, agent: str = "i") -> Formula:
    """Instance of schema ``name`` with metavariables replaced from ``env``."""

    def sub(g: Formula) -> Formula:
        match g:
            case Atom(n) if n in _FORMULA_VARS or n in _ATOM_VARS:
                return env[n]
            case Atom() | Top():
                return g
            case Neg(x):
                return Neg(sub(x))
            case And(x, y):
                return And(sub(x), sub(y))
            case Know(_, x):
                return Know(agent, sub(x))
            case Unk(_, x):
                return Unk(agent, sub(x))
            case Ann(x, y):
                return Ann(sub(x), sub(y))
        raise TypeError(g)

    return sub(_PATTERNS[name])


def match_axiom(f: Formula, name: str) -> bool:
    if name == "PL":
        try:
            return tautology_skeleton(f)
        except SkeletonTooLargeError:
            return False
    if name not in _PATTERNS:
        raise KeyError(f"unknown axiom {name!r}")
    env = schema_bindings(f, name)
    if env is None:
        return False
    if name == "AU":
        return is_el(env["psi"])
    return True


# -- propositional skeleton ----------------------------------------------------

def tautology_skeleton(f: Formula) -> bool:
    """Is ``f`` a substitution instance of a propositional tautology?

    Maximal subformulas headed by an atom, K_i, an announcement or U_i
    become letters (equal subformulas share one); ``top`` stays the
    constant true.  All rows of the truth table are evaluated at once as
    bit-parallel integers.
    """
    letters: dict[Formula, int] = {}

    def collect(g: Formula):
        match g:
            case Neg(sub):
                collect(sub)
            case And(left, right):
                collect(left)
                collect(right)
            case Top():
                pass
            case _:
                letters.setdefault(g, len(letters))

    collect(f)
    n = len(letters)
    if n > MAX_SKELETON_LETTERS:
        raise SkeletonTooLargeError(f"{n} distinct letters (limit {MAX_SKELETON_LETTERS})")
    rows = 1 << n
    full = (1 << rows) - 1
    columns = []
    for k in range(n):
        # column k is true on rows whose bit k is set
        period = 1 << (k + 1)
        unit = ((1 << (1 << k)) - 1) << (1 << k)
        # repeat the unit once per period
        columns.append(unit * (full // ((1 << period) - 1)))

    def value(g: Formula) -> int:
        match g:
            case Neg(sub):
                return full & ~value(sub)
            case And(left, right):
                return value(left) & value(right)
            case Top():
                return full
        return columns[letters[g]]

    return value(f) == full


# -- admissible forms ----------------------------------------------------------

@dataclass(frozen=True)
class Hole:
    pass


@dataclass(frozen=True)
class ImpliesForm:
    antecedent: Formula
    inner: "AdmissibleForm"


@dataclass(frozen=True)
class KnowForm:
    agent: str
    inner: "AdmissibleForm"


@dataclass(frozen=True)
class AnnForm:
    announcement: Formula
    inner: "AdmissibleForm"


AdmissibleForm = Hole | ImpliesForm | KnowForm | AnnForm


def fill(form: AdmissibleForm, f: Formula) -> Formula:
    """Put ``f`` into the single hole of ``form``."""
    match form:
        case Hole():
            return f
        case ImpliesForm(antecedent, inner):
            return implies(antecedent, fill(inner, f))
        case KnowForm(agent, inner):
            return Know(agent, fill(inner, f))
        case AnnForm(announcement, inner):
            return Ann(announcement, fill(inner, f))
    raise TypeError(f"not an admissible form: {form!r}")


def admissible_decompositions(f: Formula) -> Iterator[tuple[AdmissibleForm, Unk]]:
    """All ways of reading ``f`` as ``eta(U_i phi)``, outermost hole first."""
    if isinstance(f, Unk):
        yield Hole(), f
    match f:
        case Neg(And(a, Neg(b))):
            for form, u in admissible_decompositions(b):
                yield ImpliesForm(a, form), u
        case Know(agent, sub):
            for form, u in admissible_decompositions(sub):
                yield KnowForm(agent, form), u
        case Ann(ann, body):
            for form, u in admissible_decompositions(body):
                yield AnnForm(ann, form), u


def render_form(form: AdmissibleForm, hole: str = "#") -> str:
    match form:
        case Hole():
            return hole
        case ImpliesForm(antecedent, inner):
            text = render(antecedent)
            if " " in text:
                text = f"({text})"
            return f"{text} -> {render_form(inner, hole)}"
        case KnowForm(agent, inner):
            return f"K_{agent} ({render_form(inner, hole)})"
        case AnnForm(announcement, inner):
            return f"[{render(announcement)}] ({render_form(inner, hole)})"
    raise TypeError(form)


# -- proofs --------------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    name: str


@dataclass(frozen=True)
class MP:
    """From step ``minor`` (phi) and step ``major`` (phi -> psi) infer psi."""

    minor: int
    major: int


@dataclass(frozen=True)
class Gen:
    premise: int
    agent: str


@dataclass(frozen=True)
class GenA:
    premise: int
    announcement: Formula


@dataclass(frozen=True)
class RU:
    note: str = ""


Justification = Axiom | MP | Gen | GenA | RU


@dataclass(frozen=True)
class Step:
    formula: Formula
    by: Justification


@dataclass(frozen=True)
class Proof:
    steps: tuple[Step, ...]


@dataclass(frozen=True)
class StepResult:
    index: int
    ok: bool
    error: str | None = None
    message: str = ""


@dataclass(frozen=True)
class ProofReport:
    accepted: bool
    steps: tuple[StepResult, ...] = field(default_factory=tuple)

    def errors(self) -> list[StepResult]:
        return [r for r in self.steps if not r.ok]


def _check_step(proof: Proof, index: int) -> StepResult:
    step = proof.steps[index - 1]
    f, by = step.formula, step.by

    def ref(k: int) -> Formula | None:
        if isinstance(k, int) and 1 <= k < index:
            return proof.steps[k - 1].formula
        return None

    def bad_ref(*ks):
        return StepResult(index, False, "BadReference",
                          f"references {list(ks)} must point to earlier steps 1..{index - 1}")

    match by:
        case Axiom(name):
            if name not in AXIOMS:
                return StepResult(index, False, "AxiomMismatch", f"unknown axiom {name}")
            if match_axiom(f, name):
                return StepResult(index, True)
            msg = f"not an instance of {name}"
            if name == "AU" and (env := schema_bindings(f, "AU")) is not None:
                msg = f"AU requires an epistemic announcement, got {render(env['psi'])}"
            return StepResult(index, False, "AxiomMismatch", msg)
        case MP(minor, major):
            a, b = ref(minor), ref(major)
            if a is None or b is None:
                return bad_ref(minor, major)
            if b == implies(a, f):
                return StepResult(index, True)
            return StepResult(index, False, "RuleShapeMismatch",
                              f"step {major} is not step {minor} -> this formula")
        case Gen(premise, agent):
            a = ref(premise)
            if a is None:
                return bad_ref(premise)
            if f == Know(agent, a):
                return StepResult(index, True)
            return StepResult(index, False, "RuleShapeMismatch", f"expected K_{agent} of step {premise}")
        case GenA(premise, announcement):
            a = ref(premise)
            if a is None:
                return bad_ref(premise)
            if f == Ann(announcement, a):
                return StepResult(index, True)
            return StepResult(index, False, "RuleShapeMismatch",
                              f"expected [{render(announcement)}] applied to step {premise}")
        case RU():
            forms = list(admissible_decompositions(f))
            if forms:
                form, u = forms[-1]
                shape = render_form(form)
                body = render(And(u.sub, Ann(Atom("psi"), Neg(Know(u.agent, u.sub)))))
                detail = (f"as {shape} with # = U_{u.agent} {render(u.sub)} it needs the premise "
                          f"{render_form(form, '(' + body + ')')} for every epistemic psi")
            else:
                detail = "the formula is not of the form eta(U_i phi) for an admissible form eta"
            return StepResult(index, False, "InfinitaryRuleUnsupported",
                              "RU has infinitely many premises and cannot be checked; " + detail)
    return StepResult(index, False, "RuleShapeMismatch", f"unknown justification {by!r}")


def check_proof(proof: Proof) -> ProofReport:
    results = tuple(_check_step(proof, k) for k in range(1, len(proof.steps) + 1))
    return ProofReport(bool(results) and all(r.ok for r in results), results)


# -- proof files ---------------------------------------------------------------

def _formula(text, where: str) -> Formula:
    if not isinstance(text, str):
        raise ProofFormatError(f"{where}: formula must be a string")
    try:
        return parse(text)
    except ParseError as exc:
        raise ProofFormatError(f"{where}: {exc}") from None


def _justification(by, where: str) -> Justification:
    if isinstance(by, str):
        if by == "RU":
            return RU()
        return Axiom(by)
    if isinstance(by, dict) and len(by) == 1:
        (kind, args), = by.items()
        if not isinstance(args, list) or len(args) != 2:
            raise ProofFormatError(f"{where}: {kind!r} takes a two-element list")
        if kind == "mp" and all(isinstance(a, int) for a in args):
            return MP(*args)
        if kind == "gen" and isinstance(args[0], int) and isinstance(args[1], str):
            return Gen(args[0], args[1])
        if kind == "gena" and isinstance(args[0], int):
            return GenA(args[0], _formula(args[1], where))
    raise ProofFormatError(f"{where}: unrecognised justification {by!r}")


def load_proof(document) -> Proof:
    """Proof from the JSON proof document (text or decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ProofFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict) or not isinstance(document.get("steps"), list):
        raise ProofFormatError("proof document needs a 'steps' list")
    steps = []
    for k, raw in enumerate(document["steps"], start=1):
        where = f"step {k}"
        if not isinstance(raw, dict) or "formula" not in raw or "by" not in raw:
            raise ProofFormatError(f"{where}: needs 'formula' and 'by'")
        steps.append(Step(_formula(raw["formula"], where), _justification(raw["by"], where)))
    return Proof(tuple(steps))


def read_proof(path) -> Proof:
    return load_proof(Path(path).read_text(encoding="utf-8"))
