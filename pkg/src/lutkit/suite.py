"""Executable catalog of the logical properties of unknown and unknowable truths.

Each entry is checked mechanically: validities by exhaustive search over
all models up to a state bound, invalidities both by a hand-built
countermodel and by an independent search, complexity inequalities on
random formulas.  Results are only ever claimed up to the bound.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .formula import (Ann, And, Atom, Formula, Know, Neg, TOP, Unk, bullet, disj, iff, implies,
                      is_el, less_complex, parse, random_formula, render)
from .kripke import Model, random_model
from .proofcheck import (Axiom, MP, Proof, Step, check_proof, instantiate, match_axiom)
from .rewrite import apply_axiom
from .semantics import Evaluator, bounded_validity, check_all

__all__ = [
    "SCHEMA_POOL", "SuiteConfig", "Entry", "EntryResult", "CATALOG",
    "moore_model", "three_state_model", "single_state_model",
    "COMPLEXITY_ITEMS", "complexity_violations", "reduction_violations",
    "u_factive_proof", "run_paper_suite", "format_result",
]

AGENT = "i"
SCHEMA_POOL = ("p", "q", "~p", "p & q", "K_i p", "~K_i p")


def B(f): return bullet(AGENT, f)
def U(f): return Unk(AGENT, f)
def K(f): return Know(AGENT, f)


P, Q = Atom("p"), Atom("q")


# -- fixtures ------------------------------------------------------------------

def moore_model() -> Model:
    """s (p) sees t (not p); p is an unknown but knowable truth at s."""
    return Model.build(["s", "t"], [AGENT], {AGENT: [("s", "t")]}, {"p": ["s"]},
                       reflexive_closure=True)


def three_state_model() -> Model:
    """t (p, not q) <- s (p, q) -> u (not p, q)."""
    return Model.build(["t", "s", "u"], [AGENT], {AGENT: [("s", "t"), ("s", "u")]},
                       {"p": ["t", "s"], "q": ["s", "u"]}, reflexive_closure=True)


def single_state_model() -> Model:
    return Model.build(["s"], [AGENT], {}, {"p": ["s"]}, reflexive_closure=True)


# -- catalog plumbing ----------------------------------------------------------

@dataclass
class SuiteConfig:
    bound: int = 3
    samples: int = 1000
    seed: int = 20240501
    jobs: int = 1
    evaluator: Evaluator = field(default_factory=Evaluator)


@dataclass(frozen=True)
class EntryResult:
    id: str
    section: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Entry:
    id: str
    section: str
    claim: str
    check: Callable[[SuiteConfig], tuple[bool, str]]


def _pool() -> list[Formula]:
    return [parse(text) for text in SCHEMA_POOL]


def _instances(schema, arity: int) -> list[Formula]:
    pool = _pool()
    if arity == 0:
        return [schema()]
    if arity == 1:
        return [schema(a) for a in pool]
    return [schema(a, b) for a in pool for b in pool]


def _valid(schema, arity: int, frame_class: str = "reflexive"):
    def check(cfg: SuiteConfig):
        formulas = _instances(schema, arity)
        results = check_all(formulas, cfg.bound, (AGENT,), ("p", "q"), frame_class,
                            evaluator=cfg.evaluator, jobs=cfg.jobs)
        bad = [f for f, r in results.items() if not r.valid]
        models = next(iter(results.values())).models_checked
        if bad:
            r = results[bad[0]]
            return False, f"{len(bad)} instance(s) fail, e.g. {render(bad[0])} at {r.state}"
        where = "" if frame_class == "reflexive" else f" {frame_class}"
        return True, f"{len(formulas)} instances valid on {models}{where} models up to {cfg.bound} states"
    return check


def _refuted(model: Model, state: str, f: Formula, cfg: SuiteConfig) -> bool:
    return not cfg.evaluator.holds(model, state, f)


def _invalid(fixture: Callable[[], Model], state: str, fixture_formula: Formula,
             search_formula: Formula, search_bound: int | None = None):
    """Fixture countermodel plus a fresh search for another one."""
    def check(cfg: SuiteConfig):
        model = fixture()
        if not _refuted(model, state, fixture_formula, cfg):
            return False, f"fixture does not refute {render(fixture_formula)} at {state}"
        bound = search_bound or cfg.bound
        report = bounded_validity(search_formula, bound, (AGENT,), None, jobs=cfg.jobs,
                                  evaluator=cfg.evaluator)
        if report.valid:
            return False, f"no countermodel to {render(search_formula)} up to {bound} states"
        found = report.countermodel
        return True, (f"fixture refutes at {state}; search found a {found.size}-state "
                      f"countermodel at {report.state}")
    return check


# -- similarities and interactions --------------------------------------------

def _distribution_fixture(cfg: SuiteConfig):
    m = three_state_model()
    ev = cfg.evaluator
    conj = U(And(Neg(K(P)), Neg(K(Q))))
    if not ev.holds(m, "s", conj):
        return False, "U_i(~K_i p & ~K_i q) is false at s"
    if ev.holds(m, "s", U(Neg(K(P)))) or ev.holds(m, "s", U(Neg(K(Q)))):
        return False, "a conjunct is still unknowable at s"
    claim = implies(conj, disj(U(Neg(K(P))), U(Neg(K(Q)))))
    report = bounded_validity(claim, cfg.bound, (AGENT,), ("p", "q"), jobs=cfg.jobs,
                              evaluator=ev)
    if report.valid:
        return False, "search found no countermodel"
    return True, (f"fixture: conjunction unknowable at s, neither conjunct; search found a "
                  f"{report.countermodel.size}-state countermodel")


def _fitch(cfg: SuiteConfig):
    m = moore_model()
    ev = cfg.evaluator
    if not ev.holds(m, "s", B(P)):
        return False, "B_i p not satisfied at the fixture"
    if not ev.holds(m, "s", U(B(P))):
        return False, "U_i B_i p false where B_i p holds"
    return True, "B_i p and U_i B_i p both hold at s, so ~U_i phi is not valid for every phi"


def _unsuccessful(cfg: SuiteConfig):
    m = moore_model()
    ev = cfg.evaluator
    phi = B(P)
    if not ev.holds(m, "s", U(phi)):
        return False, "U_i B_i p false at the fixture"
    claim = Ann(U(phi), U(phi))
    if ev.holds(m, "s", claim):
        return False, "[U_i B_i p] U_i B_i p holds at s"
    report = bounded_validity(claim, 2, (AGENT,), ("p",), evaluator=ev)
    if report.valid:
        return False, "search found no countermodel"
    return True, "[U_i B_i p] U_i B_i p fails at s and a 2-state search re-finds a countermodel"


def _knowable_validities(cfg: SuiteConfig):
    formulas = [U(TOP), U(disj(P, Neg(P))), U(implies(K(P), P))]
    results = check_all([Neg(f) for f in formulas], cfg.bound, (AGENT,), ("p", "q"),
                        evaluator=cfg.evaluator, jobs=cfg.jobs)
    bad = [f for f, r in results.items() if not r.valid]
    if bad:
        return False, f"{render(bad[0])} has a countermodel"
    return True, f"~U_i phi valid up to {cfg.bound} states for 3 validities phi"


# -- complexity measure --------------------------------------------------------

def _item(n, fn):
    return n, fn


# Each item maps sample formulas (psi, chi, chi2, delta, el1, el2) to the pairs
# (smaller, larger) that must satisfy the strict order.
COMPLEXITY_ITEMS: dict[int, Callable] = {
    1: lambda s, c, c2, d, e1, e2: [(s, Neg(s))],
    2: lambda s, c, c2, d, e1, e2: [(s, And(s, c)), (c, And(s, c))],
    3: lambda s, c, c2, d, e1, e2: [(s, K(s))],
    4: lambda s, c, c2, d, e1, e2: [(implies(s, P), Ann(s, P))],
    5: lambda s, c, c2, d, e1, e2: [(implies(s, Neg(Ann(s, c))), Ann(s, Neg(c)))],
    6: lambda s, c, c2, d, e1, e2: [(Ann(s, c), Ann(s, And(c, c2))), (Ann(s, c2), Ann(s, And(c, c2)))],
    7: lambda s, c, c2, d, e1, e2: [(implies(s, K(Ann(s, c))), Ann(s, K(c)))],
    8: lambda s, c, c2, d, e1, e2: [(Ann(And(s, Ann(s, c)), d), Ann(s, Ann(c, d)))],
    9: lambda s, c, c2, d, e1, e2: [(Ann(s, c), Ann(s, U(c))),
                                    (Ann(s, Ann(e1, Neg(K(c)))), Ann(s, U(c)))],
    10: lambda s, c, c2, d, e1, e2: [(s, U(s)), (Ann(e2, Neg(K(s))), U(s))],
}


def _samples(rng: random.Random, depth: int = 4):
    full = lambda: random_formula(rng, depth, ("p", "q", "r"), (AGENT, "j"))
    el = lambda: random_formula(rng, depth, ("p", "q", "r"), (AGENT, "j"),
                                announcements=False, unknowability=False)
    return full(), full(), full(), full(), el(), el()


def complexity_violations(samples: int = 1000, seed: int = 0, items=None) -> dict[int, list]:
    """Counterexamples to each complexity inequality over random formulas."""
    rng = random.Random(seed)
    items = sorted(items or COMPLEXITY_ITEMS)
    found: dict[int, list] = {n: [] for n in items}
    for _ in range(samples):
        sample = _samples(rng)
        assert is_el(sample[4]) and is_el(sample[5])
        for n in items:
            for small, large in COMPLEXITY_ITEMS[n](*sample):
                if not less_complex(small, large):
                    found[n].append((small, large))
    return found


def _complexity(n: int):
    def check(cfg: SuiteConfig):
        bad = complexity_violations(cfg.samples, cfg.seed + n, [n])[n]
        if bad:
            small, large = bad[0]
            return False, f"{len(bad)} violations, e.g. c({render(small)}) >= c({render(large)})"
        return True, f"{cfg.samples} random samples, no violation"
    return check


# -- axiomatization ------------------------------------------------------------

REDUCTION_AXIOMS = ("AP", "AN", "AC", "AK", "AA")


def _axiom_env(rng: random.Random, name: str, depth: int = 2) -> dict:
    pal = lambda: random_formula(rng, depth, ("p", "q"), (AGENT,), unknowability=False)
    full = lambda: random_formula(rng, depth, ("p", "q"), (AGENT,))
    el = lambda: random_formula(rng, depth, ("p", "q"), (AGENT,),
                                announcements=False, unknowability=False)
    pick = pal if name in REDUCTION_AXIOMS else full
    env = {v: pick() for v in ("phi", "psi", "chi", "delta")}
    env["p"] = Atom(rng.choice(("p", "q")))
    if name == "AU":
        env["psi"] = el()
    return env


def reduction_violations(samples: int = 1000, seed: int = 0, max_states: int = 4) -> list[str]:
    """Random (reduction-axiom instance, model, state) triples where the two sides disagree.

    Also flags instances whose left-to-right rewrite is not produced by the
    rewriter or does not lower complexity.
    """
    rng = random.Random(seed)
    ev = Evaluator()
    problems = []
    for _ in range(samples):
        name = rng.choice(REDUCTION_AXIOMS)
        inst = instantiate(name, _axiom_env(rng, name), AGENT)
        # instance is (lhs -> rhs) & (rhs -> lhs)
        lhs = inst.left.sub.left
        rhs = inst.right.sub.left
        model = random_model(rng, max_states, (AGENT,), ("p", "q"))
        state = rng.choice(model.states)
        if ev.holds(model, state, lhs) != ev.holds(model, state, rhs):
            problems.append(f"{name}: {render(lhs)} vs {render(rhs)} differ at {state}")
        step = apply_axiom(lhs)
        if step is None or step[1] != rhs:
            problems.append(f"{name}: rewriter does not map {render(lhs)} to {render(rhs)}")
        elif not less_complex(rhs, lhs):
            problems.append(f"{name}: no complexity decrease on {render(lhs)}")
    return problems


def _axioms_sound(cfg: SuiteConfig):
    rng = random.Random(cfg.seed)
    formulas = []
    for name in ("K", "KA", "T", "AP", "AN", "AC", "AK", "AA", "AU"):
        for _ in range(4):
            f = instantiate(name, _axiom_env(rng, name), AGENT)
            assert match_axiom(f, name)
            formulas.append(f)
    results = check_all(formulas, cfg.bound, (AGENT,), ("p", "q"), evaluator=cfg.evaluator,
                        jobs=cfg.jobs)
    bad = [f for f, r in results.items() if not r.valid]
    if bad:
        return False, f"axiom instance {render(bad[0])} has a countermodel"
    return True, f"{len(formulas)} random axiom instances valid up to {cfg.bound} states"


def _reduction_sound(cfg: SuiteConfig):
    problems = reduction_violations(cfg.samples, cfg.seed)
    if problems:
        return False, f"{len(problems)} problems, e.g. {problems[0]}"
    return True, f"{cfg.samples} random instance/model/state triples agree"


def u_factive_proof(agent: str = "a", atom: str = "p") -> Proof:
    """Three steps: AU with the announcement top, a tautology, modus ponens."""
    p = Atom(atom)
    au = implies(Unk(agent, p), And(p, Ann(TOP, Neg(Know(agent, p)))))
    goal = implies(Unk(agent, p), p)
    return Proof((
        Step(au, Axiom("AU")),
        Step(implies(au, goal), Axiom("PL")),
        Step(goal, MP(1, 2)),
    ))


def _sample_proof(cfg: SuiteConfig):
    proof = u_factive_proof(AGENT)
    report = check_proof(proof)
    if not report.accepted:
        return False, f"derivation rejected: {report.errors()[0].message}"
    corrupted = Proof((Step(proof.steps[0].formula, Axiom("T")), *proof.steps[1:]))
    bad = check_proof(corrupted)
    if bad.accepted or bad.steps[0].error != "AxiomMismatch":
        return False, "corrupted derivation not rejected with AxiomMismatch"
    results = check_all([s.formula for s in proof.steps], cfg.bound, (AGENT,), ("p",),
                        evaluator=cfg.evaluator)
    if not all(r.valid for r in results.values()):
        return False, "a proved formula has a countermodel"
    return True, "derivation of U_i p -> p accepted, corrupted copy rejected, all lines valid"


# -- the catalog ---------------------------------------------------------------

def _v(id_, section, claim, schema, arity, frame="reflexive"):
    return Entry(id_, section, claim, _valid(schema, arity, frame))


CATALOG: list[Entry] = [
    # unknown-truth column of the similarities table
    _v("bullet-factive", "similarities", "B_i phi -> phi", lambda a: implies(B(a), a), 1),
    _v("bullet-K-distribution", "similarities", "B_i(phi -> psi) -> (B_i phi -> B_i psi)",
       lambda a, b: implies(B(implies(a, b)), implies(B(a), B(b))), 2),
    _v("bullet-aggregation", "similarities", "B_i phi & B_i psi -> B_i(phi & psi)",
       lambda a, b: implies(And(B(a), B(b)), B(And(a, b))), 2),
    _v("bullet-iterate", "similarities", "B_i phi -> B_i B_i phi", lambda a: implies(B(a), B(B(a))), 1),
    _v("bullet-idempotence", "similarities", "B_i phi <-> B_i B_i phi", lambda a: iff(B(a), B(B(a))), 1),
    _v("bullet-not-known", "similarities", "~K_i B_i phi", lambda a: Neg(K(B(a))), 1),
    _v("bullet-knowledge-transitive", "similarities", "~B_i K_i phi on transitive frames",
       lambda a: Neg(B(K(a))), 1, "transitive"),
    _v("bullet-ignorance-euclidean", "similarities", "~B_i ~K_i phi on Euclidean frames",
       lambda a: Neg(B(Neg(K(a)))), 1, "euclidean"),
    _v("bullet-moore", "similarities", "[B_i p] ~B_i p", lambda: Ann(B(P), Neg(B(P))), 0),
    Entry("bullet-introspection-invalid", "similarities", "not valid: ~B_i phi -> B_i ~B_i phi",
          _invalid(single_state_model, "s", implies(Neg(B(TOP)), B(Neg(B(TOP)))),
                   implies(Neg(B(P)), B(Neg(B(P)))))),
    # unknowable-truth column
    _v("U-factive", "similarities", "U_i phi -> phi", lambda a: implies(U(a), a), 1),
    _v("U-K-distribution", "similarities", "U_i(phi -> psi) -> (U_i phi -> U_i psi)",
       lambda a, b: implies(U(implies(a, b)), implies(U(a), U(b))), 2),
    _v("U-aggregation", "similarities", "U_i phi & U_i psi -> U_i(phi & psi)",
       lambda a, b: implies(And(U(a), U(b)), U(And(a, b))), 2),
    _v("U-iterate", "similarities", "U_i phi -> U_i U_i phi", lambda a: implies(U(a), U(U(a))), 1),
    _v("U-idempotence", "similarities", "U_i phi <-> U_i U_i phi", lambda a: iff(U(a), U(U(a))), 1),
    _v("U-not-known", "similarities", "~K_i U_i phi", lambda a: Neg(K(U(a))), 1),
    _v("U-knowledge-transitive", "similarities", "~U_i K_i phi on transitive frames",
       lambda a: Neg(U(K(a))), 1, "transitive"),
    _v("U-ignorance-euclidean", "similarities", "~U_i ~K_i phi on Euclidean frames",
       lambda a: Neg(U(Neg(K(a)))), 1, "euclidean"),
    _v("U-moore", "similarities", "[U_i p] ~U_i p", lambda: Ann(U(P), Neg(U(P))), 0),
    Entry("U-introspection-invalid", "similarities", "not valid: ~U_i phi -> U_i ~U_i phi",
          _invalid(single_state_model, "s", implies(Neg(U(TOP)), U(Neg(U(TOP)))),
                   implies(Neg(U(P)), U(Neg(U(P)))))),
    # differences
    _v("bullet-distribution-or", "similarities", "B_i(phi & psi) -> B_i phi | B_i psi",
       lambda a, b: implies(B(And(a, b)), disj(B(a), B(b))), 2),
    Entry("distribution-over-and-invalid", "similarities",
          "not valid: U_i(phi & psi) -> U_i phi | U_i psi", _distribution_fixture),
    # interactions
    _v("U-implies-bullet", "interactions", "U_i phi -> B_i phi", lambda a: implies(U(a), B(a)), 1),
    Entry("bullet-to-U-invalid", "interactions", "not valid: B_i phi -> U_i phi",
          _invalid(moore_model, "s", implies(B(P), U(P)), implies(B(P), U(P)), 2)),
    _v("bullet-iff-U-bullet", "interactions", "B_i phi <-> U_i B_i phi", lambda a: iff(B(a), U(B(a))), 1),
    Entry("U-bullet-to-U-invalid", "interactions", "not valid: U_i B_i phi -> U_i phi",
          _invalid(moore_model, "s", implies(U(B(P)), U(P)), implies(U(B(P)), U(P)), 2)),
    _v("U-iff-bullet-U", "interactions", "U_i phi <-> B_i U_i phi", lambda a: iff(U(a), B(U(a))), 1),
    Entry("fitch-instance", "interactions", "some phi has ~U_i phi not valid (B_i p -> U_i B_i p)", _fitch),
    Entry("validities-knowable", "interactions", "if phi is valid then ~U_i phi is valid (instances)",
          _knowable_validities),
    Entry("U-unsuccessful", "similarities", "not valid: [U_i phi] U_i phi", _unsuccessful),
    # complexity measure
    *[Entry(f"complexity-{n}", "complexity", f"strict inequality item ({n})", _complexity(n))
      for n in sorted(COMPLEXITY_ITEMS)],
    # axiomatization
    Entry("axioms-sound", "axiomatization", "axiom instances are valid", _axioms_sound),
    Entry("reduction-sound", "axiomatization", "AP, AN, AC, AK, AA preserve truth and lower complexity",
          _reduction_sound),
    Entry("sample-proof", "axiomatization", "derivation of U_i p -> p checks and is sound", _sample_proof),
]


def run_paper_suite(bound: int = 3, entry: str | None = None, samples: int = 1000,
                    jobs: int = 1, seed: int = 20240501) -> list[EntryResult]:
    """Run the catalog (or the single entry ``entry``) in catalog order."""
    cfg = SuiteConfig(bound=bound, samples=samples, jobs=jobs, seed=seed)
    entries = [e for e in CATALOG if entry is None or e.id == entry]
    if entry is not None and not entries:
        raise KeyError(f"unknown entry {entry!r}")
    results = []
    for e in entries:
        try:
            passed, detail = e.check(cfg)
        except Exception as exc:  # a crashing check is a failed row
            passed, detail = False, f"error: {type(exc).__name__}: {exc}"
        results.append(EntryResult(e.id, e.section, passed, detail))
    return results


def format_result(r: EntryResult) -> str:
    return f"{r.id}  {r.section}  {'PASS' if r.passed else 'FAIL'}  {r.detail}"
