"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed even
when output capture is on.
"""
import random
import time
from functools import cache

import pytest

from lutkit.bisim import characteristic_of_set, closed_masks, partition, quotient
from lutkit.formula import (And, Ann, Atom, Know, Neg, Unk, bullet, diamond, disj, iff, implies,
                            is_el, less_complex, measures, parse, random_formula, render)
from lutkit.kripke import random_model
from lutkit.proofcheck import MP, Axiom, Proof, Step, check_proof, instantiate
from lutkit.rewrite import reduce_once
from lutkit.semantics import Evaluator, check_all, eval_formula, eval_with_witness
from lutkit.suite import moore_model, three_state_model

from test_bisim import naive_blocks

I = "i"
POOL = [parse(t) for t in ("p", "q", "~p", "p & q", "K_i p", "~K_i p")]
P = Atom("p")


def B(f): return bullet(I, f)
def U(f): return Unk(I, f)
def K(f): return Know(I, f)


def report(number, ok, detail, seconds):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({seconds:.2f}s) {detail}"
    print(line)
    return ok, line


def _timed(fn):
    start = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - start


# -- criterion 1 ---------------------------------------------------------------

@cache
def criterion_1():
    def run():
        m = moore_model()
        b = eval_formula(m, "s", B(P))
        v = eval_with_witness(m, "s", U(P))
        if not b or v.value or v.witness is None:
            return False, f"B_i p={b}, U_i p={v.value}, witness={v.witness}"
        psi = v.witness.formula
        ok = eval_formula(m, "s", diamond(psi, K(P)))
        return ok, f"B_i p true, U_i p false, <psi>K_i p re-evaluates {ok} for psi={render(psi)[:60]}..."
    ok, detail, secs = _timed(run)
    return report(1, ok and secs < 1, detail, secs)


# -- criterion 2 ---------------------------------------------------------------

@cache
def criterion_2():
    def run():
        m = three_state_model()
        ev = Evaluator()
        conj = ev.holds(m, "s", U(And(Neg(K(P)), Neg(K(Atom("q"))))))
        left = ev.holds(m, "s", U(Neg(K(P))))
        right = ev.holds(m, "s", U(Neg(K(Atom("q")))))
        return conj and not left and not right, f"U(conj)={conj}, U(~K p)={left}, U(~K q)={right}"
    ok, detail, secs = _timed(run)
    return report(2, ok and secs < 1, detail, secs)


# -- criterion 3 ---------------------------------------------------------------

def _one(schema):
    return [schema(a) for a in POOL]


def _two(schema):
    return [schema(a, b) for a in POOL for b in POOL]


def validity_battery():
    out = []
    for op in (B, U):
        out += _one(lambda a: implies(op(a), a))
        out += _two(lambda a, b: implies(op(implies(a, b)), implies(op(a), op(b))))
        out += _two(lambda a, b: implies(And(op(a), op(b)), op(And(a, b))))
        out += _one(lambda a: implies(op(a), op(op(a))))
        out += _one(lambda a: iff(op(a), op(op(a))))
        out += _one(lambda a: Neg(K(op(a))))
        out.append(Ann(op(P), Neg(op(P))))
    out += _one(lambda a: implies(U(a), B(a)))
    out += _one(lambda a: iff(B(a), U(B(a))))
    out += _one(lambda a: iff(U(a), B(U(a))))
    return out


@cache
def criterion_3():
    def run():
        battery = validity_battery()
        reports = check_all(battery, 3, (I,), ("p", "q"))
        bad = [f for f, r in reports.items() if not r.valid]
        models = next(iter(reports.values())).models_checked
        if bad:
            return False, f"{len(bad)} counterexamples, first {render(bad[0])}"
        return True, f"{len(reports)} formulas valid on all {models} reflexive models <= 3 states"
    ok, detail, secs = _timed(run)
    return report(3, ok and secs <= 600, detail, secs)


# -- criterion 4 ---------------------------------------------------------------

@cache
def criterion_4():
    def run():
        trans = [Neg(U(K(a))) for a in POOL] + [Neg(B(K(a))) for a in POOL]
        eucl = [Neg(U(Neg(K(a)))) for a in POOL] + [Neg(B(Neg(K(a)))) for a in POOL]
        t = check_all(trans, 3, (I,), ("p", "q"), "transitive")
        e = check_all(eucl, 3, (I,), ("p", "q"), "euclidean")
        bad = [f for f, r in (*t.items(), *e.items()) if not r.valid]
        if bad:
            return False, f"counterexample to {render(bad[0])}"
        return True, (f"~U_i K_i phi on {t[trans[0]].models_checked} transitive and "
                      f"~U_i ~K_i phi on {e[eucl[0]].models_checked} Euclidean models")
    ok, detail, secs = _timed(run)
    return report(4, ok, detail, secs)


# -- criterion 5 ---------------------------------------------------------------

def complexity_pairs(psi, chi, chi2, delta, el1, el2):
    yield 1, psi, Neg(psi)
    yield 2, psi, And(psi, chi)
    yield 2, chi, And(psi, chi)
    yield 3, psi, K(psi)
    yield 4, implies(psi, P), Ann(psi, P)
    yield 5, implies(psi, Neg(Ann(psi, chi))), Ann(psi, Neg(chi))
    yield 6, Ann(psi, chi), Ann(psi, And(chi, chi2))
    yield 6, Ann(psi, chi2), Ann(psi, And(chi, chi2))
    yield 7, implies(psi, K(Ann(psi, chi))), Ann(psi, K(chi))
    yield 8, Ann(And(psi, Ann(psi, chi)), delta), Ann(psi, Ann(chi, delta))
    yield 9, Ann(psi, chi), Ann(psi, U(chi))
    yield 9, Ann(psi, Ann(el1, Neg(K(chi)))), Ann(psi, U(chi))
    yield 10, psi, U(psi)
    yield 10, Ann(el2, Neg(K(psi))), U(psi)


@cache
def criterion_5():
    def run():
        rng = random.Random(2024)
        violations = []
        seen = set()
        for _ in range(1000):
            full = [random_formula(rng, 4, ("p", "q"), (I, "j")) for _ in range(4)]
            el = [random_formula(rng, 4, ("p", "q"), (I, "j"), announcements=False,
                                 unknowability=False) for _ in range(2)]
            assert all(is_el(e) for e in el)
            for item, small, large in complexity_pairs(*full, *el):
                seen.add(item)
                if not less_complex(small, large):
                    violations.append(item)
        ok = not violations and seen == set(range(1, 11))
        return ok, f"items {sorted(seen)} on 1000 samples, {len(violations)} violations"
    ok, detail, secs = _timed(run)
    return report(5, ok and secs < 5, detail, secs)


# -- criterion 6 ---------------------------------------------------------------

@cache
def criterion_6():
    def run():
        rng = random.Random(6)
        ev = Evaluator()
        mismatches = 0
        bad_steps = 0
        for _ in range(1000):
            name = rng.choice(("AP", "AN", "AC", "AK", "AA"))
            env = {v: random_formula(rng, 2, unknowability=False) for v in ("phi", "psi", "chi")}
            env["p"] = Atom(rng.choice("pq"))
            inst = instantiate(name, env, I)
            lhs, rhs = inst.left.sub.left, inst.right.sub.left
            m = random_model(rng, 4)
            s = rng.choice(m.states)
            if ev.holds(m, s, lhs) != ev.holds(m, s, rhs):
                mismatches += 1
            current = random_formula(rng, 4)
            while (nxt := reduce_once(current)) is not None:
                if not measures(nxt) < measures(current):
                    bad_steps += 1
                if ev.mask(m, nxt) != ev.mask(m, current):
                    mismatches += 1
                current = nxt
        ok = mismatches == 0 and bad_steps == 0
        return ok, f"1000 triples: {mismatches} truth mismatches, {bad_steps} non-decreasing steps"
    ok, detail, secs = _timed(run)
    return report(6, ok, detail, secs)


# -- criterion 7 ---------------------------------------------------------------

def formula_battery(rng, count=50):
    nested = [parse(t) for t in ("U_i p", "U_i U_i ~K_i p", "U_i (~K_i p & ~K_i q)",
                                 "[U_i (p | q)] U_i B_i q", "K_i U_i B_i p", "U_i ~U_i ~p",
                                 "<U_i B_i p> U_j q", "U_j [p] U_i ~K_j q")]
    rest = [random_formula(rng, 3, ("p", "q"), (I, "j")) for _ in range(count - len(nested))]
    return nested + rest


@cache
def criterion_7():
    def run():
        rng = random.Random(7)
        battery = formula_battery(rng)
        ev = Evaluator()
        failures = []
        for n in range(200):
            m = random_model(rng, 4, (I, "j"), ("p", "q"))
            part = partition(m)
            if part.named_blocks() != naive_blocks(m):
                failures.append(f"model {n}: partition differs from oracle")
            for k in range(m.size):
                for mask in closed_masks(part, k):
                    if ev.mask(m, characteristic_of_set(m, part, mask)) != mask:
                        failures.append(f"model {n}: characteristic extension wrong")
            q = quotient(m, part)
            for f in battery:
                mask, qmask = ev.mask(m, f), ev.mask(q, f)
                if any((mask >> k & 1) != (qmask >> part.block_of[k] & 1) for k in range(m.size)):
                    failures.append(f"model {n}: quotient disagrees on {render(f)}")
        ok = not failures
        return ok, (f"200 random models <= 4 states, {len(battery)} formulas: "
                    + ("all agree" if ok else failures[0]))
    ok, detail, secs = _timed(run)
    return report(7, ok, detail, secs)


# -- criterion 8 ---------------------------------------------------------------

def u_factive_steps(agent="a"):
    au = parse(f"U_{agent} p -> (p & [top] ~K_{agent} p)")
    pl = parse(f"(U_{agent} p -> (p & [top] ~K_{agent} p)) -> (U_{agent} p -> p)")
    goal = parse(f"U_{agent} p -> p")
    return [Step(au, Axiom("AU")), Step(pl, Axiom("PL")), Step(goal, MP(1, 2))]


@cache
def criterion_8():
    def run():
        steps = u_factive_steps()
        good = check_proof(Proof(tuple(steps)))
        corrupted = check_proof(Proof((Step(steps[0].formula, Axiom("T")), *steps[1:])))
        corrupted_ok = (not corrupted.accepted and corrupted.steps[0].error == "AxiomMismatch")
        reports = check_all([s.formula for s in steps], 3, ("a",), ("p",))
        sound = all(r.valid for r in reports.values())
        ok = good.accepted and corrupted_ok and sound
        return ok, (f"accepted={good.accepted}, corrupted rejected with "
                    f"{corrupted.steps[0].error}, lines valid at n=3: {sound}")
    ok, detail, secs = _timed(run)
    return report(8, ok, detail, secs)


# -- criterion 9 ---------------------------------------------------------------

@cache
def criterion_9():
    start = time.perf_counter()
    parts = {n: fn()[0] for n, fn in ((3, criterion_3), (6, criterion_6), (8, criterion_8))}
    ok = all(parts.values())
    detail = ("soundness direction via criteria 3, 6 and 8: "
              + ", ".join(f"{n}={'PASS' if v else 'FAIL'}" for n, v in parts.items()))
    return report(9, ok, detail, time.perf_counter() - start)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 10)])
def test_criterion(criterion, capsys):
    ok, line = criterion()
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
