"""Truth of formulas on pointed models.

Everything is computed on extensions (bitmasks of states).  ``U_i phi``
holds at ``s`` when ``phi`` does and no truthful epistemic announcement
makes ``i`` know ``phi`` at ``s``.  The announcements are enumerated as
unions of autobisimulation blocks, which on a finite model are exactly the
extensions of epistemic formulas.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import islice
from typing import Iterable

from . import formula as fm
from .bisim import Partition, characteristic_of_set, closed_masks, partition
from .formula import Ann, And, Atom, Formula, Know, Neg, Top, Unk
from .kripke import Model, bits, enumerate_models, expand, restrict

__all__ = [
    "Evaluator", "Witness", "Verdict", "ValidityReport",
    "eval_formula", "extension", "eval_with_witness", "bounded_validity", "check_all",
]


class Evaluator:
    """Memoizing extension calculator.

    Results are keyed by model structure (state names ignored) and formula,
    so restricted submodels shared between parents are evaluated once.
    """

    def __init__(self, max_entries: int = 1_000_000):
        self.max_entries = max_entries
        self._ids: dict = {}
        self._ext: dict = {}
        self._parts: dict[int, Partition] = {}
        self._unions: dict[int, list[int]] = {}
        self._subs: dict = {}

    def clear(self):
        self._ids.clear()
        self._ext.clear()
        self._parts.clear()
        self._unions.clear()
        self._subs.clear()

    def _id(self, model: Model) -> int:
        return self._ids.setdefault(model.key, len(self._ids))

    def partition(self, model: Model) -> Partition:
        mid = self._id(model)
        part = self._parts.get(mid)
        if part is None:
            part = self._parts[mid] = partition(model)
        return part

    def _block_unions(self, model: Model, mid: int) -> list[int]:
        """``unions[c]`` is the union of the blocks selected by the bits of ``c``."""
        unions = self._unions.get(mid)
        if unions is None:
            blocks = self.partition(model).blocks
            unions = [0] * (1 << len(blocks))
            for choice in range(1, len(unions)):
                low = choice & -choice
                unions[choice] = unions[choice ^ low] | blocks[low.bit_length() - 1]
            self._unions[mid] = unions
        return unions

    def _restrict(self, model: Model, mid: int, keep: int) -> tuple[Model, int]:
        hit = self._subs.get((mid, keep))
        if hit is None:
            sub = restrict(model, keep)
            hit = self._subs[(mid, keep)] = (sub, self._id(sub))
        return hit

    def mask(self, model: Model, f: Formula) -> int:
        if len(self._ext) > self.max_entries:
            self.clear()
        return self._mask(model, self._id(model), f)

    def _mask(self, model: Model, mid: int, f: Formula) -> int:
        key = (mid, f)
        hit = self._ext.get(key)
        if hit is not None:
            return hit
        match f:
            case Atom(name):
                result = model.val(name)
            case Top():
                result = model.full
            case Neg(sub):
                result = model.full & ~self._mask(model, mid, sub)
            case And(left, right):
                result = self._mask(model, mid, left)
                if result:
                    result &= self._mask(model, mid, right)
            case Know(agent, sub):
                row = model.succ[model.agent_index(agent)]
                inner = self._mask(model, mid, sub)
                result = 0
                for k, succ in enumerate(row):
                    if not succ & ~inner:
                        result |= 1 << k
            case Ann(ann, body):
                where = self._mask(model, mid, ann)
                if where == 0:
                    result = model.full
                elif where == model.full:
                    result = self._mask(model, mid, body)
                else:
                    sub, sub_id = self._restrict(model, mid, where)
                    inside = self._mask(sub, sub_id, body)
                    result = (model.full & ~where) | expand(model.size, where, inside)
            case Unk(agent, sub):
                result = self._unknowable(model, mid, agent, sub)
            case _:
                raise TypeError(f"not a formula: {f!r}")
        self._ext[key] = result
        return result

    def _unknowable(self, model: Model, mid: int, agent: str, sub: Formula) -> int:
        model.agent_index(agent)
        truth = self._mask(model, mid, sub)
        if truth == 0:
            return 0
        known = Know(agent, sub)
        learnable = 0
        for keep in islice(self._block_unions(model, mid), 1, None):
            if not keep & truth & ~learnable:
                continue
            if keep == model.full:
                learnable |= self._mask(model, mid, known)
            else:
                restricted, sub_id = self._restrict(model, mid, keep)
                inside = self._mask(restricted, sub_id, known)
                learnable |= expand(model.size, keep, inside)
        return truth & ~learnable

    def holds(self, model: Model, state: str, f: Formula) -> bool:
        return bool(self.mask(model, f) >> model.index(state) & 1)


def eval_formula(model: Model, state: str, f: Formula, evaluator: Evaluator | None = None) -> bool:
    """Truth of ``f`` at ``state``."""
    return (evaluator or Evaluator()).holds(model, state, f)


def extension(model: Model, f: Formula, evaluator: Evaluator | None = None) -> frozenset[str]:
    return model.names((evaluator or Evaluator()).mask(model, f))


@dataclass(frozen=True)
class Witness:
    """A truthful announcement after which the agent knows the claimed unknowable."""

    states: frozenset[str]
    formula: Formula


@dataclass(frozen=True)
class Verdict:
    value: bool
    witness: Witness | None = None


def eval_with_witness(model: Model, state: str, f: Formula,
                      evaluator: Evaluator | None = None) -> Verdict:
    """Evaluate ``f``; for a refuted outermost ``U_i chi`` also name the announcement.

    The witness set is the first union of blocks (pivot block first) after
    which ``K_i chi`` holds at ``state``, paired with an epistemic formula
    whose extension is that set.
    """
    ev = evaluator or Evaluator()
    k = model.index(state)
    value = ev.holds(model, state, f)
    if value or not isinstance(f, Unk) or not ev.holds(model, state, f.sub):
        return Verdict(value)
    part = ev.partition(model)
    known = Know(f.agent, f.sub)
    for keep in closed_masks(part, k):
        sub = restrict(model, keep)
        if ev.holds(sub, state, known):
            return Verdict(False, Witness(model.names(keep), characteristic_of_set(model, part, keep)))
    raise AssertionError("refuted U without a defeating announcement")  # pragma: no cover


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    models_checked: int
    countermodel: Model | None = None
    state: str | None = None

    def describe(self) -> str:
        if self.valid:
            return f"valid up to bound ({self.models_checked} models checked)"
        return f"countermodel found after {self.models_checked} models, at state {self.state}"


def _bounds(f: Formula, agents, atoms):
    agents = tuple(sorted(fm.agents(f))) if agents is None else tuple(agents)
    atoms = tuple(sorted(fm.atoms(f))) if atoms is None else tuple(atoms)
    return agents, atoms


def _first_failure(f: Formula, models: Iterable[Model], evaluator: Evaluator):
    checked = 0
    for model in models:
        checked += 1
        bad = model.full & ~evaluator.mask(model, f)
        if bad:
            return checked, model, model.states[next(bits(bad))]
    return checked, None, None


def _check_chunk(args):
    f, models = args
    return _first_failure(f, models, Evaluator())


def _chunks(iterable, size):
    it = iter(iterable)
    while chunk := list(islice(it, size)):
        yield chunk


def bounded_validity(f: Formula, max_states: int = 3, agents=None, atoms=None,
                     frame_class: str = "reflexive", cap: int | None = None, jobs: int = 1,
                     evaluator: Evaluator | None = None) -> ValidityReport:
    """Check ``f`` at every state of every enumerated model.

    ``agents`` and ``atoms`` default to those occurring in ``f``.  The
    first countermodel in enumeration order is reported, also when the
    models are spread over ``jobs`` worker processes.
    """
    agents, atoms = _bounds(f, agents, atoms)
    models = enumerate_models(max_states, agents, atoms, frame_class, cap)
    if jobs <= 1:
        checked, model, state = _first_failure(f, models, evaluator or Evaluator())
        return ValidityReport(model is None, checked, model, state)
    total = 0
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for checked, model, state in pool.map(_check_chunk, ((f, c) for c in _chunks(models, 256))):
            total += checked
            if model is not None:
                return ValidityReport(False, total, model, state)
    return ValidityReport(True, total)


def _failures_in_chunk(args):
    formulas, models, offset = args
    ev = Evaluator()
    found = {}
    for n, model in enumerate(models, start=offset + 1):
        for k, f in enumerate(formulas):
            if k in found:
                continue
            bad = model.full & ~ev.mask(model, f)
            if bad:
                found[k] = (n, model, model.states[next(bits(bad))])
    return len(models), found


def _numbered_chunks(models, size):
    offset = 0
    for chunk in _chunks(models, size):
        yield chunk, offset
        offset += len(chunk)


def check_all(formulas: Iterable[Formula], max_states: int = 3, agents=("i",), atoms=("p", "q"),
              frame_class: str = "reflexive", cap: int | None = None,
              evaluator: Evaluator | None = None, jobs: int = 1) -> dict[Formula, ValidityReport]:
    """Bounded validity of many formulas over one shared model enumeration.

    Each failing formula reports its first countermodel in enumeration
    order, whatever the number of worker processes.
    """
    formulas = list(dict.fromkeys(formulas))
    models = enumerate_models(max_states, agents, atoms, frame_class, cap)
    failures: dict[int, tuple[int, Model, str]] = {}
    checked = 0
    if jobs <= 1:
        ev = evaluator or Evaluator()
        for model in models:
            checked += 1
            for k, f in enumerate(formulas):
                if k in failures:
                    continue
                bad = model.full & ~ev.mask(model, f)
                if bad:
                    failures[k] = (checked, model, model.states[next(bits(bad))])
    else:
        work = ((formulas, chunk, offset) for chunk, offset in _numbered_chunks(models, 2048))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for count, found in pool.map(_failures_in_chunk, work):
                checked += count
                for k, hit in found.items():
                    if k not in failures or hit[0] < failures[k][0]:
                        failures[k] = hit
    return {
        f: ValidityReport(False, *failures[k]) if k in failures else ValidityReport(True, checked)
        for k, f in enumerate(formulas)
    }
